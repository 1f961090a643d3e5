/** End-to-end: spawn the real planner service, attach the console to a
 * live session on the six-block clearing problem, compose a
 * table-moves preference through the DOM controls, and check that the
 * finished plan starts with a put-on-table step credited to that
 * method.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import process from "node:process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ElicitationConsole } from "../src/console.js";
import { ProtocolError, SessionClient, type WireEvent } from "../src/protocol.js";

// vitest runs from the package root; jsdom rewrites import.meta.url
const FIXTURES = join(process.cwd(), "..", "src", "pgplan", "fixtures");
const PORT = 20000 + Math.floor(Math.random() * 20000);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;
let serverLog = "";

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitForService(client: SessionClient): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      await client.snapshot("nosuch");
      return;
    } catch (error) {
      if (error instanceof ProtocolError) return; // any HTTP reply means up
      await sleep(150);
    }
  }
  throw new Error(`service never came up on ${BASE}\n${serverLog}`);
}

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "pgplan", "serve", "--host", "127.0.0.1", "--port", String(PORT)],
    { stdio: ["ignore", "pipe", "pipe"], env: process.env },
  );
  server.stdout?.on("data", (chunk: Buffer) => (serverLog += chunk.toString()));
  server.stderr?.on("data", (chunk: Buffer) => (serverLog += chunk.toString()));
  await waitForService(new SessionClient(BASE));
});

afterAll(() => {
  server?.kill("SIGTERM");
});

/** Click checked condition boxes until only the named atom is kept. */
function keepOnlyCondition(root: HTMLElement, atom: string): void {
  for (;;) {
    const labels = [...root.querySelectorAll("#compose-panel label.condition")];
    const target = labels.find(
      (label) =>
        !(label.textContent ?? "").includes(atom) &&
        label.querySelector<HTMLInputElement>("input")?.checked,
    );
    if (!target) return;
    target.querySelector<HTMLInputElement>("input")?.click();
  }
}

function click(root: HTMLElement, selector: string): void {
  const button = root.querySelector<HTMLButtonElement>(selector);
  if (!button) throw new Error(`missing control ${selector}`);
  button.click();
}

/** Keep only (On A B), generalize both blocks, prefer table moves.
 * Tying the condition to the block under the target keeps the
 * preference from endorsing gratuitous table moves elsewhere.
 */
function composeTableMoves(root: HTMLElement): string {
  keepOnlyCondition(root, "(On A B)");
  click(root, '#compose-panel button.generalize[data-constant="A"]');
  click(root, '#compose-panel button.generalize[data-constant="B"]');
  click(root, '#compose-panel .pick-prefer[data-id="PutOnTable"]');
  click(root, '#compose-panel .pick-avoid[data-id="ShoveOff"]');
  click(root, '#compose-panel .pick-avoid[data-id="StackonE"]');
  const name = root.querySelector<HTMLInputElement>("#compose-panel input.pref-name");
  if (!name) throw new Error("missing name input");
  name.value = "TableMoves";
  name.dispatchEvent(new Event("input", { bubbles: true }));
  const preview = root.querySelector("#compose-panel .preview")?.textContent ?? "";
  expect(preview).toBe(
    "(pref TableMoves ((On ?a ?b)) (Clear ?b) (:prefer PutOnTable) (:avoid ShoveOff StackonE))",
  );
  const submit = root.querySelector<HTMLButtonElement>("#compose-panel button.submit");
  if (!submit || submit.disabled) throw new Error("submit not available");
  submit.click();
  return preview;
}

describe("console against a live session", () => {
  it("composes a table-moves preference and the plan follows it", async () => {
    const domain = readFileSync(join(FIXTURES, "blocksworld.dom"), "utf8");
    const problem = readFileSync(join(FIXTURES, "bw-01.prob"), "utf8");
    const client = new SessionClient(BASE);
    const root = document.createElement("div");
    document.body.appendChild(root);
    const ui = new ElicitationConsole(client, root);
    const id = await ui.create({
      domain,
      problem,
      strategy: "active",
      expert_timeout: 600,
    });

    const answered = new Set<number>();
    let composedText = "";
    let lifecycle = "";
    const deadline = Date.now() + 55_000;
    while (Date.now() < deadline) {
      lifecycle = await ui.refresh();
      if (lifecycle === "finished" || lifecycle === "failed") break;
      if (lifecycle === "awaiting_expert") {
        const head = root.querySelector("#query-panel .query-head")?.textContent ?? "";
        const match = /node (\d+):/.exec(head);
        const node = match ? Number(match[1]) : -1;
        if (node >= 0 && !answered.has(node)) {
          if (answered.size === 0) {
            expect(head).toContain("(Clear B)");
            composedText = composeTableMoves(root);
          } else {
            click(root, "#compose-panel button.decline");
          }
          answered.add(node);
          await sleep(0);
        }
      }
      await sleep(50);
    }

    expect(lifecycle).toBe("finished");
    expect(answered.size).toBeGreaterThanOrEqual(1);

    // the console's plan panel shows the finished two-step plan
    const steps = [...root.querySelectorAll("#plan-panel .step")].map((li) => li.textContent);
    expect(steps).toEqual(["(put-on-table F A)", "(put-on-table A B)"]);
    expect(root.querySelector("#plan-panel .badge.terminal")).not.toBeNull();
    expect(root.querySelector("#status-bar .badge.failed")).toBeNull();

    // the session result agrees and credits the elicited preference
    const snapshot = await client.snapshot(id);
    expect(snapshot.result?.solved).toBe(true);
    expect(snapshot.result?.queries).toBe(answered.size);
    expect(snapshot.result?.prefs).toBe(1);

    const page = await client.events(id, 0);
    const received = page.events.filter(
      (event) => event.type === "preference_received" && event.preference !== null,
    );
    expect(received).toHaveLength(1);
    expect(received[0]?.preference).toBe(composedText);

    const found = page.events.find((event) => event.type === "plan_found");
    expect(found).toBeDefined();
    const plan = (found as WireEvent).plan as { step: string; lineage: string[] }[];
    expect(plan[0]?.step).toBe("(put-on-table F A)");
    expect(plan[0]?.lineage).toContain("PutOnTable");

    // the event log panel narrates the run
    const log = [...root.querySelectorAll("#events-panel .event-log li")].map(
      (li) => li.textContent ?? "",
    );
    expect(log.some((line) => line.includes("query posed"))).toBe(true);
    expect(log.at(-1)).toContain("plan found (2 steps");
  }, 60_000);
});
