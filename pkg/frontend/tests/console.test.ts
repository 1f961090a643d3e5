import { afterEach, describe, expect, it, vi } from "vitest";

import { ElicitationConsole } from "../src/console.js";
import { SessionClient, type Snapshot, type WireEvent, type WireQuery } from "../src/protocol.js";

const QUERY: WireQuery = {
  node: 0,
  state: ["(On A B)", "(OnTable B)", "(Space Table)"],
  task: "(Clear B)",
  methods: [
    { id: "Done", L: 2, D: 1, A: 0, score: 0.83, p: 0.4 },
    { id: "PutOnTable", L: 2, D: 1, A: 0, score: 0.83, p: 0.4 },
    { id: "ShoveOff", L: 4, D: 2, A: 0, score: 0.53, p: 0.2 },
  ],
  entropy: 1.05,
};

function snapshot(overrides: Partial<Snapshot>): Snapshot {
  return {
    v: 1,
    id: "s-1",
    lifecycle: "running",
    node: 0,
    state: ["(On A B)", "(OnTable B)", "(Space Table)"],
    plan: [],
    frontier: null,
    query: null,
    result: null,
    nodes_expanded: 1,
    ...overrides,
  };
}

/** Scripted same-origin service: snapshots are consumed one per poll. */
class FakeService {
  readonly snapshots: Snapshot[] = [];
  eventsLifecycle: string | null = null;
  respondStatus = 200;
  respondBody: Record<string, unknown> = { v: 1, accepted: true };
  readonly respondCalls: unknown[] = [];

  install(): void {
    vi.stubGlobal("fetch", async (url: string, init?: RequestInit): Promise<Response> => {
      const reply = (status: number, payload: unknown): Response =>
        new Response(JSON.stringify(payload), {
          status,
          headers: { "content-type": "application/json" },
        });
      const current = this.snapshots[0];
      if (!current) throw new Error(`no snapshot staged for ${url}`);
      if (url.includes("/events")) {
        const events: WireEvent[] = [];
        return reply(200, {
          v: 1,
          events,
          next: 0,
          lifecycle: this.eventsLifecycle ?? current.lifecycle,
        });
      }
      if (url.includes("/snapshot")) {
        if (this.snapshots.length > 1) this.snapshots.shift();
        return reply(200, current);
      }
      if (url.includes("/respond")) {
        this.respondCalls.push(JSON.parse((init?.body as string) ?? "null"));
        return reply(this.respondStatus, this.respondBody);
      }
      throw new Error(`unexpected request ${url}`);
    });
  }
}

function mount(): { ui: ElicitationConsole; root: HTMLElement; service: FakeService } {
  const service = new FakeService();
  service.install();
  const root = document.createElement("div");
  document.body.appendChild(root);
  const ui = new ElicitationConsole(new SessionClient(""), root);
  ui.attach("s-1");
  return { ui, root, service };
}

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

afterEach(() => {
  vi.unstubAllGlobals();
  document.body.textContent = "";
});

describe("ElicitationConsole", () => {
  it("opens compose controls when a query arrives and keeps edits across polls", async () => {
    const { ui, root, service } = mount();
    service.snapshots.push(snapshot({ lifecycle: "awaiting_expert", query: QUERY }));

    await ui.refresh();
    const compose = root.querySelector("#compose-panel");
    expect(compose?.querySelectorAll(".condition-toggle")).toHaveLength(3);
    expect(compose?.querySelectorAll(".pick-row")).toHaveLength(3);

    const name = compose?.querySelector<HTMLInputElement>("input.pref-name");
    expect(name).not.toBeNull();
    name!.value = "MyRule";
    name!.dispatchEvent(new Event("input", { bubbles: true }));

    await ui.refresh();
    const after = root.querySelector<HTMLInputElement>("#compose-panel input.pref-name");
    expect(after?.value).toBe("MyRule");
  });

  it("disables submit until the buffer validates", async () => {
    const { ui, root, service } = mount();
    service.snapshots.push(snapshot({ lifecycle: "awaiting_expert", query: QUERY }));
    await ui.refresh();

    const submit = root.querySelector<HTMLButtonElement>("#compose-panel button.submit");
    expect(submit?.disabled).toBe(true);

    const prefer = root.querySelector<HTMLButtonElement>(
      '#compose-panel .pick-prefer[data-id="PutOnTable"]',
    );
    prefer?.click();
    const again = root.querySelector<HTMLButtonElement>("#compose-panel button.submit");
    expect(again?.disabled).toBe(false);
    expect(root.querySelector("#compose-panel .preview")?.textContent).toContain(
      "(:prefer PutOnTable)",
    );
  });

  it("shows a service rejection inline and keeps the buffer", async () => {
    const { ui, root, service } = mount();
    service.snapshots.push(snapshot({ lifecycle: "awaiting_expert", query: QUERY }));
    await ui.refresh();

    root
      .querySelector<HTMLButtonElement>('#compose-panel .pick-prefer[data-id="PutOnTable"]')
      ?.click();
    service.respondStatus = 400;
    service.respondBody = { v: 1, error: "preference 'X' names unknown method" };
    root.querySelector<HTMLButtonElement>("#compose-panel button.submit")?.click();
    await flush();

    expect(root.querySelector("#compose-panel .submit-error")?.textContent).toBe(
      "preference 'X' names unknown method",
    );
    expect(root.querySelector("#compose-panel .pick-row")).not.toBeNull();

    service.respondStatus = 200;
    service.respondBody = { v: 1, accepted: true };
    root.querySelector<HTMLButtonElement>("#compose-panel button.submit")?.click();
    await flush();
    expect(root.querySelector("#compose-panel .pick-row")).toBeNull();
    expect(service.respondCalls).toHaveLength(2);
  });

  it("declines with one click", async () => {
    const { ui, root, service } = mount();
    service.snapshots.push(snapshot({ lifecycle: "awaiting_expert", query: QUERY }));
    await ui.refresh();

    root.querySelector<HTMLButtonElement>("#compose-panel button.decline")?.click();
    await flush();
    expect(service.respondCalls).toEqual([{ decline: true }]);
    expect(root.querySelector("#compose-panel .pick-row")).toBeNull();
  });

  it("clears the compose panel when the planner moves on", async () => {
    const { ui, root, service } = mount();
    service.snapshots.push(
      snapshot({ lifecycle: "awaiting_expert", query: QUERY }),
      snapshot({ lifecycle: "running", query: null, nodes_expanded: 3 }),
    );
    await ui.refresh();
    expect(root.querySelector("#compose-panel h2")).not.toBeNull();
    await ui.refresh();
    expect(root.querySelector("#compose-panel h2")).toBeNull();
  });

  it("flags a stale event log and a failed result", async () => {
    const { ui, root, service } = mount();
    service.snapshots.push(
      snapshot({
        lifecycle: "finished",
        result: {
          solved: false,
          plan: [],
          plan_len: null,
          reason: "exhausted",
          queries: 0,
          prefs: 0,
          nodes: 9,
          wall_ms: 1.5,
        },
      }),
    );
    service.eventsLifecycle = "running";
    await ui.refresh();
    expect(root.querySelector("#status-bar .badge.stale")).not.toBeNull();
    expect(root.querySelector("#status-bar .badge.failed")?.textContent).toBe(
      "no plan: exhausted",
    );
  });

  it("renders the final plan from the result once finished", async () => {
    const { ui, root, service } = mount();
    service.snapshots.push(
      snapshot({
        lifecycle: "finished",
        plan: [],
        result: {
          solved: true,
          plan: ["(shove F A D)", "(put-on-table A B)"],
          plan_len: 2,
          reason: null,
          queries: 0,
          prefs: 0,
          nodes: 7,
          wall_ms: 2.25,
        },
      }),
    );
    const lifecycle = await ui.refresh();
    expect(lifecycle).toBe("finished");
    const steps = [...root.querySelectorAll("#plan-panel .step")].map((li) => li.textContent);
    expect(steps).toEqual(["(shove F A D)", "(put-on-table A B)"]);
    expect(root.querySelector("#plan-panel .badge.terminal")).not.toBeNull();
  });
});
