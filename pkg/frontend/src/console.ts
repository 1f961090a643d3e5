/** The elicitation console: one planner session, five panels.
 *
 * Polls the session service for events and a state snapshot, renders
 * the read-only panels wholesale, and manages a compose buffer for the
 * query panel. The compose controls are keyed by the queried node so a
 * half-written preference survives refreshes; they are rebuilt only
 * when the planner moves on to a different question.
 */

import {
  ProtocolError,
  SessionClient,
  type SessionParams,
  type Snapshot,
  type WireEvent,
  type WireQuery,
} from "./protocol.js";
import {
  bufferFromQuery,
  constants,
  emit,
  generalize,
  toggleCondition,
  togglePick,
  validate,
  type ComposeBuffer,
} from "./compose.js";
import { renderEvents, renderPlan, renderQuery, renderState } from "./render.js";

const TERMINAL = new Set(["finished", "failed"]);

interface Panels {
  status: HTMLElement;
  state: HTMLElement;
  plan: HTMLElement;
  query: HTMLElement;
  compose: HTMLElement;
  events: HTMLElement;
}

function section(parent: HTMLElement, id: string): HTMLElement {
  const node = document.createElement("section");
  node.id = id;
  parent.appendChild(node);
  return node;
}

export class ElicitationConsole {
  private readonly panels: Panels;
  private sessionId: string | null = null;
  private nextEvent = 0;
  private readonly log: WireEvent[] = [];
  private buffer: ComposeBuffer | null = null;
  private composeNode: number | null = null;
  private activeQuery: WireQuery | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(private readonly client: SessionClient, readonly root: HTMLElement) {
    root.textContent = "";
    const status = document.createElement("div");
    status.id = "status-bar";
    root.appendChild(status);
    const grid = document.createElement("div");
    grid.className = "panels";
    root.appendChild(grid);
    this.panels = {
      status,
      state: section(grid, "state-panel"),
      plan: section(grid, "plan-panel"),
      query: section(grid, "query-panel"),
      compose: section(grid, "compose-panel"),
      events: section(grid, "events-panel"),
    };
  }

  /** Create a fresh session, start its search, and attach to it. */
  async create(params: SessionParams): Promise<string> {
    const id = await this.client.create(params);
    await this.client.start(id);
    this.attach(id);
    return id;
  }

  /** Point the console at an existing session. */
  attach(id: string): void {
    this.sessionId = id;
    this.nextEvent = 0;
    this.log.length = 0;
    this.buffer = null;
    this.composeNode = null;
    this.activeQuery = null;
  }

  /** One poll cycle. Returns the snapshot lifecycle. */
  async refresh(): Promise<string> {
    const id = this.requireSession();
    const page = await this.client.events(id, this.nextEvent);
    this.log.push(...page.events);
    this.nextEvent = page.next;
    const snapshot = await this.client.snapshot(id);
    this.render(snapshot, page.lifecycle);
    return snapshot.lifecycle;
  }

  /** Poll until the session reaches a terminal lifecycle. */
  start(intervalMs = 400): void {
    this.stop();
    this.timer = setInterval(() => {
      void this.refresh()
        .then((lifecycle) => {
          if (TERMINAL.has(lifecycle)) this.stop();
        })
        .catch(() => this.stop());
    }, intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  private requireSession(): string {
    if (this.sessionId === null) throw new Error("no session attached");
    return this.sessionId;
  }

  private render(snapshot: Snapshot, eventsLifecycle: string): void {
    const terminal = TERMINAL.has(snapshot.lifecycle);
    this.renderStatus(snapshot, eventsLifecycle);
    renderState(this.panels.state, snapshot.state);
    const plan = snapshot.result?.solved ? snapshot.result.plan : snapshot.plan;
    renderPlan(this.panels.plan, plan, terminal);
    renderQuery(this.panels.query, snapshot.query);
    renderEvents(this.panels.events, this.log);
    this.syncCompose(snapshot.query);
  }

  private renderStatus(snapshot: Snapshot, eventsLifecycle: string): void {
    const bar = this.panels.status;
    bar.textContent = "";
    const label = document.createElement("span");
    label.className = "session-label";
    label.textContent =
      `session ${snapshot.id} | ${snapshot.lifecycle} | ` +
      `${snapshot.nodes_expanded} nodes expanded`;
    bar.appendChild(label);
    if (eventsLifecycle !== snapshot.lifecycle) {
      const stale = document.createElement("span");
      stale.className = "badge stale";
      stale.textContent = "event log catching up";
      bar.appendChild(stale);
    }
    if (snapshot.result && !snapshot.result.solved) {
      const failed = document.createElement("span");
      failed.className = "badge failed";
      failed.textContent = `no plan: ${snapshot.result.reason ?? "unknown"}`;
      bar.appendChild(failed);
    }
  }

  private syncCompose(query: WireQuery | null): void {
    if (query === null) {
      if (this.composeNode !== null) this.clearCompose();
      return;
    }
    if (this.composeNode === query.node) return;
    this.composeNode = query.node;
    this.activeQuery = query;
    this.buffer = bufferFromQuery(query);
    this.renderCompose();
  }

  private clearCompose(): void {
    this.composeNode = null;
    this.activeQuery = null;
    this.buffer = null;
    this.panels.compose.textContent = "";
  }

  private renderCompose(): void {
    const buffer = this.buffer;
    const query = this.activeQuery;
    const panel = this.panels.compose;
    panel.textContent = "";
    if (!buffer || !query) return;

    const heading = document.createElement("h2");
    heading.textContent = "compose a preference";
    panel.appendChild(heading);

    const nameLabel = document.createElement("label");
    nameLabel.textContent = "name ";
    const nameInput = document.createElement("input");
    nameInput.className = "pref-name";
    nameInput.value = buffer.name;
    nameInput.addEventListener("input", () => {
      buffer.name = nameInput.value;
      this.updateDerived();
    });
    nameLabel.appendChild(nameInput);
    panel.appendChild(nameLabel);

    const conditions = document.createElement("fieldset");
    conditions.className = "conditions";
    const legend = document.createElement("legend");
    legend.textContent = "when these hold";
    conditions.appendChild(legend);
    buffer.conditions.forEach((condition, index) => {
      const label = document.createElement("label");
      label.className = "condition";
      const box = document.createElement("input");
      box.type = "checkbox";
      box.className = "condition-toggle";
      box.dataset.index = String(index);
      box.checked = condition.kept;
      box.addEventListener("change", () => {
        toggleCondition(buffer, index);
        this.renderCompose();
      });
      label.appendChild(box);
      label.appendChild(document.createTextNode(condition.text));
      conditions.appendChild(label);
    });
    panel.appendChild(conditions);

    const generalizeRow = document.createElement("div");
    generalizeRow.className = "constants";
    generalizeRow.appendChild(document.createTextNode("generalize: "));
    for (const constant of constants(buffer)) {
      const button = document.createElement("button");
      button.type = "button";
      button.className = "generalize";
      button.dataset.constant = constant;
      button.textContent = constant;
      button.addEventListener("click", () => {
        generalize(buffer, constant);
        this.renderCompose();
      });
      generalizeRow.appendChild(button);
    }
    panel.appendChild(generalizeRow);

    const picks = document.createElement("div");
    picks.className = "picks";
    for (const method of query.methods) {
      const row = document.createElement("div");
      row.className = "pick-row";
      row.dataset.method = method.id;
      const name = document.createElement("span");
      name.textContent = method.id;
      row.appendChild(name);
      for (const side of ["prefer", "avoid"] as const) {
        const button = document.createElement("button");
        button.type = "button";
        button.className = `pick-${side}`;
        button.dataset.id = method.id;
        button.textContent = side;
        if (buffer[side].includes(method.id)) button.classList.add("picked");
        button.addEventListener("click", () => {
          togglePick(buffer, side, method.id);
          this.renderCompose();
        });
        row.appendChild(button);
      }
      picks.appendChild(row);
    }
    panel.appendChild(picks);

    const escape = document.createElement("details");
    escape.className = "raw-escape";
    const summary = document.createElement("summary");
    summary.textContent = "write the preference by hand";
    escape.appendChild(summary);
    const rawText = document.createElement("textarea");
    rawText.className = "raw-text";
    rawText.value = buffer.raw ?? "";
    rawText.addEventListener("input", () => {
      buffer.raw = rawText.value.trim() === "" ? null : rawText.value;
      this.updateDerived();
    });
    escape.appendChild(rawText);
    panel.appendChild(escape);

    const preview = document.createElement("pre");
    preview.className = "preview";
    panel.appendChild(preview);

    const defects = document.createElement("ul");
    defects.className = "defects";
    panel.appendChild(defects);

    const error = document.createElement("p");
    error.className = "submit-error";
    panel.appendChild(error);

    const actions = document.createElement("div");
    actions.className = "actions";
    const submit = document.createElement("button");
    submit.type = "button";
    submit.className = "submit";
    submit.textContent = "send preference";
    submit.addEventListener("click", () => void this.submit());
    actions.appendChild(submit);
    const decline = document.createElement("button");
    decline.type = "button";
    decline.className = "decline";
    decline.textContent = "decline";
    decline.addEventListener("click", () => void this.decline());
    actions.appendChild(decline);
    panel.appendChild(actions);

    this.updateDerived();
  }

  /** Refresh preview, defect list, and submit availability in place. */
  private updateDerived(): void {
    const buffer = this.buffer;
    const query = this.activeQuery;
    const panel = this.panels.compose;
    if (!buffer || !query) return;
    const preview = panel.querySelector<HTMLElement>(".preview");
    if (preview) preview.textContent = emit(buffer);
    const list = panel.querySelector<HTMLElement>(".defects");
    const problems = validate(buffer, query);
    if (list) {
      list.textContent = "";
      for (const defect of problems) {
        const item = document.createElement("li");
        item.textContent = defect.message;
        list.appendChild(item);
      }
    }
    const submit = panel.querySelector<HTMLButtonElement>("button.submit");
    if (submit) submit.disabled = problems.length > 0;
  }

  private async submit(): Promise<void> {
    const buffer = this.buffer;
    if (!buffer || this.sessionId === null) return;
    const text = emit(buffer);
    try {
      await this.client.respond(this.sessionId, text);
      this.clearCompose();
    } catch (error) {
      if (error instanceof ProtocolError) {
        this.showSubmitError(error.message);
        return;
      }
      throw error;
    }
  }

  private async decline(): Promise<void> {
    if (this.sessionId === null) return;
    try {
      await this.client.decline(this.sessionId);
      this.clearCompose();
    } catch (error) {
      if (error instanceof ProtocolError) {
        this.showSubmitError(error.message);
        return;
      }
      throw error;
    }
  }

  private showSubmitError(message: string): void {
    const slot = this.panels.compose.querySelector<HTMLElement>(".submit-error");
    if (slot) slot.textContent = message;
  }
}
