/** DOM rendering for the three console panels.
 *
 * Pure functions from wire data to elements: the state panel (grouped
 * atoms, plus a stack diagram when the domain speaks the blocks
 * vocabulary), the partial-plan panel, and the query panel's method
 * table. All panels are replaced wholesale on every refresh; the
 * compose controls live elsewhere because they hold user input.
 */

import type { MethodRow, WireEvent, WireQuery } from "./protocol.js";

function clear(container: HTMLElement): void {
  container.textContent = "";
}

function child(parent: HTMLElement, tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  parent.appendChild(node);
  return node;
}

function parts(atom: string): string[] {
  return atom.replace(/[()]/g, " ").trim().split(/\s+/);
}

interface Stacks {
  columns: string[][];
  tableSpace: boolean;
}

/** Derive block columns (bottom to top) from On/OnTable atoms. */
export function deriveStacks(atoms: string[]): Stacks | null {
  const onTable: string[] = [];
  const above = new Map<string, string>();
  let sawBlocksVocabulary = false;
  let tableSpace = false;
  for (const atom of atoms) {
    const [head, ...args] = parts(atom);
    if (head === "OnTable" && args.length === 1 && args[0]) {
      onTable.push(args[0]);
      sawBlocksVocabulary = true;
    } else if (head === "On" && args.length === 2 && args[0] && args[1]) {
      above.set(args[1], args[0]);
      sawBlocksVocabulary = true;
    } else if (head === "Space") {
      tableSpace = true;
    }
  }
  if (!sawBlocksVocabulary) return null;
  const columns = onTable.sort().map((base) => {
    const column = [base];
    let top = base;
    while (above.has(top)) {
      top = above.get(top) as string;
      column.push(top);
    }
    return column;
  });
  return { columns, tableSpace };
}

export function renderState(container: HTMLElement, atoms: string[]): void {
  clear(container);
  child(container, "h2", undefined, "state");
  if (atoms.length === 0) {
    child(container, "p", "notice", "state is empty");
    return;
  }
  const stacks = deriveStacks(atoms);
  if (stacks) {
    const diagram = child(container, "div", "stack-diagram");
    for (const column of stacks.columns) {
      const stack = child(diagram, "div", "stack");
      stack.dataset.blocks = column.join(",");
      for (const block of [...column].reverse()) {
        child(stack, "div", "block", block);
      }
    }
    if (stacks.tableSpace) {
      child(diagram, "div", "table-space", "table space available");
    }
  }
  const groups = new Map<string, string[]>();
  for (const atom of atoms) {
    const head = parts(atom)[0] ?? "";
    const bucket = groups.get(head) ?? [];
    bucket.push(atom);
    groups.set(head, bucket);
  }
  const list = child(container, "dl", "atom-groups");
  for (const predicate of [...groups.keys()].sort()) {
    child(list, "dt", undefined, predicate);
    child(list, "dd", undefined, (groups.get(predicate) ?? []).join(" "));
  }
}

export function renderPlan(container: HTMLElement, plan: string[], terminal: boolean): void {
  clear(container);
  const heading = child(container, "h2", undefined, "partial plan");
  if (terminal) child(heading, "span", "badge terminal", "final");
  if (plan.length === 0) {
    child(container, "p", "notice", "no steps yet");
    return;
  }
  const list = child(container, "ol", "plan-steps");
  for (const step of plan) {
    child(list, "li", "step", step);
  }
}

function cell(row: HTMLElement, text: string): void {
  child(row, "td", undefined, text);
}

function count(value: number | null | undefined): string {
  if (value === undefined) return "-";
  if (value === null) return "dead";
  return String(value);
}

function real(value: number | null | undefined): string {
  if (value === undefined) return "-";
  if (value === null) return "dead";
  return value.toFixed(4);
}

export function renderMethods(container: HTMLElement, methods: MethodRow[]): void {
  const table = child(container, "table", "methods");
  const head = child(child(table, "thead"), "tr");
  for (const label of ["method", "L", "D", "A", "score", "p"]) {
    child(head, "th", undefined, label);
  }
  const body = child(table, "tbody");
  for (const method of methods) {
    const row = child(body, "tr", "method-row");
    row.dataset.method = method.id;
    cell(row, method.id);
    cell(row, count(method.L));
    cell(row, count(method.D));
    cell(row, count(method.A));
    cell(row, real(method.score));
    cell(row, real(method.p));
  }
}

export function renderQuery(container: HTMLElement, query: WireQuery | null): void {
  clear(container);
  child(container, "h2", undefined, "query");
  if (query === null) {
    child(container, "p", "notice", "the planner is not asking anything");
    return;
  }
  child(
    container, "p", "query-head",
    `node ${query.node}: which method for ${query.task}? ` +
    `(entropy ${query.entropy.toFixed(4)})`,
  );
  renderMethods(container, query.methods);
}

export function renderEvents(container: HTMLElement, events: WireEvent[]): void {
  clear(container);
  child(container, "h2", undefined, "events");
  const list = child(container, "ul", "event-log");
  for (const event of events) {
    const line = child(list, "li", `event event-${event.type}`);
    line.textContent = describe(event);
  }
}

function describe(event: WireEvent): string {
  switch (event.type) {
    case "node_expanded":
      return `node ${event.node}: expanding ${event.task} (depth ${event.depth})`;
    case "query_posed":
      return `node ${event.node}: query posed for ${event.task}`;
    case "preference_received":
      return event.preference === null
        ? `node ${event.node}: declined`
        : `node ${event.node}: preference received`;
    case "expert_timeout":
      return `node ${event.node}: expert timed out`;
    case "plan_found":
      return `plan found (${event.plan_len} steps, ${event.queries} queries)`;
    case "failed":
      return `search failed: ${event.reason}`;
    default:
      return event.type;
  }
}
