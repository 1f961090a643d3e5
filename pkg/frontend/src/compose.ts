/** Preference composition model.
 *
 * A buffer starts as a literal description of the queried node: every
 * state atom is a candidate condition and the task is fully ground.
 * The expert then picks the generality: drop condition atoms, swap a
 * constant for a variable everywhere, or abandon the controls and type
 * the preference raw. Emission follows the preference grammar the
 * planner parses, so anything composed here is submittable as-is.
 */

import type { WireQuery } from "./protocol.js";

export interface Condition {
  text: string;
  kept: boolean;
}

export interface ComposeBuffer {
  name: string;
  conditions: Condition[];
  task: string;
  prefer: string[];
  avoid: string[];
  /** Constant name -> variable name (without the leading ?). */
  substitutions: Record<string, string>;
  /** When set, emission returns this text untouched. */
  raw: string | null;
}

let counter = 0;

export function bufferFromQuery(query: WireQuery): ComposeBuffer {
  counter += 1;
  return {
    name: `ConsolePref${counter}`,
    conditions: query.state.map((text) => ({ text, kept: true })),
    task: query.task,
    prefer: [],
    avoid: [],
    substitutions: {},
    raw: null,
  };
}

/** Tokens of a ground s-expression atom: predicate first, then constants. */
function tokens(atom: string): string[] {
  return atom.replace(/[()]/g, " ").trim().split(/\s+/);
}

/** Constants available for generalization, in first-seen order. */
export function constants(buffer: ComposeBuffer): string[] {
  const seen: string[] = [];
  const atoms = [buffer.task, ...buffer.conditions.filter((c) => c.kept).map((c) => c.text)];
  for (const atom of atoms) {
    for (const part of tokens(atom).slice(1)) {
      if (!part.startsWith("?") && !seen.includes(part) && !(part in buffer.substitutions)) {
        seen.push(part);
      }
    }
  }
  return seen;
}

export function toggleCondition(buffer: ComposeBuffer, index: number): void {
  const condition = buffer.conditions[index];
  if (condition) condition.kept = !condition.kept;
}

export function keepOnly(buffer: ComposeBuffer, texts: string[]): void {
  for (const condition of buffer.conditions) {
    condition.kept = texts.includes(condition.text);
  }
}

/** Replace a constant with a fresh variable in the task and conditions. */
export function generalize(buffer: ComposeBuffer, constant: string): string {
  let variable = constant.toLowerCase();
  const taken = new Set(Object.values(buffer.substitutions));
  while (taken.has(variable)) variable += "x";
  buffer.substitutions[constant] = variable;
  return `?${variable}`;
}

export function togglePick(buffer: ComposeBuffer, side: "prefer" | "avoid", id: string): void {
  const list = buffer[side];
  const at = list.indexOf(id);
  if (at >= 0) list.splice(at, 1);
  else list.push(id);
}

function substitute(atom: string, substitutions: Record<string, string>): string {
  const parts = tokens(atom);
  const head = parts[0] ?? "";
  const args = parts.slice(1).map((part) => {
    const variable = substitutions[part];
    return variable === undefined ? part : `?${variable}`;
  });
  return args.length ? `(${head} ${args.join(" ")})` : `(${head})`;
}

export interface Defect {
  message: string;
}

/** Client-side pre-validation; the service re-validates on submit. */
export function validate(buffer: ComposeBuffer, query: WireQuery): Defect[] {
  if (buffer.raw !== null) return [];
  const defects: Defect[] = [];
  const candidates = new Set(query.methods.map((m) => m.id));
  const overlap = buffer.prefer.filter((id) => buffer.avoid.includes(id));
  if (overlap.length) {
    defects.push({ message: `preferred and non-preferred overlap: ${overlap.join(", ")}` });
  }
  for (const id of [...buffer.prefer, ...buffer.avoid]) {
    if (!candidates.has(id)) {
      defects.push({ message: `${id} is not a candidate method of this query` });
    }
  }
  if (buffer.prefer.length + buffer.avoid.length === 0) {
    defects.push({ message: "pick at least one method to prefer or avoid" });
  }
  if (!/^[A-Za-z][A-Za-z0-9_-]*$/.test(buffer.name)) {
    defects.push({ message: "preference name must be a plain identifier" });
  }
  return defects;
}

export function emit(buffer: ComposeBuffer): string {
  if (buffer.raw !== null) return buffer.raw;
  const conds = buffer.conditions
    .filter((c) => c.kept)
    .map((c) => substitute(c.text, buffer.substitutions))
    .join(" ");
  const task = substitute(buffer.task, buffer.substitutions);
  // Method sets print sorted, matching the service's canonical form.
  const prefer = [...buffer.prefer].sort().join(" ");
  const avoid = [...buffer.avoid].sort().join(" ");
  return (
    `(pref ${buffer.name} (${conds}) ${task} ` +
    `(:prefer${prefer ? " " + prefer : ""}) ` +
    `(:avoid${avoid ? " " + avoid : ""}))`
  );
}
