/** Typed client for the planning session protocol (schema version 1).
 *
 * The console talks to the service exclusively through these calls;
 * nothing else in the bundle knows about HTTP.
 */

export interface MethodRow {
  id: string;
  /** Rollout cost; null for dead ends, absent on blind consoles. */
  L?: number | null;
  D?: number;
  A?: number;
  score?: number | null;
  p?: number;
}

export interface WireQuery {
  node: number;
  state: string[];
  task: string;
  methods: MethodRow[];
  entropy: number;
}

export interface Snapshot {
  v: number;
  id: string;
  lifecycle: string;
  node: number | null;
  state: string[];
  plan: string[];
  frontier: { task: string; depth: number; size: number } | null;
  query: WireQuery | null;
  result: {
    solved: boolean;
    plan: string[];
    plan_len: number | null;
    reason: string | null;
    queries: number;
    prefs: number;
    nodes: number;
    wall_ms: number;
  } | null;
  nodes_expanded: number;
}

export interface WireEvent {
  v: number;
  type: string;
  [key: string]: unknown;
}

export interface EventPage {
  v: number;
  events: WireEvent[];
  next: number;
  lifecycle: string;
}

export interface SessionParams {
  domain: string;
  problem: string;
  strategy?: string;
  entropy_threshold?: number;
  rollout_depth?: number;
  temperature?: number;
  seed?: number;
  time_limit?: number;
  random_query_prob?: number;
  max_queries?: number | null;
  expert_timeout?: number;
}

export class ProtocolError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function request(base: string, path: string, init?: RequestInit): Promise<unknown> {
  const response = await fetch(base + path, init);
  const body = (await response.json()) as Record<string, unknown>;
  if (!response.ok) {
    const detail = typeof body.error === "string" ? body.error : response.statusText;
    throw new ProtocolError(response.status, detail);
  }
  return body;
}

function post(base: string, path: string, payload: unknown): Promise<unknown> {
  return request(base, path, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(payload),
  });
}

export class SessionClient {
  constructor(readonly base: string = "") {}

  async create(params: SessionParams): Promise<string> {
    const body = (await post(this.base, "/sessions", params)) as { id: string };
    return body.id;
  }

  async start(id: string): Promise<void> {
    await post(this.base, `/sessions/${id}/start`, {});
  }

  async snapshot(id: string): Promise<Snapshot> {
    return (await request(this.base, `/sessions/${id}/snapshot`)) as Snapshot;
  }

  async events(id: string, since: number): Promise<EventPage> {
    return (await request(
      this.base, `/sessions/${id}/events?since=${since}`,
    )) as EventPage;
  }

  async respond(id: string, preference: string): Promise<void> {
    await post(this.base, `/sessions/${id}/respond`, { preference });
  }

  async decline(id: string): Promise<void> {
    await post(this.base, `/sessions/${id}/respond`, { decline: true });
  }
}
