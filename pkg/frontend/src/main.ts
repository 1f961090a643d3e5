/** Page bootstrap: a small form for creating or attaching to a
 * planner session, wired to one ElicitationConsole instance. The page
 * is served as static files next to the session service, so the client
 * talks to the same origin.
 */

import { ElicitationConsole } from "./console.js";
import { SessionClient } from "./protocol.js";

function field<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function wireUp(): ElicitationConsole {
  const client = new SessionClient("");
  const consoleUi = new ElicitationConsole(client, field<HTMLElement>("console-root"));
  const status = field<HTMLElement>("form-status");

  field<HTMLButtonElement>("create-session").addEventListener("click", () => {
    const domain = field<HTMLTextAreaElement>("domain-text").value;
    const problem = field<HTMLTextAreaElement>("problem-text").value;
    const strategy = field<HTMLSelectElement>("strategy").value;
    const threshold = Number(field<HTMLInputElement>("entropy-threshold").value);
    status.textContent = "creating session...";
    consoleUi
      .create({ domain, problem, strategy, entropy_threshold: threshold })
      .then((id) => {
        status.textContent = `session ${id}`;
        consoleUi.start();
      })
      .catch((error: Error) => {
        status.textContent = `error: ${error.message}`;
      });
  });

  field<HTMLButtonElement>("attach-session").addEventListener("click", () => {
    const id = field<HTMLInputElement>("session-id").value.trim();
    if (id === "") {
      status.textContent = "error: enter a session id";
      return;
    }
    consoleUi.attach(id);
    consoleUi.start();
    status.textContent = `attached to ${id}`;
  });

  return consoleUi;
}

if (typeof document !== "undefined" && document.getElementById("console-root")) {
  wireUp();
}
