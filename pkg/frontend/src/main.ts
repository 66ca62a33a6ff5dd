import { SessionClient } from "./api.js";
import { ConsoleController } from "./controller.js";

// Bootstrap: configuration is the server URL and the session id, nothing
// else. Both come from the query string; a bare visit shows a form.

function configForm(root: HTMLElement): void {
  root.innerHTML = `
    <form id="config-form" class="control">
      <strong>connect to a session</strong>
      <label>server URL <input id="cfg-server" value="http://127.0.0.1:8000"></label>
      <label>session id <input id="cfg-session" placeholder="hex id from POST /v1/sessions"></label>
      <button type="submit">open</button>
    </form>`;
  root.querySelector("#config-form")!.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const server = (root.querySelector("#cfg-server") as HTMLInputElement).value;
    const session = (root.querySelector("#cfg-session") as HTMLInputElement).value;
    const params = new URLSearchParams({ server, session });
    window.location.search = params.toString();
  });
}

export function boot(root: HTMLElement): void {
  const params = new URLSearchParams(window.location.search);
  const server = params.get("server");
  const session = params.get("session");
  if (!server || !session) {
    configForm(root);
    return;
  }
  const controller = new ConsoleController(new SessionClient(server, session));
  controller.mount(root);
  controller.connect().catch((err) => {
    console.error("stream ended", err);
  });
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot(document.getElementById("app")!);
}
