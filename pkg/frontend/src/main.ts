/** Page bootstrap: read query parameters, collect a reviewer name if the
 * URL does not carry one, then hand over to the review flow.
 *
 * Parameters: api (service origin, same origin by default), worker,
 * seed (display shuffle seed, random by default), question (pin one
 * question), k (candidates per question).
 */
import { ReviewApp } from "./app.js";

function randomSeed(): number {
  return (Date.now() ^ Math.floor(Math.random() * 0xffffffff)) >>> 0;
}

function mount(root: HTMLElement, worker: string): void {
  const params = new URLSearchParams(window.location.search);
  const app = new ReviewApp(root, {
    apiBase: params.get("api") ?? "",
    worker,
    sessionSeed: params.has("seed")
      ? Number(params.get("seed")) >>> 0
      : randomSeed(),
    k: params.has("k") ? Number(params.get("k")) : undefined,
    questionId: params.get("question") ?? undefined,
  });
  void app.start();
}

function workerForm(root: HTMLElement): void {
  const form = document.createElement("form");
  form.className = "worker-form";
  const label = document.createElement("label");
  label.textContent = "Your reviewer name: ";
  const input = document.createElement("input");
  input.name = "worker";
  input.required = true;
  label.appendChild(input);
  form.appendChild(label);
  const go = document.createElement("button");
  go.type = "submit";
  go.textContent = "Start reviewing";
  form.appendChild(go);
  form.addEventListener("submit", (e) => {
    e.preventDefault();
    const worker = input.value.trim();
    if (worker) {
      root.replaceChildren();
      mount(root, worker);
    }
  });
  root.replaceChildren(form);
  input.focus();
}

const root = document.getElementById("app");
if (root) {
  const worker = new URLSearchParams(window.location.search).get("worker");
  if (worker) {
    mount(root, worker);
  } else {
    workerForm(root);
  }
}
