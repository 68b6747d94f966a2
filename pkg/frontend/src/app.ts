/** Single-page review flow.
 *
 * One question is on screen at a time: its candidate cards are shown in a
 * seeded shuffled order next to a None option, the reviewer picks exactly
 * one and submits, and the selection travels back to the server as the
 * candidate's manifest position together with the time spent. The server
 * stays the only source of truth; refreshing the page loses nothing.
 */
import {
  ApiError,
  ReviewApi,
  type CandidateDoc,
  type ExplanationsDoc,
  type FetchLike,
  type TableDoc,
} from "./api.js";
import { renderTableFragment, resultText } from "./render.js";
import { questionSeed, shuffledOrder } from "./shuffle.js";
import { WorkTimer } from "./timer.js";

export interface AppOptions {
  apiBase: string;
  worker: string;
  sessionSeed: number;
  /** Candidates requested per question. */
  k?: number;
  /** Pin the app to a single question instead of walking the queue. */
  questionId?: string;
  fetchFn?: FetchLike;
  clock?: () => number;
}

/** A manifest position, null for "none of these", undefined before any pick. */
type Selection = number | null | undefined;

export class ReviewApp {
  private api: ReviewApi;
  private timer: WorkTimer;
  private selection: Selection = undefined;
  private order: number[] = [];
  private current: ExplanationsDoc | null = null;
  private inflight = false;
  private reviewing = false;
  private progressText = "";
  private keyListener: (e: KeyboardEvent) => void;

  constructor(
    private root: HTMLElement,
    private opts: AppOptions,
  ) {
    this.api = new ReviewApi(opts.apiBase, opts.fetchFn);
    this.timer = new WorkTimer(opts.clock);
    this.keyListener = (e) => this.onKey(e);
    root.classList.add("review-app");
    root.ownerDocument.addEventListener("keydown", this.keyListener);
  }

  destroy(): void {
    this.root.ownerDocument.removeEventListener("keydown", this.keyListener);
  }

  async start(): Promise<void> {
    if (this.opts.questionId) {
      this.progressText = "";
      await this.present(this.opts.questionId);
      return;
    }
    this.renderLoading();
    let queue;
    try {
      queue = await this.api.listQuestions(this.opts.worker);
    } catch (e) {
      this.renderError(e);
      return;
    }
    const open = queue.filter((q) => !q.answered);
    if (open.length === 0) {
      this.renderDone("All questions reviewed. Thank you.");
      return;
    }
    const done = queue.length - open.length;
    this.progressText = `${done} of ${queue.length} answered`;
    await this.present(open[0].question_id);
  }

  private async present(questionId: string): Promise<void> {
    this.renderLoading();
    let doc: ExplanationsDoc;
    let table: TableDoc;
    try {
      doc = await this.api.getExplanations(questionId, this.opts.k ?? 7);
      table = await this.api.getTable(doc.table_id);
    } catch (e) {
      this.renderError(e);
      return;
    }
    this.current = doc;
    this.order = shuffledOrder(
      doc.candidates.length,
      questionSeed(this.opts.sessionSeed, questionId),
    );
    this.selection = undefined;
    this.inflight = false;
    this.renderReview(doc, table);
    this.reviewing = true;
    this.timer.restart();
  }

  /** Record a pick; no-op while a submission is on the wire. */
  select(manifest: number | null): void {
    if (!this.reviewing || this.inflight) {
      return;
    }
    this.selection = manifest;
    this.showMessage("");
    for (const el of this.root.querySelectorAll(".card")) {
      const card = el as HTMLElement;
      const isNone = card.classList.contains("none-option");
      const mine = isNone
        ? manifest === null
        : card.dataset.manifest === String(manifest);
      card.classList.toggle("selected", mine);
      card.setAttribute("aria-pressed", mine ? "true" : "false");
    }
  }

  async submit(): Promise<void> {
    if (!this.reviewing || this.inflight) {
      return;
    }
    if (this.selection === undefined) {
      this.showMessage(
        "Pick a candidate or None of these before submitting.",
      );
      return;
    }
    const doc = this.current;
    if (doc === null) {
      return;
    }
    this.inflight = true;
    const button = this.root.querySelector(
      ".submit-btn",
    ) as HTMLButtonElement | null;
    if (button) {
      button.disabled = true;
    }
    const elapsedMs = this.timer.elapsedMs();
    const selection = this.selection;
    try {
      await this.api.postFeedback({
        question_id: doc.question_id,
        worker_id: this.opts.worker,
        selection,
        elapsed_ms: elapsedMs,
      });
    } catch (e) {
      this.inflight = false;
      if (button) {
        button.disabled = false;
      }
      this.showMessage(
        e instanceof ApiError && e.status !== 0
          ? e.message
          : "Could not reach the server. Your selection is still here; try again.",
      );
      return;
    }
    this.reviewing = false;
    this.root.dispatchEvent(
      new CustomEvent("feedback-recorded", {
        detail: { questionId: doc.question_id, selection, elapsedMs },
      }),
    );
    if (this.opts.questionId) {
      this.renderDone("Selection recorded.");
      return;
    }
    await this.start();
  }

  private onKey(e: KeyboardEvent): void {
    if (!this.reviewing || this.inflight) {
      return;
    }
    if (e.ctrlKey || e.altKey || e.metaKey) {
      return;
    }
    const target = e.target as HTMLElement | null;
    if (target && /^(input|textarea|select)$/i.test(target.tagName)) {
      return;
    }
    if (e.key >= "1" && e.key <= "9") {
      const slot = Number(e.key) - 1;
      if (slot < this.order.length) {
        this.select(this.order[slot]);
      }
      return;
    }
    if (e.key === "n" || e.key === "N") {
      this.select(null);
    }
  }

  // ----- screens ---------------------------------------------------------

  private renderLoading(): void {
    this.reviewing = false;
    this.root.replaceChildren(this.el("p", "loading", "Loading..."));
  }

  private renderDone(text: string): void {
    this.reviewing = false;
    const screen = this.el("div", "done-screen");
    screen.appendChild(this.el("p", "done-text", text));
    this.root.replaceChildren(screen);
  }

  private renderError(e: unknown): void {
    this.reviewing = false;
    const screen = this.el("div", "error-screen");
    const text =
      e instanceof ApiError && e.status !== 0
        ? e.message
        : "The review server is not reachable.";
    screen.appendChild(this.el("p", "error-text", text));
    const retry = this.el("button", "retry-btn", "Retry") as HTMLButtonElement;
    retry.addEventListener("click", () => void this.start());
    screen.appendChild(retry);
    this.root.replaceChildren(screen);
  }

  private renderReview(doc: ExplanationsDoc, table: TableDoc): void {
    const header = this.el("header", "review-header");
    header.appendChild(this.el("h1", "question-text", doc.question));
    const meta = this.el("p", "review-meta");
    meta.appendChild(
      this.el("span", "worker-label", `reviewer: ${this.opts.worker}`),
    );
    if (this.progressText) {
      meta.appendChild(this.el("span", "progress", this.progressText));
    }
    header.appendChild(meta);
    header.appendChild(
      this.el(
        "p",
        "hint",
        "Pick the candidate that answers the question, or None of these. " +
          "Keys 1-7 select a card, N selects none.",
      ),
    );

    const cards = this.el("div", "cards");
    this.order.forEach((manifest, slot) => {
      cards.appendChild(
        this.buildCard(doc.candidates[manifest], table, slot),
      );
    });
    cards.appendChild(this.buildNoneCard(this.order.length));

    const controls = this.el("div", "controls");
    const submit = this.el(
      "button",
      "submit-btn",
      "Submit",
    ) as HTMLButtonElement;
    submit.addEventListener("click", () => void this.submit());
    controls.appendChild(submit);
    const message = this.el("p", "message");
    message.setAttribute("role", "status");
    controls.appendChild(message);

    this.root.replaceChildren(header, cards, controls);
  }

  private buildCard(
    candidate: CandidateDoc,
    table: TableDoc,
    slot: number,
  ): HTMLElement {
    const card = this.el("article", "card");
    card.dataset.slot = String(slot);
    card.dataset.manifest = String(candidate.position);
    card.setAttribute("aria-pressed", "false");

    const head = this.el("div", "card-head");
    head.appendChild(this.el("span", "card-key", String(slot + 1)));
    head.appendChild(
      this.el(
        "span",
        "utterance",
        candidate.utterance ?? "(this candidate failed to run)",
      ),
    );
    card.appendChild(head);

    if (candidate.error !== null) {
      card.appendChild(this.el("p", "candidate-error", candidate.error));
    }

    const hl = candidate.highlight;
    if (hl !== null) {
      let expanded = false;
      const fragmentHost = this.el("div", "fragment-host");
      fragmentHost.appendChild(renderTableFragment(table, hl, expanded));
      card.appendChild(fragmentHost);
      if (hl.sampled_rows !== null) {
        const expand = this.el(
          "button",
          "toggle-expand",
          `show all ${table.n_rows} rows`,
        ) as HTMLButtonElement;
        expand.addEventListener("click", (e) => {
          e.stopPropagation();
          expanded = !expanded;
          expand.textContent = expanded
            ? "show sample"
            : `show all ${table.n_rows} rows`;
          fragmentHost.replaceChildren(
            renderTableFragment(table, hl, expanded),
          );
        });
        card.appendChild(expand);
      }
    }

    // the evaluation result can anchor or bias a review, so it stays
    // hidden until asked for
    const resultWrap = this.el("div", "result-wrap");
    const resultValue = this.el(
      "span",
      "result-value",
      resultText(candidate.result),
    );
    resultValue.hidden = true;
    const toggle = this.el(
      "button",
      "toggle-result",
      "show result",
    ) as HTMLButtonElement;
    toggle.addEventListener("click", (e) => {
      e.stopPropagation();
      resultValue.hidden = !resultValue.hidden;
      toggle.textContent = resultValue.hidden ? "show result" : "hide result";
    });
    resultWrap.appendChild(toggle);
    resultWrap.appendChild(resultValue);
    card.appendChild(resultWrap);

    card.addEventListener("click", () => this.select(candidate.position));
    return card;
  }

  private buildNoneCard(slot: number): HTMLElement {
    const card = this.el("article", "card none-option");
    card.dataset.slot = String(slot);
    card.setAttribute("aria-pressed", "false");
    const head = this.el("div", "card-head");
    head.appendChild(this.el("span", "card-key", "N"));
    head.appendChild(this.el("span", "utterance", "None of these"));
    card.appendChild(head);
    card.addEventListener("click", () => this.select(null));
    return card;
  }

  private showMessage(text: string): void {
    const el = this.root.querySelector(".message");
    if (el) {
      el.textContent = text;
    }
  }

  private el(tag: string, className: string, text?: string): HTMLElement {
    const node = this.root.ownerDocument.createElement(tag);
    node.className = className;
    if (text !== undefined) {
      node.textContent = text;
    }
    return node;
  }
}
