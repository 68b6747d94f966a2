/** Typed client for the review service. All state lives on the server;
 * this module only shuttles JSON. */

export interface TableDoc {
  table_id: string;
  headers: string[];
  rows: string[][];
  n_rows: number;
}

export type CellStyleName = "colored" | "framed" | "lit";

export interface CellStyle {
  column: string;
  row: number;
  style: CellStyleName;
}

export interface HeaderMark {
  fn: string;
  column: string;
}

export interface HighlightDoc {
  table_id: string;
  styles: CellStyle[];
  header_marks: HeaderMark[];
  sampled_rows: number[] | null;
}

export type ResultDoc =
  | { kind: "scalar"; value: string }
  | { kind: "values"; values: string[] }
  | { kind: "records"; rows: number[] };

export interface CandidateDoc {
  position: number;
  formula: string;
  utterance: string | null;
  highlight: HighlightDoc | null;
  result: ResultDoc | null;
  sql: string | null;
  error: string | null;
}

export interface ExplanationsDoc {
  question_id: string;
  question: string;
  table_id: string;
  gold: string[];
  k: number;
  candidates: CandidateDoc[];
}

export interface QuestionItem {
  question_id: string;
  question: string;
  table_id: string;
  n_candidates: number;
  answered?: boolean;
}

export interface FeedbackBody {
  question_id: string;
  worker_id: string;
  selection: number | null;
  elapsed_ms: number;
}

export interface FeedbackReply {
  stored: {
    question_id: string;
    worker_id: string;
    selection: number | null;
    elapsed_ms: number | null;
    timestamp: string;
  };
  votes: Record<string, number | null>;
}

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

/** status 0 means the server could not be reached at all. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ReviewApi {
  private fetchFn: FetchLike;

  constructor(
    readonly base: string,
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    let resp: Response;
    try {
      resp = await this.fetchFn(this.base + path, init);
    } catch {
      throw new ApiError(0, "server unreachable");
    }
    if (!resp.ok) {
      let detail = `request failed with status ${resp.status}`;
      try {
        const body = (await resp.json()) as { detail?: unknown };
        if (typeof body.detail === "string") {
          detail = body.detail;
        } else if (body.detail !== undefined) {
          detail = JSON.stringify(body.detail);
        }
      } catch {
        // body was not JSON, keep the status line
      }
      throw new ApiError(resp.status, detail);
    }
    return resp.json();
  }

  async listQuestions(worker?: string): Promise<QuestionItem[]> {
    const suffix = worker
      ? `?${new URLSearchParams({ worker }).toString()}`
      : "";
    const doc = (await this.request(`/questions${suffix}`)) as {
      questions: QuestionItem[];
    };
    return doc.questions;
  }

  async getTable(tableId: string): Promise<TableDoc> {
    return (await this.request(
      `/tables/${encodeURIComponent(tableId)}`,
    )) as TableDoc;
  }

  async getExplanations(
    questionId: string,
    k = 7,
  ): Promise<ExplanationsDoc> {
    return (await this.request(
      `/questions/${encodeURIComponent(questionId)}/explanations?k=${k}`,
    )) as ExplanationsDoc;
  }

  async postFeedback(body: FeedbackBody): Promise<FeedbackReply> {
    return (await this.request("/feedback", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    })) as FeedbackReply;
  }
}
