/** Typed client for the session and analysis HTTP endpoints.
 *
 * All protocol math happens server side; this module only moves JSON.
 * Errors with a structured body become ApiRequestError with the
 * server's error code; transport failures propagate as-is.
 */

export interface Rational {
  num: string;
  den: string;
  decimal: string;
}

export interface MenuItem {
  item_id: string;
  label: string;
}

export interface SubmissionRecord {
  participant_index: number;
  item_ids: string[];
  timestamp: string;
}

export type SessionStatus = "awaiting_shortlist" | "complete" | "aborted";

export interface SessionState {
  session_id: string;
  menu: MenuItem[];
  participants: string[];
  schedule: number[];
  turn: number;
  offered: string[];
  history: SubmissionRecord[];
  final_choice: string | null;
  status: SessionStatus;
}

export interface CreateSessionRequest {
  menu: string[] | MenuItem[];
  participants: string[];
  schedule_override?: number[];
  idempotency_token?: string;
}

export interface SubmitShortlistRequest {
  participant_index: number;
  item_ids: string[];
  idempotency_token: string;
}

export interface TwoPartyAnalysis {
  menu_size: number;
  shortlist_size: number;
  expected_chooser_rank: Rational;
  expected_proposer_rank: Rational;
  expected_total: Rational;
  fairness_gap: Rational;
  sigma_bound: number;
  ideal_size: number;
  optimal: {
    canonical: number;
    candidates: number[];
    tie: boolean;
    expected_total: Rational;
  };
}

export interface ScheduleAnalysis {
  menu_size: number;
  people: number;
  real_sizes: number[];
  ideal_common_rank: number;
  integer: {
    sizes: number[];
    per_person: Rational[];
    expected_total: Rational;
  };
}

export class ApiRequestError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly httpStatus: number,
  ) {
    super(message);
    this.name = "ApiRequestError";
  }
}

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

const defaultFetch: FetchLike = (input, init) => fetch(input, init);

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = defaultFetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (response.ok) {
      return (await response.json()) as T;
    }
    let code = "unknown";
    let message = `request failed with status ${response.status}`;
    try {
      const body = (await response.json()) as {
        code?: string;
        message?: string;
      };
      if (typeof body.code === "string") code = body.code;
      if (typeof body.message === "string") message = body.message;
    } catch {
      // non-JSON error body; keep the fallback message
    }
    throw new ApiRequestError(code, message, response.status);
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  healthz(): Promise<{ status: string }> {
    return this.request("/healthz");
  }

  twoParty(n: number, k?: number): Promise<TwoPartyAnalysis> {
    const suffix = k === undefined ? "" : `&k=${k}`;
    return this.request(`/analysis/two-party?n=${n}${suffix}`);
  }

  scheduleAnalysis(n: number, s: number): Promise<ScheduleAnalysis> {
    return this.request(`/analysis/schedule?n=${n}&s=${s}`);
  }

  createSession(body: CreateSessionRequest): Promise<SessionState> {
    return this.post("/sessions", body);
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}`);
  }

  submitShortlist(
    sessionId: string,
    body: SubmitShortlistRequest,
  ): Promise<SessionState> {
    return this.post(
      `/sessions/${encodeURIComponent(sessionId)}/shortlist`,
      body,
    );
  }
}
