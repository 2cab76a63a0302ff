/** Typed client for the slpcase HTTP API.
 *
 * fetch is injectable so contract tests can replay recorded fixtures; the
 * client performs no clinical computation of its own.
 */

import type {
  ApiError,
  BatchResult,
  CaseRecord,
  GroupMatchResponse,
  GroupPlan,
  JobState,
  QualityRow,
  ScoreResponse,
  TranscriptAnalysis,
  ValidationReport,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiRequestError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ApiError,
  ) {
    super(`${body.code}: ${body.message} [${body.correlation_id}]`);
  }
}

export interface ClientOptions {
  baseUrl?: string;
  token?: string;
  fetchImpl?: FetchLike;
  /** sleep is injectable so polling tests run instantly */
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export class SlpCaseClient {
  private readonly baseUrl: string;
  private readonly token: string | undefined;
  private readonly fetchImpl: FetchLike;
  private readonly sleep: (ms: number) => Promise<void>;

  constructor(options: ClientOptions = {}) {
    this.baseUrl = (options.baseUrl ?? "").replace(/\/$/, "");
    this.token = options.token;
    this.fetchImpl = options.fetchImpl ?? ((url, init) => fetch(url, init));
    this.sleep = options.sleep ?? defaultSleep;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "content-type": "application/json" };
    if (this.token) headers["authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      const payload = (await response.json().catch(() => ({
        code: "unknown_error",
        message: response.statusText,
        correlation_id: "",
      }))) as ApiError;
      throw new ApiRequestError(response.status, payload);
    }
    return (await response.json()) as T;
  }

  createCase(body: {
    disorders: string[];
    grade: string;
    model?: string;
    population_spec?: string;
  }): Promise<CaseRecord> {
    return this.request("POST", "/cases", body);
  }

  createBatch(body: { text: string } | { spec: Record<string, unknown> }): Promise<{ job_id: string }> {
    return this.request("POST", "/batches", body);
  }

  getJob(jobId: string): Promise<JobState> {
    return this.request("GET", `/jobs/${encodeURIComponent(jobId)}`);
  }

  /** Poll a job to completion with exponential backoff (capped). */
  async waitForJob(
    jobId: string,
    opts: { initialDelayMs?: number; maxDelayMs?: number; maxAttempts?: number } = {},
  ): Promise<BatchResult> {
    const initial = opts.initialDelayMs ?? 250;
    const cap = opts.maxDelayMs ?? 4000;
    const maxAttempts = opts.maxAttempts ?? 60;
    let delay = initial;
    for (let attempt = 0; attempt < maxAttempts; attempt++) {
      const job = await this.getJob(jobId);
      if (job.status === "done" && job.result) return job.result;
      if (job.status === "failed") throw new Error(job.error ?? "job failed");
      await this.sleep(delay);
      delay = Math.min(delay * 2, cap);
    }
    throw new Error(`job ${jobId} did not finish after ${maxAttempts} polls`);
  }

  listCases(filters: {
    disorder?: string;
    grade_min?: string;
    grade_max?: string;
    severity?: string;
  } = {}): Promise<{ cases: CaseRecord[] }> {
    const params = new URLSearchParams();
    for (const [key, value] of Object.entries(filters)) {
      if (value) params.set(key, value);
    }
    const qs = params.toString();
    return this.request("GET", `/cases${qs ? "?" + qs : ""}`);
  }

  getCase(caseId: string): Promise<CaseRecord> {
    return this.request("GET", `/cases/${encodeURIComponent(caseId)}`);
  }

  validateCase(caseId: string): Promise<ValidationReport> {
    return this.request("POST", `/cases/${encodeURIComponent(caseId)}/validate`);
  }

  scoreCase(caseId: string, judge?: string): Promise<ScoreResponse> {
    const qs = judge ? `?judge=${encodeURIComponent(judge)}` : "";
    return this.request("POST", `/cases/${encodeURIComponent(caseId)}/score${qs}`);
  }

  submitFeedback(
    caseId: string,
    body: { reviewer_id: string; ratings: Record<string, number>; free_text?: string },
  ): Promise<{ feedback_id: string }> {
    return this.request("POST", `/cases/${encodeURIComponent(caseId)}/feedback`, body);
  }

  matchGroup(body: {
    target_grade: string;
    desired_size: number;
    disorder_preferences?: string[];
    target_severity?: string;
  }): Promise<GroupMatchResponse> {
    return this.request("POST", "/groups/match", body);
  }

  planGroup(body: { member_ids: string[]; model?: string }): Promise<GroupPlan> {
    return this.request("POST", "/groups/plan", body);
  }

  analyzeTranscript(body: {
    utterances: { start_s: number; end_s: number; text: string }[];
    deidentify?: boolean;
    clinical?: boolean;
    target_lexicon?: Record<string, string>;
    model?: string;
  }): Promise<TranscriptAnalysis> {
    return this.request("POST", "/transcripts/analyze", body);
  }

  qualityReport(groupBy: "model" | "disorder" = "model"): Promise<{ rows: QualityRow[] }> {
    return this.request("GET", `/reports/quality?group_by=${groupBy}`);
  }

  errorReport(): Promise<{ totals: Record<string, number> }> {
    return this.request("GET", "/reports/errors");
  }
}
