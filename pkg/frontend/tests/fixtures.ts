/** Recorded API payloads used by the mock fetch in the contract tests. */

import type { CaseRecord, JobState, QualityRow, ScoreResponse, TranscriptAnalysis } from "../src/types.js";

export const auroraRecord: CaseRecord = {
  case_id: "case-aurora-001",
  disorders: ["articulation"],
  created_at: "2026-03-02T10:15:00Z",
  provenance: {
    chunk_ids: ["corpus/artic-overview:0", "corpus/artic-overview:1"],
    similarities: [0.82, 0.74],
    template_id: "case_file_v1",
    model_id: "fixture",
    request_digest: "3f6b",
    timestamp: "2026-03-02T10:15:00Z",
  },
  case: {
    name: "Aurora Harris",
    age: 7,
    grade: "2nd Grade",
    gender: "Female",
    background: "Aurora is a 2nd grade student referred for speech sound errors affecting /r/, /s/, and /l/.",
    assessment_results: [
      {
        assessment_name: "Goldman-Fristoe Test of Articulation-3 (GFTA-3)",
        domain: "Articulation",
        standard_score: 76,
        percentile: 5,
        severity: "moderate",
      },
    ],
    annual_goals: [
      {
        goal_number: 1,
        goal_brief: "Produce /r/ in all word positions",
        goal_annual:
          "By the next annual review, Aurora will produce /r/ in all word positions with 80% accuracy across 3 consecutive sessions.",
      },
      {
        goal_number: 2,
        goal_brief: "Produce /s/ without interdental lisp",
        goal_annual:
          "By the next annual review, Aurora will produce /s/ without an interdental lisp with 80% accuracy across 3 consecutive sessions.",
      },
      {
        goal_number: 3,
        goal_brief: "Produce /l/ in all word positions",
        goal_annual:
          "By the next annual review, Aurora will produce /l/ in all word positions with 80% accuracy across 3 consecutive sessions.",
      },
    ],
    session_notes: [
      {
        date: "2026-02-10",
        duration: "30 minutes",
        setting: "small group",
        goal_addressed: "Goal 1",
        note: "Drilled initial /r/ words with 65% accuracy given visual cues.",
      },
    ],
  },
};

function candidate(caseId: string, name: string, grade: string): CaseRecord {
  return {
    ...auroraRecord,
    case_id: caseId,
    case: { ...auroraRecord.case, name, grade },
  };
}

export const matchCandidates: CaseRecord[] = [
  candidate("case-aurora-001", "Aurora Harris", "2nd Grade"),
  candidate("case-luca-002", "Luca Bennett", "3rd Grade"),
  candidate("case-priya-003", "Priya Shah", "5th Grade"),
];

/** Seven cases in one group; overall is the mean of the four dimension means. */
export const qualityRows: QualityRow[] = [
  {
    group: "fixture",
    n: 7,
    structural: 5.0,
    consistency: 3.71,
    clinical: 4.29,
    documentation: 5.0,
    overall: 4.5,
  },
];

export const scoreResponse: ScoreResponse = {
  deterministic: { structural: 5, consistency: 4, clinical: 5, documentation: 4, issues: [] },
};

export const transcriptAnalysis: TranscriptAnalysis = {
  report: {
    sound_repetitions: 1,
    syllable_repetitions: 0,
    prolongations: 0,
    blocks: 0,
    substitution_candidates: [],
    omission_candidates: [],
    distortion_candidates: [],
    mlu_approx: 4.0,
    avg_word_length: 3.5,
    avg_sentence_length: 4.0,
  },
  deidentified: ["[NAME] said b-b-ball"],
};

export const jobStates: JobState[] = [
  { status: "running", progress: 0.0, result: null, error: null },
  { status: "running", progress: 0.5, result: null, error: null },
  {
    status: "done",
    progress: 1.0,
    result: { case_ids: ["case-aurora-001", "case-luca-002"], failures: [], warnings: [] },
    error: null,
  },
];

export interface RecordedCall {
  method: string;
  url: string;
  body: unknown;
}

/** Build a fetch stub that replays canned payloads keyed by "METHOD path". */
export function mockFetch(routes: Record<string, unknown | (() => unknown)>, calls: RecordedCall[] = []) {
  const impl = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    calls.push({
      method,
      url,
      body: typeof init?.body === "string" ? JSON.parse(init.body) : undefined,
    });
    const key = `${method} ${url}`;
    if (!(key in routes)) {
      return new Response(
        JSON.stringify({ code: "not_found", message: `no route for ${key}`, correlation_id: "corr-404" }),
        { status: 404, headers: { "content-type": "application/json" } },
      );
    }
    const route = routes[key];
    const payload = typeof route === "function" ? (route as () => unknown)() : route;
    if (payload instanceof Response) return payload;
    return new Response(JSON.stringify(payload), {
      status: 200,
      headers: { "content-type": "application/json" },
    });
  };
  return { impl, calls };
}
