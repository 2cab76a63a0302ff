/** Wire types for the slpcase HTTP API. */

export interface AssessmentResult {
  assessment_name: string | null;
  domain: string | null;
  standard_score: number | null;
  percentile: number | null;
  severity: string | null;
}

export interface AnnualGoal {
  goal_number: number | null;
  goal_brief: string | null;
  goal_annual: string | null;
}

export interface SessionNote {
  date: string | null;
  duration: string | null;
  setting: string | null;
  goal_addressed: string | null;
  note: string | null;
}

export interface CaseFile {
  name: string | null;
  age: number | null;
  grade: string | null;
  gender: string | null;
  background: string | null;
  assessment_results: AssessmentResult[];
  annual_goals: AnnualGoal[];
  session_notes: SessionNote[];
}

export interface Provenance {
  chunk_ids: string[];
  similarities: number[];
  template_id: string;
  model_id: string;
  request_digest: string;
  timestamp: string;
}

export interface CaseRecord {
  case_id: string;
  case: CaseFile;
  provenance: Provenance;
  disorders: string[];
  created_at: string;
}

export interface ValidationFinding {
  field_path: string;
  code: string;
  detail: string;
}

export interface ValidationReport {
  errors: ValidationFinding[];
  warnings: ValidationFinding[];
  is_valid: boolean;
}

export interface JobState {
  status: "running" | "done" | "failed";
  progress: number;
  result: BatchResult | null;
  error: string | null;
}

export interface BatchResult {
  case_ids: string[];
  failures: { index: number; error: string }[];
  warnings: string[];
}

export interface GroupMatchResponse {
  candidates: CaseRecord[];
  shortfall: number;
}

export interface GroupPlan {
  member_ids: string[];
  shared_activity: string;
  differentiated_targets: Record<string, string>;
  note: string;
}

export interface QualityScore {
  structural: number;
  consistency: number;
  clinical: number;
  documentation: number;
  issues?: unknown[];
}

export interface QualityRow {
  group: string;
  n: number;
  structural: number;
  consistency: number;
  clinical: number;
  documentation: number;
  overall: number;
}

export interface ScoreResponse {
  deterministic: QualityScore;
  judge?: QualityScore;
}

export interface TranscriptReport {
  sound_repetitions: number;
  syllable_repetitions: number;
  prolongations: number;
  blocks: number;
  substitution_candidates: unknown[];
  omission_candidates: unknown[];
  distortion_candidates: unknown[];
  mlu_approx: number;
  avg_word_length: number;
  avg_sentence_length: number;
}

export interface TranscriptAnalysis {
  report: TranscriptReport;
  deidentified?: string[];
  replacements?: { span: [number, number]; category: string }[];
  clinical?: Record<string, string>;
}

export interface ApiError {
  code: string;
  message: string;
  correlation_id: string;
}
