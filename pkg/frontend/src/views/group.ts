import type { CaseRecord, GroupPlan } from "../types.js";
import { badge, escapeHtml } from "../render.js";

/** Display-side mirror of the two-year grade rule: the server remains the
 * source of truth via /groups/match; this only labels the selection. */
const GRADE_LADDER = [
  "Pre-K",
  "Kindergarten",
  "1st Grade",
  "2nd Grade",
  "3rd Grade",
  "4th Grade",
  "5th Grade",
  "6th Grade",
  "7th Grade",
  "8th Grade",
  "9th Grade",
  "10th Grade",
  "11th Grade",
  "12th Grade",
];

export const MAX_GRADE_DISTANCE = 2;

export function gradeIndex(grade: string): number {
  const needle = grade.trim().toLowerCase();
  const index = GRADE_LADDER.findIndex((g) => g.toLowerCase() === needle);
  if (index >= 0) return index;
  if (needle === "k" || needle.startsWith("kinder")) return 1;
  if (needle.startsWith("pre")) return 0;
  const m = needle.match(/^(\d{1,2})/);
  if (m) {
    const n = parseInt(m[1], 10);
    if (n >= 1 && n <= 12) return n + 1;
  }
  throw new Error(`unknown grade: ${grade}`);
}

export function gradeDistance(a: string, b: string): number {
  return Math.abs(gradeIndex(a) - gradeIndex(b));
}

export interface CompatibilityVerdict {
  compatible: boolean;
  distance: number;
}

/** Pairwise verdict over the selected members (worst pair wins). */
export function selectionVerdict(grades: string[]): CompatibilityVerdict {
  let worst = 0;
  for (let i = 0; i < grades.length; i++) {
    for (let j = i + 1; j < grades.length; j++) {
      worst = Math.max(worst, gradeDistance(grades[i], grades[j]));
    }
  }
  return { compatible: worst <= MAX_GRADE_DISTANCE, distance: worst };
}

export function compatibilityBadge(grades: string[]): string {
  const verdict = selectionVerdict(grades);
  return verdict.compatible
    ? badge("compatible", "ok")
    : badge(`incompatible (grade distance ${verdict.distance})`, "error");
}

export function renderComposer(candidates: CaseRecord[], selectedIds: string[], shortfall: number): string {
  const selected = candidates.filter((c) => selectedIds.includes(c.case_id));
  const grades = selected.map((c) => c.case.grade ?? "");
  const verdict = selectionVerdict(grades);
  const planReady = verdict.compatible && selected.length >= 2 && selected.length <= 4;
  const parts: string[] = [`<section class="composer">`];
  if (shortfall > 0) {
    parts.push(badge(`short ${shortfall} candidate(s)`, "warn"));
  }
  parts.push(`<ul class="candidates">`);
  for (const record of candidates) {
    const checked = selectedIds.includes(record.case_id) ? " checked" : "";
    parts.push(
      `<li><label><input type="checkbox" data-case-id="${escapeHtml(record.case_id)}"${checked}> ` +
        `${escapeHtml(record.case.name)} (${escapeHtml(record.case.grade)}, ` +
        `${record.disorders.map(escapeHtml).join(", ")})</label></li>`,
    );
  }
  parts.push(`</ul>`);
  if (selected.length >= 2) parts.push(compatibilityBadge(grades));
  parts.push(
    `<button data-action="plan"${planReady ? "" : " disabled"}>Request session plan</button>`,
  );
  parts.push(`</section>`);
  return parts.join("");
}

export function renderPlan(plan: GroupPlan): string {
  const parts = [`<section class="plan">`];
  parts.push(`<h3>Shared activity</h3><p>${escapeHtml(plan.shared_activity)}</p>`);
  parts.push(`<h3>Differentiated targets</h3><dl>`);
  for (const [member, target] of Object.entries(plan.differentiated_targets)) {
    parts.push(`<dt>${escapeHtml(member)}</dt><dd>${escapeHtml(target)}</dd>`);
  }
  parts.push(`</dl><p class="note">${escapeHtml(plan.note)}</p></section>`);
  return parts.join("");
}
