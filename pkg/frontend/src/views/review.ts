import type { QualityScore } from "../types.js";
import { escapeHtml } from "../render.js";

export const RATING_FIELDS = [
  "clinical_accuracy",
  "documentation_quality",
  "educational_utility",
  "cultural_appropriateness",
] as const;

export function renderFeedbackForm(caseId: string): string {
  const parts = [`<form class="feedback" data-case-id="${escapeHtml(caseId)}">`];
  for (const field of RATING_FIELDS) {
    parts.push(
      `<label>${field.replace(/_/g, " ")} ` +
        `<input type="range" name="${field}" min="1" max="5" step="1" value="3"></label>`,
    );
  }
  parts.push(`<label>comments <textarea name="free_text"></textarea></label>`);
  parts.push(`<input type="text" name="reviewer_id" placeholder="reviewer id" required>`);
  parts.push(`<button type="submit">Submit feedback</button></form>`);
  return parts.join("");
}

/** Clamp slider values into the 1-5 contract before posting. */
export function clampRating(value: number): number {
  return Math.min(5, Math.max(1, Math.round(value)));
}

export function renderScores(deterministic: QualityScore, judge?: QualityScore): string {
  const dims = ["structural", "consistency", "clinical", "documentation"] as const;
  const parts = [`<table class="scores"><tr><th></th>`];
  for (const dim of dims) parts.push(`<th>${dim}</th>`);
  parts.push(`</tr><tr><td>deterministic</td>`);
  for (const dim of dims) parts.push(`<td>${deterministic[dim]}</td>`);
  parts.push(`</tr>`);
  if (judge) {
    parts.push(`<tr><td>judge</td>`);
    for (const dim of dims) parts.push(`<td>${judge[dim]}</td>`);
    parts.push(`</tr>`);
  }
  parts.push(`</table>`);
  return parts.join("");
}
