import type { CaseRecord, ValidationReport } from "../types.js";
import { badge, escapeHtml } from "../render.js";

/** Render a generated case as section accordions with validation badges.
 * Every displayed value comes from the API payload verbatim. */
export function renderCaseView(record: CaseRecord, validation?: ValidationReport): string {
  const c = record.case;
  const parts: string[] = [];

  parts.push(`<article class="case" data-case-id="${escapeHtml(record.case_id)}">`);
  parts.push(`<header><h2>${escapeHtml(c.name)}</h2>`);
  parts.push(
    `<p>${escapeHtml(c.grade)} · age ${escapeHtml(c.age)} · ${escapeHtml(c.gender)} · ` +
      `model ${escapeHtml(record.provenance.model_id)}</p>`,
  );
  if (validation) {
    parts.push(
      validation.is_valid
        ? badge("valid", "ok")
        : badge(`${validation.errors.length} validation error(s)`, "error"),
    );
    for (const finding of validation.errors) {
      parts.push(badge(`${finding.field_path}: ${finding.code}`, "error"));
    }
    for (const finding of validation.warnings) {
      parts.push(badge(`${finding.field_path}: ${finding.code}`, "warn"));
    }
  }
  parts.push(`</header>`);

  parts.push(`<details open class="section section-background"><summary>Background</summary>`);
  parts.push(`<p>${escapeHtml(c.background)}</p></details>`);

  parts.push(`<details open class="section section-assessments"><summary>Assessment Results</summary><table>`);
  parts.push(`<tr><th>Instrument</th><th>Domain</th><th>Standard</th><th>Percentile</th><th>Severity</th></tr>`);
  for (const a of c.assessment_results) {
    parts.push(
      `<tr><td>${escapeHtml(a.assessment_name)}</td><td>${escapeHtml(a.domain)}</td>` +
        `<td>${escapeHtml(a.standard_score)}</td><td>${escapeHtml(a.percentile)}</td>` +
        `<td>${escapeHtml(a.severity)}</td></tr>`,
    );
  }
  parts.push(`</table></details>`);

  parts.push(`<details open class="section section-goals"><summary>Annual Goals</summary><ol class="goals">`);
  for (const g of c.annual_goals) {
    parts.push(
      `<li class="goal" data-goal="${escapeHtml(g.goal_number)}">` +
        `<strong>${escapeHtml(g.goal_brief)}</strong><p>${escapeHtml(g.goal_annual)}</p></li>`,
    );
  }
  parts.push(`</ol></details>`);

  parts.push(`<details class="section section-notes"><summary>Session Notes</summary><ul class="notes">`);
  for (const n of c.session_notes) {
    parts.push(
      `<li class="note"><em>${escapeHtml(n.date)} · ${escapeHtml(n.duration)} · ` +
        `${escapeHtml(n.setting)} · ${escapeHtml(n.goal_addressed)}</em>` +
        `<p>${escapeHtml(n.note)}</p></li>`,
    );
  }
  parts.push(`</ul></details>`);
  parts.push(`</article>`);
  return parts.join("");
}

/** Client-side required-field gate for the single-case form. */
export function singleCaseFormProblems(form: { disorders: string[]; grade: string }): string[] {
  const problems: string[] = [];
  if (form.disorders.length === 0) problems.push("at least one disorder is required");
  if (form.disorders.length > 2) problems.push("at most two co-occurring disorders");
  if (!form.grade.trim()) problems.push("grade is required");
  return problems;
}
