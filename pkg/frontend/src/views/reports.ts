import type { QualityRow } from "../types.js";
import { escapeHtml } from "../render.js";

export const REPORT_COLUMNS = [
  "group",
  "n",
  "structural",
  "consistency",
  "clinical",
  "documentation",
  "overall",
] as const;

/** Quality dashboard table. Cell values are the API's, rendered verbatim. */
export function renderDashboard(rows: QualityRow[]): string {
  const parts: string[] = [`<table class="dashboard"><thead><tr>`];
  for (const column of REPORT_COLUMNS) {
    parts.push(`<th>${column}</th>`);
  }
  parts.push(`</tr></thead><tbody>`);
  for (const row of rows) {
    parts.push(`<tr data-group="${escapeHtml(row.group)}">`);
    parts.push(`<td>${escapeHtml(row.group)}</td><td>${row.n}</td>`);
    for (const dim of ["structural", "consistency", "clinical", "documentation", "overall"] as const) {
      parts.push(`<td class="cell-${dim}">${row[dim].toFixed(2)}</td>`);
    }
    parts.push(`</tr>`);
  }
  parts.push(`</tbody></table>`);
  return parts.join("");
}

export function renderErrorTotals(totals: Record<string, number>): string {
  const parts = [`<ul class="error-totals">`];
  for (const [category, count] of Object.entries(totals)) {
    parts.push(`<li>${escapeHtml(category)}: ${count}</li>`);
  }
  parts.push(`</ul>`);
  return parts.join("");
}
