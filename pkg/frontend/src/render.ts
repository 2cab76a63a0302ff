/** Shared HTML helpers. Views are pure string renderers so contract tests can
 * assert on output without a browser. */

export function escapeHtml(value: unknown): string {
  return String(value ?? "")
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function badge(label: string, tone: "ok" | "warn" | "error"): string {
  return `<span class="badge badge-${tone}">${escapeHtml(label)}</span>`;
}

export function errorBanner(message: string, correlationId: string): string {
  return (
    `<div class="error-banner" role="alert">` +
    `${escapeHtml(message)} <code>${escapeHtml(correlationId)}</code> ` +
    `<button data-action="retry">Retry</button></div>`
  );
}
