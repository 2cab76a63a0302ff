import type { TranscriptAnalysis } from "../types.js";
import { escapeHtml } from "../render.js";

/** Parse the textarea format: one utterance per line, optional
 * "start-end|" timing prefix, e.g. "0-2.5|the b-b-ball went far". */
export function parseUtterances(text: string): { start_s: number; end_s: number; text: string }[] {
  const utterances: { start_s: number; end_s: number; text: string }[] = [];
  let cursor = 0;
  for (const raw of text.split("\n")) {
    const line = raw.trim();
    if (!line) continue;
    const m = line.match(/^(\d+(?:\.\d+)?)-(\d+(?:\.\d+)?)\|(.*)$/);
    if (m) {
      utterances.push({ start_s: parseFloat(m[1]), end_s: parseFloat(m[2]), text: m[3].trim() });
      cursor = parseFloat(m[2]);
    } else {
      utterances.push({ start_s: cursor, end_s: cursor + 1, text: line });
      cursor += 1;
    }
  }
  return utterances;
}

export function renderAnalysis(analysis: TranscriptAnalysis): string {
  const r = analysis.report;
  const parts = [`<section class="analysis">`];
  if (analysis.deidentified) {
    parts.push(`<h3>De-identified transcript</h3><ol class="deidentified">`);
    for (const line of analysis.deidentified) {
      parts.push(`<li>${escapeHtml(line)}</li>`);
    }
    parts.push(`</ol>`);
  }
  parts.push(`<h3>Patterns</h3><ul class="patterns">`);
  parts.push(`<li>sound repetitions: ${r.sound_repetitions}</li>`);
  parts.push(`<li>syllable repetitions: ${r.syllable_repetitions}</li>`);
  parts.push(`<li>prolongations: ${r.prolongations}</li>`);
  parts.push(`<li>blocks: ${r.blocks}</li>`);
  parts.push(`<li>MLU (approx): ${r.mlu_approx.toFixed(2)}</li>`);
  parts.push(`<li>avg word length: ${r.avg_word_length.toFixed(2)}</li>`);
  parts.push(`<li>avg sentence length: ${r.avg_sentence_length.toFixed(2)}</li>`);
  parts.push(`</ul>`);
  if (analysis.clinical) {
    parts.push(`<h3>Clinical analysis</h3><dl class="clinical">`);
    for (const [key, value] of Object.entries(analysis.clinical)) {
      parts.push(`<dt>${escapeHtml(key.replace(/_/g, " "))}</dt><dd>${escapeHtml(value)}</dd>`);
    }
    parts.push(`</dl>`);
  }
  parts.push(`</section>`);
  return parts.join("");
}
