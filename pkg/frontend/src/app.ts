/** Tab shell and event wiring. All state derives from API responses. */

import { ApiRequestError, SlpCaseClient } from "./api.js";
import { errorBanner, escapeHtml } from "./render.js";
import { renderCaseView, singleCaseFormProblems } from "./views/singleCase.js";
import { renderComposer, renderPlan } from "./views/group.js";
import { renderDashboard, renderErrorTotals } from "./views/reports.js";
import { renderFeedbackForm, renderScores, RATING_FIELDS, clampRating } from "./views/review.js";
import { parseUtterances, renderAnalysis } from "./views/transcript.js";
import type { CaseRecord } from "./types.js";

export const TABS = ["Single", "Batch", "Group", "Review", "Transcript", "Reports"] as const;
export type Tab = (typeof TABS)[number];

interface AppState {
  activeTab: Tab;
  jobIds: string[];
  selectedCaseIds: string[];
  candidates: CaseRecord[];
}

export function createApp(root: HTMLElement, client: SlpCaseClient) {
  const state: AppState = {
    activeTab: "Single",
    jobIds: [],
    selectedCaseIds: [],
    candidates: [],
  };

  const output = () => root.querySelector<HTMLElement>("#output")!;

  function showError(err: unknown, retry: () => void) {
    const banner =
      err instanceof ApiRequestError
        ? errorBanner(err.message, err.body.correlation_id)
        : errorBanner(String(err), "");
    output().innerHTML = banner;
    output()
      .querySelector<HTMLButtonElement>("[data-action=retry]")
      ?.addEventListener("click", retry);
  }

  function renderShell() {
    root.innerHTML = `
      <nav class="tabs">
        ${TABS.map(
          (tab) =>
            `<button data-tab="${tab}"${tab === state.activeTab ? ' class="active"' : ""}>${tab}</button>`,
        ).join("")}
      </nav>
      <section id="panel">${renderPanel()}</section>
      <section id="output" aria-live="polite"></section>
    `;
    for (const button of root.querySelectorAll<HTMLButtonElement>("[data-tab]")) {
      button.addEventListener("click", () => {
        state.activeTab = button.dataset.tab as Tab;
        renderShell();
      });
    }
    wirePanel();
  }

  function renderPanel(): string {
    switch (state.activeTab) {
      case "Single":
        return `
          <form id="single-form">
            <input name="disorders" placeholder="Disorders, comma separated" required>
            <input name="grade" placeholder="Grade (e.g. 2nd Grade)" required>
            <input name="population_spec" placeholder="Population notes (optional)">
            <button type="submit">Generate</button>
          </form>
          <form id="conversational-form">
            <textarea name="text" placeholder="Or describe the request in plain language"></textarea>
            <button type="submit">Send</button>
          </form>`;
      case "Batch":
        return `
          <form id="batch-form">
            <textarea name="spec" placeholder='Batch spec JSON, e.g. {"count": 5}'></textarea>
            <button type="submit">Start batch</button>
          </form>
          <ul id="jobs">${state.jobIds.map((id) => `<li>${escapeHtml(id)}</li>`).join("")}</ul>`;
      case "Group":
        return `
          <form id="group-form">
            <input name="target_grade" placeholder="Target grade" required>
            <input name="desired_size" type="number" min="2" max="4" value="3">
            <button type="submit">Find candidates</button>
          </form>
          <div id="composer"></div>`;
      case "Review":
        return `
          <form id="review-form">
            <input name="case_id" placeholder="Case id" required>
            <button type="submit">Load</button>
          </form>
          <div id="review-body"></div>`;
      case "Transcript":
        return `
          <form id="transcript-form">
            <textarea name="transcript" placeholder="One utterance per line; optional start-end| prefix"></textarea>
            <label><input type="checkbox" name="deidentify" checked> de-identify</label>
            <label><input type="checkbox" name="clinical"> clinical analysis</label>
            <button type="submit">Analyze</button>
          </form>`;
      case "Reports":
        return `
          <form id="reports-form">
            <select name="group_by"><option>model</option><option>disorder</option></select>
            <button type="submit">Refresh</button>
          </form>
          <div id="dashboard"></div>`;
    }
  }

  function wirePanel() {
    const on = (selector: string, handler: (form: HTMLFormElement) => void) => {
      const form = root.querySelector<HTMLFormElement>(selector);
      form?.addEventListener("submit", (event) => {
        event.preventDefault();
        handler(form);
      });
    };

    on("#single-form", (form) => {
      const data = new FormData(form);
      const request = {
        disorders: String(data.get("disorders") ?? "")
          .split(",")
          .map((s) => s.trim())
          .filter(Boolean),
        grade: String(data.get("grade") ?? ""),
        population_spec: String(data.get("population_spec") ?? ""),
      };
      const problems = singleCaseFormProblems(request);
      if (problems.length) {
        output().innerHTML = problems.map((p) => `<p class="problem">${escapeHtml(p)}</p>`).join("");
        return;
      }
      const run = () =>
        client
          .createCase(request)
          .then(async (record) => {
            const validation = await client.validateCase(record.case_id);
            output().innerHTML = renderCaseView(record, validation);
          })
          .catch((err) => showError(err, run));
      run();
    });

    on("#conversational-form", (form) => {
      const text = String(new FormData(form).get("text") ?? "");
      const run = () =>
        client
          .createBatch({ text })
          .then(({ job_id }) => {
            state.jobIds.push(job_id);
            return client.waitForJob(job_id);
          })
          .then((result) => {
            output().innerHTML =
              `<p>generated ${result.case_ids.length} case(s)</p>` +
              result.warnings.map((w) => `<p class="warning">${escapeHtml(w)}</p>`).join("");
          })
          .catch((err) => showError(err, run));
      run();
    });

    on("#batch-form", (form) => {
      const spec = JSON.parse(String(new FormData(form).get("spec") || "{}"));
      const run = () =>
        client
          .createBatch({ spec })
          .then(({ job_id }) => {
            state.jobIds.push(job_id);
            renderShell();
            return client.waitForJob(job_id);
          })
          .then((result) => {
            output().innerHTML = `<p>batch done: ${result.case_ids.length} case(s), ${result.failures.length} failure(s)</p>`;
          })
          .catch((err) => showError(err, run));
      run();
    });

    on("#group-form", (form) => {
      const data = new FormData(form);
      const request = {
        target_grade: String(data.get("target_grade") ?? ""),
        desired_size: Number(data.get("desired_size") ?? 3),
      };
      const run = () =>
        client
          .matchGroup(request)
          .then((match) => {
            state.candidates = match.candidates;
            state.selectedCaseIds = [];
            drawComposer(match.shortfall);
          })
          .catch((err) => showError(err, run));
      run();
    });

    on("#review-form", async (form) => {
      const caseId = String(new FormData(form).get("case_id") ?? "");
      const body = root.querySelector<HTMLElement>("#review-body")!;
      try {
        const scores = await client.scoreCase(caseId);
        body.innerHTML = renderScores(scores.deterministic, scores.judge) + renderFeedbackForm(caseId);
        body.querySelector<HTMLFormElement>("form.feedback")?.addEventListener("submit", async (event) => {
          event.preventDefault();
          const data = new FormData(event.target as HTMLFormElement);
          const ratings: Record<string, number> = {};
          for (const field of RATING_FIELDS) {
            ratings[field] = clampRating(Number(data.get(field) ?? 3));
          }
          await client.submitFeedback(caseId, {
            reviewer_id: String(data.get("reviewer_id") ?? ""),
            ratings,
            free_text: String(data.get("free_text") ?? ""),
          });
          output().innerHTML = `<p class="toast">feedback recorded</p>`;
        });
      } catch (err) {
        showError(err, () => form.requestSubmit());
      }
    });

    on("#transcript-form", (form) => {
      const data = new FormData(form);
      const request = {
        utterances: parseUtterances(String(data.get("transcript") ?? "")),
        deidentify: data.get("deidentify") !== null,
        clinical: data.get("clinical") !== null,
      };
      const run = () =>
        client
          .analyzeTranscript(request)
          .then((analysis) => {
            output().innerHTML = renderAnalysis(analysis);
          })
          .catch((err) => showError(err, run));
      run();
    });

    on("#reports-form", (form) => {
      const groupBy = String(new FormData(form).get("group_by") ?? "model") as "model" | "disorder";
      const run = () =>
        Promise.all([client.qualityReport(groupBy), client.errorReport()])
          .then(([quality, errors]) => {
            root.querySelector<HTMLElement>("#dashboard")!.innerHTML =
              renderDashboard(quality.rows) + renderErrorTotals(errors.totals);
          })
          .catch((err) => showError(err, run));
      run();
    });
  }

  function drawComposer(shortfall: number) {
    const host = root.querySelector<HTMLElement>("#composer")!;
    host.innerHTML = renderComposer(state.candidates, state.selectedCaseIds, shortfall);
    for (const box of host.querySelectorAll<HTMLInputElement>("input[type=checkbox]")) {
      box.addEventListener("change", () => {
        const id = box.dataset.caseId!;
        state.selectedCaseIds = box.checked
          ? [...state.selectedCaseIds, id]
          : state.selectedCaseIds.filter((x) => x !== id);
        drawComposer(shortfall);
      });
    }
    host.querySelector<HTMLButtonElement>("[data-action=plan]")?.addEventListener("click", () => {
      const run = () =>
        client
          .planGroup({ member_ids: state.selectedCaseIds })
          .then((plan) => {
            output().innerHTML = renderPlan(plan);
          })
          .catch((err) => showError(err, run));
      run();
    });
  }

  renderShell();
  return { state };
}

declare global {
  interface Window {
    SLPCASE_API_BASE?: string;
    SLPCASE_API_TOKEN?: string;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  createApp(
    document.getElementById("app")!,
    new SlpCaseClient({
      baseUrl: window.SLPCASE_API_BASE ?? "",
      token: window.SLPCASE_API_TOKEN,
    }),
  );
}
