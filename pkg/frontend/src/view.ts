import type { SessionStateJson } from "./types.js";

/** Pure HTML rendering of the session state; all output derives from the
 * service JSON so the console never invents values of its own. */

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Probabilities shown with two decimals, e.g. "0.93". */
export function formatProbability(p: number | null): string {
  return p === null ? "–" : p.toFixed(2);
}

export function probabilityBar(p: number | null): string {
  const pct = p === null ? 0 : Math.round(p * 1000) / 10;
  return (
    `<div class="bar"><div class="bar-fill" style="width:${pct}%"></div>` +
    `<span class="bar-label">${formatProbability(p)}</span></div>`
  );
}

function idsLabel(ids: number[]): string {
  return ids.map((i) => `α${i}`).join(", ");
}

export function renderDiagnoses(state: SessionStateJson): string {
  const rows = state.leading
    .map((d) => {
      const inPlus = state.query?.dplus.some(
        (ids) => ids.join(",") === d.ids.join(","),
      );
      const side =
        state.query === null ? "" : inPlus ? "predicts yes" : "predicts no";
      const hover = d.sentences.map(escapeHtml).join(" ; ");
      return (
        `<tr title="${hover}"><td>{${idsLabel(d.ids)}}</td>` +
        `<td>${probabilityBar(d.probability)}</td>` +
        `<td class="side">${side}</td></tr>`
      );
    })
    .join("");
  return `<table class="diagnoses"><tbody>${rows}</tbody></table>`;
}

export function renderQuery(state: SessionStateJson): string {
  const q = state.query;
  if (q === null) return "";
  const sentences = q.sentences
    .map(
      (s) =>
        `<li><code>${escapeHtml(s.text)}</code>` +
        `<span class="cost">cost ${s.cost}</span></li>`,
    )
    .join("");
  return (
    `<div class="query"><h2>Does this hold in the intended system?</h2>` +
    `<ul>${sentences}</ul>` +
    `<p class="answer-odds">yes ${formatProbability(q.p_true)} · ` +
    `no ${formatProbability(q.p_false)}</p></div>`
  );
}

export function renderDone(state: SessionStateJson): string {
  if (state.status !== "DONE" || state.diagnosis === null) return "";
  const sentences = state.diagnosis.sentences
    .map((s) => `<li><code>${escapeHtml(s)}</code></li>`)
    .join("");
  return (
    `<div class="done"><h2>Diagnosis isolated</h2>` +
    `<p>The faulty sentences are {${idsLabel(state.diagnosis.ids)}}:</p>` +
    `<ul>${sentences}</ul></div>`
  );
}

export function renderHistory(state: SessionStateJson): string {
  const items = state.history
    .filter((h) => h.answer !== null)
    .map(
      (h) =>
        `<li>#${h.iteration} <code>${h.query.map(escapeHtml).join(" ; ")}</code>` +
        ` → <strong>${h.answer}</strong></li>`,
    )
    .join("");
  return items ? `<ol class="history">${items}</ol>` : "";
}

/** Whether the answer buttons may be pressed. */
export function answersEnabled(state: SessionStateJson): boolean {
  return state.status === "RUNNING" && state.query !== null;
}

export function renderSession(state: SessionStateJson): string {
  return (
    `<section class="status status-${state.status.toLowerCase()}">` +
    `${state.status}</section>` +
    renderDone(state) +
    renderQuery(state) +
    `<h2>Leading diagnoses</h2>` +
    renderDiagnoses(state) +
    renderHistory(state)
  );
}
