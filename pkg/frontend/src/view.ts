// DOM rendering. Screens: start form, live question card, selections screen,
// plus an error banner. All content derives from a SessionView.

import type { SessionView } from './state.js';

export type Handlers = {
  onStart: (hierarchyId: string, algo: string, b: number, k: number) => void;
  onAnswer: (answer: 'yes' | 'no') => void;
  onRestart: () => void;
};

const ALGOS = ['kbm-dp-plus', 'kbm-dp', 'kbm-topk', 'bing', 'stbis'];

export function renderStart(root: HTMLElement, handlers: Handlers, error?: string): void {
  root.innerHTML = `
    <div class="start">
      <h1>Find the labels</h1>
      ${error ? `<div class="banner error" data-test="error">${escapeHtml(error)}</div>` : ''}
      <form data-test="start-form">
        <label>Hierarchy
          <input name="hierarchy" value="demo10" data-test="hierarchy">
        </label>
        <label>Strategy
          <select name="algo" data-test="algo">
            ${ALGOS.map((a) => `<option value="${a}">${a}</option>`).join('')}
          </select>
        </label>
        <label>Questions <input name="b" type="number" value="10" min="1" data-test="budget"></label>
        <label>Selections <input name="k" type="number" value="2" min="1" data-test="k"></label>
        <button type="submit" data-test="start">Start</button>
      </form>
    </div>`;
  const form = root.querySelector('form')!;
  form.addEventListener('submit', (ev) => {
    ev.preventDefault();
    const get = (name: string) =>
      (form.querySelector(`[name=${name}]`) as HTMLInputElement | HTMLSelectElement).value;
    handlers.onStart(get('hierarchy'), get('algo'), Number(get('b')), Number(get('k')));
  });
}

export function renderSession(root: HTMLElement, view: SessionView, handlers: Handlers,
                              busy = false): void {
  if (view.terminated || view.question === null) {
    renderSelections(root, view, handlers);
    return;
  }
  const q = view.question;
  root.innerHTML = `
    <div class="session">
      <div class="status">
        <span data-test="budget">${view.budgetRemaining} of ${view.budgetTotal} questions left</span>
        <span data-test="candidates">${view.candidateCount} candidates remain</span>
      </div>
      <div class="card" data-test="question-card">
        <div class="breadcrumb" data-test="breadcrumb">${escapeHtml(q.breadcrumb)}</div>
        <h2 data-test="question">${escapeHtml(q.prompt)}</h2>
        <button data-test="yes" ${busy ? 'disabled' : ''}>Yes</button>
        <button data-test="no" ${busy ? 'disabled' : ''}>No</button>
      </div>
      <ol class="history" data-test="history">
        ${view.history
          .map((e) => `<li>${escapeHtml(e.q)}: ${e.answer} (${e.pSize} left)</li>`)
          .join('')}
      </ol>
    </div>`;
  root.querySelector('[data-test=yes]')!.addEventListener('click', () => handlers.onAnswer('yes'));
  root.querySelector('[data-test=no]')!.addEventListener('click', () => handlers.onAnswer('no'));
}

export function renderSelections(root: HTMLElement, view: SessionView, handlers: Handlers): void {
  root.innerHTML = `
    <div class="done" data-test="selections-screen">
      <h2>Selected labels</h2>
      <ul data-test="selections">
        ${view.selections
          .map((s) =>
            `<li data-test="selection">${escapeHtml(s.label)}` +
            `<span class="breadcrumb"> (${escapeHtml(s.breadcrumb)})</span></li>`)
          .join('')}
      </ul>
      <div data-test="history-count">${view.history.length} questions answered</div>
      <button data-test="restart">Start over</button>
    </div>`;
  root.querySelector('[data-test=restart]')!.addEventListener('click', handlers.onRestart);
}

export function renderError(root: HTMLElement, message: string): void {
  const banner = document.createElement('div');
  banner.className = 'banner error';
  banner.setAttribute('data-test', 'error');
  banner.textContent = message;
  root.prepend(banner);
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}
