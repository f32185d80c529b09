// The view model is a pure projection of a service snapshot: every field a
// screen needs, nothing the algorithms own. Refreshing mid-session and
// re-deriving from GET /sessions must land on the identical view.

import type { Snapshot } from './api.js';

export type SessionView = {
  sessionId: string;
  question: {
    label: string;
    prompt: string;
    breadcrumb: string;
    token: string;
  } | null;
  budgetRemaining: number;
  budgetTotal: number;
  candidateCount: number;
  history: { q: string; answer: 'Yes' | 'No'; pSize: number }[];
  selections: { label: string; breadcrumb: string }[];
  penaltyVsPotential: number;
  terminated: boolean;
};

export function breadcrumb(path: string[]): string {
  return path.join(' > ');
}

export function questionPrompt(label: string): string {
  return `Does the object belong under '${label}'?`;
}

export function viewFromSnapshot(snap: Snapshot): SessionView {
  return {
    sessionId: snap.session_id,
    question: snap.question
      ? {
          label: snap.question.label,
          prompt: questionPrompt(snap.question.label),
          breadcrumb: breadcrumb(snap.question.path),
          token: snap.question.token,
        }
      : null,
    budgetRemaining: snap.budget_remaining,
    budgetTotal: snap.b,
    candidateCount: snap.p_size,
    history: snap.history.map((e) => ({ q: e.q, answer: e.answer, pSize: e.p_size })),
    selections: snap.best.selections.map((s) => ({
      label: s.label,
      breadcrumb: breadcrumb(s.path),
    })),
    penaltyVsPotential: snap.best.penalty_vs_potential,
    terminated: snap.terminated,
  };
}
