import { describe, expect, it } from 'vitest';

import type { Snapshot } from '../src/api';
import { breadcrumb, questionPrompt, viewFromSnapshot } from '../src/state';

const snapshot: Snapshot = {
  session_id: 's-1',
  hierarchy_id: 'demo10',
  algo: 'kbm-dp',
  b: 10,
  k: 2,
  budget_remaining: 8,
  p_size: 6,
  y_labels: ['v0', 'v1'],
  history: [
    { q: 'v3', answer: 'No', p_size: 6, y_size: 1 },
    { q: 'v1', answer: 'Yes', p_size: 6, y_size: 2 },
  ],
  terminated: false,
  question: { vertex: 5, label: 'v5', path: ['v0', 'v1', 'v5'], token: 'q3-abc' },
  best: {
    selections: [{ vertex: 1, label: 'v1', path: ['v0', 'v1'] }],
    penalty_vs_potential: 4,
  },
};

describe('view projection', () => {
  it('mirrors the snapshot field for field', () => {
    const view = viewFromSnapshot(snapshot);
    expect(view.sessionId).toBe('s-1');
    expect(view.budgetRemaining).toBe(8);
    expect(view.budgetTotal).toBe(10);
    expect(view.candidateCount).toBe(6);
    expect(view.history).toHaveLength(2);
    expect(view.history[1]).toEqual({ q: 'v1', answer: 'Yes', pSize: 6 });
    expect(view.selections).toEqual([{ label: 'v1', breadcrumb: 'v0 > v1' }]);
    expect(view.penaltyVsPotential).toBe(4);
    expect(view.terminated).toBe(false);
  });

  it('renders the question as a belongs-under prompt with breadcrumb', () => {
    const view = viewFromSnapshot(snapshot);
    expect(view.question?.prompt).toBe("Does the object belong under 'v5'?");
    expect(view.question?.breadcrumb).toBe('v0 > v1 > v5');
    expect(view.question?.token).toBe('q3-abc');
  });

  it('is a pure function: same snapshot, same view', () => {
    expect(viewFromSnapshot(snapshot)).toEqual(viewFromSnapshot(snapshot));
  });

  it('maps a terminated snapshot to a question-free view', () => {
    const done: Snapshot = { ...snapshot, terminated: true, question: null };
    const view = viewFromSnapshot(done);
    expect(view.question).toBeNull();
    expect(view.terminated).toBe(true);
  });

  it('breadcrumb and prompt helpers', () => {
    expect(breadcrumb(['a', 'b'])).toBe('a > b');
    expect(questionPrompt('pet')).toBe("Does the object belong under 'pet'?");
  });
});
