// Wiring: start form -> live session -> selections screen.
//
// The session id lives in the URL hash, so a mid-session refresh re-fetches
// the snapshot and reconstructs the same view; nothing about the search
// lives only in the page. Answers carry the pending question's token and the
// buttons disable while a submission is in flight, so a double click cannot
// advance the session twice.

import { ApiError, Client } from './api.js';
import { SessionView, viewFromSnapshot } from './state.js';
import { Handlers, renderError, renderSession, renderStart } from './view.js';

export class App {
  private client: Client;
  private root: HTMLElement;
  private sessionId: string | null = null;
  private view: SessionView | null = null;
  private submitting = false;

  constructor(root: HTMLElement, serviceBase: string) {
    this.root = root;
    this.client = new Client(serviceBase);
  }

  handlers(): Handlers {
    return {
      onStart: (hierarchyId, algo, b, k) => void this.start(hierarchyId, algo, b, k),
      onAnswer: (answer) => void this.answer(answer),
      onRestart: () => {
        this.sessionId = null;
        this.view = null;
        window.location.hash = '';
        renderStart(this.root, this.handlers());
      },
    };
  }

  async boot(): Promise<void> {
    const fromHash = window.location.hash.replace(/^#/, '');
    if (fromHash) {
      try {
        await this.restore(fromHash);
        return;
      } catch (err) {
        renderStart(this.root, this.handlers(), describe(err));
        return;
      }
    }
    renderStart(this.root, this.handlers());
  }

  async start(hierarchyId: string, algo: string, b: number, k: number): Promise<void> {
    try {
      const created = await this.client.createSession(hierarchyId, algo, b, k);
      this.sessionId = created.session_id;
      window.location.hash = created.session_id;
      await this.refresh();
    } catch (err) {
      renderStart(this.root, this.handlers(), describe(err));
    }
  }

  async restore(sessionId: string): Promise<void> {
    this.sessionId = sessionId;
    await this.refresh();
  }

  async answer(answer: 'yes' | 'no'): Promise<void> {
    if (this.submitting || !this.sessionId || !this.view?.question) {
      return;
    }
    this.submitting = true;
    renderSession(this.root, this.view, this.handlers(), true);
    try {
      await this.client.submitAnswer(this.sessionId, answer, this.view.question.token);
      await this.refresh();
    } catch (err) {
      if (err instanceof ApiError && err.code === 'token_mismatch') {
        await this.refresh();          // someone else answered first; resync
      } else {
        renderError(this.root, describe(err));
      }
    } finally {
      this.submitting = false;
    }
  }

  async refresh(): Promise<void> {
    if (!this.sessionId) {
      return;
    }
    const snap = await this.client.getSession(this.sessionId);
    this.view = viewFromSnapshot(snap);
    renderSession(this.root, this.view, this.handlers());
  }

  currentView(): SessionView | null {
    return this.view;
  }
}

export function mount(root: HTMLElement, serviceBase: string): App {
  const app = new App(root, serviceBase);
  void app.boot();
  return app;
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return err.code === 'unreachable'
      ? 'Cannot reach the session service. Is it running?'
      : `${err.code}: ${err.message}`;
  }
  return String(err);
}
