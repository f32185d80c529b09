// Typed client for the session service. Four endpoints, nothing else.

export type Question = {
  vertex: number;
  label: string;
  path: string[];
  token: string;
};

export type SelectionItem = {
  vertex: number;
  label: string;
  path: string[];
};

export type HistoryEntry = {
  q: string;
  answer: 'Yes' | 'No';
  p_size: number;
  y_size: number;
};

export type Snapshot = {
  session_id: string;
  hierarchy_id: string;
  algo: string;
  b: number;
  k: number;
  budget_remaining: number;
  p_size: number;
  y_labels: string[];
  history: HistoryEntry[];
  terminated: boolean;
  question: Question | null;
  best: {
    selections: SelectionItem[];
    penalty_vs_potential: number;
  };
};

export type CreateResponse = {
  session_id: string;
  question: Question | null;
  budget_remaining: number;
  selections?: SelectionItem[];
  penalty_vs_potential?: number;
};

export type AnswerResponse = {
  question?: Question;
  selections?: SelectionItem[];
  penalty_vs_potential?: number;
  terminated?: boolean;
  budget_remaining: number;
  p_size?: number;
};

export class ApiError extends Error {
  code: string;
  status: number;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.code = code;
    this.status = status;
  }
}

async function request<T>(base: string, method: string, path: string, body?: unknown): Promise<T> {
  let res: Response;
  try {
    res = await fetch(base + path, {
      method,
      headers: body !== undefined ? { 'Content-Type': 'application/json' } : undefined,
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
  } catch (err) {
    throw new ApiError(0, 'unreachable', `service unreachable: ${String(err)}`);
  }
  const doc = await res.json().catch(() => ({}));
  if (!res.ok) {
    throw new ApiError(res.status, doc.code ?? 'error', doc.message ?? res.statusText);
  }
  return doc as T;
}

export class Client {
  constructor(readonly base: string) {}

  async uploadHierarchy(body: string): Promise<{ hierarchy_id: string; n: number }> {
    let res: Response;
    try {
      res = await fetch(this.base + '/hierarchies', { method: 'POST', body });
    } catch (err) {
      throw new ApiError(0, 'unreachable', `service unreachable: ${String(err)}`);
    }
    const doc = await res.json().catch(() => ({}));
    if (!res.ok) {
      throw new ApiError(res.status, doc.code ?? 'error', doc.message ?? res.statusText);
    }
    return doc as { hierarchy_id: string; n: number };
  }

  createSession(hierarchyId: string, algo: string, b: number, k: number): Promise<CreateResponse> {
    return request(this.base, 'POST', '/sessions', {
      hierarchy_id: hierarchyId,
      algo,
      b,
      k,
    });
  }

  submitAnswer(sessionId: string, answer: 'yes' | 'no', token: string): Promise<AnswerResponse> {
    return request(this.base, 'POST', `/sessions/${sessionId}/answer`, { answer, token });
  }

  getSession(sessionId: string): Promise<Snapshot> {
    return request(this.base, 'GET', `/sessions/${sessionId}`);
  }
}
