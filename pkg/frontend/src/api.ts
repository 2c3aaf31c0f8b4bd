// Thin fetch client for the service's /v1 endpoints. All server state
// changes go through these calls and nothing else.

import type { DecisionRequest, QueueResponse, RulesResponse, TriageItem } from './types.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }

  get isConflict(): boolean {
    return this.status === 409;
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
    private readonly authToken: string = '',
  ) {}

  private headers(): Record<string, string> {
    const headers: Record<string, string> = { 'Content-Type': 'application/json' };
    if (this.authToken) {
      headers['Authorization'] = `Bearer ${this.authToken}`;
    }
    return headers;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      ...init,
      headers: { ...this.headers(), ...(init?.headers ?? {}) },
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (body && typeof body.detail === 'string') detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  async fetchQueue(cursor: string | null, limit = 50): Promise<QueueResponse> {
    const params = new URLSearchParams({ limit: String(limit) });
    if (cursor) params.set('cursor', cursor);
    return this.request<QueueResponse>(`/v1/queue?${params.toString()}`);
  }

  async fetchRules(subreddit: string): Promise<RulesResponse> {
    return this.request<RulesResponse>(`/v1/rules/${encodeURIComponent(subreddit)}`);
  }

  async submitDecision(decision: DecisionRequest): Promise<TriageItem> {
    return this.request<TriageItem>('/v1/decision', {
      method: 'POST',
      body: JSON.stringify(decision),
    });
  }
}
