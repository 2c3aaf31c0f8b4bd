// In-memory stand-in for the triage service, speaking the /v1 wire format
// through a FetchLike. Tests poke at its state to simulate races.

import type { FetchLike } from '../src/api.js';
import type {
  CommunityRule,
  QueueResponse,
  RulePrediction,
  TriageItem,
  Utterance,
} from '../src/types.js';

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

export function makeItem(
  id: string,
  probability: number,
  overrides: Partial<TriageItem> = {},
): TriageItem {
  const conversation: Utterance[] = [
    { author: 'user-a', body: 'the original post', created_utc: 1000 },
    { author: 'user-b', body: `comment for ${id}`, created_utc: 1060 },
  ];
  const predictions: RulePrediction[] = [
    {
      rule_index: 1,
      rule_text: 'Be civil: be kind and civil toward fellow members',
      coarse_type: 'Incivility',
      probability,
    },
    {
      rule_index: 2,
      rule_text: 'No spam: unsolicited promotions count as spam',
      coarse_type: 'Spam',
      probability: Math.max(probability - 0.3, 0.01),
    },
  ];
  return {
    item_id: id,
    subreddit: 'gadgetlab',
    conversation,
    predictions,
    status: 'pending',
    decision: null,
    ...overrides,
  };
}

export const STUB_RULES: CommunityRule[] = [
  {
    rule_index: 1,
    short_name: 'Be civil',
    description: 'be kind and civil toward fellow members',
    coarse_types: ['Incivility'],
  },
  {
    rule_index: 2,
    short_name: 'No spam',
    description: 'unsolicited  promotions count as spam ',
    coarse_types: ['Spam'],
  },
];

export type ConflictMode = 'none' | 'still-pending' | 'decided-elsewhere';

export class StubService {
  pending: TriageItem[] = [];
  rules: CommunityRule[] = STUB_RULES;
  conflictItems = new Map<string, ConflictMode>();
  failNextRequests = 0;
  requests: string[] = [];

  readonly fetch: FetchLike = async (input, init) => {
    this.requests.push(`${init?.method ?? 'GET'} ${input}`);
    if (this.failNextRequests > 0) {
      this.failNextRequests -= 1;
      throw new TypeError('fetch failed');
    }
    const url = new URL(input, 'http://stub');
    if (url.pathname === '/v1/queue') {
      return this.handleQueue(url);
    }
    if (url.pathname.startsWith('/v1/rules/')) {
      return json({ subreddit: decodeURIComponent(url.pathname.split('/').pop()!), rules: this.rules });
    }
    if (url.pathname === '/v1/decision' && init?.method === 'POST') {
      return this.handleDecision(JSON.parse(String(init.body)));
    }
    return json({ detail: 'not found' }, 404);
  };

  private handleQueue(url: URL): Response {
    const limit = Number(url.searchParams.get('limit') ?? '50');
    const cursor = url.searchParams.get('cursor');
    const offset = cursor ? Number(cursor) : 0;
    const page = this.pending.slice(offset, offset + limit);
    const body: QueueResponse = {
      items: page,
      next_cursor: offset + limit < this.pending.length ? String(offset + limit) : null,
    };
    return json(body);
  }

  private handleDecision(request: {
    item_id: string;
    action: 'remove' | 'approve';
    rule_index?: number;
    actor: string;
  }): Response {
    const mode = this.conflictItems.get(request.item_id) ?? 'none';
    if (mode !== 'none') {
      if (mode === 'decided-elsewhere') {
        this.pending = this.pending.filter((i) => i.item_id !== request.item_id);
      }
      return json({ detail: `${request.item_id} already decided` }, 409);
    }
    const item = this.pending.find((i) => i.item_id === request.item_id);
    if (!item) {
      return json({ detail: `unknown item: ${request.item_id}` }, 404);
    }
    this.pending = this.pending.filter((i) => i.item_id !== request.item_id);
    const decided: TriageItem = {
      ...item,
      status: request.action === 'remove' ? 'removed' : 'approved',
      decision: {
        actor: request.actor,
        action: request.action,
        timestamp: 12345.0,
        rule_index: request.rule_index ?? null,
      },
    };
    return json(decided);
  }
}
