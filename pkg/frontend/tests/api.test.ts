import { describe, expect, it } from 'vitest';

import { ApiClient, ApiError } from '../src/api.js';
import { StubService, makeItem } from './stub.js';

describe('ApiClient', () => {
  it('fetches queue pages with cursor and limit', async () => {
    const stub = new StubService();
    stub.pending = [makeItem('item-1', 0.9), makeItem('item-2', 0.8)];
    const client = new ApiClient('', stub.fetch);
    const page = await client.fetchQueue(null, 1);
    expect(page.items.map((i) => i.item_id)).toEqual(['item-1']);
    expect(page.next_cursor).toBe('1');

    const second = await client.fetchQueue(page.next_cursor, 1);
    expect(second.items.map((i) => i.item_id)).toEqual(['item-2']);
    expect(second.next_cursor).toBeNull();
    expect(stub.requests[0]).toContain('/v1/queue?limit=1');
    expect(stub.requests[1]).toContain('cursor=1');
  });

  it('sends the bearer token when configured', async () => {
    let seenAuth = '';
    const fetchImpl = async (input: string, init?: RequestInit) => {
      seenAuth = (init?.headers as Record<string, string>)?.Authorization ?? '';
      return new Response(JSON.stringify({ items: [], next_cursor: null }), { status: 200 });
    };
    const client = new ApiClient('', fetchImpl, 'sesame');
    await client.fetchQueue(null);
    expect(seenAuth).toBe('Bearer sesame');
  });

  it('posts decisions as JSON', async () => {
    const stub = new StubService();
    stub.pending = [makeItem('item-1', 0.9)];
    const client = new ApiClient('', stub.fetch);
    const decided = await client.submitDecision({
      item_id: 'item-1',
      action: 'remove',
      rule_index: 2,
      actor: 'mod-1',
    });
    expect(decided.status).toBe('removed');
    expect(decided.decision?.rule_index).toBe(2);
  });

  it('raises ApiError with the server detail and conflict flag', async () => {
    const stub = new StubService();
    stub.pending = [makeItem('item-1', 0.9)];
    stub.conflictItems.set('item-1', 'still-pending');
    const client = new ApiClient('', stub.fetch);
    try {
      await client.submitDecision({ item_id: 'item-1', action: 'approve', actor: 'm' });
      expect.unreachable('should have thrown');
    } catch (error) {
      expect(error).toBeInstanceOf(ApiError);
      expect((error as ApiError).status).toBe(409);
      expect((error as ApiError).isConflict).toBe(true);
      expect((error as ApiError).detail).toContain('already decided');
    }
  });
});
