// Client state for the triage queue. The server is the source of truth:
// the queue renders exactly what GET /v1/queue returned (no re-scoring, no
// re-sorting) and every mutation goes through POST /v1/decision.

import { ApiClient, ApiError } from './api.js';
import type { CommunityRule, ItemStatus, RulesResponse, TriageItem } from './types.js';

export interface Notice {
  kind: 'info' | 'error' | 'conflict';
  message: string;
}

const BASE_POLL_MS = 5_000;
const MAX_POLL_MS = 80_000;

type Listener = () => void;

export class QueueStore {
  items: TriageItem[] = [];
  nextCursor: string | null = null;
  exhausted = false;
  selectedIndex = 0;
  detailItemId: string | null = null;
  chosenRuleIndex: number | null = null;
  notice: Notice | null = null;
  retryBanner = false;
  loading = false;
  pollDelayMs = BASE_POLL_MS;

  private rulesCache = new Map<string, RulesResponse>();
  private listeners: Listener[] = [];

  constructor(
    private readonly api: ApiClient,
    public actor: string = 'moderator',
    private readonly pageSize = 25,
  ) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  get selectedItem(): TriageItem | null {
    return this.items[this.selectedIndex] ?? null;
  }

  get detailItem(): TriageItem | null {
    if (this.detailItemId === null) return null;
    return this.items.find((i) => i.item_id === this.detailItemId) ?? null;
  }

  rulesFor(subreddit: string): CommunityRule[] {
    return this.rulesCache.get(subreddit)?.rules ?? [];
  }

  // -- queue loading --------------------------------------------------------

  async loadFirstPage(): Promise<void> {
    this.loading = true;
    this.emit();
    try {
      const page = await this.api.fetchQueue(null, this.pageSize);
      this.items = page.items;
      this.nextCursor = page.next_cursor;
      this.exhausted = page.next_cursor === null;
      this.retryBanner = false;
      this.pollDelayMs = BASE_POLL_MS;
      this.clampSelection();
    } catch (error) {
      this.onNetworkFailure(error);
    } finally {
      this.loading = false;
      this.emit();
    }
  }

  async loadMore(): Promise<void> {
    if (this.exhausted || this.nextCursor === null || this.loading) return;
    this.loading = true;
    this.emit();
    try {
      const page = await this.api.fetchQueue(this.nextCursor, this.pageSize);
      const known = new Set(this.items.map((i) => i.item_id));
      // Append in server order, never duplicating an id already shown.
      for (const item of page.items) {
        if (!known.has(item.item_id)) this.items.push(item);
      }
      this.nextCursor = page.next_cursor;
      this.exhausted = page.next_cursor === null;
      this.retryBanner = false;
      this.pollDelayMs = BASE_POLL_MS;
    } catch (error) {
      this.onNetworkFailure(error);
    } finally {
      this.loading = false;
      this.emit();
    }
  }

  async refresh(): Promise<void> {
    const selected = this.selectedItem?.item_id ?? null;
    await this.loadFirstPage();
    if (selected !== null) {
      const index = this.items.findIndex((i) => i.item_id === selected);
      this.selectedIndex = index >= 0 ? index : Math.min(this.selectedIndex, Math.max(this.items.length - 1, 0));
      this.emit();
    }
  }

  private onNetworkFailure(error: unknown): void {
    this.retryBanner = true;
    this.pollDelayMs = Math.min(this.pollDelayMs * 2, MAX_POLL_MS);
    this.notice = {
      kind: 'error',
      message: `network trouble: ${error instanceof Error ? error.message : String(error)} (retrying)`,
    };
  }

  // -- selection and detail -------------------------------------------------

  moveSelection(delta: number): void {
    if (this.items.length === 0) return;
    this.selectedIndex = Math.min(
      Math.max(this.selectedIndex + delta, 0),
      this.items.length - 1,
    );
    this.emit();
  }

  private clampSelection(): void {
    this.selectedIndex = Math.min(this.selectedIndex, Math.max(this.items.length - 1, 0));
  }

  async openDetail(itemId: string): Promise<void> {
    const item = this.items.find((i) => i.item_id === itemId);
    if (!item) return;
    this.detailItemId = itemId;
    this.chosenRuleIndex = item.predictions[0]?.rule_index ?? null;
    if (!this.rulesCache.has(item.subreddit)) {
      try {
        this.rulesCache.set(item.subreddit, await this.api.fetchRules(item.subreddit));
      } catch (error) {
        this.notice = {
          kind: 'error',
          message: `could not load rules for r/${item.subreddit}`,
        };
      }
    }
    this.emit();
  }

  closeDetail(): void {
    this.detailItemId = null;
    this.chosenRuleIndex = null;
    this.emit();
  }

  chooseRule(ruleIndex: number): void {
    this.chosenRuleIndex = ruleIndex;
    this.emit();
  }

  // -- decisions --------------------------------------------------------------

  async decide(itemId: string, action: 'remove' | 'approve', ruleIndex?: number): Promise<void> {
    const index = this.items.findIndex((i) => i.item_id === itemId);
    const item = this.items[index];
    if (!item || item.status !== 'pending') return;

    // Optimistic update: flip the status locally, roll back on conflict.
    const snapshot: ItemStatus = item.status;
    item.status = action === 'remove' ? 'removed' : 'approved';
    this.emit();

    try {
      const decided = await this.api.submitDecision({
        item_id: itemId,
        action,
        rule_index: action === 'remove' ? ruleIndex : undefined,
        actor: this.actor,
      });
      this.items[index] = decided;
      // Decided items leave the pending queue; the detail view keeps the
      // returned record so the outcome stays visible.
      this.items = this.items.filter(
        (i) => i.status === 'pending' || i.item_id === this.detailItemId,
      );
      this.clampSelection();
      this.notice = null;
      this.emit();
    } catch (error) {
      item.status = snapshot;
      if (error instanceof ApiError && error.isConflict) {
        this.notice = {
          kind: 'conflict',
          message: `someone already decided ${itemId}; refreshing`,
        };
        this.emit();
        await this.refresh();
      } else {
        this.notice = {
          kind: 'error',
          message: error instanceof Error ? error.message : String(error),
        };
        this.emit();
      }
    }
  }
}
