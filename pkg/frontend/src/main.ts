// Browser entry point: wires the store to the DOM and polls the queue.

import { ApiClient } from './api.js';
import { handleKey } from './keyboard.js';
import { QueueStore } from './store.js';
import { renderApp } from './view.js';

function mount(): void {
  const root = document.getElementById('app');
  if (!root) throw new Error('missing #app element');

  const params = new URLSearchParams(window.location.search);
  const client = new ApiClient('', undefined, params.get('token') ?? '');
  const store = new QueueStore(client, params.get('actor') ?? 'moderator');

  store.subscribe(() => {
    root.innerHTML = renderApp(store);
    const flagged = document.getElementById('flagged-comment');
    if (flagged) flagged.scrollIntoView({ block: 'center' });
  });

  root.addEventListener('click', (event) => {
    const target = event.target as HTMLElement;
    const row = target.closest<HTMLElement>('.queue-row');
    if (row?.dataset.itemId) {
      void store.openDetail(row.dataset.itemId);
      return;
    }
    const prediction = target.closest<HTMLElement>('.prediction');
    if (prediction?.dataset.ruleIndex) {
      store.chooseRule(Number(prediction.dataset.ruleIndex));
      return;
    }
    const action = target.closest<HTMLElement>('[data-action]')?.dataset.action;
    if (action === 'load-more') {
      void store.loadMore();
    } else if (action === 'approve' || action === 'remove') {
      const detail = store.detailItem;
      if (detail) {
        void store.decide(
          detail.item_id,
          action,
          action === 'remove' ? store.chosenRuleIndex ?? undefined : undefined,
        );
      }
    }
  });

  document.addEventListener('keydown', (event) => {
    if (event.target instanceof HTMLInputElement) return;
    void handleKey(store, event.key);
  });

  const poll = (): void => {
    window.setTimeout(async () => {
      if (!store.detailItem) await store.refresh();
      poll();
    }, store.pollDelayMs);
  };

  void store.loadFirstPage().then(() => poll());
}

mount();
