// Keyboard-first review: j/k to move, enter to open, a/r to decide,
// digits to pick the rule attached to a removal, escape to go back.

import type { QueueStore } from './store.js';

export async function handleKey(store: QueueStore, key: string): Promise<void> {
  const detail = store.detailItem;
  if (detail) {
    if (key === 'Escape') {
      store.closeDetail();
      return;
    }
    if (key === 'a' && detail.status === 'pending') {
      await store.decide(detail.item_id, 'approve');
      return;
    }
    if (key === 'r' && detail.status === 'pending') {
      const rule = store.chosenRuleIndex ?? detail.predictions[0]?.rule_index;
      await store.decide(detail.item_id, 'remove', rule ?? undefined);
      return;
    }
    if (/^[1-9]$/.test(key)) {
      store.chooseRule(Number(key));
      return;
    }
    return;
  }

  if (key === 'j') {
    store.moveSelection(1);
  } else if (key === 'k') {
    store.moveSelection(-1);
  } else if (key === 'Enter' || key === 'o') {
    const item = store.selectedItem;
    if (item) await store.openDetail(item.item_id);
  } else if (key === 'a') {
    const item = store.selectedItem;
    if (item && item.status === 'pending') await store.decide(item.item_id, 'approve');
  } else if (key === 'r') {
    const item = store.selectedItem;
    if (item && item.status === 'pending') {
      await store.decide(item.item_id, 'remove', item.predictions[0]?.rule_index);
    }
  }
}
