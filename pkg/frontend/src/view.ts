// HTML renderers. Pure string builders so the render logic is testable
// without a browser; main.ts owns actual DOM writes.

import type { QueueStore } from './store.js';
import type { CommunityRule, TriageItem } from './types.js';
import { topPrediction, topProbability } from './types.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function formatAge(item: TriageItem, nowUtc: number): string {
  const last = item.conversation[item.conversation.length - 1];
  if (!last) return '';
  const seconds = Math.max(nowUtc - last.created_utc, 0);
  if (seconds < 3600) return `${Math.floor(seconds / 60)}m`;
  if (seconds < 86400) return `${Math.floor(seconds / 3600)}h`;
  return `${Math.floor(seconds / 86400)}d`;
}

export function renderQueue(store: QueueStore, nowUtc: number = Date.now() / 1000): string {
  const parts: string[] = [];
  if (store.retryBanner) {
    parts.push('<div class="banner banner-retry">connection lost, retrying…</div>');
  }
  if (store.notice) {
    parts.push(
      `<div class="banner banner-${store.notice.kind}">${escapeHtml(store.notice.message)}</div>`,
    );
  }
  if (store.items.length === 0 && !store.loading) {
    parts.push('<div class="empty-state">queue is empty — nothing awaiting review</div>');
    return parts.join('\n');
  }
  const rows = store.items.map((item, index) => {
    const top = topPrediction(item);
    const selected = index === store.selectedIndex ? ' selected' : '';
    return [
      `<tr class="queue-row${selected}" data-item-id="${escapeHtml(item.item_id)}">`,
      `<td class="prob">${(topProbability(item) * 100).toFixed(0)}%</td>`,
      `<td class="rule">${top ? escapeHtml(top.rule_text) : ''}</td>`,
      `<td class="type">${top ? escapeHtml(top.coarse_type) : ''}</td>`,
      `<td class="sub">r/${escapeHtml(item.subreddit)}</td>`,
      `<td class="age">${formatAge(item, nowUtc)}</td>`,
      '</tr>',
    ].join('');
  });
  parts.push(
    '<table class="queue"><thead><tr>' +
      '<th>score</th><th>top rule</th><th>type</th><th>community</th><th>age</th>' +
      `</tr></thead><tbody>${rows.join('\n')}</tbody></table>`,
  );
  if (!store.exhausted) {
    parts.push('<button class="load-more" data-action="load-more">load more</button>');
  }
  return parts.join('\n');
}

function decisionLabel(item: TriageItem): string {
  if (item.status === 'removed') {
    const rule = item.decision?.rule_index;
    return rule != null ? `removed (Rule ${rule})` : 'removed';
  }
  if (item.status === 'approved') return 'approved';
  return 'pending';
}

export function renderDetail(
  item: TriageItem,
  rules: CommunityRule[],
  chosenRuleIndex: number | null,
): string {
  const parts: string[] = [`<div class="detail" data-item-id="${escapeHtml(item.item_id)}">`];
  parts.push(
    `<header><span class="sub">r/${escapeHtml(item.subreddit)}</span>` +
      `<span class="status status-${item.status}">${decisionLabel(item)}</span></header>`,
  );

  // Conversation oldest first; the flagged (final) comment is anchored.
  parts.push('<ol class="conversation">');
  item.conversation.forEach((utterance, index) => {
    const flagged = index === item.conversation.length - 1 ? ' flagged" id="flagged-comment' : '';
    parts.push(
      `<li class="utterance${flagged}">` +
        `<span class="author">${escapeHtml(utterance.author)}</span>` +
        `<span class="body">${escapeHtml(utterance.body)}</span></li>`,
    );
  });
  parts.push('</ol>');

  parts.push('<ol class="predictions">');
  for (const prediction of item.predictions) {
    const chosen = prediction.rule_index === chosenRuleIndex ? ' chosen' : '';
    parts.push(
      `<li class="prediction${chosen}" data-rule-index="${prediction.rule_index}">` +
        `<span class="prob">${(prediction.probability * 100).toFixed(1)}%</span>` +
        `<span class="rule-text">${escapeHtml(prediction.rule_text)}</span></li>`,
    );
  }
  parts.push('</ol>');

  if (rules.length > 0) {
    parts.push('<ul class="community-rules">');
    for (const rule of rules) {
      parts.push(
        `<li data-rule-index="${rule.rule_index}">` +
          `<b>${rule.rule_index}. ${escapeHtml(rule.short_name)}</b> ` +
          `<span class="rule-description">${escapeHtml(rule.description)}</span></li>`,
      );
    }
    parts.push('</ul>');
  }

  const disabled = item.status !== 'pending' ? ' disabled' : '';
  parts.push(
    '<div class="decision-controls">' +
      `<button data-action="approve"${disabled}>approve (a)</button>` +
      `<button data-action="remove"${disabled}>remove (r)</button>` +
      '</div>',
  );
  parts.push('</div>');
  return parts.join('\n');
}

export function renderApp(store: QueueStore, nowUtc: number = Date.now() / 1000): string {
  const detail = store.detailItem;
  if (detail) {
    return renderDetail(detail, store.rulesFor(detail.subreddit), store.chosenRuleIndex);
  }
  return renderQueue(store, nowUtc);
}
