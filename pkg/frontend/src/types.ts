// Payload shapes of the service's /v1 endpoints. The client renders these
// verbatim; it never re-scores or reshapes model output.

export interface Utterance {
  author: string;
  body: string;
  created_utc: number;
}

export interface RulePrediction {
  rule_index: number;
  rule_text: string;
  coarse_type: string;
  probability: number;
}

export interface Decision {
  actor: string;
  action: 'remove' | 'approve';
  timestamp: number;
  rule_index: number | null;
}

export type ItemStatus = 'pending' | 'removed' | 'approved';

export interface TriageItem {
  item_id: string;
  subreddit: string;
  conversation: Utterance[];
  predictions: RulePrediction[];
  status: ItemStatus;
  decision: Decision | null;
}

export interface QueueResponse {
  items: TriageItem[];
  next_cursor: string | null;
}

export interface CommunityRule {
  rule_index: number;
  short_name: string;
  description: string;
  coarse_types: string[];
}

export interface RulesResponse {
  subreddit: string;
  rules: CommunityRule[];
}

export interface DecisionRequest {
  item_id: string;
  action: 'remove' | 'approve';
  rule_index?: number;
  actor: string;
}

export function topProbability(item: TriageItem): number {
  return item.predictions.reduce((max, p) => Math.max(max, p.probability), 0);
}

export function topPrediction(item: TriageItem): RulePrediction | undefined {
  return item.predictions[0];
}
