"""Conversation scoring behind the service: explainer + per-type detectors."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence

from modnorm.corpus.types import Comment, Conversation, RuleBook
from modnorm.detector.model import DetectorModel, predict as detector_predict
from modnorm.detector.variants import DetectionExample
from modnorm.explainer.model import ExplainerModel, explain
from modnorm.service.queue import RulePrediction


@dataclass
class ScoreOutcome:
    predictions: list[RulePrediction] = field(default_factory=list)
    type_scores: dict[str, float] = field(default_factory=dict)

    @property
    def max_probability(self) -> float:
        candidates = [p.probability for p in self.predictions]
        candidates.extend(self.type_scores.values())
        return max(candidates, default=0.0)


class ConversationScorer(Protocol):
    def score(self, subreddit: str, utterances: Sequence[dict]) -> ScoreOutcome: ...


def conversation_from_payload(
    subreddit: str, utterances: Sequence[dict]
) -> Conversation:
    """Build a Conversation from request utterances (oldest first)."""
    comments: list[Comment] = []
    parent_id: Optional[str] = None
    for index, utterance in enumerate(utterances):
        comment = Comment(
            comment_id=f"req-{index:04d}",
            parent_id=parent_id,
            post_id="req-post",
            subreddit=subreddit,
            author_pseudonym=str(utterance.get("author", "unknown")),
            body=str(utterance.get("body", "")),
            created_utc=int(utterance.get("created_utc", index)),
        )
        comments.append(comment)
        parent_id = comment.comment_id
    if len(comments) == 1:
        return Conversation(post=comments[0], chain=(), final_comment=comments[0])
    return Conversation(
        post=comments[0], chain=tuple(comments[1:-1]), final_comment=comments[-1]
    )


def primary_coarse_name(rule) -> str:
    names = sorted(t.value for t in rule.coarse_types)
    return names[0] if names else ""


class ModelScorer:
    """Scores a conversation with the loaded explainer and detectors."""

    def __init__(
        self,
        rules: RuleBook,
        explainer: ExplainerModel,
        detectors: Optional[dict[str, DetectorModel]] = None,
    ):
        self.rules = rules
        self.explainer = explainer
        self.detectors = detectors or {}

    def score(self, subreddit: str, utterances: Sequence[dict]) -> ScoreOutcome:
        conversation = conversation_from_payload(subreddit, utterances)
        community_rules = self.rules.for_subreddit(subreddit)
        ranked = explain(self.explainer, conversation, community_rules)
        outcome = ScoreOutcome(
            predictions=[
                RulePrediction(
                    rule_index=rule.rule_index,
                    rule_text=rule.display_text(),
                    coarse_type=primary_coarse_name(rule),
                    probability=probability,
                )
                for rule, probability in ranked
            ]
        )
        example = DetectionExample(conversation)
        for name, detector in self.detectors.items():
            outcome.type_scores[name] = detector_predict(detector, example)
        return outcome
