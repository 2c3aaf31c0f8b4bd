"""Moderation-assist HTTP service: scoring, triage queue, decision log."""

from modnorm.service.app import create_app
from modnorm.service.config import ConfigError, ServiceSettings
from modnorm.service.queue import (
    APPROVED,
    PENDING,
    REMOVED,
    Decision,
    DecisionConflictError,
    DecisionLog,
    ItemNotFoundError,
    RulePrediction,
    TriageItem,
    TriageQueue,
    replay_log,
)
from modnorm.service.scoring import (
    ConversationScorer,
    ModelScorer,
    ScoreOutcome,
    conversation_from_payload,
)

__all__ = [
    "APPROVED",
    "ConfigError",
    "ConversationScorer",
    "Decision",
    "DecisionConflictError",
    "DecisionLog",
    "ItemNotFoundError",
    "ModelScorer",
    "PENDING",
    "REMOVED",
    "RulePrediction",
    "ScoreOutcome",
    "ServiceSettings",
    "TriageItem",
    "TriageQueue",
    "conversation_from_payload",
    "create_app",
    "replay_log",
]
