"""The moderation-assist HTTP service."""

from __future__ import annotations

from typing import Optional

from fastapi import Depends, FastAPI, HTTPException, Query, Request
from pydantic import BaseModel, Field

from modnorm.corpus.types import RuleBook
from modnorm.service.config import ServiceSettings
from modnorm.service.queue import (
    DecisionConflictError,
    DecisionLog,
    ItemNotFoundError,
    TriageQueue,
)
from modnorm.service.scoring import ConversationScorer


class UtterancePayload(BaseModel):
    author: str
    body: str
    created_utc: int = 0


class ScoreRequest(BaseModel):
    subreddit: str
    conversation: list[UtterancePayload] = Field(min_length=1)


class PredictionPayload(BaseModel):
    rule_index: int
    rule_text: str
    coarse_type: str
    probability: float


class ScoreResponse(BaseModel):
    item_id: Optional[str] = None
    predictions: list[PredictionPayload]


class DecisionPayload(BaseModel):
    actor: str
    action: str
    timestamp: float
    rule_index: Optional[int] = None


class TriageItemPayload(BaseModel):
    item_id: str
    subreddit: str
    conversation: list[UtterancePayload]
    predictions: list[PredictionPayload]
    status: str
    decision: Optional[DecisionPayload] = None


class QueueResponse(BaseModel):
    items: list[TriageItemPayload]
    next_cursor: Optional[str] = None


class DecisionRequest(BaseModel):
    item_id: str
    action: str = Field(pattern="^(remove|approve)$")
    rule_index: Optional[int] = None
    actor: str


class RulePayload(BaseModel):
    rule_index: int
    short_name: str
    description: str
    coarse_types: list[str]


class RulesResponse(BaseModel):
    subreddit: str
    rules: list[RulePayload]


def _item_payload(item) -> TriageItemPayload:
    return TriageItemPayload(
        item_id=item.item_id,
        subreddit=item.subreddit,
        conversation=[UtterancePayload(**u) for u in item.conversation],
        predictions=[PredictionPayload(**p.to_record()) for p in item.predictions],
        status=item.status,
        decision=DecisionPayload(**item.decision.to_record()) if item.decision else None,
    )


def create_app(
    settings: ServiceSettings,
    rules: RuleBook,
    scorer: Optional[ConversationScorer] = None,
    queue: Optional[TriageQueue] = None,
) -> FastAPI:
    """Assemble the service around a rulebook, a scorer, and a triage queue."""
    app = FastAPI(title="modnorm triage service")
    if queue is None:
        queue = TriageQueue(
            DecisionLog(settings.decision_log), export_path=settings.export_path
        )
    app.state.queue = queue
    app.state.scorer = scorer
    app.state.rules = rules
    app.state.settings = settings

    def check_auth(request: Request) -> None:
        if not settings.auth_token:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {settings.auth_token}":
            raise HTTPException(status_code=401, detail="missing or bad token")

    @app.post("/v1/score", response_model=ScoreResponse)
    def score(request: ScoreRequest, _: None = Depends(check_auth)) -> ScoreResponse:
        if scorer is None:
            raise HTTPException(status_code=503, detail="models not loaded")
        if not rules.for_subreddit(request.subreddit):
            raise HTTPException(
                status_code=404, detail=f"unknown subreddit: {request.subreddit}"
            )
        conversation = [u.model_dump() for u in request.conversation]
        outcome = scorer.score(request.subreddit, conversation)
        predictions = [PredictionPayload(**p.to_record()) for p in outcome.predictions]

        item_id = None
        threshold = settings.threshold_for(request.subreddit)
        if outcome.max_probability >= threshold:
            existing = queue.find_pending(request.subreddit, conversation)
            if existing is not None:
                item_id = existing.item_id
            else:
                item = queue.create_item(
                    request.subreddit, conversation, outcome.predictions
                )
                item_id = item.item_id
        return ScoreResponse(item_id=item_id, predictions=predictions)

    @app.get("/v1/queue", response_model=QueueResponse)
    def list_queue(
        cursor: Optional[str] = Query(default=None),
        limit: int = Query(default=50, ge=1, le=500),
        _: None = Depends(check_auth),
    ) -> QueueResponse:
        items, next_cursor = queue.pending_page(cursor, limit)
        return QueueResponse(
            items=[_item_payload(i) for i in items], next_cursor=next_cursor
        )

    @app.post("/v1/decision", response_model=TriageItemPayload)
    def record_decision(
        request: DecisionRequest, _: None = Depends(check_auth)
    ) -> TriageItemPayload:
        try:
            item = queue.decide(
                request.item_id,
                request.action,
                actor=request.actor,
                rule_index=request.rule_index,
            )
        except ItemNotFoundError:
            raise HTTPException(status_code=404, detail=f"unknown item: {request.item_id}")
        except DecisionConflictError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return _item_payload(item)

    @app.get("/v1/rules/{subreddit}", response_model=RulesResponse)
    def get_rules(subreddit: str, _: None = Depends(check_auth)) -> RulesResponse:
        community_rules = rules.for_subreddit(subreddit)
        if not community_rules:
            raise HTTPException(status_code=404, detail=f"unknown subreddit: {subreddit}")
        return RulesResponse(
            subreddit=subreddit,
            rules=[
                RulePayload(
                    rule_index=rule.rule_index,
                    short_name=rule.short_name,
                    description=rule.description,
                    coarse_types=sorted(t.value for t in rule.coarse_types),
                )
                for rule in community_rules
            ],
        )

    if settings.static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=settings.static_dir, html=True), name="ui")

    return app
