"""Service integration with real trained models behind the scorer."""

import pytest
from fastapi.testclient import TestClient

from modnorm.corpus import RuleBook
from modnorm.detector import DetectorVariant, train_detector
from modnorm.explainer import ExplainerVariant, train_explainer
from modnorm.service import ModelScorer, ServiceSettings, create_app
from modnorm.synthetic import marker_final_examples, separable_pair_examples
from modnorm.taxonomy import CoarseRuleType

from helpers import tiny_train_config


@pytest.fixture(scope="module")
def model_backed_client(tmp_path_factory):
    pairs, rules = separable_pair_examples(seed=51, n=80)
    explainer, _ = train_explainer(
        pairs,
        seed=0,
        config=tiny_train_config(seed=0, epochs=15, learning_rate=1.5e-3, patience=15),
        variant=ExplainerVariant.RULE,
    )
    detector_examples = marker_final_examples(
        seed=52, n=40, coarse=CoarseRuleType.SPAM, subreddit="pairtown"
    )
    detector, _ = train_detector(
        CoarseRuleType.SPAM,
        DetectorVariant.COMMENT,
        split=None,
        seed=0,
        config=tiny_train_config(seed=0),
        train_examples=detector_examples,
        dev_examples=detector_examples,
    )
    rulebook = RuleBook(rules)
    scorer = ModelScorer(rulebook, explainer, {CoarseRuleType.SPAM.value: detector})
    log_dir = tmp_path_factory.mktemp("svc-models")
    settings = ServiceSettings(decision_log=str(log_dir / "decisions.jsonl"))
    app = create_app(settings, rulebook, scorer=scorer)
    return TestClient(app), pairs, rules


def _payload_for(conversation):
    return {
        "subreddit": conversation.subreddit,
        "conversation": [
            {
                "author": c.author_pseudonym,
                "body": c.body,
                "created_utc": c.created_utc,
            }
            for c in conversation.utterances()
        ],
    }


def test_memorized_violation_flags_and_ranks_its_rule_first(model_backed_client):
    client, pairs, _ = model_backed_client
    positive = next(p for p in pairs if p.label == 1)
    response = client.post("/v1/score", json=_payload_for(positive.conversation))
    assert response.status_code == 200
    payload = response.json()
    assert payload["item_id"] is not None  # queued as pending
    assert payload["predictions"][0]["rule_index"] == positive.rule.rule_index
    assert payload["predictions"][0]["probability"] >= 0.5

    queue = client.get("/v1/queue").json()
    assert any(item["item_id"] == payload["item_id"] for item in queue["items"])


def test_all_community_rules_are_scored(model_backed_client):
    client, pairs, rules = model_backed_client
    response = client.post("/v1/score", json=_payload_for(pairs[0].conversation))
    payload = response.json()
    assert len(payload["predictions"]) == len(rules)
    indexes = {p["rule_index"] for p in payload["predictions"]}
    assert indexes == {r.rule_index for r in rules}
