"""Seeded synthetic corpus generation for offline pipeline testing.

The generator emits a comment dump, a rules file, an archive of removed
bodies, and a ground-truth manifest. Violating comments carry a distinct
marker phrase per coarse rule type, so models trained on the corpus have a
learnable signal and tests can check behavior against the generator's own
bookkeeping. Identical seeds yield byte-identical outputs.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

from modnorm.corpus.types import Comment, CommunityRule, Conversation
from modnorm.detector.variants import DetectionExample
from modnorm.explainer.pairs import PairProvenance, RulePairExample
from modnorm.taxonomy.types import AnnotatedRule, CoarseRuleType, FineRuleType

# One unmistakable phrase per coarse type. None contain the word "rule" (so
# they can never fake a moderation phrase), digits, or each other.
VIOLATION_MARKERS: dict[CoarseRuleType, str] = {
    CoarseRuleType.INCIVILITY: "quit acting like a total crabapple",
    CoarseRuleType.HARASSMENT: "i will keep hounding you in every thread",
    CoarseRuleType.SPAM: "grab my referral code before it expires",
    CoarseRuleType.FORMAT: "pasted everything as one giant unreadable wall",
    CoarseRuleType.CONTENT: "another blurry lowres screenshot dump",
    CoarseRuleType.OFF_TOPIC: "anyway let me tell you about my sourdough starter",
    CoarseRuleType.HATE_SPEECH: "those people should not be allowed here",
    CoarseRuleType.TROLLING: "just stirring the pot to watch you squirm",
    CoarseRuleType.META_RULES: "everybody downvote this into oblivion",
}

# Short name and description per fine type. Descriptions carry a distinct
# keyword phrase so rule classifiers have a separable signal; none contains
# another rule's text, a digit, or the word "rule" followed by a number.
RULE_TEMPLATES: dict[FineRuleType, tuple[str, str]] = {
    FineRuleType.ADVERTISING: (
        "No advertising",
        "advertising and referral promotions are banned in this community",
    ),
    FineRuleType.MODERATION_ENFORCEMENT: (
        "Respect mod actions",
        "do not argue with moderation decisions in public threads",
    ),
    FineRuleType.COPYRIGHT_PIRACY: (
        "No piracy",
        "sharing pirated downloads or license keys is prohibited",
    ),
    FineRuleType.DOXXING: (
        "No doxxing",
        "never reveal personal identifying information about anyone",
    ),
    FineRuleType.FORMAT: (
        "Formatting required",
        "posts must follow the community formatting template",
    ),
    FineRuleType.HARASSMENT: (
        "No harassment",
        "repeatedly targeting another member is harassment and is banned",
    ),
    FineRuleType.HATE_SPEECH: (
        "No hate speech",
        "slurs and attacks on protected groups are strictly forbidden",
    ),
    FineRuleType.IMAGES: (
        "Image limits",
        "image macros and reaction pictures belong in the weekly thread",
    ),
    FineRuleType.OUTSIDE_CONTENT: (
        "Approved links only",
        "outside links must point to approved sources with context",
    ),
    FineRuleType.LOW_QUALITY_CONTENT: (
        "Effort required",
        "low effort posts with no substance will be taken down",
    ),
    FineRuleType.NSFW: (
        "Tag mature content",
        "mature or explicit material requires the proper content tag",
    ),
    FineRuleType.OFF_TOPIC: (
        "Stay on topic",
        "discussion must stay relevant to the community subject",
    ),
    FineRuleType.PERSONAL_ARMY: (
        "No brigading",
        "requesting pile-ons or coordinated attacks is not allowed",
    ),
    FineRuleType.PERSONALITY: (
        "Be civil",
        "be kind and civil toward fellow members at all times",
    ),
    FineRuleType.POLITICS: (
        "No politics",
        "political arguments and campaigning belong elsewhere",
    ),
    FineRuleType.REDDIQUETTE: (
        "Follow etiquette",
        "observe general platform etiquette when participating",
    ),
    FineRuleType.REPOSTING: (
        "No reposts",
        "reposting recent submissions clutters the feed and is removed",
    ),
    FineRuleType.SPAM: (
        "No spam",
        "unsolicited promotions and repeated self links count as spam",
    ),
    FineRuleType.SPOILERS: (
        "Mark spoilers",
        "story spoilers must be hidden behind spoiler markup",
    ),
    FineRuleType.TROLLING: (
        "No trolling",
        "bad faith bait intended to provoke members is banned",
    ),
    FineRuleType.VOTING: (
        "No vote manipulation",
        "organizing upvotes or downvotes distorts ranking and is banned",
    ),
}

SUBREDDIT_NAMES = [
    "gadgetlab",
    "sourdoughbakers",
    "modelrailways",
    "retrohandhelds",
    "urbanbeekeeping",
    "filmgrain",
    "tidepooling",
    "speedcubers",
    "inkpens",
    "cloudspotting",
]

_FILLER_WORDS = (
    "honestly the firmware update went fine for me and the battery lasts "
    "longer now but the hinge still creaks when cold also the manual skips "
    "the calibration step entirely which seems odd for a flagship"
).split()

_NEUTRAL_SENTENCES = [
    "has anyone else tried this after the latest patch",
    "mine arrived yesterday and works better than expected",
    "i think the older revision handled this more gracefully",
    "could you share which settings you ended up using",
    "thanks for writing this up, saved me an afternoon",
    "the photos in the sidebar guide explain it well",
    "following this thread because i hit the same issue",
]

# Pseudo product / jargon words sprinkled into ordinary comments so that
# rare, one-off tokens occur in plenty of NON-violating text. Without them a
# classifier could learn "unfamiliar word means violation", which no real
# corpus supports. None contain digits or the letter sequence "rule".
_RARE_SYLLABLES = [
    "bram", "dex", "fiz", "gor", "hul", "jin", "kel", "lom", "mer",
    "nix", "pav", "quen", "ros", "tal", "vex", "wib", "yor", "zun",
]
_RARE_WORDS = [a + b for a in _RARE_SYLLABLES for b in _RARE_SYLLABLES]

_MOD_CHATTER = [
    "thanks for the submission!",
    "great discussion in here, carry on.",
    "reminder that the weekly thread is pinned.",
]


@dataclass
class SyntheticConfig:
    seed: int = 7
    subreddits: int = 6
    moderated_conversations: int = 240
    min_rules_per_subreddit: int = 4
    max_rules_per_subreddit: int = 7
    max_chain_length: int = 4
    max_control_branches: int = 3
    forecast_only_rate: float = 0.08
    verbatim_rate: float = 0.25
    double_moderation_rate: float = 0.05
    moderator_chatter_rate: float = 0.15
    users: int = 60
    moderators: int = 8


@dataclass
class TruthEvent:
    moderation_comment_id: str
    removed_comment_id: str
    subreddit: str
    rule_index: int
    method: str  # rule_number_phrase | verbatim_rule_text

    def to_record(self) -> dict:
        return self.__dict__.copy()


@dataclass
class GroundTruth:
    """What the generator knows; the independent reference for oracle tests."""

    total_comments: int = 0
    events: list[TruthEvent] = field(default_factory=list)
    threads: dict[str, list[str]] = field(default_factory=dict)  # removed -> path ids
    violation_coarse: dict[str, list[str]] = field(default_factory=dict)
    forecast_only: list[str] = field(default_factory=list)
    removed_bodies: dict[str, str] = field(default_factory=dict)
    moderator_names: list[str] = field(default_factory=list)
    subreddit_names: list[str] = field(default_factory=list)
    lengths: dict[str, int] = field(default_factory=dict)  # removed -> utterances after post

    def violations_per_coarse(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for types in self.violation_coarse.values():
            for name in set(types):
                counts[name] = counts.get(name, 0) + 1
        return counts

    def to_record(self) -> dict:
        return {
            "total_comments": self.total_comments,
            "events": [e.to_record() for e in self.events],
            "threads": self.threads,
            "violation_coarse": self.violation_coarse,
            "forecast_only": self.forecast_only,
            "removed_bodies": self.removed_bodies,
            "moderator_names": self.moderator_names,
            "subreddit_names": self.subreddit_names,
            "lengths": self.lengths,
        }


@dataclass
class SyntheticCorpus:
    comments: list[Comment]
    rules: list[CommunityRule]
    archive_bodies: dict[str, str]
    truth: GroundTruth

    def write(self, outdir: Union[str, Path]) -> dict[str, str]:
        from modnorm.corpus.archive import write_archive
        from modnorm.corpus.dump import write_dump, write_rules

        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        paths = {
            "dump": str(outdir / "dump.jsonl"),
            "rules": str(outdir / "rules.jsonl"),
            "archive": str(outdir / "archive.jsonl"),
            "truth": str(outdir / "truth.json"),
        }
        write_dump(self.comments, paths["dump"])
        write_rules(self.rules, paths["rules"])
        write_archive(self.archive_bodies, paths["archive"])
        Path(paths["truth"]).write_text(
            json.dumps(self.truth.to_record(), indent=2, sort_keys=True)
        )
        return paths


class _IdMint:
    """Deterministic hex-style ids that never collide with author names."""

    def __init__(self) -> None:
        self._comment = 0
        self._post = 0

    def comment_id(self) -> str:
        self._comment += 1
        return f"c{self._comment:06x}"

    def post_id(self) -> str:
        self._post += 1
        return f"p{self._post:04x}"


def _filler(rng: random.Random, words: int) -> str:
    return " ".join(rng.choice(_FILLER_WORDS) for _ in range(words))


def _compose_body(rng: random.Random, marker: Optional[str] = None) -> str:
    """A comment of 14-24 words; optionally smuggles a marker phrase inside.

    Violating and neutral comments share the same word pools and the same
    total-length distribution, so a marker phrase is the only dependable
    violation signal.
    """
    target = rng.randint(14, 24)
    marker_words = marker.split() if marker else []
    words = rng.choice(_NEUTRAL_SENTENCES).split()
    while len(words) < max(len(words), target - len(marker_words)):
        if rng.random() < 0.12:
            words.append(rng.choice(_RARE_WORDS))
        else:
            words.append(rng.choice(_FILLER_WORDS))
    if marker_words:
        cut = rng.randint(1, len(words))
        words = [*words[:cut], *marker_words, *words[cut:]]
    return " ".join(words)


def _neutral_body(rng: random.Random) -> str:
    return _compose_body(rng)


def _violating_body(rng: random.Random, coarse: CoarseRuleType) -> str:
    return _compose_body(rng, VIOLATION_MARKERS[coarse])


def make_rules(config: SyntheticConfig, rng: random.Random) -> list[CommunityRule]:
    """Rules for each synthetic subreddit, covering all nine coarse types."""
    names = _subreddit_names(config.subreddits)
    fine_types = list(FineRuleType)
    rules: list[CommunityRule] = []
    for position, subreddit in enumerate(names):
        count = rng.randint(config.min_rules_per_subreddit, config.max_rules_per_subreddit)
        # Rotate through the fine types so every coarse type appears somewhere.
        chosen: list[FineRuleType] = []
        cursor = (position * 5) % len(fine_types)
        while len(chosen) < count:
            candidate = fine_types[cursor % len(fine_types)]
            cursor += 1
            if candidate not in chosen:
                chosen.append(candidate)
        for index, fine in enumerate(chosen, start=1):
            short_name, description = RULE_TEMPLATES[fine]
            rules.append(
                CommunityRule(
                    subreddit=subreddit,
                    rule_index=index,
                    short_name=short_name,
                    description=description,
                    fine_types=frozenset({fine}),
                )
            )
    return rules


def _subreddit_names(count: int) -> list[str]:
    names = []
    for i in range(count):
        base = SUBREDDIT_NAMES[i % len(SUBREDDIT_NAMES)]
        names.append(base if i < len(SUBREDDIT_NAMES) else f"{base}{i}")
    return names


def generate_corpus(config: Optional[SyntheticConfig] = None) -> SyntheticCorpus:
    """Generate the full synthetic corpus with ground truth."""
    config = config or SyntheticConfig()
    rng = random.Random(config.seed)
    mint = _IdMint()
    truth = GroundTruth()

    rules = make_rules(config, rng)
    by_subreddit: dict[str, list[CommunityRule]] = {}
    for rule in rules:
        by_subreddit.setdefault(rule.subreddit, []).append(rule)
    subreddits = sorted(by_subreddit)
    truth.subreddit_names = subreddits

    users = [f"user-{i:03d}" for i in range(config.users)]
    moderators = [f"mod-{i:02d}" for i in range(config.moderators)]
    truth.moderator_names = list(moderators)

    coarse_cycle = list(CoarseRuleType)
    comments: list[Comment] = []
    clock = 1_600_000_000

    def tick() -> int:
        nonlocal clock
        clock += 60
        return clock

    def add_comment(**kwargs) -> Comment:
        comment = Comment(created_utc=tick(), **kwargs)
        comments.append(comment)
        return comment

    for conv_index in range(config.moderated_conversations):
        wanted_coarse = coarse_cycle[conv_index % len(coarse_cycle)]
        # Find a community holding a rule of the wanted coarse type.
        sub_order = rng.sample(subreddits, len(subreddits))
        subreddit, rule = None, None
        for candidate_sub in sub_order:
            matching = [
                r
                for r in by_subreddit[candidate_sub]
                if wanted_coarse in r.coarse_types
            ]
            if matching:
                subreddit = candidate_sub
                rule = rng.choice(matching)
                break
        if rule is None:  # fall back: any rule anywhere
            subreddit = rng.choice(subreddits)
            rule = rng.choice(by_subreddit[subreddit])
            wanted_coarse = sorted(rule.coarse_types, key=lambda t: t.value)[0]

        post_id = mint.post_id()
        post = add_comment(
            comment_id=mint.comment_id(),
            parent_id=None,
            post_id=post_id,
            subreddit=subreddit,
            author_pseudonym=rng.choice(users),
            body=_neutral_body(rng),
        )

        chain_ids = [post.comment_id]
        parent = post
        for _ in range(rng.randint(0, config.max_chain_length)):
            parent = add_comment(
                comment_id=mint.comment_id(),
                parent_id=parent.comment_id,
                post_id=post_id,
                subreddit=subreddit,
                author_pseudonym=rng.choice(users),
                body=_neutral_body(rng),
            )
            chain_ids.append(parent.comment_id)

        removed_body = _violating_body(rng, wanted_coarse)
        forecast_only = rng.random() < config.forecast_only_rate
        removed = add_comment(
            comment_id=mint.comment_id(),
            parent_id=parent.comment_id,
            post_id=post_id,
            subreddit=subreddit,
            author_pseudonym=rng.choice(users),
            body="",
            removed=True,
        )
        chain_ids.append(removed.comment_id)
        truth.threads[removed.comment_id] = chain_ids
        truth.lengths[removed.comment_id] = len(chain_ids) - 1
        truth.removed_bodies[removed.comment_id] = removed_body
        if forecast_only:
            truth.forecast_only.append(removed.comment_id)

        violated_rules = [rule]
        if (
            rng.random() < config.double_moderation_rate
            and len(by_subreddit[subreddit]) > 1
        ):
            others = [r for r in by_subreddit[subreddit] if r.rule_index != rule.rule_index]
            violated_rules.append(rng.choice(others))

        for violated in violated_rules:
            use_verbatim = rng.random() < config.verbatim_rate
            if use_verbatim:
                body = f"This was removed. {violated.description}"
                method = "verbatim_rule_text"
            else:
                body = (
                    f"Your comment has been removed for Rule {violated.rule_index}. "
                    f"{violated.short_name}."
                )
                method = "rule_number_phrase"
            mod_comment = add_comment(
                comment_id=mint.comment_id(),
                parent_id=removed.comment_id,
                post_id=post_id,
                subreddit=subreddit,
                author_pseudonym=rng.choice(moderators),
                body=body,
                author_is_moderator=True,
            )
            truth.events.append(
                TruthEvent(
                    moderation_comment_id=mod_comment.comment_id,
                    removed_comment_id=removed.comment_id,
                    subreddit=subreddit,
                    rule_index=violated.rule_index,
                    method=method,
                )
            )
        truth.violation_coarse[removed.comment_id] = sorted(
            {t.value for violated in violated_rules for t in violated.coarse_types}
        )

        # Unmoderated sibling branches under the same post, for control pairing.
        for _ in range(rng.randint(0, config.max_control_branches)):
            branch_parent = post
            for _ in range(rng.randint(1, config.max_chain_length + 1)):
                branch_parent = add_comment(
                    comment_id=mint.comment_id(),
                    parent_id=branch_parent.comment_id,
                    post_id=post_id,
                    subreddit=subreddit,
                    author_pseudonym=rng.choice(users),
                    body=_neutral_body(rng),
                )

        if rng.random() < config.moderator_chatter_rate:
            add_comment(
                comment_id=mint.comment_id(),
                parent_id=post.comment_id,
                post_id=post_id,
                subreddit=subreddit,
                author_pseudonym=rng.choice(moderators),
                body=rng.choice(_MOD_CHATTER),
                author_is_moderator=True,
            )

    truth.total_comments = len(comments)
    archive_bodies = {
        removed_id: body
        for removed_id, body in truth.removed_bodies.items()
        if removed_id not in set(truth.forecast_only)
    }
    return SyntheticCorpus(
        comments=comments,
        rules=rules,
        archive_bodies=archive_bodies,
        truth=truth,
    )


# ---------------------------------------------------------------------------
# Separable example sets for directional model experiments.
# ---------------------------------------------------------------------------


def _single_comment_conversation(
    mint: _IdMint,
    subreddit: str,
    texts: Sequence[str],
    base_utc: int = 1_500_000_000,
) -> Conversation:
    """A post plus replies built from raw texts; last text is the final comment."""
    post_id = mint.post_id()
    made: list[Comment] = []
    parent_id = None
    for offset, text in enumerate(texts):
        comment = Comment(
            comment_id=mint.comment_id(),
            parent_id=parent_id,
            post_id=post_id,
            subreddit=subreddit,
            author_pseudonym=f"user-{offset:03d}",
            body=text,
            created_utc=base_utc + offset * 60,
        )
        made.append(comment)
        parent_id = comment.comment_id
    if len(made) == 1:
        return Conversation(post=made[0], chain=(), final_comment=made[0])
    return Conversation(post=made[0], chain=tuple(made[1:-1]), final_comment=made[-1])


def marker_final_examples(
    seed: int,
    n: int,
    coarse: CoarseRuleType = CoarseRuleType.SPAM,
    subreddit: str = "plainville",
) -> list[DetectionExample]:
    """Examples whose final comment carries the marker exactly when positive.

    The signal is visible to every detector variant, so any of them can fit
    this set; used for memorization checks.
    """
    rng = random.Random(seed)
    mint = _IdMint()
    examples = []
    for i in range(n):
        positive = i % 2 == 0
        final = _violating_body(rng, coarse) if positive else _neutral_body(rng)
        conversation = _single_comment_conversation(
            mint, subreddit, [_neutral_body(rng), _neutral_body(rng), final]
        )
        examples.append(
            DetectionExample(
                conversation,
                frozenset({coarse}) if positive else frozenset(),
            )
        )
    rng.shuffle(examples)
    return examples


def community_conditional_examples(
    seed: int,
    n: int,
    coarse: CoarseRuleType = CoarseRuleType.INCIVILITY,
) -> list[DetectionExample]:
    """Examples where the marker means a violation only in one community.

    Every final comment carries the marker; the label is 1 exactly when the
    community is the strict one. Text alone cannot separate the classes.
    """
    rng = random.Random(seed)
    mint = _IdMint()
    examples = []
    for i in range(n):
        strict = i % 2 == 0
        subreddit = "strictville" if strict else "easystreet"
        body = _violating_body(rng, coarse)
        conversation = _single_comment_conversation(
            mint, subreddit, [_neutral_body(rng), body]
        )
        examples.append(
            DetectionExample(
                conversation,
                frozenset({coarse}) if strict else frozenset(),
            )
        )
    rng.shuffle(examples)
    return examples


def history_conditional_examples(
    seed: int,
    n: int,
    coarse: CoarseRuleType = CoarseRuleType.HARASSMENT,
) -> list[DetectionExample]:
    """Examples whose violation signal lives only in prior turns.

    The final comment is always bland; positives carry the marker in the
    turn before it.
    """
    rng = random.Random(seed)
    mint = _IdMint()
    closers = ["i see", "ok then", "sure, noted", "fair enough"]
    examples = []
    for i in range(n):
        positive = i % 2 == 0
        prior = _violating_body(rng, coarse) if positive else _neutral_body(rng)
        conversation = _single_comment_conversation(
            mint,
            "threadwatch",
            [_neutral_body(rng), prior, rng.choice(closers)],
        )
        examples.append(
            DetectionExample(
                conversation,
                frozenset({coarse}) if positive else frozenset(),
            )
        )
    rng.shuffle(examples)
    return examples


def separable_annotated_rules(
    seed: int,
    fine_type: FineRuleType,
    positives: int = 20,
    negatives: int = 20,
) -> list[AnnotatedRule]:
    """Annotated rules where the target type's description phrase is the signal."""
    rng = random.Random(seed)
    short_name, description = RULE_TEMPLATES[fine_type]
    other_types = [t for t in FineRuleType if t is not fine_type]
    rules = []
    for _ in range(positives):
        rules.append(
            AnnotatedRule(
                text=f"{description} {_filler(rng, rng.randint(1, 4))}",
                labels=frozenset({fine_type}),
            )
        )
    for _ in range(negatives):
        other = rng.choice(other_types)
        rules.append(
            AnnotatedRule(
                text=f"{RULE_TEMPLATES[other][1]} {_filler(rng, rng.randint(1, 4))}",
                labels=frozenset({other}),
            )
        )
    rng.shuffle(rules)
    return rules


def separable_pair_examples(
    seed: int,
    n: int,
    subreddit: str = "pairtown",
) -> tuple[list[RulePairExample], list[CommunityRule]]:
    """Rule pairs where positives contain the paired rule's marker phrase.

    Positives quote the rule's description keywords in the final comment;
    negatives pair a conversation violating one rule with a different rule.
    """
    rng = random.Random(seed)
    mint = _IdMint()
    fine_types = [
        FineRuleType.SPAM,
        FineRuleType.PERSONALITY,
        FineRuleType.POLITICS,
        FineRuleType.SPOILERS,
    ]
    rules = [
        CommunityRule(
            subreddit=subreddit,
            rule_index=i + 1,
            short_name=RULE_TEMPLATES[fine][0],
            description=RULE_TEMPLATES[fine][1],
            fine_types=frozenset({fine}),
        )
        for i, fine in enumerate(fine_types)
    ]
    pairs = []
    for i in range(n):
        # The echoed rule must be independent of the label, otherwise
        # "which rule text rides along" leaks the answer without any
        # segment matching.
        rule = rng.choice(rules)
        echo = f"{_filler(rng, 2)} {rule.description} {_filler(rng, 2)}"
        conversation = _single_comment_conversation(
            mint, subreddit, [_neutral_body(rng), echo]
        )
        positive = i % 2 == 0
        if positive:
            pairs.append(
                RulePairExample(
                    conversation, rule, 1, PairProvenance.OBSERVED_POSITIVE
                )
            )
        else:
            others = [r for r in rules if r.rule_index != rule.rule_index]
            pairs.append(
                RulePairExample(
                    conversation,
                    rng.choice(others),
                    0,
                    PairProvenance.MISMATCHED_RULE_NEGATIVE,
                )
            )
    rng.shuffle(pairs)
    return pairs, rules
