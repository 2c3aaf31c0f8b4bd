"""Utterance encoding: tokenizer plus a bidirectional contextual text encoder.

Models consume an encoder checkpoint named in config. The name is either a
directory (or hub id) loadable by the transformers library, or the literal
``tiny``, which builds a small randomly-initialized encoder whose vocabulary
comes from the training texts. The tiny encoder keeps the whole pipeline
runnable offline on CPU; a full-size conversational checkpoint can be dropped
in through the same config field.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, Union

import torch
from torch import nn
from transformers import AutoModel, AutoTokenizer, BertConfig, BertModel, BertTokenizerFast

SPECIAL_TOKENS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]")
_WORD_RE = re.compile(r"\w+|[^\w\s]")

TextItem = Union[str, tuple[str, str]]  # single utterance or (text, paired text)

TINY_CHECKPOINT = "tiny"


@dataclass
class EncoderSettings:
    """Encoder checkpoint selection and tiny-encoder dimensions.

    Words below ``vocab_min_freq`` stay out of the vocabulary, so one-off
    tokens hit [UNK] during training and the unfamiliar-word region gets
    supervised instead of staying at random initialization.
    """

    checkpoint: str = TINY_CHECKPOINT
    max_length: int = 64
    hidden_size: int = 64
    num_layers: int = 2
    num_attention_heads: int = 2
    intermediate_size: int = 128
    vocab_limit: int = 8000
    vocab_min_freq: int = 2
    init_seed: int = 0

    def to_record(self) -> dict:
        return {
            "checkpoint": self.checkpoint,
            "max_length": self.max_length,
            "hidden_size": self.hidden_size,
            "num_layers": self.num_layers,
            "num_attention_heads": self.num_attention_heads,
            "intermediate_size": self.intermediate_size,
            "vocab_limit": self.vocab_limit,
            "vocab_min_freq": self.vocab_min_freq,
            "init_seed": self.init_seed,
        }


def build_vocab(
    texts: Iterable[str], limit: int = 8000, min_freq: int = 1
) -> dict[str, int]:
    """Word-level vocabulary from raw texts, specials first, then by frequency."""
    counts: Counter[str] = Counter()
    for text in texts:
        counts.update(_WORD_RE.findall(text.lower()))
    ranked = sorted(
        (kv for kv in counts.items() if kv[1] >= min_freq),
        key=lambda kv: (-kv[1], kv[0]),
    )
    vocab = {token: index for index, token in enumerate(SPECIAL_TOKENS)}
    for word, _ in ranked[: max(0, limit - len(SPECIAL_TOKENS))]:
        vocab[word] = len(vocab)
    return vocab


class UtteranceEncoder(nn.Module):
    """Tokenizer + contextual encoder producing one vector per utterance.

    Utterances longer than ``max_length`` tokens are truncated from the left
    so the most recent text survives. Items may be plain strings or
    (text, paired_text) tuples; pairs are encoded with the tokenizer's
    separator between the two segments.
    """

    def __init__(self, tokenizer, model, max_length: int = 64):
        super().__init__()
        self.tokenizer = tokenizer
        self.tokenizer.truncation_side = "left"
        self.model = model
        self.max_length = max_length

    @property
    def hidden_size(self) -> int:
        return self.model.config.hidden_size

    def encode_batch(self, items: Sequence[TextItem]) -> torch.Tensor:
        """Encode a batch of utterances into (batch, hidden) vectors."""
        singles = [(i, item) for i, item in enumerate(items) if isinstance(item, str)]
        pairs = [(i, item) for i, item in enumerate(items) if not isinstance(item, str)]
        out = torch.empty(len(items), self.hidden_size)
        chunks = []
        if singles:
            chunks.append(([i for i, _ in singles], self._run([t for _, t in singles], None)))
        if pairs:
            chunks.append(
                (
                    [i for i, _ in pairs],
                    self._run([a for _, (a, _) in pairs], [b for _, (_, b) in pairs]),
                )
            )
        vectors = [None] * len(items)
        for positions, encoded in chunks:
            for row, position in enumerate(positions):
                vectors[position] = encoded[row]
        return torch.stack(vectors) if vectors else out

    def _run(self, texts: list[str], paired: list[str] | None) -> torch.Tensor:
        encoded = self.tokenizer(
            texts,
            paired,
            return_tensors="pt",
            padding=True,
            truncation=True,
            max_length=self.max_length,
        )
        hidden = self.model(**encoded).last_hidden_state
        return hidden[:, 0]  # [CLS] position


def tiny_encoder(
    texts: Iterable[str], settings: EncoderSettings | None = None
) -> UtteranceEncoder:
    """Build a small randomly-initialized encoder with a corpus vocabulary."""
    settings = settings or EncoderSettings()
    vocab = build_vocab(texts, settings.vocab_limit, settings.vocab_min_freq)
    tokenizer = BertTokenizerFast(vocab=vocab, do_lower_case=True)
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=settings.hidden_size,
        num_hidden_layers=settings.num_layers,
        num_attention_heads=settings.num_attention_heads,
        intermediate_size=settings.intermediate_size,
        max_position_embeddings=max(settings.max_length, 64),
    )
    generator_state = torch.random.get_rng_state()
    torch.manual_seed(settings.init_seed)
    model = BertModel(config)
    torch.random.set_rng_state(generator_state)
    return UtteranceEncoder(tokenizer, model, settings.max_length)


def load_encoder(checkpoint: Union[str, Path], max_length: int = 64) -> UtteranceEncoder:
    """Load a saved encoder directory or a pretrained hub checkpoint."""
    tokenizer = AutoTokenizer.from_pretrained(str(checkpoint))
    model = AutoModel.from_pretrained(str(checkpoint))
    return UtteranceEncoder(tokenizer, model, max_length)


def save_encoder(encoder: UtteranceEncoder, path: Union[str, Path]) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    encoder.tokenizer.save_pretrained(str(path))
    encoder.model.save_pretrained(str(path))


def resolve_encoder(
    settings: EncoderSettings, corpus_texts: Iterable[str] | None = None
) -> UtteranceEncoder:
    """Create the encoder named by ``settings.checkpoint``.

    ``tiny`` requires corpus texts for the vocabulary; anything else is
    treated as a checkpoint path or hub id.
    """
    if settings.checkpoint == TINY_CHECKPOINT:
        if corpus_texts is None:
            raise ValueError("tiny encoder needs corpus texts for its vocabulary")
        return tiny_encoder(corpus_texts, settings)
    return load_encoder(settings.checkpoint, settings.max_length)
