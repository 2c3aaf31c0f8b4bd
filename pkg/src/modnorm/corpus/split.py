"""The shared 80-10-10 split over moderated entries; controls follow their target."""

from __future__ import annotations

import random
from dataclasses import dataclass

from modnorm.corpus.build import CorpusDataset, DatasetEntry

SPLIT_FRACTIONS = (0.8, 0.1, 0.1)


@dataclass
class DatasetSplit:
    """One train/dev/test partition shared by every model and variant."""

    train: list[DatasetEntry]
    dev: list[DatasetEntry]
    test: list[DatasetEntry]
    seed: int = 0

    def sizes(self) -> tuple[int, int, int]:
        return (len(self.train), len(self.dev), len(self.test))


def split_dataset(dataset: CorpusDataset, seed: int = 0) -> DatasetSplit:
    """Randomly split moderated entries 80-10-10.

    Controls stay attached to their entry, landing in the same split. The
    split depends only on the entry order and the seed, so every model
    trained on the corpus shares the identical test set.
    """
    entries = list(dataset.entries)
    rng = random.Random(seed)
    rng.shuffle(entries)
    n = len(entries)
    n_train = int(n * SPLIT_FRACTIONS[0])
    n_dev = int(n * SPLIT_FRACTIONS[1])
    return DatasetSplit(
        train=entries[:n_train],
        dev=entries[n_train : n_train + n_dev],
        test=entries[n_train + n_dev :],
        seed=seed,
    )
