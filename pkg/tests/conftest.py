import pytest

from modnorm.corpus import build_dataset
from modnorm.synthetic import SyntheticConfig, generate_corpus

from helpers import DictArchiveClient


@pytest.fixture(scope="session")
def synth_corpus():
    """A mid-sized deterministic synthetic corpus shared across tests."""
    return generate_corpus(
        SyntheticConfig(seed=11, subreddits=6, moderated_conversations=80)
    )


@pytest.fixture(scope="session")
def built_dataset(synth_corpus):
    return build_dataset(
        synth_corpus.comments,
        synth_corpus.rules,
        archive_client=DictArchiveClient(synth_corpus.archive_bodies),
    )
