"""Shared fixtures: the hand-written fixture thesaurus, random dictionary
builders, and the synthetic planted-cluster corpus."""

from __future__ import annotations

import json
import random

import numpy as np
import pytest

from reval.embedding import HashtagCentroid, HashtagDictionary
from reval.thesaurus import Thesaurus, thesaurus_from_members

# Six hashtags with three synonyms each; the fixture behind the
# worked-example tests. Note the asymmetry: #sport is a synonym of
# #swim but not the other way round.
FIXTURE_SYNONYMS = {
    "#hockey": ["#bowling", "#golf", "#sport"],
    "#championship": ["#champion", "#winner", "#tournament"],
    "#football": ["#soccer", "#footy", "#rugby"],
    "#sport": ["#sports", "#exercise", "#keeepfit"],
    "#swim": ["#dive", "#paddle", "#sport"],
    "#exercise": ["#keeepfit", "#yoga", "#walking"],
}


@pytest.fixture(scope="session")
def fixture_thesaurus() -> Thesaurus:
    return thesaurus_from_members(3, FIXTURE_SYNONYMS)


def make_dictionary(m: int, dim: int, seed: int) -> HashtagDictionary:
    """Random dictionary: m hashtags with random running sums and counts."""
    rng = np.random.default_rng(seed)
    dictionary = HashtagDictionary(dim)
    for i in range(m):
        dictionary.add(HashtagCentroid(
            hashtag=f"#tag{i:05d}",
            running_sum=rng.standard_normal(dim) * rng.uniform(0.5, 20.0),
            count=int(rng.integers(1, 50)),
        ))
    return dictionary


# ---------------------------------------------------------------------------
# Planted-cluster corpus: 10 topics, each with its own hashtags and word
# pool, so hashtags of one topic end up mutual nearest neighbours.

TOPIC_COUNT = 10
TAGS_PER_TOPIC = 5
WORDS_PER_TOPIC = 8
TWEETS_PER_TOPIC = 30


def planted_corpus_lines(seed: int = 13) -> list[str]:
    rng = random.Random(seed)
    lines = []
    tweet_id = 0
    for topic in range(TOPIC_COUNT):
        tags = [f"#topic{topic}tag{j}" for j in range(TAGS_PER_TOPIC)]
        words = [f"word{topic}x{j}" for j in range(WORDS_PER_TOPIC)]
        for _ in range(TWEETS_PER_TOPIC):
            n_words = rng.randint(4, 6)
            n_tags = rng.randint(1, 2)
            text = " ".join(rng.choices(words, k=n_words) + rng.sample(tags, n_tags))
            tweet_id += 1
            lines.append(json.dumps({"id": f"p{tweet_id:04d}", "text": text}))
    return lines


@pytest.fixture(scope="session")
def planted_corpus_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("planted") / "corpus.jsonl"
    path.write_text("\n".join(planted_corpus_lines()) + "\n", encoding="utf-8")
    return path
