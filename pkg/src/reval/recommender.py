"""Baseline tweet-similarity hashtag recommender.

Each training tweet is encoded as the mean of its tokens' word vectors
(MOWE). For a test tweet, training tweets with cosine similarity at or
above the threshold contribute their hashtags to a candidate pool,
ranked by popularity and cut to the top r. The ranking is fully
deterministic: frequency within the selected set, then global training
frequency, then lexicographic order. With popularity_scope "global" the
global frequency leads instead.

The top-r list is a prefix of the top-r' list for r < r', so a sweep
can recommend once at the largest r and slice.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .corpus import CleanTweet
from .errors import FormatError
from .metrics import EvalPair, make_pair

POPULARITY_SCOPES = ("selected_set", "global")


def mowe(text: str, word_vectors: Mapping[str, np.ndarray]) -> Optional[np.ndarray]:
    """Mean of the word vectors of the text's covered tokens, unnormalized.

    None when no token has a vector; cosine similarity is scale invariant
    so the mean is never renormalized.
    """
    vectors = [word_vectors[token] for token in text.split() if token in word_vectors]
    if not vectors:
        return None
    return np.sum(np.stack(vectors), axis=0) / len(vectors)


class RecommenderModel:
    """Immutable trained state: one MOWE vector and hashtag list per
    usable training tweet, plus the word vectors for encoding queries."""

    def __init__(
        self,
        train_vectors: Mapping[int, np.ndarray],
        train_hashtags: Mapping[int, Sequence[str]],
        word_vectors: Mapping[str, np.ndarray],
        similarity_threshold: float = 0.5,
        popularity_scope: str = "selected_set",
    ):
        if not 0.0 <= similarity_threshold <= 1.0:
            raise FormatError(f"similarity threshold must be in [0, 1], got {similarity_threshold}")
        if popularity_scope not in POPULARITY_SCOPES:
            raise FormatError(f"popularity scope must be one of {POPULARITY_SCOPES}, got {popularity_scope!r}")
        missing = [i for i in train_vectors if i not in train_hashtags]
        if missing:
            raise FormatError(f"training tweets without hashtag lists: {sorted(missing)[:5]}")
        self.train_vectors = dict(train_vectors)
        self.train_hashtags = {i: tuple(tags) for i, tags in train_hashtags.items()}
        self.word_vectors = word_vectors
        self.similarity_threshold = similarity_threshold
        self.popularity_scope = popularity_scope

        self._indices = sorted(self.train_vectors)
        if self._indices:
            matrix = np.stack([self.train_vectors[i] for i in self._indices]).astype(np.float64)
            norms = np.linalg.norm(matrix, axis=1, keepdims=True)
            self._matrix = matrix / norms
        else:
            self._matrix = np.empty((0, 0))
        self._global_counts: Counter = Counter()
        for i in self._indices:
            self._global_counts.update(self.train_hashtags[i])


def build_model(
    train_tweets: Sequence[CleanTweet],
    word_vectors: Mapping[str, np.ndarray],
    similarity_threshold: float = 0.5,
    popularity_scope: str = "selected_set",
) -> RecommenderModel:
    """Encode training tweets as MOWE vectors. Tweets with no covered
    token (or whose token vectors cancel to zero) are unusable for
    similarity and are left out of the model."""
    train_vectors: dict[int, np.ndarray] = {}
    train_hashtags: dict[int, tuple[str, ...]] = {}
    for index, tweet in enumerate(train_tweets):
        v = mowe(tweet.text, word_vectors)
        if v is None or float(np.linalg.norm(v)) == 0.0:
            continue
        train_vectors[index] = v
        train_hashtags[index] = tweet.hashtags
    return RecommenderModel(
        train_vectors=train_vectors,
        train_hashtags=train_hashtags,
        word_vectors=word_vectors,
        similarity_threshold=similarity_threshold,
        popularity_scope=popularity_scope,
    )


def recommend(test_text: str, model: RecommenderModel, r: int) -> list[str]:
    """Top-r hashtags for one test tweet; may return fewer, or none when
    no training tweet reaches the similarity threshold."""
    if r < 1:
        raise FormatError(f"r must be at least 1, got {r}")
    if not model._indices:
        return []
    v = mowe(test_text, model.word_vectors)
    if v is None:
        return []
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        return []
    similarities = model._matrix @ (v / norm)
    selected = [model._indices[i] for i in np.nonzero(similarities >= model.similarity_threshold)[0]]
    local: Counter = Counter()
    for index in selected:
        local.update(model.train_hashtags[index])
    if model.popularity_scope == "selected_set":
        key = lambda tag: (-local[tag], -model._global_counts[tag], tag)
    else:
        key = lambda tag: (-model._global_counts[tag], -local[tag], tag)
    return sorted(local, key=key)[:r]


def recommend_pairs(
    model: RecommenderModel,
    test_tweets: Iterable[CleanTweet],
    r: int,
) -> list[EvalPair]:
    """Evaluation pairs for a test corpus: recommendations against the
    tweet's own hashtags as ground truth."""
    return [
        make_pair(tweet.id, recommend(tweet.text, model, r), tweet.hashtags)
        for tweet in test_tweets
    ]
