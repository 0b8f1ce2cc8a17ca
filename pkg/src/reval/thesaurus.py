"""Synonym lists and the hashtag thesaurus.

Syn_k(h) is h itself plus the k nearest other hashtags by cosine
distance between centroid directions. Neighbour order is ascending
distance with lexicographic hashtag as the tie break, so Syn_k(h) is a
prefix of Syn_{k+1}(h) and k=0 leaves only h. The relation is directed:
b in Syn_k(a) does not imply a in Syn_k(b).

Distances are quantized to 9 decimal places before ranking. Mathematically
equal distances can differ by ~1e-13 depending on summation order (one
matvec vs a blocked matrix product), and quantizing both sides makes the
tag tie break kick in identically no matter how the distances were
computed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .embedding import HashtagDictionary, dictionary_digest
from .errors import FormatError, IntegrityError, MissingHashtagError

_DECIMALS = 9


def _quantize(distances: np.ndarray) -> np.ndarray:
    return np.round(distances, _DECIMALS)


@dataclass(frozen=True)
class SynonymList:
    """k nearest hashtags of one hashtag, the hashtag itself first."""

    hashtag: str
    k: int
    neighbors: tuple[tuple[str, float], ...]

    @property
    def members(self) -> frozenset[str]:
        return frozenset(tag for tag, _ in self.neighbors)

    def __len__(self) -> int:
        return len(self.neighbors)


def _select(
    hashtag: str,
    tags: Sequence[str],
    distances: np.ndarray,
    self_index: int,
    k: int,
    max_distance: Optional[float],
) -> SynonymList:
    """Shared ranking step. `tags` must be lexicographically sorted so a
    stable argsort orders equal distances by tag."""
    q = _quantize(distances)
    q[self_index] = np.inf
    order = np.argsort(q, kind="stable")
    take = order[: min(k, len(tags) - 1)]
    neighbors = [(hashtag, 0.0)]
    for i in take:
        d = float(q[i])
        if max_distance is not None and d > max_distance:
            break
        neighbors.append((tags[i], d))
    return SynonymList(hashtag=hashtag, k=k, neighbors=tuple(neighbors))


def construct_synonyms(
    hashtag: str,
    k: int,
    dictionary: HashtagDictionary,
    max_distance: Optional[float] = None,
) -> SynonymList:
    """Syn_k for one hashtag against every centroid in the dictionary."""
    if k < 0:
        raise FormatError(f"k must be non-negative, got {k}")
    if hashtag not in dictionary:
        raise MissingHashtagError(hashtag)
    tags, matrix = dictionary.directions()
    query = dictionary.entries[hashtag].direction
    distances = 1.0 - matrix @ query
    np.clip(distances, 0.0, 2.0, out=distances)
    return _select(hashtag, tags, distances, tags.index(hashtag), k, max_distance)


class Thesaurus:
    """All synonym lists for one dictionary at a fixed k."""

    def __init__(self, k: int, entries: dict[str, SynonymList], digest: Optional[str] = None):
        if k < 0:
            raise FormatError(f"k must be non-negative, got {k}")
        self.k = k
        self.entries = entries
        self.digest = digest

    def __contains__(self, hashtag: str) -> bool:
        return hashtag in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, hashtag: str) -> Optional[SynonymList]:
        return self.entries.get(hashtag)

    def synonyms(self, hashtag: str) -> frozenset[str]:
        """Members of Syn_k(hashtag); a hashtag the thesaurus has never
        seen falls back to the singleton {hashtag}."""
        entry = self.entries.get(hashtag)
        if entry is None:
            return frozenset((hashtag,))
        return entry.members

    def synonyms_of_set(self, hashtags: Iterable[str]) -> frozenset[str]:
        out: set[str] = set()
        for tag in hashtags:
            out |= self.synonyms(tag)
        return frozenset(out)

    def matches(self, dictionary: HashtagDictionary) -> bool:
        return self.digest is not None and self.digest == dictionary_digest(dictionary)


def build_thesaurus(
    dictionary: HashtagDictionary,
    k: int,
    max_distance: Optional[float] = None,
) -> Thesaurus:
    """Synonym lists for every hashtag, via one Gram matrix of centroid
    directions. Per-row results are identical to construct_synonyms."""
    if k < 0:
        raise FormatError(f"k must be non-negative, got {k}")
    tags, matrix = dictionary.directions()
    gram = matrix @ matrix.T
    distances = 1.0 - gram
    np.clip(distances, 0.0, 2.0, out=distances)
    entries = {
        tag: _select(tag, tags, distances[i], i, k, max_distance)
        for i, tag in enumerate(tags)
    }
    return Thesaurus(k=k, entries=entries, digest=dictionary_digest(dictionary))


def thesaurus_from_members(k: int, members: Mapping[str, Sequence[str]]) -> Thesaurus:
    """Build a thesaurus from literal member lists (no dictionary).

    Intended for hand-written fixtures. Distances are synthesized as an
    ascending ramp because only membership and order are known.
    """
    entries: dict[str, SynonymList] = {}
    for tag, listed in members.items():
        neighbors = [(tag, 0.0)]
        seen = {tag}
        rank = 0
        for other in listed:
            if other in seen:
                continue
            seen.add(other)
            rank += 1
            neighbors.append((other, round(0.001 * rank, _DECIMALS)))
        if rank > k:
            raise FormatError(f"{tag!r} lists {rank} synonyms, more than k={k}")
        entries[tag] = SynonymList(hashtag=tag, k=k, neighbors=tuple(neighbors))
    return Thesaurus(k=k, entries=entries, digest=None)


# ---------------------------------------------------------------------------
# JSON file format


def write_thesaurus(path: str | Path, thesaurus: Thesaurus) -> None:
    payload = {
        "k": thesaurus.k,
        "digest": thesaurus.digest,
        "entries": {
            # distances are pre-quantized; plain repr round-trips exactly
            tag: [[neighbor, float(d)] for neighbor, d in entry.neighbors]
            for tag, entry in thesaurus.entries.items()
        },
    }
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    Path(path).write_text(text + "\n", encoding="utf-8")


def read_thesaurus(path: str | Path) -> Thesaurus:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise FormatError(f"thesaurus file not found: {path}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or "k" not in payload or "entries" not in payload:
        raise FormatError(f"{path}: expected an object with 'k' and 'entries'")
    k = payload["k"]
    if not isinstance(k, int) or k < 0:
        raise FormatError(f"{path}: k must be a non-negative integer, got {k!r}")
    digest = payload.get("digest")
    if digest is not None and not isinstance(digest, str):
        raise FormatError(f"{path}: digest must be a string or null")
    entries: dict[str, SynonymList] = {}
    for tag, rows in payload["entries"].items():
        neighbors: list[tuple[str, float]] = []
        for row in rows:
            if not (isinstance(row, list) and len(row) == 2 and isinstance(row[0], str)):
                raise FormatError(f"{path}: bad neighbor row for {tag!r}: {row!r}")
            neighbors.append((row[0], float(row[1])))
        entry = SynonymList(hashtag=tag, k=k, neighbors=tuple(neighbors))
        _check_entry(entry, path)
        entries[tag] = entry
    return Thesaurus(k=k, entries=entries, digest=digest)


def _check_entry(entry: SynonymList, path) -> None:
    if not entry.neighbors:
        raise IntegrityError(f"{path}: empty synonym list for {entry.hashtag!r}")
    first_tag, first_d = entry.neighbors[0]
    if first_tag != entry.hashtag or first_d != 0.0:
        raise IntegrityError(
            f"{path}: synonym list for {entry.hashtag!r} must start with itself at distance 0"
        )
    if len(entry.neighbors) > entry.k + 1:
        raise IntegrityError(
            f"{path}: synonym list for {entry.hashtag!r} has {len(entry.neighbors) - 1} neighbors, k={entry.k}"
        )
    distances = [d for _, d in entry.neighbors]
    if any(b < a for a, b in zip(distances, distances[1:])):
        raise IntegrityError(f"{path}: distances for {entry.hashtag!r} are not ascending")
    if len(entry.members) != len(entry.neighbors):
        raise IntegrityError(f"{path}: duplicate neighbors for {entry.hashtag!r}")
