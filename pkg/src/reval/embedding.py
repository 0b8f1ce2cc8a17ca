"""Tweet embedding vectors, hashtag centroids, and their file formats.

A hashtag centroid keeps the unnormalized running sum of its tweets'
vectors plus the tweet count; the unit-length direction is derived on
read. Storing the sum rather than the blended unit vector makes the
incremental update exactly equivalent to a batch rebuild, which the
tests rely on. A strict unit-blend update is kept behind the `method`
switch of update_centroid for fidelity experiments.

Binary files all share one header: magic "REVL", format version u16,
dim u32, count u64, little-endian. Payload vectors are f32 on disk and
f64 in memory.
"""

from __future__ import annotations

import hashlib
import io
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional

import numpy as np

from .corpus import CorpusRecord
from .errors import DegenerateDataError, FormatError, IntegrityError

MAGIC = b"REVL"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHIQ")


def cosine_distance(a: np.ndarray, b: np.ndarray) -> float:
    """1 - cos(angle) between a and b; 0 for parallel, 2 for antipodal."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise FormatError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise FormatError("cosine distance is undefined for a zero vector")
    d = 1.0 - float(np.dot(a, b)) / (na * nb)
    # guard against rounding drift just outside [0, 2]
    return min(2.0, max(0.0, d))


@dataclass
class HashtagCentroid:
    """Accumulator for one hashtag: sum of tweet vectors and tweet count."""

    hashtag: str
    running_sum: np.ndarray
    count: int

    @property
    def direction(self) -> np.ndarray:
        norm = float(np.linalg.norm(self.running_sum))
        if norm == 0.0:
            raise DegenerateDataError(f"centroid for {self.hashtag!r} has a zero running sum")
        return self.running_sum / norm


class HashtagDictionary:
    """Map hashtag -> centroid, all sharing one embedding dimension."""

    def __init__(self, dim: int):
        if dim < 1:
            raise FormatError(f"dimension must be positive, got {dim}")
        self.dim = dim
        self.entries: dict[str, HashtagCentroid] = {}
        self._directions: Optional[tuple[list[str], np.ndarray]] = None

    @property
    def m(self) -> int:
        return len(self.entries)

    def __contains__(self, hashtag: str) -> bool:
        return hashtag in self.entries

    def add(self, centroid: HashtagCentroid) -> None:
        if centroid.running_sum.shape != (self.dim,):
            raise FormatError(
                f"centroid for {centroid.hashtag!r} has dim {centroid.running_sum.shape}, expected ({self.dim},)"
            )
        self.entries[centroid.hashtag] = centroid
        self._directions = None

    def directions(self) -> tuple[list[str], np.ndarray]:
        """Hashtags in lexicographic order with their unit directions stacked
        row-wise. Cached until the dictionary is mutated."""
        if self._directions is None:
            tags = sorted(self.entries)
            matrix = np.empty((len(tags), self.dim), dtype=np.float64)
            for i, tag in enumerate(tags):
                matrix[i] = self.entries[tag].direction
            self._directions = (tags, matrix)
        return self._directions

    def _invalidate(self) -> None:
        self._directions = None


def _check_vector(v: np.ndarray, dim: int, label: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (dim,):
        raise FormatError(f"{label}: expected dim {dim}, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise FormatError(f"{label}: vector has non-finite entries")
    return v


def build_dictionary(
    records: Iterable[CorpusRecord],
    tweet_embeddings: Mapping[int, np.ndarray],
    dim: Optional[int] = None,
) -> HashtagDictionary:
    """Accumulate one centroid per hashtag from (tweet, hashtag) records.

    Per-hashtag sums run over tweet vectors in tweet-index order with
    pairwise summation, so the result is independent of record order.
    """
    if dim is None:
        if not tweet_embeddings:
            raise DegenerateDataError("no tweet embeddings supplied and no dimension given")
        dim = len(next(iter(tweet_embeddings.values())))
    by_hashtag: dict[str, list[int]] = {}
    for record in records:
        if record.tweet_index not in tweet_embeddings:
            raise IntegrityError(f"no embedding for tweet index {record.tweet_index} (hashtag {record.hashtag!r})")
        by_hashtag.setdefault(record.hashtag, []).append(record.tweet_index)

    dictionary = HashtagDictionary(dim)
    for hashtag in sorted(by_hashtag):
        indices = sorted(set(by_hashtag[hashtag]))
        stack = np.empty((len(indices), dim), dtype=np.float64)
        for i, idx in enumerate(indices):
            stack[i] = _check_vector(tweet_embeddings[idx], dim, f"tweet {idx}")
        running_sum = np.sum(stack, axis=0)
        if float(np.linalg.norm(running_sum)) == 0.0:
            raise DegenerateDataError(f"tweet vectors for {hashtag!r} sum to zero")
        dictionary.add(HashtagCentroid(hashtag=hashtag, running_sum=running_sum, count=len(indices)))
    return dictionary


def update_centroid(
    dictionary: HashtagDictionary,
    hashtag: str,
    tweet_vector: np.ndarray,
    method: str = "sum",
) -> HashtagCentroid:
    """Fold one new tweet vector into a hashtag's centroid.

    method "sum" adds to the running sum, keeping the state equivalent to
    a batch rebuild over the enlarged tweet set. method "blend" performs
    the weighted blend of the current unit direction with the new vector
    and renormalizes; it keeps only a unit vector and drifts away from
    the batch mean whenever the accumulated mean is not unit length.
    """
    if method not in ("sum", "blend"):
        raise FormatError(f"unknown update method {method!r}")
    v = _check_vector(tweet_vector, dictionary.dim, "tweet vector")
    entry = dictionary.entries.get(hashtag)
    if entry is None:
        entry = HashtagCentroid(hashtag=hashtag, running_sum=v.copy(), count=1)
        dictionary.entries[hashtag] = entry
    elif method == "sum":
        entry.running_sum = entry.running_sum + v
        entry.count += 1
    else:
        n = entry.count
        blended = (n / (n + 1)) * entry.direction + (1.0 / (n + 1)) * v
        norm = float(np.linalg.norm(blended))
        if norm == 0.0:
            raise DegenerateDataError(f"blend update for {hashtag!r} produced a zero vector")
        entry.running_sum = blended / norm
        entry.count += 1
    dictionary._invalidate()
    return entry


# ---------------------------------------------------------------------------
# Deterministic toy embedder


def toy_token_vector(token: str, dim: int, seed: int) -> np.ndarray:
    """Fixed pseudo-random unit vector for a token under a seed."""
    if dim < 2:
        raise FormatError(f"toy embedding dimension must be >= 2, got {dim}")
    key = seed.to_bytes(8, "little", signed=True)
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=key).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "little"))
    v = rng.standard_normal(dim)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:  # unreachable in practice
        raise DegenerateDataError(f"token {token!r} hashed to a zero vector")
    return v / norm


def toy_embed(text: str, dim: int, seed: int) -> np.ndarray:
    """Unit-norm tweet vector: normalized mean of its tokens' toy vectors."""
    tokens = text.split()
    if not tokens:
        raise FormatError("cannot embed an empty token list")
    stack = np.stack([toy_token_vector(t, dim, seed) for t in tokens])
    mean = np.sum(stack, axis=0) / len(tokens)
    norm = float(np.linalg.norm(mean))
    if norm == 0.0:
        raise DegenerateDataError("token vectors cancelled to a zero tweet vector")
    return mean / norm


# ---------------------------------------------------------------------------
# Binary file formats (f32 on disk, f64 in memory)


def _write_header(fh, dim: int, count: int) -> None:
    fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, dim, count))


def _read_header(fh, path) -> tuple[int, int]:
    raw = fh.read(_HEADER.size)
    if len(raw) != _HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, dim, count = _HEADER.unpack(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported format version {version}")
    return dim, count


def _read_exact(fh, n: int, path, what: str) -> bytes:
    raw = fh.read(n)
    if len(raw) != n:
        raise FormatError(f"{path}: truncated {what}")
    return raw


def write_tweet_embeddings(path: str | Path, embeddings: Mapping[int, np.ndarray], dim: Optional[int] = None) -> None:
    if dim is None:
        if not embeddings:
            raise FormatError("cannot infer dimension from an empty embedding map")
        dim = len(next(iter(embeddings.values())))
    with open(path, "wb") as fh:
        _write_header(fh, dim, len(embeddings))
        for index in sorted(embeddings):
            v = _check_vector(embeddings[index], dim, f"tweet {index}")
            fh.write(struct.pack("<Q", index))
            fh.write(v.astype("<f4").tobytes())


def read_tweet_embeddings(path: str | Path) -> tuple[dict[int, np.ndarray], int]:
    try:
        fh = open(path, "rb")
    except FileNotFoundError as exc:
        raise FormatError(f"embedding file not found: {path}") from exc
    with fh:
        dim, count = _read_header(fh, path)
        embeddings: dict[int, np.ndarray] = {}
        for _ in range(count):
            (index,) = struct.unpack("<Q", _read_exact(fh, 8, path, "record index"))
            raw = _read_exact(fh, 4 * dim, path, f"vector for tweet {index}")
            v = np.frombuffer(raw, dtype="<f4").astype(np.float64)
            if not np.all(np.isfinite(v)):
                raise FormatError(f"{path}: non-finite vector for tweet {index}")
            embeddings[index] = v
        if fh.read(1):
            raise FormatError(f"{path}: trailing bytes after {count} records")
    return embeddings, dim


def write_tweet_embeddings_tsv(path: str | Path, embeddings: Mapping[int, np.ndarray]) -> None:
    """Debug format: tweet_index then the vector components, tab-separated."""
    with open(path, "w", encoding="utf-8") as fh:
        for index in sorted(embeddings):
            values = "\t".join(repr(float(x)) for x in embeddings[index])
            fh.write(f"{index}\t{values}\n")


def read_tweet_embeddings_tsv(path: str | Path) -> tuple[dict[int, np.ndarray], int]:
    embeddings: dict[int, np.ndarray] = {}
    dim = None
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise FormatError(f"embedding file not found: {path}") from exc
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        try:
            index = int(parts[0])
            v = np.array([float(x) for x in parts[1:]], dtype=np.float64)
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from exc
        if dim is None:
            dim = len(v)
        if len(v) != dim or dim == 0:
            raise FormatError(f"{path}:{lineno}: expected {dim} components, got {len(v)}")
        embeddings[index] = v
    if dim is None:
        raise FormatError(f"{path}: no records")
    return embeddings, dim


def _pack_key(key: str) -> bytes:
    encoded = key.encode("utf-8")
    if len(encoded) > 0xFFFF:
        raise FormatError(f"key too long to serialize: {key[:32]!r}...")
    return struct.pack("<H", len(encoded)) + encoded


def _unpack_key(fh, path) -> str:
    (length,) = struct.unpack("<H", _read_exact(fh, 2, path, "key length"))
    return _read_exact(fh, length, path, "key bytes").decode("utf-8")


def serialize_dictionary(dictionary: HashtagDictionary) -> bytes:
    """Canonical byte form of a dictionary; also the digest input."""
    buf = io.BytesIO()
    _write_header(buf, dictionary.dim, dictionary.m)
    for hashtag in sorted(dictionary.entries):
        entry = dictionary.entries[hashtag]
        buf.write(_pack_key(hashtag))
        buf.write(struct.pack("<Q", entry.count))
        buf.write(entry.running_sum.astype("<f4").tobytes())
    return buf.getvalue()


def dictionary_digest(dictionary: HashtagDictionary) -> str:
    return hashlib.sha256(serialize_dictionary(dictionary)).hexdigest()


def write_hashtag_dictionary(path: str | Path, dictionary: HashtagDictionary) -> None:
    Path(path).write_bytes(serialize_dictionary(dictionary))


def read_hashtag_dictionary(path: str | Path) -> HashtagDictionary:
    try:
        fh = open(path, "rb")
    except FileNotFoundError as exc:
        raise FormatError(f"dictionary file not found: {path}") from exc
    with fh:
        dim, count = _read_header(fh, path)
        dictionary = HashtagDictionary(dim)
        for _ in range(count):
            hashtag = _unpack_key(fh, path)
            (n,) = struct.unpack("<Q", _read_exact(fh, 8, path, f"count for {hashtag!r}"))
            raw = _read_exact(fh, 4 * dim, path, f"centroid for {hashtag!r}")
            running_sum = np.frombuffer(raw, dtype="<f4").astype(np.float64)
            if n < 1:
                raise FormatError(f"{path}: centroid for {hashtag!r} has tweet count 0")
            dictionary.add(HashtagCentroid(hashtag=hashtag, running_sum=running_sum, count=n))
        if fh.read(1):
            raise FormatError(f"{path}: trailing bytes after {count} records")
    return dictionary


def write_word_vectors(path: str | Path, vectors: Mapping[str, np.ndarray], dim: Optional[int] = None) -> None:
    if dim is None:
        if not vectors:
            raise FormatError("cannot infer dimension from an empty vector map")
        dim = len(next(iter(vectors.values())))
    with open(path, "wb") as fh:
        _write_header(fh, dim, len(vectors))
        for token in sorted(vectors):
            v = _check_vector(vectors[token], dim, f"token {token!r}")
            fh.write(_pack_key(token))
            fh.write(v.astype("<f4").tobytes())


def read_word_vectors(path: str | Path) -> tuple[dict[str, np.ndarray], int]:
    try:
        fh = open(path, "rb")
    except FileNotFoundError as exc:
        raise FormatError(f"word vector file not found: {path}") from exc
    with fh:
        dim, count = _read_header(fh, path)
        vectors: dict[str, np.ndarray] = {}
        for _ in range(count):
            token = _unpack_key(fh, path)
            raw = _read_exact(fh, 4 * dim, path, f"vector for {token!r}")
            vectors[token] = np.frombuffer(raw, dtype="<f4").astype(np.float64)
        if fh.read(1):
            raise FormatError(f"{path}: trailing bytes after {count} records")
    return vectors, dim
