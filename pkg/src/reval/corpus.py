"""Tweet ingestion and cleaning.

Raw tweets come in as JSON lines. Cleaning strips URLs, mentions and
punctuation (the '#' sign survives), lowercases, optionally squeezes
character runs longer than three, and drops stop words. A tweet with no
hashtag left after cleaning is dropped, as is a retweet whose
(text, hashtag) records all duplicate earlier ones. Each kept tweet is
then exploded into one record per distinct hashtag; those records drive
the centroid accumulation downstream.
"""

from __future__ import annotations

import json
import random
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional

from .errors import DegenerateDataError, FormatError

_URL = re.compile(r"(?:https?://|www\.)\S+")
_MENTION = re.compile(r"@\w+")
_LONG_RUN = re.compile(r"(.)\1{3,}", re.DOTALL)
_NON_WORD = re.compile(r"[^\w\s#]")
_HASHTAG = re.compile(r"#[^\s#]+\Z")

# Reasons a tweet can be dropped during cleaning.
DROP_NO_HASHTAGS = "no_hashtags"
DROP_RETWEET_DUPLICATE = "retweet_duplicate"
DROP_NON_ENGLISH = "non_english"


@dataclass(frozen=True)
class RawTweet:
    id: str
    text: str
    is_retweet: bool = False


@dataclass(frozen=True)
class CleanTweet:
    id: str
    text: str
    hashtags: tuple[str, ...]


@dataclass(frozen=True)
class CorpusRecord:
    tweet_index: int
    hashtag: str
    ordinal: int


@dataclass(frozen=True)
class CorpusSplit:
    train: tuple[CleanTweet, ...]
    test: tuple[CleanTweet, ...]
    split_fraction: float
    seed: int


def is_hashtag(value: str) -> bool:
    """True when value is '#' followed by one or more non-space, non-'#' chars."""
    return bool(_HASHTAG.match(value))


def extract_hashtags(text: str) -> list[str]:
    """Hashtags of a cleaned text, in order of first appearance, deduplicated.

    A token starting with '#' may carry several concatenated tags
    ("#stay#safe"); each nonempty segment counts.
    """
    seen: dict[str, None] = {}
    for token in text.split():
        if not token.startswith("#"):
            continue
        for segment in token.split("#"):
            if segment:
                seen.setdefault("#" + segment)
    return list(seen)


def clean_text(text: str, stopwords: frozenset[str] | set[str], squeeze_repeats: bool = True) -> str:
    """Normalize one tweet's text.

    Order matters: URLs and mentions go first so their punctuation never
    leaks into the token stream, then lowercasing, run squeezing, and
    punctuation replacement. Stop words are dropped last; hashtag tokens
    are never treated as stop words.
    """
    text = _URL.sub(" ", text)
    text = _MENTION.sub(" ", text)
    text = text.lower()
    if squeeze_repeats:
        text = _LONG_RUN.sub(r"\1\1\1", text)
    text = _NON_WORD.sub(" ", text)
    tokens = []
    for token in text.split():
        if token.startswith("#"):
            if token.strip("#"):
                tokens.append(token)
            continue
        if token in stopwords:
            continue
        tokens.append(token)
    return " ".join(tokens)


def clean(
    raw: RawTweet,
    stopwords: frozenset[str] | set[str],
    *,
    squeeze_repeats: bool = True,
    language_filter: Optional[Callable[[str], bool]] = None,
    seen_records: Optional[set[tuple[str, str]]] = None,
) -> CleanTweet | None:
    """Clean one tweet. Returns None when the tweet is dropped.

    Drop conditions: no hashtag survives cleaning; the optional
    language_filter rejects the raw text; or the tweet is a retweet whose
    cleaned (text, hashtag) records all exist in seen_records already.
    The caller owns seen_records; this function never mutates it.
    """
    if not raw.text:
        raise FormatError(f"tweet {raw.id!r}: empty text")
    if language_filter is not None and not language_filter(raw.text):
        return None
    text = clean_text(raw.text, stopwords, squeeze_repeats=squeeze_repeats)
    hashtags = extract_hashtags(text)
    if not hashtags:
        return None
    if raw.is_retweet and seen_records is not None:
        if all((text, h) in seen_records for h in hashtags):
            return None
    return CleanTweet(id=raw.id, text=text, hashtags=tuple(hashtags))


def clean_corpus(
    raws: Iterable[RawTweet],
    stopwords: frozenset[str] | set[str],
    *,
    squeeze_repeats: bool = True,
    language_filter: Optional[Callable[[str], bool]] = None,
) -> tuple[list[CleanTweet], Counter]:
    """Clean a whole corpus, suppressing retweet duplicates.

    Returns the kept tweets in input order plus a Counter of drop reasons.
    """
    kept: list[CleanTweet] = []
    dropped: Counter = Counter()
    seen: set[tuple[str, str]] = set()
    for raw in raws:
        if language_filter is not None and not language_filter(raw.text):
            dropped[DROP_NON_ENGLISH] += 1
            continue
        tweet = clean(raw, stopwords, squeeze_repeats=squeeze_repeats)
        if tweet is None:
            dropped[DROP_NO_HASHTAGS] += 1
            continue
        if raw.is_retweet and all((tweet.text, h) in seen for h in tweet.hashtags):
            dropped[DROP_RETWEET_DUPLICATE] += 1
            continue
        seen.update((tweet.text, h) for h in tweet.hashtags)
        kept.append(tweet)
    return kept, dropped


def explode(tweet: CleanTweet, tweet_index: int) -> list[CorpusRecord]:
    """One record per distinct hashtag, ordinal 1..n in first-appearance order."""
    return [
        CorpusRecord(tweet_index=tweet_index, hashtag=h, ordinal=j)
        for j, h in enumerate(tweet.hashtags, start=1)
    ]


def explode_corpus(tweets: Iterable[CleanTweet]) -> list[CorpusRecord]:
    records: list[CorpusRecord] = []
    for index, tweet in enumerate(tweets):
        records.extend(explode(tweet, index))
    return records


def split(corpus: list[CleanTweet], fraction: float, seed: int) -> CorpusSplit:
    """Deterministic shuffled split; floor(len * fraction) tweets go to train."""
    if not 0.0 < fraction < 1.0:
        raise FormatError(f"split fraction must be in (0, 1), got {fraction}")
    if not corpus:
        raise DegenerateDataError("cannot split an empty corpus")
    order = list(range(len(corpus)))
    random.Random(seed).shuffle(order)
    n_train = int(len(corpus) * fraction)
    train = tuple(corpus[i] for i in order[:n_train])
    test = tuple(corpus[i] for i in order[n_train:])
    return CorpusSplit(train=train, test=test, split_fraction=fraction, seed=seed)


# ---------------------------------------------------------------------------
# File formats


def load_stopwords(path: str | Path) -> frozenset[str]:
    """One token per line; lines starting with '#' are comments."""
    words = set()
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"stopword file {path}: {exc}") from exc
    for line in raw.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        words.add(line)
    return frozenset(words)


def default_stopwords() -> frozenset[str]:
    from importlib import resources

    ref = resources.files("reval.data").joinpath("stopwords.txt")
    with resources.as_file(ref) as path:
        return load_stopwords(path)


def read_raw_tweets(path: str | Path) -> list[RawTweet]:
    """Read a raw-corpus JSONL file: {"id", "text", "retweet"?}."""
    tweets: list[RawTweet] = []
    ids: set[str] = set()
    try:
        raw = Path(path).read_bytes().decode("utf-8")
    except FileNotFoundError as exc:
        raise FormatError(f"corpus file not found: {path}") from exc
    except UnicodeDecodeError as exc:
        raise FormatError(f"corpus file {path} is not valid UTF-8: {exc}") from exc
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict) or "id" not in obj or "text" not in obj:
            raise FormatError(f"{path}:{lineno}: expected an object with 'id' and 'text'")
        tweet_id = str(obj["id"])
        if tweet_id in ids:
            raise FormatError(f"{path}:{lineno}: duplicate tweet id {tweet_id!r}")
        ids.add(tweet_id)
        text = str(obj["text"])
        if not text:
            raise FormatError(f"{path}:{lineno}: tweet {tweet_id!r} has empty text")
        tweets.append(RawTweet(id=tweet_id, text=text, is_retweet=bool(obj.get("retweet", False))))
    return tweets


def write_clean_tweets(tweets: Iterable[CleanTweet], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in tweets:
            fh.write(json.dumps({"id": t.id, "text": t.text, "hashtags": list(t.hashtags)}, ensure_ascii=False))
            fh.write("\n")


def read_clean_tweets(path: str | Path) -> list[CleanTweet]:
    tweets: list[CleanTweet] = []
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise FormatError(f"cleaned corpus not found: {path}") from exc
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        try:
            tweets.append(CleanTweet(id=str(obj["id"]), text=str(obj["text"]), hashtags=tuple(obj["hashtags"])))
        except (KeyError, TypeError) as exc:
            raise FormatError(f"{path}:{lineno}: expected 'id', 'text', 'hashtags'") from exc
    return tweets


def write_records(records: Iterable[CorpusRecord], path: str | Path) -> None:
    """TSV: tweet_index, hashtag, ordinal."""
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(f"{r.tweet_index}\t{r.hashtag}\t{r.ordinal}\n")


def read_records(path: str | Path) -> list[CorpusRecord]:
    records: list[CorpusRecord] = []
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise FormatError(f"records file not found: {path}") from exc
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise FormatError(f"{path}:{lineno}: expected 3 tab-separated fields")
        try:
            records.append(CorpusRecord(tweet_index=int(parts[0]), hashtag=parts[1], ordinal=int(parts[2])))
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from exc
    return records
