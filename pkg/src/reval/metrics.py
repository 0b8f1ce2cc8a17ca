"""Hit ratio and its synonym-aware generalization.

The plain hit ratio is |R cap G| / min(|R|,|G|). The generalized score
replaces exact matching with synonym matching: a recommended hashtag
counts when any of its synonyms is in the ground truth. Synonyms expand
the recommendation side only, never the ground truth, because the
relation is directed. With k=0 every synonym set is a singleton and the
score collapses to the plain hit ratio.

rho is computed on the smaller side: when |R| <= |G| count recommended
hashtags whose synonym set touches G, otherwise count ground-truth
hashtags covered by the union of R's synonym sets. Either way
rho <= min(|R|,|G|) holds structurally.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import FormatError, IntegrityError
from .thesaurus import SynonymList, Thesaurus

logger = logging.getLogger(__name__)

# Below this set size the per-pair ratio is kept as an exact rational;
# larger pairs fall back to floats.
_EXACT_LIMIT = 64


@dataclass(frozen=True)
class EvalPair:
    tweet_id: str
    recommended: tuple[str, ...]
    ground_truth: tuple[str, ...]


@dataclass(frozen=True)
class MatchResult:
    rho: int
    denominator: int
    ratio: float

    def exact_ratio(self) -> Fraction | float:
        if self.denominator <= _EXACT_LIMIT:
            return Fraction(self.rho, self.denominator)
        return self.rho / self.denominator


@dataclass(frozen=True)
class EvalReport:
    k: int
    r: Optional[int]
    pair_count: int
    skipped_count: int
    thesaurus_misses: int
    average_ratio: float
    degenerate: bool
    per_pair: Optional[tuple[tuple[str, MatchResult], ...]] = None


def _dedup_lower(tags: Iterable[str]) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for tag in tags:
        seen.setdefault(str(tag).lower())
    return tuple(seen)


def make_pair(tweet_id: str, recommended: Iterable[str], ground_truth: Iterable[str]) -> EvalPair:
    """Normalize one evaluation pair: lowercase both sides, drop duplicates,
    keep first-appearance order."""
    return EvalPair(
        tweet_id=str(tweet_id),
        recommended=_dedup_lower(recommended),
        ground_truth=_dedup_lower(ground_truth),
    )


def hit_ratio(recommended: Iterable[str], ground_truth: Iterable[str]) -> Optional[float]:
    """|R cap G| / min(|R|,|G|); None when either side is empty (skip)."""
    r = set(recommended)
    g = set(ground_truth)
    if not r or not g:
        return None
    return len(r & g) / min(len(r), len(g))


def match_synonyms(
    recommended: Iterable[str],
    ground_truth: Iterable[str],
    thesaurus: Thesaurus,
) -> Optional[MatchResult]:
    """Synonym-aware match count rho and its normalized ratio.

    None signals a skipped pair (an empty side). Hashtags the thesaurus
    does not know match exactly and only themselves.
    """
    r = set(recommended)
    g = set(ground_truth)
    if not r or not g:
        return None
    if len(r) <= len(g):
        rho = sum(1 for tag in r if thesaurus.synonyms(tag) & g)
    else:
        expanded = thesaurus.synonyms_of_set(r)
        rho = sum(1 for tag in g if tag in expanded)
    if len(r) == len(g):
        # both branches are defined here; the |R| <= |G| one is canonical
        expanded = thesaurus.synonyms_of_set(r)
        other = sum(1 for tag in g if tag in expanded)
        if other != rho:
            logger.debug(
                "branch divergence for |R|=|G|=%d: per-recommendation rho=%d, coverage rho=%d",
                len(r), rho, other,
            )
    denominator = min(len(r), len(g))
    return MatchResult(rho=rho, denominator=denominator, ratio=rho / denominator)


def truncate_thesaurus(thesaurus: Thesaurus, k: int) -> Thesaurus:
    """Restrict every synonym list to its k nearest neighbors.

    Lists are ascending by distance, so the k-truncation is a prefix; the
    source thesaurus must have been built with at least this k.
    """
    if k < 0:
        raise FormatError(f"k must be non-negative, got {k}")
    if thesaurus.k < k:
        raise IntegrityError(f"thesaurus was built with k={thesaurus.k}, cannot serve k={k}")
    if thesaurus.k == k:
        return thesaurus
    entries = {
        tag: SynonymList(hashtag=tag, k=k, neighbors=entry.neighbors[: k + 1])
        for tag, entry in thesaurus.entries.items()
    }
    return Thesaurus(k=k, entries=entries, digest=thesaurus.digest)


def reval_hit_ratio(pair: EvalPair, thesaurus: Thesaurus, k: int) -> Optional[MatchResult]:
    """Synonym-aware hit ratio of one pair at synonym count k."""
    return match_synonyms(pair.recommended, pair.ground_truth, truncate_thesaurus(thesaurus, k))


def evaluate(
    pairs: Sequence[EvalPair],
    thesaurus: Thesaurus,
    k: int,
    r: Optional[int] = None,
    per_pair: bool = False,
) -> EvalReport:
    """Average the synonym-aware hit ratio over a pair list.

    Pairs with an empty side are skipped and counted. The average is the
    unweighted mean over evaluated pairs, accumulated exactly (rationals)
    while pair sets stay small. A recommended hashtag absent from the
    thesaurus counts as a miss each time it occurs in an evaluated pair.
    """
    truncated = truncate_thesaurus(thesaurus, k)
    evaluated = 0
    skipped = 0
    misses = 0
    total: Fraction | float = Fraction(0)
    detail: list[tuple[str, MatchResult]] = []
    for pair in pairs:
        result = match_synonyms(pair.recommended, pair.ground_truth, truncated)
        if result is None:
            skipped += 1
            continue
        evaluated += 1
        misses += sum(1 for tag in set(pair.recommended) if tag not in truncated.entries)
        total = total + result.exact_ratio()
        if per_pair:
            detail.append((pair.tweet_id, result))
    degenerate = evaluated == 0
    average = 0.0 if degenerate else float(total / evaluated)
    if degenerate and pairs:
        logger.warning("all %d pairs were skipped; average reported as 0", skipped)
    return EvalReport(
        k=k,
        r=r,
        pair_count=evaluated,
        skipped_count=skipped,
        thesaurus_misses=misses,
        average_ratio=average,
        degenerate=degenerate,
        per_pair=tuple(detail) if per_pair else None,
    )


# ---------------------------------------------------------------------------
# File formats


def read_eval_pairs(path: str | Path) -> list[EvalPair]:
    """JSON lines {"tweet_id", "recommended", "ground_truth"}; tags are
    lowercased and deduplicated on load."""
    pairs: list[EvalPair] = []
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise FormatError(f"eval pairs file not found: {path}") from exc
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict) or not {"tweet_id", "recommended", "ground_truth"} <= set(obj):
            raise FormatError(
                f"{path}:{lineno}: expected an object with 'tweet_id', 'recommended', 'ground_truth'"
            )
        if not isinstance(obj["recommended"], list) or not isinstance(obj["ground_truth"], list):
            raise FormatError(f"{path}:{lineno}: 'recommended' and 'ground_truth' must be lists")
        pairs.append(make_pair(obj["tweet_id"], obj["recommended"], obj["ground_truth"]))
    return pairs


def write_eval_pairs(path: str | Path, pairs: Iterable[EvalPair]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(json.dumps(
                {
                    "tweet_id": pair.tweet_id,
                    "recommended": list(pair.recommended),
                    "ground_truth": list(pair.ground_truth),
                },
                ensure_ascii=False,
            ))
            fh.write("\n")


def _round4(x: float) -> float:
    return float(f"{x:.4f}")


def report_to_dict(report: EvalReport) -> dict:
    out = {
        "k": report.k,
        "r": report.r,
        "pairs": report.pair_count,
        "skipped": report.skipped_count,
        "thesaurus_misses": report.thesaurus_misses,
        "average_reval_hit_ratio": _round4(report.average_ratio),
        "degenerate": report.degenerate,
    }
    if report.per_pair is not None:
        out["per_pair"] = [
            {
                "tweet_id": tweet_id,
                "rho": result.rho,
                "denominator": result.denominator,
                "ratio": _round4(result.ratio),
            }
            for tweet_id, result in report.per_pair
        ]
    return out


def write_report(path: str | Path, report: EvalReport) -> None:
    text = json.dumps(report_to_dict(report), sort_keys=True, indent=2)
    Path(path).write_text(text + "\n", encoding="utf-8")


def write_sweep_csv(path: str | Path, reports: Sequence[EvalReport], counts: bool = True) -> None:
    """One row per (r, k) cell; counts=False keeps only the plot columns."""
    if counts:
        lines = ["k,r,average_reval_hit_ratio,pairs,skipped,thesaurus_misses"]
    else:
        lines = ["k,r,average_reval_hit_ratio"]
    for report in reports:
        r = "" if report.r is None else report.r
        row = f"{report.k},{r},{report.average_ratio:.4f}"
        if counts:
            row += f",{report.pair_count},{report.skipped_count},{report.thesaurus_misses}"
        lines.append(row)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
