"""Stage functions behind the service endpoints.

Every stage reads and writes files only, returns a JSON-ready summary
dict, and is deterministic for fixed inputs and seed, so reruns are
idempotent and a full sweep is byte-identical across runs. Stages
communicate exclusively through the file formats of the owning modules;
any stage output can be regenerated or swapped out-of-band.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from . import corpus as corpus_mod
from . import embedding as embedding_mod
from . import metrics as metrics_mod
from . import recommender as recommender_mod
from . import thesaurus as thesaurus_mod
from .config import RunConfig, save_config
from .errors import FormatError


def demo_corpus_path() -> Path:
    """Filesystem path of the packaged 60-tweet demo corpus."""
    from importlib import resources

    ref = resources.files("reval.data").joinpath("demo_corpus.jsonl")
    with resources.as_file(ref) as path:
        return Path(path)


class Workspace:
    """Standard artifact names inside one working directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def ensure(self) -> "Workspace":
        self.root.mkdir(parents=True, exist_ok=True)
        return self

    @property
    def cleaned(self) -> Path:
        return self.root / "cleaned.jsonl"

    @property
    def records(self) -> Path:
        return self.root / "records.tsv"

    @property
    def train(self) -> Path:
        return self.root / "train.jsonl"

    @property
    def test(self) -> Path:
        return self.root / "test.jsonl"

    @property
    def embeddings(self) -> Path:
        return self.root / "embeddings.bin"

    @property
    def word_vectors(self) -> Path:
        return self.root / "word_vectors.bin"

    @property
    def dictionary(self) -> Path:
        return self.root / "dictionary.bin"

    @property
    def thesaurus(self) -> Path:
        return self.root / "thesaurus.json"

    def pairs(self, r: int) -> Path:
        return self.root / f"pairs_r{r}.jsonl"

    @property
    def report(self) -> Path:
        return self.root / "report.json"

    @property
    def sweep_csv(self) -> Path:
        return self.root / "sweep.csv"

    @property
    def run_config(self) -> Path:
        return self.root / "run_config.toml"


def _require(path: str | Path, stage: str) -> Path:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"missing input {path}; run the {stage} stage first")
    return path


def _prepare_out(path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def run_preprocess(
    corpus_path: str | Path,
    out_cleaned: str | Path,
    out_records: str | Path,
    out_train: str | Path,
    out_test: str | Path,
    split_fraction: float = 0.9,
    seed: int = 7,
    stopwords_path: Optional[str] = None,
    squeeze_repeats: bool = True,
) -> dict:
    raws = corpus_mod.read_raw_tweets(corpus_path)
    stopwords = (
        corpus_mod.load_stopwords(stopwords_path)
        if stopwords_path
        else corpus_mod.default_stopwords()
    )
    cleaned, dropped = corpus_mod.clean_corpus(raws, stopwords, squeeze_repeats=squeeze_repeats)
    records = corpus_mod.explode_corpus(cleaned)
    split = corpus_mod.split(cleaned, split_fraction, seed)
    corpus_mod.write_clean_tweets(cleaned, _prepare_out(out_cleaned))
    corpus_mod.write_records(records, _prepare_out(out_records))
    corpus_mod.write_clean_tweets(split.train, _prepare_out(out_train))
    corpus_mod.write_clean_tweets(split.test, _prepare_out(out_test))
    return {
        "stage": "preprocess",
        "tweets_in": len(raws),
        "tweets_kept": len(cleaned),
        "dropped": dict(sorted(dropped.items())),
        "records": len(records),
        "distinct_hashtags": len({r.hashtag for r in records}),
        "train": len(split.train),
        "test": len(split.test),
    }


def run_embed_toy(
    cleaned_path: str | Path,
    out_embeddings: str | Path,
    out_word_vectors: str | Path,
    dim: int = 64,
    seed: int = 7,
) -> dict:
    tweets = corpus_mod.read_clean_tweets(_require(cleaned_path, "preprocess"))
    embeddings = {
        index: embedding_mod.toy_embed(tweet.text, dim, seed)
        for index, tweet in enumerate(tweets)
    }
    vocabulary = sorted({token for tweet in tweets for token in tweet.text.split()})
    word_vectors = {
        token: embedding_mod.toy_token_vector(token, dim, seed) for token in vocabulary
    }
    embedding_mod.write_tweet_embeddings(_prepare_out(out_embeddings), embeddings, dim=dim)
    embedding_mod.write_word_vectors(_prepare_out(out_word_vectors), word_vectors, dim=dim)
    return {
        "stage": "embed-toy",
        "tweets": len(embeddings),
        "tokens": len(word_vectors),
        "dim": dim,
        "seed": seed,
    }


def run_centroids(
    cleaned_path: str | Path,
    embeddings_path: str | Path,
    out_dictionary: str | Path,
) -> dict:
    tweets = corpus_mod.read_clean_tweets(_require(cleaned_path, "preprocess"))
    embeddings, dim = embedding_mod.read_tweet_embeddings(_require(embeddings_path, "embed-toy"))
    records = corpus_mod.explode_corpus(tweets)
    dictionary = embedding_mod.build_dictionary(records, embeddings, dim=dim)
    embedding_mod.write_hashtag_dictionary(_prepare_out(out_dictionary), dictionary)
    return {
        "stage": "centroids",
        "hashtags": dictionary.m,
        "records": len(records),
        "dim": dim,
        "digest": embedding_mod.dictionary_digest(dictionary),
    }


def run_thesaurus(
    dictionary_path: str | Path,
    out_thesaurus: str | Path,
    k: int,
    max_distance: Optional[float] = None,
) -> dict:
    dictionary = embedding_mod.read_hashtag_dictionary(_require(dictionary_path, "centroids"))
    thesaurus = thesaurus_mod.build_thesaurus(dictionary, k, max_distance=max_distance)
    thesaurus_mod.write_thesaurus(_prepare_out(out_thesaurus), thesaurus)
    return {
        "stage": "thesaurus",
        "k": k,
        "hashtags": len(thesaurus),
        "max_distance": max_distance,
        "digest": thesaurus.digest,
    }


def run_recommend(
    train_path: str | Path,
    test_path: str | Path,
    word_vectors_path: str | Path,
    out_pairs: str | Path,
    r: int = 10,
    threshold: float = 0.5,
    popularity_scope: str = "selected_set",
) -> dict:
    train = corpus_mod.read_clean_tweets(_require(train_path, "preprocess"))
    test = corpus_mod.read_clean_tweets(_require(test_path, "preprocess"))
    word_vectors, _ = embedding_mod.read_word_vectors(_require(word_vectors_path, "embed-toy"))
    model = recommender_mod.build_model(
        train, word_vectors, similarity_threshold=threshold, popularity_scope=popularity_scope
    )
    pairs = recommender_mod.recommend_pairs(model, test, r)
    metrics_mod.write_eval_pairs(_prepare_out(out_pairs), pairs)
    return {
        "stage": "recommend",
        "r": r,
        "threshold": threshold,
        "test_tweets": len(pairs),
        "model_tweets": len(model.train_vectors),
        "empty_recommendations": sum(1 for p in pairs if not p.recommended),
    }


def run_evaluate(
    pairs_path: str | Path,
    thesaurus_path: str | Path,
    out_report: str | Path,
    k: int,
    r: Optional[int] = None,
    per_pair: bool = False,
    dictionary_path: Optional[str] = None,
) -> dict:
    pairs = metrics_mod.read_eval_pairs(_require(pairs_path, "recommend"))
    thesaurus = thesaurus_mod.read_thesaurus(_require(thesaurus_path, "thesaurus"))
    if dictionary_path is not None:
        dictionary = embedding_mod.read_hashtag_dictionary(_require(dictionary_path, "centroids"))
        if not thesaurus.matches(dictionary):
            from .errors import IntegrityError

            raise IntegrityError(
                f"thesaurus {thesaurus_path} was not built from dictionary {dictionary_path}"
            )
    report = metrics_mod.evaluate(pairs, thesaurus, k, r=r, per_pair=per_pair)
    metrics_mod.write_report(_prepare_out(out_report), report)
    summary = metrics_mod.report_to_dict(report)
    summary.pop("per_pair", None)
    summary["stage"] = "evaluate"
    return summary


def run_sweep(
    corpus_path: str | Path,
    workdir: str | Path,
    config: RunConfig,
    stopwords_path: Optional[str] = None,
) -> dict:
    """Full pipeline: preprocess, embed, centroids, one thesaurus at the
    largest k, one recommendation pass per r, then every (r, k) cell.

    The thesaurus is truncated per k (synonym lists nest) and top-r lists
    are prefixes of the largest-r list, so each expensive stage runs once.
    """
    ws = Workspace(workdir).ensure()
    save_config(ws.run_config, config)

    pre = run_preprocess(
        corpus_path,
        ws.cleaned,
        ws.records,
        ws.train,
        ws.test,
        split_fraction=config.split_fraction,
        seed=config.seed,
        stopwords_path=stopwords_path,
    )
    emb = run_embed_toy(ws.cleaned, ws.embeddings, ws.word_vectors, dim=config.dim, seed=config.seed)
    cen = run_centroids(ws.cleaned, ws.embeddings, ws.dictionary)
    max_k = max(config.k_values)
    thes = run_thesaurus(ws.dictionary, ws.thesaurus, max_k, max_distance=config.max_distance)

    train = corpus_mod.read_clean_tweets(ws.train)
    test = corpus_mod.read_clean_tweets(ws.test)
    word_vectors, _ = embedding_mod.read_word_vectors(ws.word_vectors)
    model = recommender_mod.build_model(
        train,
        word_vectors,
        similarity_threshold=config.threshold,
        popularity_scope=config.popularity_scope,
    )
    max_r = max(config.r_values)
    full_pairs = recommender_mod.recommend_pairs(model, test, max_r)
    pairs_by_r: dict[int, list[metrics_mod.EvalPair]] = {}
    for r in config.r_values:
        pairs_by_r[r] = [
            metrics_mod.EvalPair(p.tweet_id, p.recommended[:r], p.ground_truth)
            for p in full_pairs
        ]
        metrics_mod.write_eval_pairs(ws.pairs(r), pairs_by_r[r])

    thesaurus = thesaurus_mod.read_thesaurus(ws.thesaurus)
    reports = []
    for r in config.r_values:
        for k in config.k_values:
            reports.append(metrics_mod.evaluate(pairs_by_r[r], thesaurus, k, r=r))
    metrics_mod.write_sweep_csv(ws.sweep_csv, reports, counts=True)

    return {
        "stage": "sweep",
        "rows": len(reports),
        "k_values": list(config.k_values),
        "r_values": list(config.r_values),
        "tweets_kept": pre["tweets_kept"],
        "hashtags": cen["hashtags"],
        "test_tweets": len(test),
        "dim": emb["dim"],
        "thesaurus_k": thes["k"],
        "csv": str(ws.sweep_csv),
    }
