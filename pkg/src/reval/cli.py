"""Command line client for the pipeline service.

Every subcommand builds one request, sends it to the service, prints the
summary as a single JSON line on success, and maps service error kinds
to exit codes: 2 for malformed input, 3 for broken cross-file
references, 4 for degenerate data, 1 otherwise. By default the service
runs in process; --server targets a running instance instead (it must
share a filesystem with the client, since requests carry paths).

Numeric defaults come from --config when given; explicit flags win.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Optional

import click

from .config import RunConfig, load_config
from .pipeline import Workspace, demo_corpus_path

_EXIT_CODES = {"format": 2, "integrity": 3, "degenerate": 4}


class ServiceClient:
    def __init__(self, server: Optional[str]):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            import warnings

            with warnings.catch_warnings():
                # the in-process client works with either httpx generation
                warnings.filterwarnings("ignore", message=".*httpx2.*")
                from fastapi.testclient import TestClient

            from .service import create_app

            self._client = TestClient(create_app(), raise_server_exceptions=False)

    def run(self, endpoint: str, payload: dict) -> dict:
        """POST one stage request; on failure print the error and exit."""
        response = self._client.post(endpoint, json=payload)
        if response.status_code == 200:
            return response.json()
        try:
            body = response.json()
        except ValueError:
            body = {}
        if response.status_code == 400 and "error_type" in body:
            click.echo(f"error: {body['message']}", err=True)
            sys.exit(_EXIT_CODES.get(body["error_type"], 1))
        if response.status_code == 422:
            click.echo(f"error: invalid request: {body.get('detail')}", err=True)
            sys.exit(2)
        click.echo(f"error: service returned {response.status_code}", err=True)
        sys.exit(1)


def _emit(summary: dict) -> None:
    click.echo(json.dumps(summary, sort_keys=True))


def _load(config: Optional[str]) -> RunConfig:
    return load_config(config) if config else RunConfig()


def _corpus_arg(corpus: Optional[str], demo: bool) -> str:
    if demo and corpus:
        raise click.UsageError("--corpus and --demo are mutually exclusive")
    if demo:
        return str(demo_corpus_path())
    if not corpus:
        raise click.UsageError("one of --corpus or --demo is required")
    return corpus


@click.group()
@click.option("--server", default=None, metavar="URL", help="Base URL of a running service.")
@click.pass_context
def main(ctx, server):
    """Hashtag recommendation evaluation pipeline."""
    ctx.obj = ServiceClient(server)


@main.command()
@click.option("--corpus", type=click.Path(), default=None, help="Raw tweets, one JSON object per line.")
@click.option("--demo", is_flag=True, help="Use the packaged 60-tweet demo corpus.")
@click.option("--workdir", type=click.Path(), default="reval_work", show_default=True)
@click.option("--config", type=click.Path(), default=None)
@click.option("--split-fraction", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--stopwords", type=click.Path(), default=None, help="Custom stop word list.")
@click.option("--no-squeeze", is_flag=True, help="Keep characters repeated more than three times.")
@click.pass_obj
def preprocess(client, corpus, demo, workdir, config, split_fraction, seed, stopwords, no_squeeze):
    """Clean a raw corpus, extract hashtags, write the train/test split."""
    cfg = _load(config)
    ws = Workspace(workdir)
    _emit(client.run("/v1/preprocess", {
        "corpus_path": _corpus_arg(corpus, demo),
        "out_cleaned": str(ws.cleaned),
        "out_records": str(ws.records),
        "out_train": str(ws.train),
        "out_test": str(ws.test),
        "split_fraction": split_fraction if split_fraction is not None else cfg.split_fraction,
        "seed": seed if seed is not None else cfg.seed,
        "stopwords_path": stopwords,
        "squeeze_repeats": not no_squeeze,
    }))


@main.command("embed-toy")
@click.option("--workdir", type=click.Path(), default="reval_work", show_default=True)
@click.option("--in", "cleaned", type=click.Path(), default=None, help="Cleaned corpus (default: workdir).")
@click.option("--out", type=click.Path(), default=None, help="Tweet embedding file (default: workdir).")
@click.option("--out-words", type=click.Path(), default=None, help="Word vector file (default: workdir).")
@click.option("--config", type=click.Path(), default=None)
@click.option("--dim", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.pass_obj
def embed_toy(client, workdir, cleaned, out, out_words, config, dim, seed):
    """Embed cleaned tweets with the deterministic toy embedder."""
    cfg = _load(config)
    ws = Workspace(workdir)
    _emit(client.run("/v1/embed-toy", {
        "cleaned_path": cleaned or str(ws.cleaned),
        "out_embeddings": out or str(ws.embeddings),
        "out_word_vectors": out_words or str(ws.word_vectors),
        "dim": dim if dim is not None else cfg.dim,
        "seed": seed if seed is not None else cfg.seed,
    }))


@main.command()
@click.option("--workdir", type=click.Path(), default="reval_work", show_default=True)
@click.option("--in", "cleaned", type=click.Path(), default=None, help="Cleaned corpus (default: workdir).")
@click.option("--embeddings", type=click.Path(), default=None, help="Tweet embedding file (default: workdir).")
@click.option("--out", type=click.Path(), default=None, help="Dictionary file (default: workdir).")
@click.pass_obj
def centroids(client, workdir, cleaned, embeddings, out):
    """Accumulate one centroid per hashtag from tweet embeddings."""
    ws = Workspace(workdir)
    _emit(client.run("/v1/centroids", {
        "cleaned_path": cleaned or str(ws.cleaned),
        "embeddings_path": embeddings or str(ws.embeddings),
        "out_dictionary": out or str(ws.dictionary),
    }))


@main.command()
@click.option("--workdir", type=click.Path(), default="reval_work", show_default=True)
@click.option("--dictionary", type=click.Path(), default=None, help="Dictionary file (default: workdir).")
@click.option("--out", type=click.Path(), default=None, help="Thesaurus file (default: workdir).")
@click.option("--config", type=click.Path(), default=None)
@click.option("--k", type=int, default=None, help="Synonyms per hashtag (default: largest configured k).")
@click.option("--max-distance", type=float, default=None, help="Drop neighbors beyond this cosine distance.")
@click.pass_obj
def thesaurus(client, workdir, dictionary, out, config, k, max_distance):
    """Build the synonym thesaurus from hashtag centroids."""
    cfg = _load(config)
    ws = Workspace(workdir)
    _emit(client.run("/v1/thesaurus", {
        "dictionary_path": dictionary or str(ws.dictionary),
        "out_thesaurus": out or str(ws.thesaurus),
        "k": k if k is not None else max(cfg.k_values),
        "max_distance": max_distance if max_distance is not None else cfg.max_distance,
    }))


@main.command()
@click.option("--workdir", type=click.Path(), default="reval_work", show_default=True)
@click.option("--train", type=click.Path(), default=None, help="Training split (default: workdir).")
@click.option("--test", type=click.Path(), default=None, help="Test split (default: workdir).")
@click.option("--word-vectors", type=click.Path(), default=None, help="Word vector file (default: workdir).")
@click.option("--out", type=click.Path(), default=None, help="Eval pairs file (default: workdir).")
@click.option("--config", type=click.Path(), default=None)
@click.option("--top-r", type=int, default=None, help="Recommendations per tweet (default: largest configured r).")
@click.option("--threshold", type=float, default=None)
@click.option("--popularity-scope", type=click.Choice(["selected_set", "global"]), default=None)
@click.pass_obj
def recommend(client, workdir, train, test, word_vectors, out, config, top_r, threshold, popularity_scope):
    """Recommend hashtags for the test split with the similarity baseline."""
    cfg = _load(config)
    ws = Workspace(workdir)
    r = top_r if top_r is not None else max(cfg.r_values)
    _emit(client.run("/v1/recommend", {
        "train_path": train or str(ws.train),
        "test_path": test or str(ws.test),
        "word_vectors_path": word_vectors or str(ws.word_vectors),
        "out_pairs": out or str(ws.pairs(r)),
        "r": r,
        "threshold": threshold if threshold is not None else cfg.threshold,
        "popularity_scope": popularity_scope or cfg.popularity_scope,
    }))


@main.command()
@click.option("--workdir", type=click.Path(), default="reval_work", show_default=True)
@click.option("--pairs", type=click.Path(), default=None, help="Eval pairs file (default: workdir, needs --top-r).")
@click.option("--thesaurus", "thesaurus_path", type=click.Path(), default=None, help="Thesaurus file (default: workdir).")
@click.option("--dictionary", type=click.Path(), default=None, help="Check the thesaurus was built from this dictionary.")
@click.option("--out", type=click.Path(), default=None, help="Report file (default: workdir).")
@click.option("--k", type=int, required=True, help="Synonyms per hashtag.")
@click.option("--top-r", type=int, default=None, help="r the pairs were generated with (report metadata).")
@click.option("--per-pair", is_flag=True, help="Include per-pair results in the report.")
@click.pass_obj
def evaluate(client, workdir, pairs, thesaurus_path, dictionary, out, k, top_r, per_pair):
    """Score eval pairs against the thesaurus and write a report."""
    ws = Workspace(workdir)
    if pairs is None:
        if top_r is None:
            raise click.UsageError("--pairs or --top-r is required to locate the pairs file")
        pairs = str(ws.pairs(top_r))
    _emit(client.run("/v1/evaluate", {
        "pairs_path": pairs,
        "thesaurus_path": thesaurus_path or str(ws.thesaurus),
        "out_report": out or str(ws.report),
        "k": k,
        "r": top_r,
        "per_pair": per_pair,
        "dictionary_path": dictionary,
    }))


@main.command()
@click.option("--corpus", type=click.Path(), default=None, help="Raw tweets, one JSON object per line.")
@click.option("--demo", is_flag=True, help="Use the packaged 60-tweet demo corpus.")
@click.option("--workdir", type=click.Path(), default="reval_work", show_default=True)
@click.option("--config", type=click.Path(), default=None)
@click.option("--stopwords", type=click.Path(), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--dim", type=int, default=None)
@click.option("--k-values", default=None, metavar="LIST", help="Comma-separated, e.g. 0,5,10.")
@click.option("--r-values", default=None, metavar="LIST", help="Comma-separated, e.g. 1,5,10.")
@click.option("--split-fraction", type=float, default=None)
@click.option("--threshold", type=float, default=None)
@click.option("--max-distance", type=float, default=None)
@click.option("--popularity-scope", type=click.Choice(["selected_set", "global"]), default=None)
@click.pass_obj
def sweep(client, corpus, demo, workdir, config, stopwords, seed, dim, k_values, r_values,
          split_fraction, threshold, max_distance, popularity_scope):
    """Run the full pipeline and evaluate every (k, r) cell."""
    def parse_list(raw):
        return None if raw is None else [int(x) for x in raw.split(",") if x.strip()]

    _emit(client.run("/v1/sweep", {
        "corpus_path": _corpus_arg(corpus, demo),
        "workdir": workdir,
        "config_path": config,
        "stopwords_path": stopwords,
        "seed": seed,
        "dim": dim,
        "k_values": parse_list(k_values),
        "r_values": parse_list(r_values),
        "split_fraction": split_fraction,
        "threshold": threshold,
        "max_distance": max_distance,
        "popularity_scope": popularity_scope,
    }))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the service with uvicorn."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
