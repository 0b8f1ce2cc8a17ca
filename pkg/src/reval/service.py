"""HTTP service exposing the pipeline stages.

Each endpoint is a stateless wrapper over one stage function: requests
carry file paths and parameters, responses return the stage summary.
The service and its caller share a filesystem; it exists so evaluation
runs (the expensive, train-once parts especially) can be driven from
anything that speaks HTTP, while the bundled CLI stays a thin client.

Pipeline errors map to HTTP 400 with {"error_type", "message"}, where
error_type is the error kind the CLI translates back into exit codes.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__, pipeline
from .config import RunConfig, apply_overrides, load_config
from .errors import RevalError


class PreprocessRequest(BaseModel):
    corpus_path: str
    out_cleaned: str
    out_records: str
    out_train: str
    out_test: str
    split_fraction: float = 0.9
    seed: int = 7
    stopwords_path: Optional[str] = None
    squeeze_repeats: bool = True


class EmbedToyRequest(BaseModel):
    cleaned_path: str
    out_embeddings: str
    out_word_vectors: str
    dim: int = Field(default=64, ge=2)
    seed: int = 7


class CentroidsRequest(BaseModel):
    cleaned_path: str
    embeddings_path: str
    out_dictionary: str


class ThesaurusRequest(BaseModel):
    dictionary_path: str
    out_thesaurus: str
    k: int = Field(ge=0)
    max_distance: Optional[float] = None


class RecommendRequest(BaseModel):
    train_path: str
    test_path: str
    word_vectors_path: str
    out_pairs: str
    r: int = Field(default=10, ge=1)
    threshold: float = Field(default=0.5, ge=0.0, le=1.0)
    popularity_scope: str = "selected_set"


class EvaluateRequest(BaseModel):
    pairs_path: str
    thesaurus_path: str
    out_report: str
    k: int = Field(ge=0)
    r: Optional[int] = None
    per_pair: bool = False
    dictionary_path: Optional[str] = None


class SweepRequest(BaseModel):
    corpus_path: str
    workdir: str
    config_path: Optional[str] = None
    stopwords_path: Optional[str] = None
    seed: Optional[int] = None
    dim: Optional[int] = None
    k_values: Optional[list[int]] = None
    r_values: Optional[list[int]] = None
    split_fraction: Optional[float] = None
    threshold: Optional[float] = None
    max_distance: Optional[float] = None
    popularity_scope: Optional[str] = None

    def resolve_config(self) -> RunConfig:
        base = load_config(self.config_path) if self.config_path else RunConfig()
        return apply_overrides(
            base,
            seed=self.seed,
            dim=self.dim,
            k_values=tuple(self.k_values) if self.k_values is not None else None,
            r_values=tuple(self.r_values) if self.r_values is not None else None,
            split_fraction=self.split_fraction,
            threshold=self.threshold,
            max_distance=self.max_distance,
            popularity_scope=self.popularity_scope,
        )


def create_app() -> FastAPI:
    app = FastAPI(title="reval", version=__version__)

    @app.exception_handler(RevalError)
    async def domain_error(request, exc: RevalError):
        return JSONResponse(status_code=400, content={"error_type": exc.kind, "message": str(exc)})

    @app.get("/health")
    async def health():
        return {"status": "ok", "version": __version__}

    @app.post("/v1/preprocess")
    async def preprocess(req: PreprocessRequest):
        return pipeline.run_preprocess(
            req.corpus_path,
            req.out_cleaned,
            req.out_records,
            req.out_train,
            req.out_test,
            split_fraction=req.split_fraction,
            seed=req.seed,
            stopwords_path=req.stopwords_path,
            squeeze_repeats=req.squeeze_repeats,
        )

    @app.post("/v1/embed-toy")
    async def embed_toy(req: EmbedToyRequest):
        return pipeline.run_embed_toy(
            req.cleaned_path,
            req.out_embeddings,
            req.out_word_vectors,
            dim=req.dim,
            seed=req.seed,
        )

    @app.post("/v1/centroids")
    async def centroids(req: CentroidsRequest):
        return pipeline.run_centroids(req.cleaned_path, req.embeddings_path, req.out_dictionary)

    @app.post("/v1/thesaurus")
    async def thesaurus(req: ThesaurusRequest):
        return pipeline.run_thesaurus(
            req.dictionary_path, req.out_thesaurus, req.k, max_distance=req.max_distance
        )

    @app.post("/v1/recommend")
    async def recommend(req: RecommendRequest):
        return pipeline.run_recommend(
            req.train_path,
            req.test_path,
            req.word_vectors_path,
            req.out_pairs,
            r=req.r,
            threshold=req.threshold,
            popularity_scope=req.popularity_scope,
        )

    @app.post("/v1/evaluate")
    async def evaluate(req: EvaluateRequest):
        return pipeline.run_evaluate(
            req.pairs_path,
            req.thesaurus_path,
            req.out_report,
            k=req.k,
            r=req.r,
            per_pair=req.per_pair,
            dictionary_path=req.dictionary_path,
        )

    @app.post("/v1/sweep")
    async def sweep(req: SweepRequest):
        return pipeline.run_sweep(
            req.corpus_path,
            req.workdir,
            req.resolve_config(),
            stopwords_path=req.stopwords_path,
        )

    return app


app = create_app()
