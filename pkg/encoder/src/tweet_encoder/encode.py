"""Batch tweet encoding with a pre-trained transformer.

Reads a cleaned corpus (JSON lines, one object with a "text" field per
line) and writes one vector per tweet in the binary embedding format the
evaluation pipeline consumes: an 18-byte header (magic b"REVL", version,
dimension, record count), then per record a u64 tweet index followed by
the vector as little-endian float32. Record i carries index i, matching
the corpus line position.

The package deliberately does not import the evaluation library; the file
format is the only coupling.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import torch

MAGIC = b"REVL"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHIQ")

POOLING_MODES = ("cls_token", "mean_tokens")


class EncoderError(Exception):
    """Unusable input file or request."""


class SetupError(Exception):
    """The model or tokenizer could not be loaded."""


@dataclass(frozen=True)
class EncoderSpec:
    model_name: str
    max_length: int = 128
    batch_size: int = 64
    pooling: str = "cls_token"

    def __post_init__(self):
        if self.max_length < 8:
            raise EncoderError(f"max_length must be >= 8, got {self.max_length}")
        if self.batch_size < 1:
            raise EncoderError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.pooling not in POOLING_MODES:
            raise EncoderError(f"pooling must be one of {POOLING_MODES}, got {self.pooling!r}")


def read_corpus_texts(path: str | Path) -> list[str]:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise EncoderError(f"corpus not found: {path}") from exc
    texts: list[str] = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            text = obj["text"]
        except (json.JSONDecodeError, TypeError, KeyError) as exc:
            raise EncoderError(
                f"{path}:{lineno}: expected a JSON object with a 'text' field"
            ) from exc
        if not isinstance(text, str):
            raise EncoderError(f"{path}:{lineno}: 'text' must be a string")
        texts.append(text)
    if not texts:
        raise EncoderError(f"{path}: no tweets")
    return texts


def load_encoder(model_name: str):
    """Tokenizer and model in inference mode; local paths never hit the network."""
    from transformers import AutoModel, AutoTokenizer
    from transformers.utils import logging as hf_logging

    hf_logging.set_verbosity_error()
    hf_logging.disable_progress_bar()
    try:
        tokenizer = AutoTokenizer.from_pretrained(model_name)
        model = AutoModel.from_pretrained(model_name)
    except Exception as exc:
        raise SetupError(f"cannot load model {model_name!r}: {exc}") from exc
    model.eval()
    return tokenizer, model


def _pool(hidden: torch.Tensor, attention_mask: torch.Tensor, pooling: str) -> torch.Tensor:
    if pooling == "cls_token":
        return hidden[:, 0, :]
    mask = attention_mask.unsqueeze(-1).to(hidden.dtype)
    return (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1.0)


def encode_corpus(corpus_path: str | Path, spec: EncoderSpec, out_path: str | Path) -> dict:
    texts = read_corpus_texts(corpus_path)
    tokenizer, model = load_encoder(spec.model_name)
    dim = model.config.hidden_size

    # count, don't fail: overlong tweets are truncated at max_length below
    lengths = [len(ids) for ids in tokenizer(texts, truncation=False)["input_ids"]]
    truncated = sum(1 for n in lengths if n > spec.max_length)

    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, dim, len(texts)))
        for start in range(0, len(texts), spec.batch_size):
            batch = texts[start : start + spec.batch_size]
            # every batch is padded to max_length: longest-in-batch padding
            # gives shapes that vary with batch composition, and varying
            # shapes can flip the last float32 bit, so identical text would
            # not be guaranteed identical vectors
            enc = tokenizer(
                batch,
                padding="max_length",
                truncation=True,
                max_length=spec.max_length,
                return_tensors="pt",
            )
            with torch.no_grad():
                hidden = model(
                    input_ids=enc["input_ids"], attention_mask=enc["attention_mask"]
                ).last_hidden_state
            vectors = _pool(hidden, enc["attention_mask"], spec.pooling)
            rows = vectors.cpu().numpy().astype("<f4")
            for offset, row in enumerate(rows):
                fh.write(struct.pack("<Q", start + offset))
                fh.write(row.tobytes())
    return {
        "tweets": len(texts),
        "dim": dim,
        "truncated": truncated,
        "model": spec.model_name,
        "pooling": spec.pooling,
        "out": str(out),
    }
