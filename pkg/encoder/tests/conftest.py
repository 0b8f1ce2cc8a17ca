import json

import pytest
import torch
from transformers import BertConfig, BertModel, BertTokenizerFast

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "alpha", "beta", "gamma", "delta", "epsilon",
    "run", "swim", "lift", "rest", "##s", "##ing",
]


@pytest.fixture(scope="session")
def model_dir(tmp_path_factory):
    """Random-weight BERT with the reference hidden size, saved locally.

    Everything else is tiny so the forward pass stays fast; the fixed seed
    makes the weights, and therefore every encoded vector, reproducible.
    """
    root = tmp_path_factory.mktemp("tiny-bert")
    (root / "vocab.txt").write_text("\n".join(VOCAB) + "\n")
    tokenizer = BertTokenizerFast(vocab_file=str(root / "vocab.txt"), do_lower_case=True)
    tokenizer.save_pretrained(root)
    torch.manual_seed(0)
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=768,
        num_hidden_layers=1,
        num_attention_heads=4,
        intermediate_size=64,
        max_position_embeddings=64,
    )
    BertModel(config).save_pretrained(root)
    return str(root)


@pytest.fixture()
def corpus_path(tmp_path):
    tweets = [
        {"id": "t0", "text": "alpha beta runs", "hashtags": ["#a"]},
        {"id": "t1", "text": "gamma delta swim", "hashtags": ["#b"]},
        {"id": "t2", "text": "alpha beta runs", "hashtags": ["#c"]},
        {"id": "t3", "text": " ".join(["lift"] * 40), "hashtags": []},
        {"id": "t4", "text": "rest epsilon", "hashtags": ["#d"]},
    ]
    path = tmp_path / "cleaned.jsonl"
    path.write_text("\n".join(json.dumps(t) for t in tweets) + "\n")
    return path
