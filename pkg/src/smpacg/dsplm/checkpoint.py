"""Model checkpoints: config + vocab + flat weight arrays with a checksum."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch

from ..artifacts import load_artifact, save_artifact
from .model import ModelConfig, PrefixLM
from .vocab import Vocab


def save_checkpoint(model: PrefixLM, vocab: Vocab, path: str | Path) -> None:
    meta = {
        "model_config": vars(model.cfg) | {},
        "vocab": vocab.tokens,
        "parameters": [name for name, _ in model.named_parameters()],
    }
    arrays = {
        name.replace(".", "__"): p.detach().numpy().copy()
        for name, p in model.named_parameters()
    }
    save_artifact(path, "prefix_lm", meta, arrays)


def load_checkpoint(path: str | Path) -> tuple[PrefixLM, Vocab]:
    meta, arrays = load_artifact(path, "prefix_lm")
    cfg = ModelConfig(**meta["model_config"])
    model = PrefixLM(cfg)
    state = {
        name: torch.from_numpy(np.ascontiguousarray(arrays[name.replace(".", "__")]))
        for name in meta["parameters"]
    }
    model.load_state_dict(state)
    return model, Vocab(list(meta["vocab"]))
