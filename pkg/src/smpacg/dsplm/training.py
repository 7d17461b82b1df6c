"""Training objectives: masked-prefix reconstruction plus autoregressive LM.

Optimization is plain SGD with a fixed learning rate and a fixed step count,
so runs are exactly reproducible from the seed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import torch
import torch.nn.functional as F

from .data import PrefixSample, corrupt_input, split_text_sample
from .model import PrefixLM


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    batch_size: int = 4
    steps: int = 200
    corruption_ratio: float = 0.15
    recon_weight: float = 1.0
    ar_weight: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.corruption_ratio < 1.0:
            raise TrainingError("corruption ratio must lie in (0,1)")
        if self.steps < 1:
            raise TrainingError("step count must be >= 1")


def _ar_loss(model: PrefixLM, sample: PrefixSample) -> torch.Tensor:
    tokens = list(sample.tokens)
    p = len(sample.prefix)
    logits = model.logits(tokens, p)
    # position i-1 predicts token i for every target position i
    pred = logits[p - 1 : len(tokens) - 1]
    gold = torch.tensor(tokens[p:], dtype=torch.long)
    return F.cross_entropy(pred, gold)


def _recon_loss(model: PrefixLM, sample: PrefixSample, ratio: float, seed: int) -> torch.Tensor:
    corrupted, targets = corrupt_input(sample.prefix, ratio, seed)
    tokens = list(corrupted) + list(sample.target)
    logits = model.logits(tokens, len(sample.prefix))
    positions = sorted(targets)
    pred = logits[positions]
    gold = torch.tensor([targets[i] for i in positions], dtype=torch.long)
    return F.cross_entropy(pred, gold)


def batch_loss(
    model: PrefixLM,
    batch: list[PrefixSample],
    config: TrainConfig,
    mode: str,
    step: int = 0,
) -> torch.Tensor:
    if not batch:
        raise TrainingError("empty batch")
    if mode not in ("pretrain", "finetune"):
        raise TrainingError(f"unknown mode {mode!r}")
    losses = []
    for i, sample in enumerate(batch):
        ar = _ar_loss(model, sample)
        if mode == "pretrain":
            recon = _recon_loss(
                model, sample, config.corruption_ratio, seed=config.seed * 1_000_003 + step * 131 + i
            )
            losses.append(config.ar_weight * ar + config.recon_weight * recon)
        else:
            losses.append(ar)
    return torch.stack(losses).mean()


def train_step(
    model: PrefixLM,
    batch: list[PrefixSample],
    config: TrainConfig,
    mode: str = "finetune",
    step: int = 0,
) -> float:
    """One SGD step over the batch; returns the loss. Mutates the model."""
    model.zero_grad(set_to_none=True)
    loss = batch_loss(model, batch, config, mode, step)
    if not torch.isfinite(loss):
        raise TrainingError(f"non-finite loss at step {step}: training diverged")
    loss.backward()
    with torch.no_grad():
        for p in model.parameters():
            if p.grad is not None:
                p -= config.learning_rate * p.grad
    model.zero_grad(set_to_none=True)
    return float(loss.detach())


def _run(
    model: PrefixLM,
    samples: list[PrefixSample],
    config: TrainConfig,
    mode: str,
) -> tuple[PrefixLM, list[float]]:
    if not samples:
        raise TrainingError("no training samples")
    rng = random.Random(config.seed)
    losses = []
    for step in range(config.steps):
        batch = [samples[rng.randrange(len(samples))] for _ in range(config.batch_size)]
        losses.append(train_step(model, batch, config, mode, step))
    return model, losses


def pretrain(
    model: PrefixLM, domain_corpus: list[str], vocab, config: TrainConfig
) -> tuple[PrefixLM, list[float]]:
    """Domain pretraining on single texts split at random prefix points."""
    if not domain_corpus:
        raise TrainingError("empty pretraining corpus")
    rng = random.Random(config.seed)
    samples = []
    for text in domain_corpus:
        try:
            samples.append(split_text_sample(text, vocab, rng, model.cfg.max_len))
        except ValueError:
            continue
    return _run(model, samples, config, "pretrain")


def finetune(
    model: PrefixLM, samples: list[PrefixSample], config: TrainConfig
) -> tuple[PrefixLM, list[float]]:
    """Task fine-tuning with the autoregressive objective only."""
    return _run(model, samples, config, "finetune")


@torch.no_grad()
def perplexity(model: PrefixLM, samples: list[PrefixSample]) -> float:
    """exp of the mean per-target-token autoregressive cross-entropy."""
    if not samples:
        raise TrainingError("perplexity needs at least one sample")
    total_nll = 0.0
    total_tokens = 0
    for sample in samples:
        tokens = list(sample.tokens)
        p = len(sample.prefix)
        logits = model.logits(tokens, p)
        pred = logits[p - 1 : len(tokens) - 1]
        gold = torch.tensor(tokens[p:], dtype=torch.long)
        total_nll += float(F.cross_entropy(pred, gold, reduction="sum"))
        total_tokens += len(gold)
    return math.exp(total_nll / total_tokens)
