"""Beam-search and greedy decoding from a prefix."""

from __future__ import annotations

from dataclasses import dataclass

import torch

from .model import PrefixLM
from .vocab import EOS, Vocab


class DecodeError(ValueError):
    pass


@dataclass(frozen=True)
class DecodeConfig:
    beam_size: int = 3
    max_new_tokens: int = 128
    length_alpha: float = 0.7

    def __post_init__(self):
        if self.beam_size < 1:
            raise DecodeError("beam size must be >= 1")


def _normalized(score: float, length: int, alpha: float) -> float:
    return score / max(length, 1) ** alpha


@torch.no_grad()
def _next_log_probs(model: PrefixLM, tokens: list[int], prefix_len: int) -> torch.Tensor:
    logits = model.logits(tokens, prefix_len)
    return torch.log_softmax(logits[-1], dim=-1)


@torch.no_grad()
def generate_beam(
    model: PrefixLM,
    prefix: list[int],
    config: DecodeConfig | None = None,
    vocab: Vocab | None = None,
):
    """Length-normalized beam search; returns token ids, or text when a vocab
    is given. Beams end at EOS or at the new-token limit."""
    config = config or DecodeConfig()
    if not prefix:
        raise DecodeError("empty prefix")
    if len(prefix) >= model.cfg.max_len:
        raise DecodeError("prefix already at model max length")
    p = len(prefix)
    budget = min(config.max_new_tokens, model.cfg.max_len - p)

    # (sum_log_prob, generated ids, finished)
    beams: list[tuple[float, list[int], bool]] = [(0.0, [], False)]
    for _ in range(budget):
        candidates: list[tuple[float, list[int], bool]] = []
        for score, gen, finished in beams:
            if finished:
                candidates.append((score, gen, True))
                continue
            log_probs = _next_log_probs(model, prefix + gen, p)
            top = torch.topk(log_probs, min(config.beam_size, log_probs.shape[0]))
            for lp, tok in zip(top.values.tolist(), top.indices.tolist()):
                candidates.append((score + lp, gen + [tok], tok == EOS))
        candidates.sort(
            key=lambda c: (-_normalized(c[0], len(c[1]), config.length_alpha), c[1])
        )
        beams = candidates[: config.beam_size]
        if all(f for _, _, f in beams):
            break

    best = max(
        beams, key=lambda c: _normalized(c[0], len(c[1]), config.length_alpha)
    )
    ids = best[1]
    if ids and ids[-1] == EOS:
        ids = ids[:-1]
    return vocab.decode(ids) if vocab is not None else ids


@torch.no_grad()
def generate_greedy(
    model: PrefixLM,
    prefix: list[int],
    config: DecodeConfig | None = None,
    vocab: Vocab | None = None,
):
    """Greedy argmax decoding (equivalent to beam size 1)."""
    config = config or DecodeConfig()
    if not prefix:
        raise DecodeError("empty prefix")
    p = len(prefix)
    budget = min(config.max_new_tokens, model.cfg.max_len - p)
    gen: list[int] = []
    for _ in range(budget):
        log_probs = _next_log_probs(model, prefix + gen, p)
        tok = int(torch.argmax(log_probs))
        if tok == EOS:
            break
        gen.append(tok)
    return vocab.decode(gen) if vocab is not None else gen
