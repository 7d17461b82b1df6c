"""Transformer backbone with the prefix attention mask.

Prefix positions attend bidirectionally to each other; output positions
attend only leftward: allowed(i, j) <=> j < prefix_len or j <= i.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    n_layers: int = 2
    d_model: int = 64
    n_heads: int = 4
    d_ff: int = 128
    max_len: int = 256

    def __post_init__(self):
        if self.d_model % self.n_heads != 0:
            raise ModelError("d_model must be divisible by n_heads")


def attention_mask(prefix_len: int, total_len: int) -> torch.Tensor:
    """Boolean (total_len x total_len) matrix; True where attention is allowed."""
    if prefix_len < 1 or prefix_len > total_len:
        raise ModelError(
            f"prefix_len must lie in [1, total_len]; got {prefix_len} for n={total_len}"
        )
    idx = torch.arange(total_len)
    bidirectional = (idx < prefix_len).unsqueeze(0).expand(total_len, total_len)
    causal = idx.unsqueeze(0) <= idx.unsqueeze(1)
    return bidirectional | causal


class TransformerLayer(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        d = cfg.d_model
        self.n_heads = cfg.n_heads
        self.d_head = d // cfg.n_heads
        self.ln1 = nn.LayerNorm(d)
        self.wq = nn.Linear(d, d)
        self.wk = nn.Linear(d, d)
        self.wv = nn.Linear(d, d)
        self.wo = nn.Linear(d, d)
        self.ln2 = nn.LayerNorm(d)
        self.ff1 = nn.Linear(d, cfg.d_ff)
        self.ff2 = nn.Linear(cfg.d_ff, d)

    def forward(self, x: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        n, d = x.shape
        h = self.ln1(x)
        q = self.wq(h).view(n, self.n_heads, self.d_head).transpose(0, 1)
        k = self.wk(h).view(n, self.n_heads, self.d_head).transpose(0, 1)
        v = self.wv(h).view(n, self.n_heads, self.d_head).transpose(0, 1)
        scores = q @ k.transpose(-2, -1) / self.d_head**0.5
        scores = scores.masked_fill(~mask, float("-inf"))
        attn = torch.softmax(scores, dim=-1)
        ctx = (attn @ v).transpose(0, 1).reshape(n, d)
        x = x + self.wo(ctx)
        h = self.ln2(x)
        x = x + self.ff2(F.gelu(self.ff1(h)))
        return x


class PrefixLM(nn.Module):
    def __init__(self, cfg: ModelConfig, seed: int = 0):
        super().__init__()
        self.cfg = cfg
        gen = torch.Generator().manual_seed(seed)

        def init(*shape):
            return torch.randn(*shape, generator=gen) * 0.02

        self.tok_emb = nn.Parameter(init(cfg.vocab_size, cfg.d_model))
        self.pos_emb = nn.Parameter(init(cfg.max_len, cfg.d_model))
        self.layers = nn.ModuleList(TransformerLayer(cfg) for _ in range(cfg.n_layers))
        self.ln_f = nn.LayerNorm(cfg.d_model)
        self.head = nn.Linear(cfg.d_model, cfg.vocab_size)
        # re-initialize all linear/layernorm weights from the seeded generator
        with torch.no_grad():
            for layer in self.layers:
                for lin in (layer.wq, layer.wk, layer.wv, layer.wo, layer.ff1, layer.ff2):
                    lin.weight.copy_(init(*lin.weight.shape))
                    lin.bias.zero_()
            self.head.weight.copy_(init(*self.head.weight.shape))
            self.head.bias.zero_()

    def logits(self, tokens: list[int] | torch.Tensor, prefix_len: int) -> torch.Tensor:
        """Per-position vocabulary logits (n x vocab)."""
        ids = torch.as_tensor(tokens, dtype=torch.long)
        n = ids.shape[0]
        if n == 0:
            raise ModelError("empty token sequence")
        if n > self.cfg.max_len:
            raise ModelError(f"sequence length {n} exceeds max length {self.cfg.max_len}")
        if ids.min() < 0 or ids.max() >= self.cfg.vocab_size:
            raise ModelError("token id out of vocabulary range")
        mask = attention_mask(prefix_len, n)
        x = self.tok_emb[ids] + self.pos_emb[:n]
        for layer in self.layers:
            x = layer(x, mask)
        x = self.ln_f(x)
        return self.head(x)

    @torch.no_grad()
    def forward_probs(self, tokens: list[int], prefix_len: int) -> torch.Tensor:
        """Per-position next-token probability distributions."""
        return torch.softmax(self.logits(tokens, prefix_len), dim=-1)


def forward(model: PrefixLM, tokens: list[int], prefix_len: int) -> torch.Tensor:
    return model.forward_probs(tokens, prefix_len)
