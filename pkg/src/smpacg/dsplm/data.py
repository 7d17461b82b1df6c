"""Prefix/target sample construction and pretraining input corruption."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from ..catalog import Catalog, Combination
from .vocab import BOS, EOS, MASK, SEP, Vocab


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class PrefixSample:
    prefix: tuple[int, ...]
    target: tuple[int, ...]

    def __post_init__(self):
        if not self.prefix:
            raise DataError("prefix must be non-empty")
        if not self.target or self.target[-1] != EOS:
            raise DataError("target must end with the EOS token")

    @property
    def tokens(self) -> tuple[int, ...]:
        return self.prefix + self.target

    def __len__(self) -> int:
        return len(self.prefix) + len(self.target)


def encode_prefix(combo: Combination, catalog: Catalog, vocab: Vocab) -> list[int]:
    """Serialize combination info: topic SEP (title SEP words) per product."""
    ids = [BOS] + vocab.encode(combo.topic)
    for pid in combo.products:
        product = catalog[pid]
        ids.append(SEP)
        ids.extend(vocab.encode(product.title))
        ids.append(SEP)
        words = "".join(w for w, _ in product.product_words[:3])
        ids.extend(vocab.encode(words))
    ids.append(SEP)
    return ids


def encode_sample(
    combo: Combination,
    catalog: Catalog,
    copy: str,
    vocab: Vocab,
    max_len: int = 256,
) -> PrefixSample:
    prefix = encode_prefix(combo, catalog, vocab)
    target = vocab.encode(copy) + [EOS]
    if len(prefix) + len(target) > max_len:
        raise DataError(
            f"sample length {len(prefix) + len(target)} exceeds max length {max_len}"
        )
    return PrefixSample(prefix=tuple(prefix), target=tuple(target))


def split_text_sample(
    text: str, vocab: Vocab, rng: random.Random, max_len: int = 256
) -> PrefixSample:
    """Pretraining sample: split a domain text at a random point into a/b."""
    ids = vocab.encode(text)[: max_len - 3]
    if len(ids) < 2:
        raise DataError("text too short to split")
    split = rng.randint(1, len(ids) - 1)
    prefix = tuple([BOS] + ids[:split] + [SEP])
    target = tuple(ids[split:] + [EOS])
    return PrefixSample(prefix=prefix, target=target)


def corrupt_input(
    prefix: tuple[int, ...], ratio: float, seed: int
) -> tuple[tuple[int, ...], dict[int, int]]:
    """Mask ceil(ratio * n_maskable) non-special prefix positions.

    Returns the corrupted prefix and {position: original id} targets.
    """
    if not 0.0 < ratio < 1.0:
        raise DataError("corruption ratio must lie in (0,1)")
    maskable = [i for i, t in enumerate(prefix) if t >= 5]
    if not maskable:
        raise DataError("prefix contains only special tokens")
    k = max(1, math.ceil(ratio * len(maskable)))
    rng = random.Random(seed)
    chosen = sorted(rng.sample(maskable, k))
    corrupted = list(prefix)
    targets = {}
    for pos in chosen:
        targets[pos] = corrupted[pos]
        corrupted[pos] = MASK
    return tuple(corrupted), targets
