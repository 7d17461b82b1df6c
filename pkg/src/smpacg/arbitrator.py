"""Combination arbitrators: strict and normal bundle-quality classifiers.

Both variants are logistic models over joint combination features (topic,
per-slot cid and product word, and sorted pair-interaction features). They
differ only in how negatives are sampled for training: the normal variant
sees random same-topic pairs, the strict variant sees similar-product
(same-cid) pairs plus unrelated cross-topic pairs.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .artifacts import load_artifact, save_artifact
from .catalog import Catalog, Combination
from .words import ProductWordModel, top_word

VARIANTS = ("strict", "normal")


class ArbitratorError(ValueError):
    pass


@dataclass(frozen=True)
class TrainingPair:
    text: str  # rendered combination features, space separated
    label: int  # 1 positive, 0 negative
    source: str  # dataset | sampled_negative


@dataclass(frozen=True)
class ArbitratorConfig:
    steps: int = 400
    learning_rate: float = 1.0
    l2: float = 1e-3
    threshold: float = 0.5


def combination_features(
    combo: Combination, catalog: Catalog, word_model: ProductWordModel | None = None
) -> list[str]:
    """Feature tokens for one combination: units plus sorted pair interactions."""
    slots = []
    for pid in combo.products:
        p = catalog[pid]
        slots.append((p.cid, top_word(p, word_model)))
    feats = [f"topic={combo.topic}"]
    for cid, word in slots:
        feats.append(f"cid={cid}")
        feats.append(f"word={word}")
    for i in range(len(slots)):
        for j in range(i + 1, len(slots)):
            c1, c2 = sorted((slots[i][0], slots[j][0]))
            w1, w2 = sorted((slots[i][1], slots[j][1]))
            feats.append(f"cidpair={c1}+{c2}")
            feats.append(f"wordpair={w1}+{w2}")
    return feats


def build_training_pairs(
    dataset: list[Combination],
    catalog: Catalog,
    variant: str,
    ratio: float = 1.0,
    seed: int = 0,
    word_model: ProductWordModel | None = None,
) -> list[TrainingPair]:
    """One positive per curated combination plus sampled negatives per variant."""
    if variant not in VARIANTS:
        raise ArbitratorError(f"unknown variant {variant!r}")
    if not dataset:
        raise ArbitratorError("empty combination dataset")
    rng = random.Random(seed)
    pairs = [
        TrainingPair(
            text=" ".join(combination_features(c, catalog, word_model)),
            label=1,
            source="dataset",
        )
        for c in dataset
    ]

    n_neg = round(ratio * len(dataset))
    by_topic: dict[str, list] = {}
    for p in catalog:
        if p.topic is not None:
            by_topic.setdefault(p.topic, []).append(p)
    topics = sorted(by_topic)
    if not topics:
        raise ArbitratorError("catalog has no topic-labeled products")
    sizes = [len(c.products) for c in dataset]

    def random_within_topic() -> Combination | None:
        size = rng.choice(sizes)
        candidates = [t for t in topics if len(by_topic[t]) >= size]
        if not candidates:
            return None
        t = rng.choice(candidates)
        picked = rng.sample(by_topic[t], size)
        return Combination(tuple(p.id for p in picked), topic=t, provenance="random")

    def same_cid_pair() -> Combination | None:
        choices = []
        for t in topics:
            by_cid: dict[str, list] = {}
            for p in by_topic[t]:
                by_cid.setdefault(p.cid, []).append(p)
            choices.extend((t, ps) for ps in by_cid.values() if len(ps) >= 2)
        if not choices:
            return None
        t, ps = rng.choice(choices)
        picked = rng.sample(ps, 2)
        return Combination(tuple(p.id for p in picked), topic=t, provenance="random")

    def cross_topic_pair() -> Combination | None:
        if len(topics) < 2:
            return None
        t1, t2 = rng.sample(topics, 2)
        p1 = rng.choice(by_topic[t1])
        p2 = rng.choice(by_topic[t2])
        if p1.id == p2.id:
            return None
        return Combination((p1.id, p2.id), topic=t1, provenance="random")

    made = 0
    attempts = 0
    while made < n_neg:
        attempts += 1
        if attempts > 50 * max(n_neg, 1):
            raise ArbitratorError("catalog too small to sample requested negatives")
        if variant == "normal":
            combo = random_within_topic()
        else:
            combo = same_cid_pair() if made % 2 == 0 else cross_topic_pair()
        if combo is None:
            continue
        pairs.append(
            TrainingPair(
                text=" ".join(combination_features(combo, catalog, word_model)),
                label=0,
                source="sampled_negative",
            )
        )
        made += 1
    return pairs


@dataclass
class ArbitratorModel:
    variant: str
    config: ArbitratorConfig
    feature_index: dict[str, int]
    weights: np.ndarray
    bias: float

    def _featurize(self, text: str) -> np.ndarray:
        x = np.zeros(len(self.feature_index))
        for tok, count in Counter(text.split()).items():
            idx = self.feature_index.get(tok)
            if idx is not None:
                x[idx] = count
        return x

    def score_text(self, text: str) -> float:
        x = self._featurize(text)
        return float(1.0 / (1.0 + np.exp(-(self.weights @ x + self.bias))))

    def score(
        self,
        combo: Combination,
        catalog: Catalog,
        word_model: ProductWordModel | None = None,
    ) -> float:
        return self.score_text(" ".join(combination_features(combo, catalog, word_model)))

    def training_accuracy(self, pairs: list[TrainingPair]) -> float:
        hits = sum(
            1
            for p in pairs
            if (self.score_text(p.text) >= self.config.threshold) == bool(p.label)
        )
        return hits / len(pairs)

    def save(self, path: str | Path) -> None:
        meta = {
            "variant": self.variant,
            "config": vars(self.config) | {},
            "features": list(self.feature_index),
            "bias": self.bias,
        }
        save_artifact(path, "arbitrator", meta, {"weights": self.weights})

    @classmethod
    def load(cls, path: str | Path) -> "ArbitratorModel":
        meta, arrays = load_artifact(path, "arbitrator")
        return cls(
            variant=meta["variant"],
            config=ArbitratorConfig(**meta["config"]),
            feature_index={f: i for i, f in enumerate(meta["features"])},
            weights=arrays["weights"],
            bias=float(meta["bias"]),
        )


def train_arbitrator(
    pairs: list[TrainingPair],
    variant: str = "strict",
    config: ArbitratorConfig | None = None,
) -> ArbitratorModel:
    """Fit the logistic pair classifier with full-batch gradient descent."""
    config = config or ArbitratorConfig()
    if variant not in VARIANTS:
        raise ArbitratorError(f"unknown variant {variant!r}")
    labels = {p.label for p in pairs}
    if labels != {0, 1}:
        raise ArbitratorError("training pairs must contain both labels")

    feature_index: dict[str, int] = {}
    for p in pairs:
        for tok in p.text.split():
            feature_index.setdefault(tok, len(feature_index))
    n, d = len(pairs), len(feature_index)
    X = np.zeros((n, d))
    for i, p in enumerate(pairs):
        for tok, count in Counter(p.text.split()).items():
            X[i, feature_index[tok]] = count
    y = np.array([p.label for p in pairs], dtype=float)

    w = np.zeros(d)
    b = 0.0
    for _ in range(config.steps):
        z = X @ w + b
        pr = 1.0 / (1.0 + np.exp(-z))
        g = (pr - y) / n
        w -= config.learning_rate * (X.T @ g + config.l2 * w)
        b -= config.learning_rate * g.sum()

    return ArbitratorModel(
        variant=variant, config=config, feature_index=feature_index, weights=w, bias=b
    )


def score_combination(
    model: ArbitratorModel,
    combo: Combination,
    catalog: Catalog,
    word_model: ProductWordModel | None = None,
) -> float:
    return model.score(combo, catalog, word_model)


def selection_accuracy(
    model: ArbitratorModel,
    combos: list[Combination],
    catalog: Catalog,
    word_model: ProductWordModel | None = None,
    threshold: float | None = None,
) -> float:
    """Fraction of combinations the arbitrator classifies as positive."""
    if not combos:
        return 0.0
    t = model.config.threshold if threshold is None else threshold
    return sum(1 for c in combos if model.score(c, catalog, word_model) >= t) / len(combos)


def filter_combinations(
    strict_model: ArbitratorModel,
    combos: list[Combination],
    catalog: Catalog,
    threshold: float | None = None,
    word_model: ProductWordModel | None = None,
) -> list[Combination]:
    """Keep combinations the strict arbitrator scores at or above threshold."""
    if strict_model.variant != "strict":
        raise ArbitratorError("filtering requires the strict arbitrator variant")
    t = strict_model.config.threshold if threshold is None else threshold
    return [c for c in combos if strict_model.score(c, catalog, word_model) >= t]
