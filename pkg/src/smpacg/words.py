"""Product word prediction: per-word linear scorers over character n-grams.

Each candidate product word gets an independent logistic scorer over bag-of-
character-n-gram features of the title and attribute values, so confidences
are directly comparable probabilities in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .artifacts import load_artifact, save_artifact
from .catalog import Product
from .textutil import char_ngrams


class WordModelError(ValueError):
    pass


@dataclass(frozen=True)
class WordModelConfig:
    ngram_min: int = 1
    ngram_max: int = 3
    steps: int = 300
    learning_rate: float = 2.0
    l2: float = 1e-4
    top_k: int = 3
    min_confidence: float = 0.0


@dataclass
class ProductWordModel:
    config: WordModelConfig
    vocabulary: list[str]
    feature_index: dict[str, int]
    weights: np.ndarray  # (n_words, n_features)
    bias: np.ndarray  # (n_words,)
    _word_index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self._word_index = {w: i for i, w in enumerate(self.vocabulary)}

    def _featurize(self, title: str, attributes: dict[str, str]) -> np.ndarray:
        x = np.zeros(len(self.feature_index))
        text = title + " " + " ".join(attributes.values())
        for g in char_ngrams(text, self.config.ngram_min, self.config.ngram_max):
            idx = self.feature_index.get(g)
            if idx is not None:
                x[idx] += 1.0
        return x

    def predict(self, title: str, attributes: dict[str, str] | None = None,
                top_k: int | None = None) -> list[tuple[str, float]]:
        """Ranked (word, confidence) list, confidence descending."""
        if not title:
            raise WordModelError("title must be non-empty")
        x = self._featurize(title, attributes or {})
        scores = 1.0 / (1.0 + np.exp(-(self.weights @ x + self.bias)))
        k = self.config.top_k if top_k is None else top_k
        order = sorted(range(len(self.vocabulary)), key=lambda i: (-scores[i], self.vocabulary[i]))
        ranked = [
            (self.vocabulary[i], float(scores[i]))
            for i in order
            if scores[i] >= self.config.min_confidence
        ]
        return ranked[:k]

    def score(self, title: str, attributes: dict[str, str], word: str) -> float:
        if word not in self._word_index:
            raise WordModelError(f"word {word!r} not in model vocabulary")
        x = self._featurize(title, attributes)
        i = self._word_index[word]
        return float(1.0 / (1.0 + np.exp(-(self.weights[i] @ x + self.bias[i]))))

    def save(self, path: str | Path) -> None:
        meta = {
            "config": vars(self.config) | {},
            "vocabulary": self.vocabulary,
            "features": list(self.feature_index),
        }
        save_artifact(path, "word_model", meta, {"weights": self.weights, "bias": self.bias})

    @classmethod
    def load(cls, path: str | Path) -> "ProductWordModel":
        meta, arrays = load_artifact(path, "word_model")
        return cls(
            config=WordModelConfig(**meta["config"]),
            vocabulary=list(meta["vocabulary"]),
            feature_index={g: i for i, g in enumerate(meta["features"])},
            weights=arrays["weights"],
            bias=arrays["bias"],
        )


def train_product_word_model(
    labeled: list[tuple[Product, list[str]]],
    config: WordModelConfig | None = None,
) -> ProductWordModel:
    """Fit one-vs-rest logistic scorers from (product, gold words) pairs."""
    config = config or WordModelConfig()
    if not labeled:
        raise WordModelError("empty training set")
    vocabulary = sorted({w for _, words in labeled for w in words})
    if not vocabulary:
        raise WordModelError("no gold product words in training set")

    feature_index: dict[str, int] = {}
    rows = []
    for product, _ in labeled:
        text = product.title + " " + " ".join(product.attributes.values())
        grams = char_ngrams(text, config.ngram_min, config.ngram_max)
        for g in grams:
            feature_index.setdefault(g, len(feature_index))
        rows.append(grams)

    n, d, v = len(labeled), len(feature_index), len(vocabulary)
    X = np.zeros((n, d))
    for i, grams in enumerate(rows):
        for g in grams:
            X[i, feature_index[g]] += 1.0
    word_index = {w: i for i, w in enumerate(vocabulary)}
    Y = np.zeros((n, v))
    for i, (_, words) in enumerate(labeled):
        for w in words:
            Y[i, word_index[w]] = 1.0

    # full-batch gradient descent on mean binary cross-entropy per word
    W = np.zeros((v, d))
    b = np.zeros(v)
    for _ in range(config.steps):
        P = 1.0 / (1.0 + np.exp(-(X @ W.T + b)))  # (n, v)
        G = (P - Y) / n
        W -= config.learning_rate * (G.T @ X + config.l2 * W)
        b -= config.learning_rate * G.sum(axis=0)

    return ProductWordModel(
        config=config,
        vocabulary=vocabulary,
        feature_index=feature_index,
        weights=W,
        bias=b,
    )


def top_word(product: Product, model: ProductWordModel | None = None) -> str:
    """Top-1 product word: stored gold word if present, else model prediction."""
    if product.product_words:
        return product.product_words[0][0]
    if model is None:
        raise WordModelError(f"product {product.id!r} has no product words and no model given")
    ranked = model.predict(product.title, product.attributes, top_k=1)
    if not ranked:
        raise WordModelError(f"no product word predicted for {product.id!r}")
    return ranked[0][0]
