"""Combination selection: attribute-pattern mining plus three generators.

Patterns are multisets of (cid, product word) slots mined from the curated
combination dataset and mapped per topic; generation samples patterns by
support and fills slots from the catalog. Random and cid-based selectors are
the comparison baselines.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .catalog import Catalog, Combination
from .words import ProductWordModel, top_word

PatternKey = tuple[tuple[str, str], ...]  # sorted (cid, word) slots


class SelectionError(ValueError):
    pass


@dataclass(frozen=True)
class AttributePattern:
    key: PatternKey
    support: int

    def __post_init__(self):
        if len(self.key) < 2:
            raise SelectionError("pattern key needs at least 2 slots")
        if self.support < 1:
            raise SelectionError("pattern support must be positive")


class PatternTable:
    """topic -> patterns sorted by support descending."""

    def __init__(self, by_topic: dict[str, list[AttributePattern]]):
        self._by_topic = {
            t: sorted(ps, key=lambda p: (-p.support, p.key))
            for t, ps in by_topic.items()
            if ps
        }

    @property
    def topics(self) -> list[str]:
        return sorted(self._by_topic)

    def patterns(self, topic: str) -> list[AttributePattern]:
        return list(self._by_topic.get(topic, []))

    def __eq__(self, other) -> bool:
        return isinstance(other, PatternTable) and self._by_topic == other._by_topic

    def save(self, path: str | Path) -> None:
        doc = {
            t: [{"key": [list(s) for s in p.key], "support": p.support} for p in ps]
            for t, ps in sorted(self._by_topic.items())
        }
        Path(path).write_text(json.dumps(doc, ensure_ascii=False, indent=2), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "PatternTable":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            {
                t: [
                    AttributePattern(
                        key=tuple(tuple(s) for s in p["key"]), support=int(p["support"])
                    )
                    for p in ps
                ]
                for t, ps in doc.items()
            }
        )


def combination_key(
    combo: Combination, catalog: Catalog, word_model: ProductWordModel | None = None
) -> PatternKey:
    """The (cid, top-1 product word) multiset signature of a combination."""
    slots = []
    for pid in combo.products:
        product = catalog[pid]
        slots.append((product.cid, top_word(product, word_model)))
    return tuple(sorted(slots))


def extract_patterns(
    dataset: list[Combination],
    catalog: Catalog,
    word_model: ProductWordModel | None = None,
    min_support: int = 2,
) -> PatternTable:
    """Count per-topic combination signatures and keep those with enough support."""
    counts: dict[str, Counter] = {}
    for combo in dataset:
        for pid in combo.products:
            if pid not in catalog:
                raise SelectionError(
                    f"combination {combo.products} references unknown product {pid!r}"
                )
        key = combination_key(combo, catalog, word_model)
        counts.setdefault(combo.topic, Counter())[key] += 1
    return PatternTable(
        {
            topic: [
                AttributePattern(key=key, support=n)
                for key, n in counter.items()
                if n >= min_support
            ]
            for topic, counter in counts.items()
        }
    )


def _topic_products(catalog: Catalog, topic: str):
    products = catalog.by_topic(topic)
    if not products:
        raise SelectionError(f"no products in topic {topic!r}")
    return products


def select_random(
    catalog: Catalog, topic: str, size: int = 2, n: int = 1, seed: int = 0
) -> list[Combination]:
    """Uniformly sampled distinct-product combinations within a topic."""
    products = _topic_products(catalog, topic)
    if len(products) < size:
        raise SelectionError(f"topic {topic!r} has {len(products)} products, need {size}")
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        picked = rng.sample(products, size)
        out.append(
            Combination(products=tuple(p.id for p in picked), topic=topic, provenance="random")
        )
    return out


def select_cid(
    catalog: Catalog, topic: str, size: int = 2, n: int = 1, seed: int = 0
) -> list[Combination]:
    """Combinations whose slots come from distinct detailed categories."""
    products = _topic_products(catalog, topic)
    by_cid: dict[str, list] = {}
    for p in products:
        by_cid.setdefault(p.cid, []).append(p)
    if len(by_cid) < size:
        raise SelectionError(
            f"topic {topic!r} has {len(by_cid)} distinct cids, need {size}"
        )
    rng = random.Random(seed)
    cids = sorted(by_cid)
    out = []
    for _ in range(n):
        chosen_cids = rng.sample(cids, size)
        picked = [rng.choice(by_cid[c]) for c in chosen_cids]
        out.append(
            Combination(
                products=tuple(p.id for p in picked), topic=topic, provenance="cid_based"
            )
        )
    return out


def select_pattern(
    catalog: Catalog,
    table: PatternTable,
    topic: str,
    n: int = 1,
    seed: int = 0,
    word_model: ProductWordModel | None = None,
) -> list[Combination]:
    """Sample patterns by support, then fill each slot from matching products."""
    patterns = table.patterns(topic)
    if not patterns:
        raise SelectionError(f"no patterns for topic {topic!r}")

    # pre-index catalog products by (cid, top word) within the topic
    slot_products: dict[tuple[str, str], list] = {}
    for p in catalog.by_topic(topic):
        try:
            w = top_word(p, word_model)
        except Exception:
            continue
        slot_products.setdefault((p.cid, w), []).append(p)

    satisfiable = [
        pat for pat in patterns if all(slot in slot_products for slot in pat.key)
    ]
    # patterns with repeated slots also need enough distinct products per slot
    satisfiable = [
        pat
        for pat in satisfiable
        if all(len(slot_products[s]) >= c for s, c in Counter(pat.key).items())
    ]
    if not satisfiable:
        raise SelectionError(f"no satisfiable pattern for topic {topic!r}")

    rng = random.Random(seed)
    weights = [p.support for p in satisfiable]
    out = []
    for _ in range(n):
        pat = rng.choices(satisfiable, weights=weights, k=1)[0]
        picked: list = []
        for slot, count in sorted(Counter(pat.key).items()):
            picked.extend(rng.sample(slot_products[slot], count))
        rng.shuffle(picked)
        out.append(
            Combination(
                products=tuple(p.id for p in picked),
                topic=topic,
                provenance="pattern",
                pattern=pat.key,
            )
        )
    return out
