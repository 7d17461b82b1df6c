"""Product catalog: domain types, JSONL ingestion, and topic assignment."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable


class CatalogError(ValueError):
    """Raised for malformed or inconsistent catalog data."""


@dataclass(frozen=True)
class Product:
    id: str
    title: str
    attributes: dict[str, str] = field(default_factory=dict)
    cid: str = ""
    topic: str | None = None
    product_words: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        if not self.id:
            raise CatalogError("product id must be non-empty")
        if not self.title:
            raise CatalogError(f"product {self.id!r}: title must be non-empty")
        confs = [c for _, c in self.product_words]
        if any(not (0.0 <= c <= 1.0) for c in confs):
            raise CatalogError(f"product {self.id!r}: confidences must lie in [0,1]")
        if any(confs[i] < confs[i + 1] for i in range(len(confs) - 1)):
            raise CatalogError(
                f"product {self.id!r}: product_words must be sorted by confidence"
            )

    @property
    def top_word(self) -> str | None:
        return self.product_words[0][0] if self.product_words else None


@dataclass(frozen=True)
class TopicRule:
    topic: str
    match_terms: tuple[str, ...] = ()
    match_cids: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.match_terms and not self.match_cids:
            raise CatalogError(f"rule {self.topic!r}: needs match_terms or match_cids")


PROVENANCES = ("dataset", "random", "cid_based", "pattern")


@dataclass(frozen=True)
class Combination:
    products: tuple[str, ...]
    topic: str
    provenance: str = "dataset"
    pattern: tuple[tuple[str, str], ...] | None = None  # sorted (cid, word) slots

    def __post_init__(self):
        if len(self.products) < 2:
            raise CatalogError("combination needs at least 2 products")
        if len(set(self.products)) != len(self.products):
            raise CatalogError("combination products must be distinct")
        if self.provenance not in PROVENANCES:
            raise CatalogError(f"unknown provenance {self.provenance!r}")
        if self.provenance == "pattern" and self.pattern is None:
            raise CatalogError("pattern provenance requires a pattern key")


@dataclass(frozen=True)
class CopywritingRecord:
    combination: Combination
    content: str
    title: str = ""

    def __post_init__(self):
        if not self.content:
            raise CatalogError("copywriting content must be non-empty")


class Catalog:
    """Immutable indexed view over a list of products."""

    def __init__(self, products: Iterable[Product]):
        self._by_id: dict[str, Product] = {}
        for p in products:
            if p.id in self._by_id:
                raise CatalogError(f"duplicate product id {p.id!r}")
            self._by_id[p.id] = p

    def __len__(self) -> int:
        return len(self._by_id)

    def __iter__(self):
        return iter(self._by_id.values())

    def __contains__(self, pid: str) -> bool:
        return pid in self._by_id

    def __getitem__(self, pid: str) -> Product:
        try:
            return self._by_id[pid]
        except KeyError:
            raise CatalogError(f"unknown product id {pid!r}") from None

    def __eq__(self, other) -> bool:
        return isinstance(other, Catalog) and self._by_id == other._by_id

    @property
    def products(self) -> list[Product]:
        return list(self._by_id.values())

    def by_topic(self, topic: str) -> list[Product]:
        return [p for p in self if p.topic == topic]

    def topics(self) -> list[str]:
        seen: dict[str, None] = {}
        for p in self:
            if p.topic is not None:
                seen.setdefault(p.topic, None)
        return list(seen)


def product_from_dict(d: dict) -> Product:
    words = tuple((str(w), float(c)) for w, c in d.get("product_words", []))
    return Product(
        id=str(d.get("id", "")),
        title=str(d.get("title", "")),
        attributes={str(k): str(v) for k, v in d.get("attributes", {}).items()},
        cid=str(d.get("cid", "")),
        topic=d.get("topic"),
        product_words=words,
    )


def product_to_dict(p: Product) -> dict:
    d: dict = {
        "id": p.id,
        "title": p.title,
        "attributes": dict(p.attributes),
        "cid": p.cid,
        "product_words": [[w, c] for w, c in p.product_words],
    }
    if p.topic is not None:
        d["topic"] = p.topic
    return d


def load_catalog(path: str | Path) -> Catalog:
    """Load a JSONL catalog file, one product per line."""
    products = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                d = json.loads(line)
                products.append(product_from_dict(d))
            except (json.JSONDecodeError, CatalogError, TypeError, AttributeError) as e:
                raise CatalogError(f"{path}:{lineno}: {e}") from e
    return Catalog(products)


def save_catalog(catalog: Catalog, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in catalog:
            fh.write(json.dumps(product_to_dict(p), ensure_ascii=False) + "\n")


def load_topic_rules(path: str | Path) -> list[TopicRule]:
    """Load an ordered topic-rule list from a JSON config file."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    rules = [
        TopicRule(
            topic=str(r["topic"]),
            match_terms=tuple(r.get("match_terms", [])),
            match_cids=tuple(r.get("match_cids", [])),
        )
        for r in doc["rules"]
    ]
    if not rules:
        raise CatalogError("topic rule file contains no rules")
    return rules


UNASSIGNED = "unassigned"


def assign_topics(products: Iterable[Product], rules: list[TopicRule]) -> list[Product]:
    """Label each product with the first matching rule's topic.

    A rule matches when any of its match_terms occurs in the title or its
    match_cids contains the product's cid. Unmatched products get the
    "unassigned" topic.
    """
    if not rules:
        raise CatalogError("assign_topics requires at least one rule")
    out = []
    for p in products:
        topic = UNASSIGNED
        for rule in rules:
            if any(t in p.title for t in rule.match_terms) or p.cid in rule.match_cids:
                topic = rule.topic
                break
        out.append(dataclasses.replace(p, topic=topic))
    return out


def load_combinations(path: str | Path, catalog: Catalog | None = None) -> list[Combination]:
    """Load a JSONL combination dataset; optionally validate ids against a catalog."""
    combos = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                d = json.loads(line)
                pattern = d.get("pattern")
                combos.append(
                    Combination(
                        products=tuple(d["products"]),
                        topic=str(d.get("topic", UNASSIGNED)),
                        provenance=d.get("provenance", "dataset"),
                        pattern=tuple(tuple(s) for s in pattern) if pattern else None,
                    )
                )
            except (json.JSONDecodeError, CatalogError, KeyError) as e:
                raise CatalogError(f"{path}:{lineno}: {e}") from e
    if catalog is not None:
        for c in combos:
            for pid in c.products:
                if pid not in catalog:
                    raise CatalogError(f"combination references unknown product {pid!r}")
    return combos


def combination_to_dict(c: Combination) -> dict:
    d: dict = {"products": list(c.products), "topic": c.topic, "provenance": c.provenance}
    if c.pattern is not None:
        d["pattern"] = [list(s) for s in c.pattern]
    return d


def save_combinations(combos: Iterable[Combination], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for c in combos:
            fh.write(json.dumps(combination_to_dict(c), ensure_ascii=False) + "\n")


def load_records(path: str | Path) -> list[CopywritingRecord]:
    """Load copywriting records (combination + content + title) from JSONL."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                d = json.loads(line)
                combo = d["combination"]
                pattern = combo.get("pattern")
                records.append(
                    CopywritingRecord(
                        combination=Combination(
                            products=tuple(combo["products"]),
                            topic=str(combo.get("topic", UNASSIGNED)),
                            provenance=combo.get("provenance", "dataset"),
                            pattern=tuple(tuple(s) for s in pattern) if pattern else None,
                        ),
                        content=d["content"],
                        title=d.get("title", ""),
                    )
                )
            except (json.JSONDecodeError, CatalogError, KeyError) as e:
                raise CatalogError(f"{path}:{lineno}: {e}") from e
    return records


def record_to_dict(r: CopywritingRecord) -> dict:
    return {
        "combination": combination_to_dict(r.combination),
        "content": r.content,
        "title": r.title,
    }


def save_records(records: Iterable[CopywritingRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(record_to_dict(r), ensure_ascii=False) + "\n")
