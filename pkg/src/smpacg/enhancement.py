"""Knowledge-based copy quality enhancement.

Three rule-based checks gate every copywriting record: forbidden-pattern
filtering (drop or rewrite), product word coverage, and creative-information
content. Records pass only when all three hold; the aggregate approval rate
is reported alongside per-record verdicts.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .catalog import Catalog, CopywritingRecord
from .textutil import normalize, tokenize
from .words import ProductWordModel


class EnhancementError(ValueError):
    pass


# a single '*' in a pattern matches a short bounded gap (1-10 non-space chars)
_GAP = r"[^\s]{1,10}?"


@dataclass(frozen=True)
class LexiconEntry:
    pattern: str
    alterable: bool
    replacement: str | None = None

    def __post_init__(self):
        if self.alterable and self.replacement is None:
            raise EnhancementError(f"alterable entry {self.pattern!r} needs a replacement")
        if not self.alterable and self.replacement is not None:
            raise EnhancementError(f"non-alterable entry {self.pattern!r} cannot replace")
        if self.pattern.count("*") > 1:
            raise EnhancementError(f"entry {self.pattern!r}: at most one wildcard gap")

    def regex(self) -> re.Pattern:
        parts = [re.escape(p) for p in self.pattern.split("*")]
        return re.compile(_GAP.join(parts))


@dataclass(frozen=True)
class ForbiddenLexicon:
    entries: tuple[LexiconEntry, ...]

    @classmethod
    def load(cls, path: str | Path) -> "ForbiddenLexicon":
        """Read one entry per line: pattern TAB alterable(0/1) [TAB replacement]."""
        entries = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                fields = line.split("\t")
                if len(fields) < 2:
                    raise EnhancementError(f"{path}:{lineno}: expected pattern<TAB>flag")
                pattern, flag = fields[0], fields[1]
                alterable = flag in ("1", "true", "alterable")
                replacement = fields[2] if len(fields) > 2 and alterable else None
                entries.append(LexiconEntry(pattern, alterable, replacement))
        return cls(tuple(entries))

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for e in self.entries:
                row = [e.pattern, "1" if e.alterable else "0"]
                if e.replacement is not None:
                    row.append(e.replacement)
                fh.write("\t".join(row) + "\n")


@dataclass(frozen=True)
class FilterResult:
    kept: bool
    text: str = ""
    reason: str = ""
    altered: bool = False


def filter_forbidden(text: str, lexicon: ForbiddenLexicon) -> FilterResult:
    """Drop on any non-alterable match; otherwise rewrite alterable matches."""
    for entry in lexicon.entries:
        if not entry.alterable and entry.regex().search(text):
            return FilterResult(kept=False, reason=entry.pattern)
    altered = False
    # longest pattern first so overlapping alterable entries resolve stably
    for entry in sorted(
        (e for e in lexicon.entries if e.alterable), key=lambda e: -len(e.pattern)
    ):
        new = entry.regex().sub(entry.replacement, text)
        if new != text:
            altered = True
            text = new
    return FilterResult(kept=True, text=text, altered=altered)


def check_coverage(
    copy: str,
    combo,
    catalog: Catalog,
    word_model: ProductWordModel | None = None,
    min_per_product: int = 1,
    top_k: int = 3,
) -> bool:
    """True iff every product has enough of its top product words in the copy."""
    haystack = normalize(copy).replace(" ", "")
    for pid in combo.products:
        product = catalog[pid]
        if product.product_words:
            words = [w for w, _ in product.product_words[:top_k]]
        elif word_model is not None:
            words = [w for w, _ in word_model.predict(product.title, product.attributes, top_k)]
        else:
            raise EnhancementError(f"product {pid!r} has no product words and no model given")
        hits = sum(1 for w in words if normalize(w).replace(" ", "") in haystack)
        if hits < min_per_product:
            return False
    return True


def check_creative(
    copy: str,
    combo,
    catalog: Catalog,
    min_extra_tokens: int = 5,
) -> bool:
    """True iff enough copy tokens go beyond the product titles and attributes.

    Digit tokens never count as creative content (prices, sizes, promotions).
    """
    source = []
    for pid in combo.products:
        product = catalog[pid]
        source.append(normalize(product.title).replace(" ", ""))
        source.extend(normalize(v).replace(" ", "") for v in product.attributes.values())
    source_blob = " ".join(source)

    extra = 0
    for tok in tokenize(normalize(copy)):
        if tok.isdigit():
            continue
        if tok not in source_blob:
            extra += 1
    return extra >= min_extra_tokens


@dataclass(frozen=True)
class Verdict:
    record_index: int
    forbidden: str  # clean | altered | dropped
    forbidden_reason: str = ""
    coverage: bool = False
    creative: bool = False

    @property
    def approved(self) -> bool:
        return self.forbidden != "dropped" and self.coverage and self.creative


@dataclass(frozen=True)
class EnhancementConfig:
    min_per_product: int = 1
    top_k: int = 3
    min_extra_tokens: int = 5


@dataclass
class EnhancementReport:
    verdicts: list[Verdict] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.verdicts)

    @property
    def approved_count(self) -> int:
        return sum(1 for v in self.verdicts if v.approved)

    @property
    def approval_rate(self) -> float:
        return self.approved_count / self.total if self.total else 0.0

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "approved": self.approved_count,
            "approval_rate": self.approval_rate,
            "verdicts": [
                {
                    "record": v.record_index,
                    "forbidden": v.forbidden,
                    "forbidden_reason": v.forbidden_reason,
                    "coverage": v.coverage,
                    "creative": v.creative,
                    "approved": v.approved,
                }
                for v in self.verdicts
            ],
        }

    def save(self, path: str | Path) -> None:
        doc = self.to_dict()
        with open(path, "w", encoding="utf-8") as fh:
            for v in doc["verdicts"]:
                fh.write(json.dumps(v, ensure_ascii=False) + "\n")
            summary = {k: doc[k] for k in ("total", "approved", "approval_rate")}
            fh.write(json.dumps({"summary": summary}, ensure_ascii=False) + "\n")


def assess_record(
    record: CopywritingRecord,
    lexicon: ForbiddenLexicon,
    catalog: Catalog,
    word_model: ProductWordModel | None = None,
    config: EnhancementConfig | None = None,
    index: int = 0,
) -> tuple[Verdict, str]:
    """Run all three checks on one record; returns (verdict, possibly-rewritten copy)."""
    config = config or EnhancementConfig()
    result = filter_forbidden(record.content, lexicon)
    if not result.kept:
        return (
            Verdict(index, forbidden="dropped", forbidden_reason=result.reason),
            record.content,
        )
    text = result.text
    coverage = check_coverage(
        text,
        record.combination,
        catalog,
        word_model,
        min_per_product=config.min_per_product,
        top_k=config.top_k,
    )
    creative = check_creative(
        text, record.combination, catalog, min_extra_tokens=config.min_extra_tokens
    )
    return (
        Verdict(
            index,
            forbidden="altered" if result.altered else "clean",
            coverage=coverage,
            creative=creative,
        ),
        text,
    )


def enhance_dataset(
    records: list[CopywritingRecord],
    lexicon: ForbiddenLexicon,
    catalog: Catalog,
    word_model: ProductWordModel | None = None,
    config: EnhancementConfig | None = None,
) -> tuple[list[CopywritingRecord], EnhancementReport]:
    """Clean the dataset: keep records passing all checks, rewritten as needed."""
    config = config or EnhancementConfig()
    cleaned = []
    report = EnhancementReport()
    for i, record in enumerate(records):
        verdict, text = assess_record(record, lexicon, catalog, word_model, config, index=i)
        report.verdicts.append(verdict)
        if verdict.approved:
            cleaned.append(
                CopywritingRecord(
                    combination=record.combination, content=text, title=record.title
                )
            )
    return cleaned, report
