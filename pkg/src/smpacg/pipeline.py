"""End-to-end orchestration: select -> arbitrate -> generate -> enhance."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .arbitrator import ArbitratorError, ArbitratorModel, filter_combinations
from .catalog import Catalog, Combination, CopywritingRecord, load_catalog
from .dsplm import DecodeConfig, PrefixLM, Vocab, generate_beam, load_checkpoint
from .dsplm.data import encode_prefix
from .enhancement import (
    EnhancementConfig,
    ForbiddenLexicon,
    Verdict,
    assess_record,
)
from .selection import PatternTable, select_pattern
from .words import ProductWordModel


class PipelineError(RuntimeError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    catalog_path: str
    pattern_table_path: str
    lexicon_path: str
    word_model_path: str
    strict_arbitrator_path: str
    checkpoint_path: str
    threshold: float = 0.5
    beam_size: int = 3
    max_new_tokens: int = 96
    length_alpha: float = 0.7
    min_per_product: int = 1
    top_k_words: int = 3
    min_extra_tokens: int = 5
    regenerate_retries: int = 2
    seed: int = 0

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        cfg = cls(**doc)
        base = Path(path).parent
        missing = [
            p
            for p in cfg.paths().values()
            if not (Path(p).exists() or (base / p).exists())
        ]
        if missing:
            raise PipelineError(f"unresolvable artifact paths: {missing}")
        return cfg

    def paths(self) -> dict[str, str]:
        return {
            "catalog": self.catalog_path,
            "pattern_table": self.pattern_table_path,
            "lexicon": self.lexicon_path,
            "word_model": self.word_model_path,
            "strict_arbitrator": self.strict_arbitrator_path,
            "checkpoint": self.checkpoint_path,
        }


@dataclass
class PipelineArtifacts:
    config: PipelineConfig
    catalog: Catalog
    table: PatternTable
    lexicon: ForbiddenLexicon
    word_model: ProductWordModel
    strict: ArbitratorModel
    model: PrefixLM
    vocab: Vocab

    @classmethod
    def load(cls, config: PipelineConfig, base: str | Path = ".") -> "PipelineArtifacts":
        base = Path(base)

        def resolve(p: str) -> Path:
            path = Path(p)
            return path if path.exists() else base / p

        try:
            catalog = load_catalog(resolve(config.catalog_path))
            table = PatternTable.load(resolve(config.pattern_table_path))
            lexicon = ForbiddenLexicon.load(resolve(config.lexicon_path))
            word_model = ProductWordModel.load(resolve(config.word_model_path))
            strict = ArbitratorModel.load(resolve(config.strict_arbitrator_path))
            model, vocab = load_checkpoint(resolve(config.checkpoint_path))
        except Exception as e:
            raise PipelineError(f"artifact loading failed: {e}") from e
        if strict.variant != "strict":
            raise ArbitratorError("pipeline filter requires the strict arbitrator")
        return cls(config, catalog, table, lexicon, word_model, strict, model, vocab)

    @property
    def enhancement_config(self) -> EnhancementConfig:
        return EnhancementConfig(
            min_per_product=self.config.min_per_product,
            top_k=self.config.top_k_words,
            min_extra_tokens=self.config.min_extra_tokens,
        )

    @property
    def decode_config(self) -> DecodeConfig:
        return DecodeConfig(
            beam_size=self.config.beam_size,
            max_new_tokens=self.config.max_new_tokens,
            length_alpha=self.config.length_alpha,
        )


@dataclass
class PipelineResult:
    combination: Combination
    score: float
    copy: str
    verdict: Verdict
    approved: bool
    timings_ms: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "products": list(self.combination.products),
            "topic": self.combination.topic,
            "pattern": [list(s) for s in self.combination.pattern or ()],
            "score": self.score,
            "copy": self.copy,
            "approved": self.approved,
            "verdict": {
                "forbidden": self.verdict.forbidden,
                "coverage": self.verdict.coverage,
                "creative": self.verdict.creative,
            },
            "timings_ms": self.timings_ms,
        }


def _stage(name: str):
    class _Timer:
        def __init__(self):
            self.ms = 0.0

        def __enter__(self):
            self._t0 = time.perf_counter()
            return self

        def __exit__(self, exc_type, exc, tb):
            self.ms = (time.perf_counter() - self._t0) * 1000.0
            if exc is not None and not isinstance(exc, PipelineError):
                raise PipelineError(f"stage {name!r} failed: {exc}") from exc
            return False

    return _Timer()


def generate_for_combination(
    artifacts: PipelineArtifacts, combo: Combination, seed: int = 0
) -> tuple[str, Verdict]:
    """Beam-generate copy for one combination, retrying on failed verdicts."""
    retries = max(0, artifacts.config.regenerate_retries)
    best: tuple[str, Verdict] | None = None
    for attempt in range(retries + 1):
        prefix = encode_prefix(combo, artifacts.catalog, artifacts.vocab)
        # later attempts perturb beam size to explore alternative hypotheses
        cfg = artifacts.decode_config
        if attempt > 0:
            cfg = DecodeConfig(
                beam_size=cfg.beam_size + attempt,
                max_new_tokens=cfg.max_new_tokens,
                length_alpha=cfg.length_alpha,
            )
        copy = generate_beam(artifacts.model, prefix, cfg, artifacts.vocab)
        record = CopywritingRecord(combination=combo, content=copy or "（空）")
        verdict, text = assess_record(
            record,
            artifacts.lexicon,
            artifacts.catalog,
            artifacts.word_model,
            artifacts.enhancement_config,
        )
        if verdict.approved:
            return text, verdict
        if best is None:
            best = (text, verdict)
    assert best is not None
    return best


def run_pipeline(
    artifacts: PipelineArtifacts, topic: str, n: int, seed: int | None = None
) -> list[PipelineResult]:
    """Pattern-select n candidates, strict-filter, generate and assess copy."""
    if n == 0:
        return []
    seed = artifacts.config.seed if seed is None else seed
    results: list[PipelineResult] = []

    with _stage("select") as t_select:
        candidates = select_pattern(
            artifacts.catalog, artifacts.table, topic, n=n, seed=seed,
            word_model=artifacts.word_model,
        )
    with _stage("filter") as t_filter:
        survivors = filter_combinations(
            artifacts.strict,
            candidates,
            artifacts.catalog,
            threshold=artifacts.config.threshold,
            word_model=artifacts.word_model,
        )
    for combo in survivors:
        with _stage("score") as t_score:
            score = artifacts.strict.score(combo, artifacts.catalog, artifacts.word_model)
        with _stage("generate") as t_generate:
            copy, verdict = generate_for_combination(artifacts, combo, seed)
        results.append(
            PipelineResult(
                combination=combo,
                score=score,
                copy=copy,
                verdict=verdict,
                approved=verdict.approved,
                timings_ms={
                    "select": t_select.ms / max(len(candidates), 1),
                    "filter": t_filter.ms / max(len(candidates), 1),
                    "score": t_score.ms,
                    "generate": t_generate.ms,
                },
            )
        )
    return results
