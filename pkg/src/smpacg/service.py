"""JSON-over-HTTP API for the writing assistant UI and programmatic callers."""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .artifacts import artifact_checksum
from .catalog import CatalogError, Combination, CopywritingRecord
from .dsplm import DecodeConfig, generate_beam
from .dsplm.data import encode_prefix
from .enhancement import assess_record
from .pipeline import PipelineArtifacts, PipelineConfig, generate_for_combination
from .selection import SelectionError, select_pattern


class CombinationsRequest(BaseModel):
    topic: str
    n: int = Field(default=5, ge=0, le=100)
    seed: int = 0


class CopywritingRequest(BaseModel):
    product_ids: list[str] = Field(min_length=2)
    beam: int | None = Field(default=None, ge=1, le=10)
    seed: int = 0


class AssessRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    product_ids: list[str] = Field(min_length=2)
    text: str = Field(min_length=1, alias="copy")


def _verdict_body(verdict) -> dict:
    return {
        "forbidden": verdict.forbidden,
        "forbidden_reason": verdict.forbidden_reason,
        "coverage": verdict.coverage,
        "creative": verdict.creative,
        "approved": verdict.approved,
    }


def create_app(artifacts: PipelineArtifacts) -> FastAPI:
    app = FastAPI(title="smpacg", version=__version__)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def build_combination(product_ids: list[str]) -> Combination:
        if len(set(product_ids)) != len(product_ids):
            raise HTTPException(status_code=422, detail="duplicate product ids")
        for pid in product_ids:
            if pid not in artifacts.catalog:
                raise HTTPException(status_code=404, detail=f"unknown product id {pid!r}")
        topic = artifacts.catalog[product_ids[0]].topic or "unassigned"
        return Combination(products=tuple(product_ids), topic=topic, provenance="dataset")

    @app.get("/health")
    def health():
        sums = {}
        for name, p in artifacts.config.paths().items():
            try:
                if p.endswith(".npz"):
                    sums[name] = artifact_checksum(Path(p))
                else:
                    sums[name] = "loaded"
            except Exception:
                sums[name] = "loaded"
        return {"version": __version__, "artifacts": sums}

    @app.get("/topics")
    def topics():
        return {"topics": artifacts.table.topics}

    @app.post("/combinations")
    def combinations(req: CombinationsRequest):
        try:
            combos = select_pattern(
                artifacts.catalog,
                artifacts.table,
                req.topic,
                n=req.n,
                seed=req.seed,
                word_model=artifacts.word_model,
            )
        except SelectionError as e:
            raise HTTPException(status_code=404, detail=str(e)) from e
        body = []
        for c in combos:
            score = artifacts.strict.score(c, artifacts.catalog, artifacts.word_model)
            body.append(
                {
                    "products": [
                        {
                            "id": pid,
                            "title": artifacts.catalog[pid].title,
                            "cid": artifacts.catalog[pid].cid,
                        }
                        for pid in c.products
                    ],
                    "score": score,
                    "pattern": [list(s) for s in c.pattern or ()],
                }
            )
        return {"combinations": body}

    @app.post("/copywriting")
    def copywriting(req: CopywritingRequest):
        combo = build_combination(req.product_ids)
        score = artifacts.strict.score(combo, artifacts.catalog, artifacts.word_model)
        if req.beam is not None:
            prefix = encode_prefix(combo, artifacts.catalog, artifacts.vocab)
            cfg = DecodeConfig(
                beam_size=req.beam,
                max_new_tokens=artifacts.config.max_new_tokens,
                length_alpha=artifacts.config.length_alpha,
            )
            copy = generate_beam(artifacts.model, prefix, cfg, artifacts.vocab)
            record = CopywritingRecord(combination=combo, content=copy or "（空）")
            verdict, copy = assess_record(
                record,
                artifacts.lexicon,
                artifacts.catalog,
                artifacts.word_model,
                artifacts.enhancement_config,
            )
        else:
            copy, verdict = generate_for_combination(artifacts, combo, req.seed)
        return {
            "copy": copy,
            "approved": verdict.approved,
            "verdict": _verdict_body(verdict),
            "score": score,
        }

    @app.post("/assess")
    def assess(req: AssessRequest):
        combo = build_combination(req.product_ids)
        try:
            record = CopywritingRecord(combination=combo, content=req.text)
        except CatalogError as e:
            raise HTTPException(status_code=422, detail=str(e)) from e
        verdict, _ = assess_record(
            record,
            artifacts.lexicon,
            artifacts.catalog,
            artifacts.word_model,
            artifacts.enhancement_config,
        )
        return {"verdict": _verdict_body(verdict)}

    return app


def serve(config: PipelineConfig, host: str = "127.0.0.1", port: int = 8765) -> None:
    import uvicorn

    artifacts = PipelineArtifacts.load(config)
    uvicorn.run(create_app(artifacts), host=host, port=port)
