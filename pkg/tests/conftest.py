import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from smpacg.synthetic import build_world
from smpacg.words import WordModelConfig, train_product_word_model


@pytest.fixture(scope="session")
def world():
    return build_world(seed=0, products_per_cid=6, n_combinations=60, n_domain_texts=40)


@pytest.fixture(scope="session")
def catalog(world):
    return world.catalog


@pytest.fixture(scope="session")
def word_model(world):
    labeled = [(p, [w for w, _ in p.product_words]) for p in world.products]
    return train_product_word_model(labeled, WordModelConfig(steps=150))


@pytest.fixture(scope="session")
def artifact_dir(tmp_path_factory, world, word_model):
    """Directory with every trained artifact plus a pipeline config file."""
    from smpacg.arbitrator import build_training_pairs, train_arbitrator
    from smpacg.catalog import save_catalog
    from smpacg.dsplm import (
        ModelConfig,
        PrefixLM,
        TrainConfig,
        build_vocab,
        encode_sample,
        finetune,
        save_checkpoint,
    )
    from smpacg.selection import extract_patterns

    base = tmp_path_factory.mktemp("artifacts")

    save_catalog(world.catalog, base / "catalog.jsonl")
    word_model.save(base / "words.npz")
    world.lexicon.save(base / "lexicon.tsv")

    table = extract_patterns(world.combinations, world.catalog, min_support=1)
    table.save(base / "patterns.json")

    pairs = build_training_pairs(world.combinations, world.catalog, "strict", 1.0, 0)
    strict = train_arbitrator(pairs, "strict")
    strict.save(base / "strict.npz")

    texts = [r.content for r in world.records]
    texts += [p.title for p in world.products]
    texts += world.catalog.topics()
    texts += [w for p in world.products for w, _ in p.product_words]
    vocab = build_vocab(texts + world.domain_corpus)
    model = PrefixLM(ModelConfig(vocab_size=len(vocab), n_layers=1, d_model=32,
                                 n_heads=2, d_ff=64, max_len=256))
    samples = [
        encode_sample(r.combination, world.catalog, r.content, vocab)
        for r in world.records[:20]
    ]
    model, _ = finetune(model, samples, TrainConfig(steps=40, batch_size=2))
    save_checkpoint(model, vocab, base / "model.npz")

    config = {
        "catalog_path": "catalog.jsonl",
        "pattern_table_path": "patterns.json",
        "lexicon_path": "lexicon.tsv",
        "word_model_path": "words.npz",
        "strict_arbitrator_path": "strict.npz",
        "checkpoint_path": "model.npz",
        "threshold": 0.5,
        "beam_size": 2,
        "max_new_tokens": 48,
        "regenerate_retries": 1,
    }
    (base / "pipeline.json").write_text(
        json.dumps(config, ensure_ascii=False, indent=2), encoding="utf-8"
    )
    return base


@pytest.fixture(scope="session")
def pipeline_artifacts(artifact_dir):
    from smpacg.pipeline import PipelineArtifacts, PipelineConfig

    config = PipelineConfig.load(artifact_dir / "pipeline.json")
    return PipelineArtifacts.load(config, base=artifact_dir)
