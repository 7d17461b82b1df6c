"""Acceptance gate: one test per headline claim, one printed verdict line each.

These tests are slower than the unit suites because several of them train
models end to end. Each prints `[ACCEPTANCE] <name>: PASS/FAIL` so the gate
can be read off the pytest output directly.
"""

import itertools
import json
import random
import time

import pytest
import torch
from click.testing import CliRunner

from smpacg.arbitrator import build_training_pairs, selection_accuracy, train_arbitrator
from smpacg.cli import main as cli_main
from smpacg.dsplm import (
    EOS,
    DecodeConfig,
    ModelConfig,
    PrefixLM,
    PrefixSample,
    TrainConfig,
    attention_mask,
    batch_loss,
    build_vocab,
    encode_sample,
    finetune,
    generate_beam,
    generate_greedy,
    perplexity,
    pretrain,
)
from smpacg.enhancement import check_coverage, enhance_dataset, filter_forbidden
from smpacg.metrics import (
    EvalPair,
    bleu_n,
    evaluate_suite,
    meteor_simplified,
    rouge_l,
    rouge_n,
    sacrebleu_like,
)
from smpacg.selection import extract_patterns, select_cid, select_pattern, select_random
from smpacg.synthetic import build_world
from smpacg.words import WordModelConfig, train_product_word_model

from test_enhancement import (
    KITCHEN_COMBO,
    KITCHEN_GENERATED,
    KITCHEN_ORIGINAL,
    SOFA_COMBO,
    SOFA_GENERATED,
    SOFA_ORIGINAL,
    SOFA_TABLE_CATALOG,
)
from test_metrics import (
    oracle_bleu,
    oracle_meteor,
    oracle_rouge_l,
    oracle_rouge_n,
    random_pairs,
)


_capman = None


@pytest.fixture(autouse=True)
def _grab_capture_manager(request):
    global _capman
    _capman = request.config.pluginmanager.getplugin("capturemanager")


def verdict(name: str, ok: bool, elapsed: float, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    suffix = f" [{detail}]" if detail else ""
    line = f"[ACCEPTANCE] {name}: {status} ({elapsed:.1f}s){suffix}"
    if _capman is not None:
        # suspend capture so the verdict line shows in plain pytest output
        with _capman.global_and_fixture_disabled():
            print(flush=True)
            print(line, flush=True)
    else:
        print(line, flush=True)
    assert ok, f"{name} failed{suffix}"


@pytest.fixture(scope="module")
def full_world():
    return build_world(seed=0)


@pytest.fixture(scope="module")
def full_word_model(full_world):
    labeled = [(p, [w for w, _ in p.product_words]) for p in full_world.products]
    return train_product_word_model(labeled, WordModelConfig(steps=200))


def test_mask_law():
    t0 = time.time()
    rng = random.Random(0)
    ok = True
    for _ in range(200):
        n = rng.randint(1, 64)
        p = rng.randint(1, n)
        mask = attention_mask(p, n)
        idx = torch.arange(n)
        want = (idx.unsqueeze(0) < p) | (idx.unsqueeze(0) <= idx.unsqueeze(1))
        if not torch.equal(mask, want):
            ok = False
            break
    elapsed = time.time() - t0
    verdict("mask law (200 random shapes)", ok and elapsed < 1.0, elapsed)


def test_gradient_check():
    t0 = time.time()
    model = PrefixLM(
        ModelConfig(vocab_size=8, n_layers=1, d_model=8, n_heads=2, d_ff=8, max_len=12)
    )
    model.double()
    sample = PrefixSample(prefix=(1, 5, 6, 3), target=(7, 5, 2))
    config = TrainConfig(seed=0)
    loss = batch_loss(model, [sample], config, "finetune")
    loss.backward()
    grads = {n: p.grad.clone() for n, p in model.named_parameters()}
    eps = 1e-4
    worst = 0.0
    with torch.no_grad():
        for name, p in model.named_parameters():
            flat, grad = p.view(-1), grads[name].view(-1)
            for idx in range(flat.shape[0]):
                orig = flat[idx].item()
                flat[idx] = orig + eps
                hi = batch_loss(model, [sample], config, "finetune").item()
                flat[idx] = orig - eps
                lo = batch_loss(model, [sample], config, "finetune").item()
                flat[idx] = orig
                fd = (hi - lo) / (2 * eps)
                denom = max(abs(fd), abs(grad[idx].item()), 1e-8)
                worst = max(worst, abs(fd - grad[idx].item()) / denom)
    elapsed = time.time() - t0
    verdict(
        "gradient check (all parameters, rel err < 1e-4)",
        worst < 1e-4 and elapsed < 30.0,
        elapsed,
        f"worst rel err {worst:.2e}",
    )


def test_overfit_oracle():
    t0 = time.time()
    sample = PrefixSample(prefix=(1, 5, 6, 7, 3), target=(8, 9, 10, 5, 2))
    model = PrefixLM(
        ModelConfig(vocab_size=16, n_layers=2, d_model=32, n_heads=2, d_ff=64, max_len=32)
    )
    config = TrainConfig(learning_rate=0.5, batch_size=1, steps=400)
    model, losses = finetune(model, [sample], config)
    out = generate_beam(model, list(sample.prefix), DecodeConfig(beam_size=3))
    elapsed = time.time() - t0
    ok = losses[-1] < 0.05 and out == list(sample.target[:-1]) and elapsed < 60.0
    verdict(
        "overfit oracle (loss < 0.05, beam-3 reproduces target)",
        ok,
        elapsed,
        f"final loss {losses[-1]:.4f}",
    )


def _exhaustive_best(model, prefix, budget, alpha, vocab_size):
    p = len(prefix)

    def score(gen):
        total = 0.0
        for t, tok in enumerate(gen):
            logits = model.logits(prefix + list(gen[:t]), p).detach()
            total += float(torch.log_softmax(logits[-1], dim=-1)[tok])
        return total / max(len(gen), 1) ** alpha

    terminals = []
    for length in range(1, budget + 1):
        for gen in itertools.product(range(vocab_size), repeat=length):
            if any(t == EOS for t in gen[:-1]):
                continue
            if gen[-1] == EOS or length == budget:
                terminals.append(gen)
    best = list(max(terminals, key=score))
    return best[:-1] if best and best[-1] == EOS else best


def test_beam_consistency():
    t0 = time.time()
    rng = random.Random(0)
    model = PrefixLM(
        ModelConfig(vocab_size=16, n_layers=1, d_model=16, n_heads=2, d_ff=16, max_len=32)
    )
    cfg1 = DecodeConfig(beam_size=1, max_new_tokens=6)
    greedy_ok = all(
        generate_beam(model, prefix, cfg1) == generate_greedy(model, prefix, cfg1)
        for prefix in (
            [1] + [rng.randint(5, 15) for _ in range(rng.randint(1, 8))]
            for _ in range(100)
        )
    )

    exhaustive_ok = True
    for seed in range(3):
        toy = PrefixLM(
            ModelConfig(vocab_size=3, n_layers=1, d_model=8, n_heads=2, d_ff=8, max_len=16),
            seed=seed,
        )
        toy, _ = finetune(
            toy,
            [PrefixSample(prefix=(1, 0), target=(0, 0, 0, 2))],
            TrainConfig(learning_rate=0.5, batch_size=1, steps=60, seed=seed),
        )
        cfg = DecodeConfig(beam_size=3, max_new_tokens=4)
        got = generate_beam(toy, [1, 0], cfg)
        want = _exhaustive_best(toy, [1, 0], 4, cfg.length_alpha, 3)
        if got != want:
            exhaustive_ok = False
    elapsed = time.time() - t0
    verdict(
        "beam consistency (beam-1 == greedy x100; beam-3 == exhaustive toy)",
        greedy_ok and exhaustive_ok and elapsed < 30.0,
        elapsed,
    )


def test_dsplm_direction(full_world):
    t0 = time.time()
    world = full_world
    texts = [r.content for r in world.records]
    texts += [p.title for p in world.products]
    texts += world.catalog.topics()
    texts += [w for p in world.products for w, _ in p.product_words]
    vocab = build_vocab(texts + world.domain_corpus)
    samples = [
        encode_sample(r.combination, world.catalog, r.content, vocab)
        for r in world.records
    ]
    train, held = samples[:12], samples[260:]

    wins = 0
    details = []
    for seed in range(5):
        cfg = ModelConfig(vocab_size=len(vocab))
        # pretraining on domain text, then the shared fine-tuning budget
        pretrained = PrefixLM(cfg, seed=seed)
        pretrained, _ = pretrain(
            pretrained, world.domain_corpus, vocab, TrainConfig(steps=400, seed=seed)
        )
        pretrained, _ = finetune(pretrained, train, TrainConfig(steps=150, seed=seed))
        ppl_pre = perplexity(pretrained, held)
        # from scratch with the identical total optimization budget (550 steps)
        scratch = PrefixLM(cfg, seed=seed)
        scratch, _ = finetune(scratch, train, TrainConfig(steps=550, seed=seed))
        ppl_scratch = perplexity(scratch, held)
        if ppl_pre < ppl_scratch:
            wins += 1
        details.append(f"s{seed}:{ppl_pre:.2f}<{ppl_scratch:.2f}")
    elapsed = time.time() - t0
    verdict(
        "pretraining direction (lower held-out ppl in >=4/5 seeds)",
        wins >= 4 and elapsed < 900.0,
        elapsed,
        " ".join(details),
    )


def test_selection_direction(full_world, full_word_model):
    t0 = time.time()
    world, wm = full_world, full_word_model
    catalog = world.catalog
    table = extract_patterns(world.combinations, catalog, wm, min_support=1)
    topics = catalog.topics()
    per_topic = 100  # x5 topics = 500 candidates per method

    models = {}
    for variant in ("strict", "normal"):
        pairs = build_training_pairs(world.combinations, catalog, variant, 1.0, 0, wm)
        models[variant] = train_arbitrator(pairs, variant)

    pattern_wins = 0
    cid_wins = 0
    for seed in range(5):
        acc = {}
        for method, select in (
            ("random", lambda t: select_random(catalog, t, 2, per_topic, seed)),
            ("cid", lambda t: select_cid(catalog, t, 2, per_topic, seed)),
            ("pattern", lambda t: select_pattern(catalog, table, t, per_topic, seed, wm)),
        ):
            combos = [c for t in topics for c in select(t)]
            for variant in ("strict", "normal"):
                acc[(method, variant)] = selection_accuracy(
                    models[variant], combos, catalog, wm
                )
        if all(
            acc[("pattern", v)] > acc[("cid", v)]
            and acc[("pattern", v)] > acc[("random", v)]
            for v in ("strict", "normal")
        ):
            pattern_wins += 1
        if acc[("cid", "normal")] >= acc[("random", "normal")]:
            cid_wins += 1
    elapsed = time.time() - t0
    verdict(
        "selection direction (pattern > cid,random both variants; cid >= random normal)",
        pattern_wins >= 4 and cid_wins >= 3 and elapsed < 300.0,
        elapsed,
        f"pattern wins {pattern_wins}/5, cid wins {cid_wins}/5",
    )


def test_metric_oracles():
    t0 = time.time()
    rng = random.Random(0)
    pairs = random_pairs(rng, 50, n_refs=2, max_len=12)
    ok = True
    for n in (1, 2, 3, 4):
        ok &= bleu_n(pairs, n) == pytest.approx(oracle_bleu(pairs, n), abs=1e-9)
    ok &= sacrebleu_like(pairs) == pytest.approx(
        oracle_bleu(pairs, 4, smooth=True), abs=1e-9
    )
    ok &= rouge_n(pairs, 1) == pytest.approx(oracle_rouge_n(pairs, 1), abs=1e-9)
    ok &= rouge_n(pairs, 2) == pytest.approx(oracle_rouge_n(pairs, 2), abs=1e-9)
    ok &= rouge_l(pairs) == pytest.approx(oracle_rouge_l(pairs), abs=1e-9)
    ok &= meteor_simplified(pairs) == pytest.approx(oracle_meteor(pairs), abs=1e-9)

    # the two showcase copy pairs must evaluate cleanly end to end
    report = evaluate_suite(
        [SOFA_GENERATED, KITCHEN_GENERATED], [SOFA_ORIGINAL, KITCHEN_ORIGINAL]
    )
    ok &= all(0.0 <= v <= 100.0 for v in report.values())
    elapsed = time.time() - t0
    verdict(
        "metric oracles (50 random pairs within 1e-9; showcase texts evaluate)",
        ok and elapsed < 10.0,
        elapsed,
    )


def test_enhancement_exactness(full_world, full_word_model):
    t0 = time.time()
    from smpacg.catalog import CopywritingRecord

    good = [
        CopywritingRecord(
            combination=SOFA_COMBO,
            content=f"暖居时光第{i}章，把沙发摆进客厅，配上茶几，闲坐品茗享受静谧午后。",
        )
        for i in range(20)
    ]
    bad_templates = [
        CopywritingRecord(combination=SOFA_COMBO, content="再加59元享玻璃茶几。"),
        CopywritingRecord(combination=SOFA_COMBO, content=SOFA_ORIGINAL),
        CopywritingRecord(combination=SOFA_COMBO, content="简约皮艺沙发简约玻璃茶几"),
        CopywritingRecord(combination=KITCHEN_COMBO, content=KITCHEN_ORIGINAL),
    ]
    records = good + [bad_templates[i % 4] for i in range(80)]
    _, report = enhance_dataset(records, full_world.lexicon, SOFA_TABLE_CATALOG)
    exact_ok = report.total == 100 and report.approval_rate == 0.20

    # idempotence over 200 randomly drawn synthetic records
    rng = random.Random(1)
    sample = [rng.choice(full_world.records) for _ in range(200)]
    cleaned, _ = enhance_dataset(
        sample, full_world.lexicon, full_world.catalog, full_word_model
    )
    again, rerun = enhance_dataset(
        cleaned, full_world.lexicon, full_world.catalog, full_word_model
    )
    idempotent_ok = again == cleaned and rerun.approval_rate in (1.0, 0.0)

    # showcase originals rejected for the right reasons, replacements kept
    sofa_reject = not check_coverage(SOFA_ORIGINAL, SOFA_COMBO, SOFA_TABLE_CATALOG)
    kitchen_reject = not filter_forbidden(KITCHEN_ORIGINAL, full_world.lexicon).kept
    generated_kept = (
        filter_forbidden(SOFA_GENERATED, full_world.lexicon).kept
        and filter_forbidden(KITCHEN_GENERATED, full_world.lexicon).kept
    )
    elapsed = time.time() - t0
    verdict(
        "enhancement exactness (20% exact; idempotent; showcase verdicts)",
        exact_ok and idempotent_ok and sofa_reject and kitchen_reject and generated_kept
        and elapsed < 10.0,
        elapsed,
    )


def test_end_to_end_smoke(tmp_path):
    t0 = time.time()
    from smpacg.synthetic import write_world

    world = build_world(seed=3, products_per_cid=8, n_combinations=120, n_domain_texts=100)
    data = tmp_path / "data"
    write_world(world, data)
    d = tmp_path
    runner = CliRunner()

    def run(args):
        result = runner.invoke(cli_main, args, catch_exceptions=False)
        assert result.exit_code == 0, result.output
        return result

    run(["ingest", str(data / "catalog.jsonl"), "--out", str(d / "catalog.jsonl")])
    run(["train-words", str(d / "catalog.jsonl"), "--out", str(d / "words.npz"),
         "--steps", "200"])
    run(["extract-patterns", str(data / "combinations.jsonl"), str(d / "catalog.jsonl"),
         "--word-model", str(d / "words.npz"), "--min-support", "1",
         "--out", str(d / "patterns.json")])
    for variant in ("strict", "normal"):
        run(["train-arbitrator", str(data / "combinations.jsonl"),
             str(d / "catalog.jsonl"), "--variant", variant,
             "--out", str(d / f"{variant}.npz")])
    run(["pretrain", str(data / "domain_corpus.txt"), "--out", str(d / "pretrained.npz"),
         "--steps", "200", "--seed", "3"])
    run(["finetune", str(data / "records.jsonl"), str(d / "catalog.jsonl"),
         "--checkpoint", str(d / "pretrained.npz"), "--out", str(d / "model.npz"),
         "--steps", "1500", "--seed", "3"])

    config = {
        "catalog_path": "catalog.jsonl",
        "pattern_table_path": "patterns.json",
        "lexicon_path": str(data / "lexicon.tsv"),
        "word_model_path": "words.npz",
        "strict_arbitrator_path": "strict.npz",
        "checkpoint_path": "model.npz",
    }
    (d / "pipeline.json").write_text(json.dumps(config), encoding="utf-8")
    run(["pipeline", str(d / "pipeline.json"), "--topic", "客厅", "--n", "5",
         "--seed", "3", "--out", str(d / "out.jsonl")])
    rows = [
        json.loads(line)
        for line in (d / "out.jsonl").read_text(encoding="utf-8").splitlines()
    ]
    approved = sum(1 for r in rows if r["approved"])
    elapsed = time.time() - t0
    verdict(
        "end-to-end smoke (CLI chain exits 0, >=1 approved result)",
        approved >= 1 and elapsed < 1200.0,
        elapsed,
        f"{approved}/{len(rows)} approved",
    )
