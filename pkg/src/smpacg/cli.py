"""Command line interface for the full toolchain."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__
from .arbitrator import (
    ArbitratorConfig,
    ArbitratorModel,
    build_training_pairs,
    filter_combinations,
    train_arbitrator,
)
from .catalog import (
    Catalog,
    assign_topics,
    load_catalog,
    load_combinations,
    load_records,
    load_topic_rules,
    save_catalog,
    save_combinations,
    save_records,
)
from .dsplm import (
    DecodeConfig,
    ModelConfig,
    PrefixLM,
    TrainConfig,
    build_vocab,
    encode_sample,
    generate_beam,
    load_checkpoint,
    save_checkpoint,
)
from .dsplm import finetune as dsplm_finetune
from .dsplm import pretrain as dsplm_pretrain
from .dsplm.data import encode_prefix
from .enhancement import EnhancementConfig, ForbiddenLexicon, enhance_dataset
from .metrics import evaluate_suite, format_report
from .pipeline import PipelineArtifacts, PipelineConfig, run_pipeline
from .selection import (
    PatternTable,
    extract_patterns,
    select_cid,
    select_pattern,
    select_random,
)
from .synthetic import build_world, write_world
from .words import ProductWordModel, WordModelConfig, train_product_word_model


@click.group()
@click.version_option(__version__)
def main():
    """Scenario-based multi-product ad copywriting toolkit."""


def _fail(message: str):
    raise click.ClickException(message)


@main.command()
@click.option("--out", type=click.Path(), default="data", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--products-per-cid", type=int, default=40, show_default=True)
@click.option("--combinations", "n_combinations", type=int, default=300, show_default=True)
@click.option("--domain-texts", type=int, default=500, show_default=True)
def synth(out, seed, products_per_cid, n_combinations, domain_texts):
    """Generate the seeded synthetic corpus files."""
    world = build_world(seed, products_per_cid, n_combinations, domain_texts)
    paths = write_world(world, out)
    for name, p in paths.items():
        click.echo(f"{name}: {p}")


@main.command()
@click.argument("catalog_file", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), required=True)
def ingest(catalog_file, out):
    """Validate a catalog file and write the normalized form."""
    try:
        catalog = load_catalog(catalog_file)
    except Exception as e:
        _fail(str(e))
    save_catalog(catalog, out)
    click.echo(f"ingested {len(catalog)} products -> {out}")


@main.command("assign-topics")
@click.argument("catalog_file", type=click.Path(exists=True))
@click.argument("rules_file", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), required=True)
def assign_topics_cmd(catalog_file, rules_file, out):
    """Label products with topic channels from the ordered rule list."""
    try:
        catalog = load_catalog(catalog_file)
        rules = load_topic_rules(rules_file)
        labeled = assign_topics(catalog.products, rules)
    except Exception as e:
        _fail(str(e))
    save_catalog(Catalog(labeled), out)
    click.echo(f"labeled {len(labeled)} products -> {out}")


@main.command("train-words")
@click.argument("catalog_file", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), required=True)
@click.option("--steps", type=int, default=300, show_default=True)
def train_words(catalog_file, out, steps):
    """Train the product word model from gold-labeled catalog entries."""
    try:
        catalog = load_catalog(catalog_file)
        labeled = [
            (p, [w for w, _ in p.product_words]) for p in catalog if p.product_words
        ]
        model = train_product_word_model(labeled, WordModelConfig(steps=steps))
    except Exception as e:
        _fail(str(e))
    model.save(out)
    click.echo(f"trained word model over {len(model.vocabulary)} words -> {out}")


@main.command("extract-patterns")
@click.argument("combinations_file", type=click.Path(exists=True))
@click.argument("catalog_file", type=click.Path(exists=True))
@click.option("--word-model", type=click.Path(exists=True))
@click.option("--min-support", type=int, default=2, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def extract_patterns_cmd(combinations_file, catalog_file, word_model, min_support, out):
    """Mine the per-topic attribute pattern table from curated combinations."""
    try:
        catalog = load_catalog(catalog_file)
        dataset = load_combinations(combinations_file, catalog)
        wm = ProductWordModel.load(word_model) if word_model else None
        table = extract_patterns(dataset, catalog, wm, min_support)
    except Exception as e:
        _fail(str(e))
    table.save(out)
    n = sum(len(table.patterns(t)) for t in table.topics)
    click.echo(f"extracted {n} patterns over {len(table.topics)} topics -> {out}")


@main.command()
@click.argument("catalog_file", type=click.Path(exists=True))
@click.option("--method", type=click.Choice(["random", "cid", "pattern"]), required=True)
@click.option("--topic", required=True)
@click.option("--n", type=int, default=10, show_default=True)
@click.option("--size", type=int, default=2, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--pattern-table", type=click.Path(exists=True))
@click.option("--word-model", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), required=True)
def select(catalog_file, method, topic, n, size, seed, pattern_table, word_model, out):
    """Generate candidate combinations with one of the three selectors."""
    try:
        catalog = load_catalog(catalog_file)
        if method == "random":
            combos = select_random(catalog, topic, size, n, seed)
        elif method == "cid":
            combos = select_cid(catalog, topic, size, n, seed)
        else:
            if not pattern_table:
                _fail("--method pattern requires --pattern-table")
            wm = ProductWordModel.load(word_model) if word_model else None
            table = PatternTable.load(pattern_table)
            combos = select_pattern(catalog, table, topic, n, seed, wm)
    except click.ClickException:
        raise
    except Exception as e:
        _fail(str(e))
    save_combinations(combos, out)
    click.echo(f"selected {len(combos)} combinations -> {out}")


@main.command("train-arbitrator")
@click.argument("combinations_file", type=click.Path(exists=True))
@click.argument("catalog_file", type=click.Path(exists=True))
@click.option("--variant", type=click.Choice(["strict", "normal"]), required=True)
@click.option("--ratio", type=float, default=1.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--steps", type=int, default=400, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def train_arbitrator_cmd(combinations_file, catalog_file, variant, ratio, seed, steps, out):
    """Train the strict or normal combination arbitrator."""
    try:
        catalog = load_catalog(catalog_file)
        dataset = load_combinations(combinations_file, catalog)
        pairs = build_training_pairs(dataset, catalog, variant, ratio, seed)
        model = train_arbitrator(pairs, variant, ArbitratorConfig(steps=steps))
        accuracy = model.training_accuracy(pairs)
    except Exception as e:
        _fail(str(e))
    model.save(out)
    click.echo(f"trained {variant} arbitrator (training accuracy {accuracy:.3f}) -> {out}")


@main.command("filter")
@click.argument("combinations_file", type=click.Path(exists=True))
@click.argument("catalog_file", type=click.Path(exists=True))
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--threshold", type=float, default=None)
@click.option("--word-model", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), required=True)
def filter_cmd(combinations_file, catalog_file, model_path, threshold, word_model, out):
    """Keep combinations passing the strict arbitrator."""
    try:
        catalog = load_catalog(catalog_file)
        combos = load_combinations(combinations_file, catalog)
        model = ArbitratorModel.load(model_path)
        wm = ProductWordModel.load(word_model) if word_model else None
        kept = filter_combinations(model, combos, catalog, threshold, wm)
    except Exception as e:
        _fail(str(e))
    save_combinations(kept, out)
    click.echo(f"kept {len(kept)}/{len(combos)} combinations -> {out}")


@main.command()
@click.argument("corpus_file", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), required=True)
@click.option("--steps", type=int, default=200, show_default=True)
@click.option("--batch-size", type=int, default=4, show_default=True)
@click.option("--learning-rate", type=float, default=0.1, show_default=True)
@click.option("--layers", type=int, default=2, show_default=True)
@click.option("--width", type=int, default=64, show_default=True)
@click.option("--heads", type=int, default=4, show_default=True)
@click.option("--max-len", type=int, default=256, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--loss-figure", type=click.Path(), default=None)
def pretrain(corpus_file, out, steps, batch_size, learning_rate, layers, width, heads,
             max_len, seed, loss_figure):
    """Domain-specific pretraining on a line-per-text corpus."""
    try:
        corpus = [
            line.strip()
            for line in Path(corpus_file).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        vocab = build_vocab(corpus)
        model = PrefixLM(
            ModelConfig(
                vocab_size=len(vocab), n_layers=layers, d_model=width,
                n_heads=heads, d_ff=width * 2, max_len=max_len,
            ),
            seed=seed,
        )
        cfg = TrainConfig(
            learning_rate=learning_rate, batch_size=batch_size, steps=steps, seed=seed
        )
        model, losses = dsplm_pretrain(model, corpus, vocab, cfg)
    except Exception as e:
        _fail(str(e))
    save_checkpoint(model, vocab, out)
    if loss_figure:
        from .plotting import plot_loss_curve

        plot_loss_curve(losses, loss_figure, "pretraining loss")
    click.echo(f"pretrained {steps} steps (final loss {losses[-1]:.4f}) -> {out}")


@main.command()
@click.argument("records_file", type=click.Path(exists=True))
@click.argument("catalog_file", type=click.Path(exists=True))
@click.option("--checkpoint", type=click.Path(exists=True), help="start from this checkpoint")
@click.option("--out", type=click.Path(), required=True)
@click.option("--steps", type=int, default=200, show_default=True)
@click.option("--batch-size", type=int, default=4, show_default=True)
@click.option("--learning-rate", type=float, default=0.1, show_default=True)
@click.option("--layers", type=int, default=2, show_default=True)
@click.option("--width", type=int, default=64, show_default=True)
@click.option("--heads", type=int, default=4, show_default=True)
@click.option("--max-len", type=int, default=256, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--loss-figure", type=click.Path(), default=None)
def finetune(records_file, catalog_file, checkpoint, out, steps, batch_size,
             learning_rate, layers, width, heads, max_len, seed, loss_figure):
    """Fine-tune on combination copywriting records."""
    try:
        catalog = load_catalog(catalog_file)
        records = load_records(records_file)
        if checkpoint:
            model, vocab = load_checkpoint(checkpoint)
        else:
            texts = [r.content for r in records]
            texts += [p.title + (p.topic or "") for p in catalog]
            texts += ["".join(w for w, _ in p.product_words) for p in catalog]
            vocab = build_vocab(texts)
            model = PrefixLM(
                ModelConfig(
                    vocab_size=len(vocab), n_layers=layers, d_model=width,
                    n_heads=heads, d_ff=width * 2, max_len=max_len,
                ),
                seed=seed,
            )
        samples = []
        for r in records:
            try:
                samples.append(
                    encode_sample(r.combination, catalog, r.content, vocab, model.cfg.max_len)
                )
            except ValueError:
                continue
        cfg = TrainConfig(
            learning_rate=learning_rate, batch_size=batch_size, steps=steps, seed=seed
        )
        model, losses = dsplm_finetune(model, samples, cfg)
    except Exception as e:
        _fail(str(e))
    save_checkpoint(model, vocab, out)
    if loss_figure:
        from .plotting import plot_loss_curve

        plot_loss_curve(losses, loss_figure, "finetuning loss")
    click.echo(f"finetuned {steps} steps (final loss {losses[-1]:.4f}) -> {out}")


@main.command()
@click.argument("combinations_file", type=click.Path(exists=True))
@click.argument("catalog_file", type=click.Path(exists=True))
@click.option("--checkpoint", type=click.Path(exists=True), required=True)
@click.option("--beam", type=int, default=3, show_default=True)
@click.option("--max-new-tokens", type=int, default=96, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def generate(combinations_file, catalog_file, checkpoint, beam, max_new_tokens, out):
    """Beam-search copy generation for each combination."""
    try:
        catalog = load_catalog(catalog_file)
        combos = load_combinations(combinations_file, catalog)
        model, vocab = load_checkpoint(checkpoint)
        cfg = DecodeConfig(beam_size=beam, max_new_tokens=max_new_tokens)
        rows = []
        for combo in combos:
            prefix = encode_prefix(combo, catalog, vocab)
            copy = generate_beam(model, prefix, cfg, vocab)
            rows.append({"products": list(combo.products), "copy": copy})
    except Exception as e:
        _fail(str(e))
    with open(out, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    click.echo(f"generated {len(rows)} copies -> {out}")


@main.command()
@click.argument("records_file", type=click.Path(exists=True))
@click.argument("catalog_file", type=click.Path(exists=True))
@click.option("--lexicon", type=click.Path(exists=True), required=True)
@click.option("--word-model", type=click.Path(exists=True))
@click.option("--min-per-product", type=int, default=1, show_default=True)
@click.option("--min-extra-tokens", type=int, default=5, show_default=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--report", type=click.Path(), default=None)
@click.option("--figure", type=click.Path(), default=None)
def enhance(records_file, catalog_file, lexicon, word_model, min_per_product,
            min_extra_tokens, out, report, figure):
    """Run the three quality checks over a copywriting dataset."""
    try:
        catalog = load_catalog(catalog_file)
        records = load_records(records_file)
        lex = ForbiddenLexicon.load(lexicon)
        wm = ProductWordModel.load(word_model) if word_model else None
        cfg = EnhancementConfig(
            min_per_product=min_per_product, min_extra_tokens=min_extra_tokens
        )
        cleaned, rep = enhance_dataset(records, lex, catalog, wm, cfg)
    except Exception as e:
        _fail(str(e))
    save_records(cleaned, out)
    if report:
        rep.save(report)
    if figure:
        from .plotting import plot_approval_breakdown

        plot_approval_breakdown(rep, figure)
    click.echo(
        f"approved {rep.approved_count}/{rep.total} "
        f"(approval rate {rep.approval_rate:.2%}) -> {out}"
    )


@main.command()
@click.argument("candidates_file", type=click.Path(exists=True))
@click.argument("references_file", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None, help="write the delimited report here")
@click.option("--delimiter", default="\t", show_default=False)
@click.option("--figure", type=click.Path(), default=None)
def evaluate(candidates_file, references_file, out, delimiter, figure):
    """Corpus metric report over two line-aligned text files."""
    try:
        cands = Path(candidates_file).read_text(encoding="utf-8").splitlines()
        refs = Path(references_file).read_text(encoding="utf-8").splitlines()
        report = evaluate_suite(cands, refs)
    except Exception as e:
        _fail(str(e))
    text = format_report(report, delimiter)
    click.echo(text, nl=False)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    if figure:
        from .plotting import plot_metric_report

        plot_metric_report(report, figure)


@main.command()
@click.argument("config_file", type=click.Path(exists=True))
@click.option("--topic", required=True)
@click.option("--n", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), required=True)
def pipeline(config_file, topic, n, seed, out):
    """Full select -> arbitrate -> generate -> enhance run."""
    try:
        cfg = PipelineConfig.load(config_file)
        artifacts = PipelineArtifacts.load(cfg, base=Path(config_file).parent)
        results = run_pipeline(artifacts, topic, n, seed)
    except Exception as e:
        _fail(str(e))
    with open(out, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(json.dumps(r.to_dict(), ensure_ascii=False) + "\n")
    approved = sum(1 for r in results if r.approved)
    click.echo(f"pipeline produced {len(results)} results ({approved} approved) -> {out}")


@main.command()
@click.argument("config_file", type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
def serve(config_file, host, port):
    """Run the HTTP API over loaded artifacts."""
    from .service import serve as run_service

    try:
        cfg = PipelineConfig.load(config_file)
    except Exception as e:
        _fail(str(e))
    run_service(cfg, host, port)


if __name__ == "__main__":
    sys.exit(main())
