"""Single command-line entry point for the whole pipeline."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from modnorm.config import PipelineConfig, write_manifest


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _load_corpus(corpus_dir: str):
    """Load a corpus directory (dump/rules/archive) into a built dataset."""
    from modnorm.corpus import FileArchiveClient, build_dataset, load_rules, parse_dump_file

    base = Path(corpus_dir)
    dump = base / "dump.jsonl"
    rules_path = base / "rules.jsonl"
    archive_path = base / "archive.jsonl"
    if not dump.exists() or not rules_path.exists():
        _fail(f"{corpus_dir} must contain dump.jsonl and rules.jsonl")
    parsed = parse_dump_file(dump)
    rules = load_rules(rules_path)
    client = FileArchiveClient(archive_path) if archive_path.exists() else None
    return build_dataset(parsed.comments, rules, archive_client=client)


def _train_config(encoder: str, epochs: int, learning_rate: float, batch_size, patience: int, seed: int,
                  context_hidden: int, context_layers: int, context_cell: str):
    from modnorm.encoding import EncoderSettings
    from modnorm.training import TrainConfig

    return TrainConfig(
        epochs=epochs,
        learning_rate=learning_rate,
        batch_size=batch_size,
        patience=patience,
        seed=seed,
        context_hidden=context_hidden,
        context_layers=context_layers,
        context_cell=context_cell,
        encoder=EncoderSettings(checkpoint=encoder),
    )


@click.group()
def main() -> None:
    """Community norm violation detection pipeline."""


@main.command("gen-synthetic")
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--subreddits", type=int, default=6, show_default=True)
@click.option("--conversations", type=int, default=240, show_default=True)
def gen_synthetic(seed: int, out_dir: str, subreddits: int, conversations: int) -> None:
    """Generate a seeded synthetic corpus with ground truth."""
    from modnorm.synthetic import SyntheticConfig, generate_corpus

    config = SyntheticConfig(
        seed=seed, subreddits=subreddits, moderated_conversations=conversations
    )
    corpus = generate_corpus(config)
    paths = corpus.write(out_dir)
    write_manifest(
        out_dir,
        "gen-synthetic",
        {"seed": seed, "subreddits": subreddits, "conversations": conversations},
        list(paths.values()),
    )
    click.echo(
        f"wrote {len(corpus.comments)} comments, {len(corpus.rules)} rules -> {out_dir}"
    )


@main.command("build-corpus")
@click.option("--corpus-dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
def build_corpus(corpus_dir: str, out_dir: str) -> None:
    """Build the dataset and serialize the privacy-preserving release."""
    from modnorm.corpus import corpus_stats, serialize_release, write_release

    dataset = _load_corpus(corpus_dir)
    records, anonymization = serialize_release(dataset)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    release_path = out / "release.jsonl"
    write_release(records, release_path)
    (out / "anonymization_map.json").write_text(
        json.dumps(anonymization, indent=2, sort_keys=True)
    )
    (out / "stats.json").write_text(
        json.dumps(corpus_stats(dataset).to_record(), indent=2, sort_keys=True)
    )
    write_manifest(
        out_dir,
        "build-corpus",
        {"corpus_dir": corpus_dir},
        [str(release_path), str(out / "anonymization_map.json"), str(out / "stats.json")],
    )
    click.echo(
        f"{dataset.report.entries} moderated conversations, "
        f"{sum(len(e.controls) for e in dataset.entries)} controls -> {release_path}"
    )


@main.command("rehydrate")
@click.option("--release", "release_path", required=True, type=click.Path(exists=True))
@click.option("--corpus-dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def rehydrate_cmd(release_path: str, corpus_dir: str, out_path: str) -> None:
    """Rebuild full conversations from a release file and a comment store."""
    from modnorm.corpus import (
        CommentStore,
        FileArchiveClient,
        RuleBook,
        load_rules,
        parse_dump_file,
        read_release,
        rehydrate,
    )

    base = Path(corpus_dir)
    parsed = parse_dump_file(base / "dump.jsonl")
    store = CommentStore(parsed.comments)
    archive_path = base / "archive.jsonl"
    if archive_path.exists():
        client = FileArchiveClient(archive_path)
        for comment in list(store):
            if comment.removed and not comment.body:
                body = client.get_body(comment.comment_id)
                if body is not None:
                    store.with_body(comment.comment_id, body)
    rules = RuleBook(load_rules(base / "rules.jsonl"))
    dataset = rehydrate(read_release(release_path), store, rules)
    with open(out_path, "w", encoding="utf-8") as handle:
        for entry in dataset.entries:
            record = {
                "subreddit": entry.conversation.subreddit,
                "utterances": [c.body for c in entry.conversation.utterances()],
                "violated_rules": [r.rule_index for r in entry.violated_rules],
                "controls": [
                    [c.body for c in control.utterances()] for control in entry.controls
                ],
            }
            handle.write(json.dumps(record, sort_keys=True) + "\n")
    click.echo(f"rehydrated {len(dataset.entries)} conversations -> {out_path}")


@main.command("train-taxonomy")
@click.option("--annotated", "annotated_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--types", "type_names", multiple=True, help="Fine types to train (default: all 21)")
@click.option("--encoder", default="tiny", show_default=True)
@click.option("--epochs", type=int, default=20, show_default=True)
@click.option("--learning-rate", type=float, default=5e-5, show_default=True)
@click.option("--batch-size", type=int, default=None)
@click.option("--seed", type=int, default=0, show_default=True)
def train_taxonomy(annotated_path, out_dir, type_names, encoder, epochs, learning_rate, batch_size, seed):
    """Train per-type binary rule classifiers."""
    from modnorm.taxonomy import FineRuleType, save_rule_suite, train_rule_suite
    from modnorm.taxonomy.types import AnnotatedRule

    annotated = []
    with open(annotated_path, "r", encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                record = json.loads(line)
                annotated.append(
                    AnnotatedRule(
                        text=record["text"],
                        labels=frozenset(
                            FineRuleType.from_name(n) for n in record["labels"]
                        ),
                    )
                )
    types = [FineRuleType.from_name(n) for n in type_names] or None
    config = _train_config(encoder, epochs, learning_rate, batch_size, epochs, seed, 768, 2, "gru")
    suite = train_rule_suite(annotated, config, types)
    save_rule_suite(suite, out_dir)
    write_manifest(
        out_dir,
        "train-taxonomy",
        {"annotated": annotated_path, "seed": seed, "epochs": epochs,
         "types": sorted(t.value for t in suite.scorers)},
        [out_dir],
    )
    click.echo(f"trained {len(suite.scorers)} rule classifiers -> {out_dir}")


@main.command("map-rules")
@click.option("--suite", "suite_dir", required=True, type=click.Path(exists=True))
@click.option("--rules", "rules_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--threshold", type=float, default=0.5, show_default=True)
def map_rules(suite_dir, rules_path, out_path, threshold):
    """Label a rules file with fine and coarse types using a trained suite."""
    from modnorm.corpus import load_rules
    from modnorm.taxonomy import classify_rule, coarsen, load_rule_suite

    suite = load_rule_suite(suite_dir)
    rules = load_rules(rules_path)
    with open(out_path, "w", encoding="utf-8") as handle:
        for rule in rules:
            fine = classify_rule(rule.display_text(), suite, threshold)
            record = {
                "subreddit": rule.subreddit,
                "rule_index": rule.rule_index,
                "fine_types": sorted(t.value for t in fine),
                "coarse_types": sorted(t.value for t in coarsen(fine)),
            }
            handle.write(json.dumps(record, sort_keys=True) + "\n")
    click.echo(f"mapped {len(rules)} rules -> {out_path}")


@main.command("train-detector")
@click.option("--corpus-dir", required=True, type=click.Path(exists=True))
@click.option("--type", "type_name", required=True)
@click.option("--variant", type=click.Choice(["comment", "history", "community", "history_community"]), default="comment", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--encoder", default="tiny", show_default=True)
@click.option("--epochs", type=int, default=10, show_default=True)
@click.option("--learning-rate", type=float, default=1e-5, show_default=True)
@click.option("--batch-size", type=int, default=None)
@click.option("--patience", type=int, default=5, show_default=True)
@click.option("--context-hidden", type=int, default=768, show_default=True)
@click.option("--context-layers", type=int, default=2, show_default=True)
@click.option("--context-cell", type=click.Choice(["gru", "lstm"]), default="gru", show_default=True)
@click.option("--split-seed", type=int, default=0, show_default=True)
def train_detector_cmd(corpus_dir, type_name, variant, seed, out_dir, encoder, epochs,
                       learning_rate, batch_size, patience, context_hidden,
                       context_layers, context_cell, split_seed):
    """Train one per-type violation detector and score the shared test split."""
    from modnorm.corpus import split_dataset
    from modnorm.detector import (
        DetectorVariant,
        detection_examples,
        predict_many,
        save_detector,
        train_detector,
    )
    from modnorm.evalkit import thresholded_record, write_predictions
    from modnorm.taxonomy import CoarseRuleType

    dataset = _load_corpus(corpus_dir)
    split = split_dataset(dataset, split_seed)
    coarse = CoarseRuleType.from_name(type_name)
    config = _train_config(encoder, epochs, learning_rate, batch_size, patience, seed,
                           context_hidden, context_layers, context_cell)
    try:
        model, result = train_detector(coarse, DetectorVariant(variant), split, seed, config)
    except Exception as exc:  # noqa: BLE001 - surfaced as a diagnostic
        _fail(str(exc))
    save_detector(model, out_dir)

    test_examples = detection_examples(split.test)
    probs = predict_many(model, test_examples)
    records = [
        thresholded_record(
            example_id=e.conversation.final_comment.comment_id,
            target=coarse.value,
            score=p,
            gold=e.label(coarse),
            threshold=config.decision_threshold,
            variant=variant,
            seed=seed,
        )
        for e, p in zip(test_examples, probs)
    ]
    predictions_path = Path(out_dir) / "predictions.jsonl"
    write_predictions(records, predictions_path)
    write_manifest(
        out_dir,
        "train-detector",
        {"corpus_dir": corpus_dir, "type": type_name, "variant": variant,
         "seed": seed, "split_seed": split_seed, "config": config.to_record()},
        [out_dir, str(predictions_path)],
    )
    click.echo(
        f"{type_name}/{variant} seed={seed}: best dev F1 "
        f"{result.best_dev_macro_f1:.3f} (epoch {result.best_epoch}) -> {out_dir}"
    )


@main.command("build-pairs")
@click.option("--corpus-dir", required=True, type=click.Path(exists=True))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def build_pairs_cmd(corpus_dir, seed, out_path):
    """Construct explainer training pairs from a built corpus."""
    from modnorm.explainer import build_training_pairs

    dataset = _load_corpus(corpus_dir)
    pairs = build_training_pairs(dataset, seed=seed)
    with open(out_path, "w", encoding="utf-8") as handle:
        for pair in pairs:
            record = {
                "subreddit": pair.conversation.subreddit,
                "final_comment_id": pair.conversation.final_comment.comment_id,
                "rule_index": pair.rule.rule_index,
                "label": pair.label,
                "provenance": pair.provenance.value,
            }
            handle.write(json.dumps(record, sort_keys=True) + "\n")
    click.echo(
        f"{len(pairs)} pairs ({pairs.skipped_no_mismatch_candidates} single-rule skips) -> {out_path}"
    )


@main.command("train-explainer")
@click.option("--corpus-dir", required=True, type=click.Path(exists=True))
@click.option("--variant", type=click.Choice(["rule", "rule_history", "rule_history_community"]), default="rule", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--encoder", default="tiny", show_default=True)
@click.option("--epochs", type=int, default=10, show_default=True)
@click.option("--learning-rate", type=float, default=1e-5, show_default=True)
@click.option("--batch-size", type=int, default=None)
@click.option("--patience", type=int, default=5, show_default=True)
@click.option("--split-seed", type=int, default=0, show_default=True)
def train_explainer_cmd(corpus_dir, variant, seed, out_dir, encoder, epochs,
                        learning_rate, batch_size, patience, split_seed):
    """Train the universal rule-text model and score the augmented test pairs."""
    from modnorm.corpus import split_dataset
    from modnorm.evalkit import thresholded_record, write_predictions
    from modnorm.explainer import (
        ExplainerVariant,
        build_augmented_eval,
        build_training_pairs,
        eval_items_from_entries,
        save_explainer,
        score_pairs,
        train_explainer,
    )
    from modnorm.corpus.build import CorpusDataset

    dataset = _load_corpus(corpus_dir)
    split = split_dataset(dataset, split_seed)
    train_set = CorpusDataset(entries=split.train, rules=dataset.rules)
    dev_set = CorpusDataset(entries=split.dev, rules=dataset.rules)
    train_pairs = build_training_pairs(train_set, seed=seed)
    dev_pairs = build_training_pairs(dev_set, seed=seed)
    config = _train_config(encoder, epochs, learning_rate, batch_size, patience, seed, 768, 2, "gru")
    try:
        model, result = train_explainer(
            list(train_pairs), seed, config,
            variant=ExplainerVariant(variant), dev_pairs=list(dev_pairs),
        )
    except Exception as exc:  # noqa: BLE001
        _fail(str(exc))
    save_explainer(model, out_dir)

    eval_pairs = build_augmented_eval(eval_items_from_entries(split.test), dataset.rules)
    probs = score_pairs(model, list(eval_pairs))
    records = [
        thresholded_record(
            example_id=pair.conversation.final_comment.comment_id,
            target=f"{pair.rule.subreddit}/{pair.rule.rule_index}",
            score=prob,
            gold=pair.label,
            threshold=config.decision_threshold,
            variant=variant,
            seed=seed,
        )
        for pair, prob in zip(eval_pairs, probs)
    ]
    predictions_path = Path(out_dir) / "predictions.jsonl"
    write_predictions(records, predictions_path)
    write_manifest(
        out_dir,
        "train-explainer",
        {"corpus_dir": corpus_dir, "variant": variant, "seed": seed,
         "split_seed": split_seed, "config": config.to_record()},
        [out_dir, str(predictions_path)],
    )
    click.echo(
        f"explainer/{variant} seed={seed}: best dev F1 "
        f"{result.best_dev_macro_f1:.3f} -> {out_dir}"
    )


@main.command("evaluate")
@click.option("--predictions", "prediction_paths", multiple=True, required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--label", default="model", show_default=True)
def evaluate_cmd(prediction_paths, out_path, label):
    """Aggregate prediction files into a seed-averaged report."""
    from modnorm.evalkit import read_predictions, render_table, report_from_predictions, write_report

    records = []
    for path in prediction_paths:
        if not Path(path).exists():
            _fail(f"predictions file not found: {path}")
        records.extend(read_predictions(path))
    if not records:
        _fail("no prediction records to evaluate")
    report = report_from_predictions(records, label=label)
    write_report(report, out_path)
    click.echo(render_table(report))


@main.command("analyze")
@click.option("--corpus-dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--predictions", "prediction_paths", multiple=True, type=click.Path(exists=True))
def analyze_cmd(corpus_dir, out_path, prediction_paths):
    """Corpus composition stats, plus aggregate confusion when predictions given."""
    from modnorm.corpus import corpus_stats
    from modnorm.evalkit import aggregate_confusion, read_predictions

    from modnorm.evalkit import binary_counts

    dataset = _load_corpus(corpus_dir)
    stats = corpus_stats(dataset)
    record = {"stats": stats.to_record()}
    if prediction_paths:
        per_type = {}
        for path in prediction_paths:
            for pred in read_predictions(path):
                per_type.setdefault(pred.target, []).append(pred)
        record["aggregate_confusion"] = aggregate_confusion(per_type).to_record()
        per_type_confusion = {}
        for target, preds in sorted(per_type.items()):
            tp, fp, tn, fn = binary_counts(
                [p.decision for p in preds], [p.gold for p in preds]
            )
            per_type_confusion[target] = {"tp": tp, "fp": fp, "tn": tn, "fn": fn}
        record["per_type_confusion"] = per_type_confusion
    Path(out_path).write_text(json.dumps(record, indent=2, sort_keys=True))
    click.echo(
        f"{stats.moderated_comments} moderated / {stats.unmoderated_comments} controls "
        f"across {stats.subreddits} communities -> {out_path}"
    )


@main.command("serve")
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--corpus-dir", type=click.Path(exists=True), help="Rules source when no config file is given")
def serve_cmd(config_path, corpus_dir):
    """Run the triage service."""
    import uvicorn

    from modnorm.corpus import RuleBook, load_rules
    from modnorm.detector import load_detector
    from modnorm.explainer import load_explainer
    from modnorm.service import ModelScorer, ServiceSettings, create_app

    settings = ServiceSettings.from_file(config_path) if config_path else ServiceSettings()
    rules_path = settings.rules_path or (corpus_dir and str(Path(corpus_dir) / "rules.jsonl"))
    if not rules_path:
        _fail("no rules source: set rules_path in config or pass --corpus-dir")
    rules = RuleBook(load_rules(rules_path))

    scorer = None
    if settings.explainer_dir:
        explainer = load_explainer(settings.explainer_dir)
        detectors = {
            name: load_detector(path) for name, path in settings.detector_dirs.items()
        }
        scorer = ModelScorer(rules, explainer, detectors)
    app = create_app(settings, rules, scorer=scorer)
    host, _, port = settings.listen.partition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8080))


if __name__ == "__main__":
    main()
