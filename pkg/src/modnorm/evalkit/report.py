"""Report assembly and rendering for prediction files."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence, Union

from modnorm.evalkit.baselines import EvalReport, TypeScore
from modnorm.evalkit.metrics import macro_f1
from modnorm.evalkit.records import PredictionRecord


def report_from_predictions(
    records: Sequence[PredictionRecord], label: str = "model"
) -> EvalReport:
    """Aggregate prediction records into per-type seed-averaged macro F1.

    Records group by (target, variant, seed); seeds of the same target and
    variant average into one TypeScore. A report is emitted per variant
    found; with a single variant the report carries it directly.
    """
    by_variant: dict[str, dict[str, dict[int, list[PredictionRecord]]]] = {}
    for record in records:
        by_variant.setdefault(record.variant, {}).setdefault(
            record.target, {}
        ).setdefault(record.seed, []).append(record)

    reports: list[EvalReport] = []
    for variant, per_target in sorted(by_variant.items()):
        report = EvalReport(label=label, variant=variant)
        for target, per_seed in sorted(per_target.items()):
            scores = []
            for seed in sorted(per_seed):
                seed_records = per_seed[seed]
                scores.append(
                    macro_f1(
                        [r.decision for r in seed_records],
                        [r.gold for r in seed_records],
                    )
                )
            report.per_type[target] = TypeScore.from_scores(scores)
        # Two aggregate readings: the per-type mean lives in average();
        # the pooled score treats every prediction as one example.
        pooled = [r for records in per_target.values() for seed_records in records.values() for r in seed_records]
        report.notes["pooled_macro_f1"] = macro_f1(
            [r.decision for r in pooled], [r.gold for r in pooled]
        )
        reports.append(report)

    if len(reports) == 1:
        return reports[0]
    merged = EvalReport(label=label, variant="(all)")
    for report in reports:
        for target, score in report.per_type.items():
            merged.per_type[f"{report.variant}:{target}"] = score
    return merged


def render_table(report: EvalReport) -> str:
    """Fixed-width text table of per-type scores."""
    lines = [f"report: {report.label}" + (f" [{report.variant}]" if report.variant else "")]
    width = max([len(name) for name in report.per_type] + [12])
    lines.append(f"{'type'.ljust(width)}  {'macro F1':>9}  {'95% CI':>8}  runs")
    for name in sorted(report.per_type):
        score = report.per_type[name]
        ci = f"±{score.ci95:.3f}" if score.ci95 is not None else "-"
        lines.append(
            f"{name.ljust(width)}  {score.mean:9.4f}  {ci:>8}  {len(score.scores)}"
        )
    lines.append(f"{'AVERAGE'.ljust(width)}  {report.average():9.4f}")
    if "pooled_macro_f1" in report.notes:
        lines.append(
            f"{'POOLED'.ljust(width)}  {report.notes['pooled_macro_f1']:9.4f}"
        )
    if report.confusion is not None:
        c = report.confusion
        lines.append("")
        lines.append("aggregate confusion (rows: violation/control, cols: detected/not):")
        lines.append(f"  violation  {c.detected_violations:6d}  {c.missed_violations:6d}")
        lines.append(f"  control    {c.flagged_controls:6d}  {c.passed_controls:6d}")
        lines.append(f"  miss rate: {c.miss_rate:.1%}")
    return "\n".join(lines)


def write_report(report: EvalReport, path: Union[str, Path]) -> None:
    path = Path(path)
    path.write_text(json.dumps(report.to_record(), indent=2, sort_keys=True))


def read_report(path: Union[str, Path]) -> dict:
    return json.loads(Path(path).read_text())
