"""Confusion matrices, the four headline metrics, and comparison reports.

The positive class is the phenomenon being detected (sarcastic / hate).
That convention is forced by internal consistency of the stored reference
tables: the fasttext row combines high recall with low precision at 76%
accuracy, which is only possible against the minority class.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

from .corpus import Task
from .errors import EvalError

POSITIVE_CLASS_NOTE = "positive class = sarcastic / hate (minority)"


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise EvalError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float
    accuracy: float
    degenerate: bool = False  # some denominator was zero


def confusion(preds: list[int], golds: list[int]) -> ConfusionMatrix:
    if len(preds) != len(golds):
        raise EvalError(f"length mismatch: {len(preds)} preds vs {len(golds)} golds")
    if not preds:
        raise EvalError("cannot build a confusion matrix from zero examples")
    tp = fp = fn = tn = 0
    for p, g in zip(preds, golds):
        if p not in (0, 1) or g not in (0, 1):
            raise EvalError("labels must be 0 or 1")
        if p == 1 and g == 1:
            tp += 1
        elif p == 1 and g == 0:
            fp += 1
        elif p == 0 and g == 1:
            fn += 1
        else:
            tn += 1
    return ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn)


def metrics(cm: ConfusionMatrix) -> Metrics:
    if cm.total == 0:
        raise EvalError("confusion matrix is empty")
    degenerate = False
    if cm.tp + cm.fp == 0:
        precision, degenerate = 0.0, True
    else:
        precision = cm.tp / (cm.tp + cm.fp)
    if cm.tp + cm.fn == 0:
        recall, degenerate = 0.0, True
    else:
        recall = cm.tp / (cm.tp + cm.fn)
    if precision + recall == 0:
        f1, degenerate = 0.0, True
    else:
        f1 = 2 * precision * recall / (precision + recall)
    accuracy = (cm.tp + cm.tn) / cm.total
    return Metrics(precision, recall, f1, accuracy, degenerate)


def majority_accuracy(golds: list[int]) -> float:
    """Accuracy of always predicting the most frequent class."""
    if not golds:
        raise EvalError("no labels")
    ones = sum(golds)
    return max(ones, len(golds) - ones) / len(golds)


@dataclass(frozen=True)
class EvalReport:
    model: str
    task: str
    variant: str  # raw | hindi | english | crosslingual
    split: str  # which part was evaluated
    split_seed: int
    cm: ConfusionMatrix
    precision: float
    recall: float
    f1: float
    accuracy: float
    degenerate: bool = False
    majority_baseline: float | None = None


def evaluate(
    model_name: str,
    task: Task | str,
    preds: list[int],
    golds: list[int],
    variant: str = "raw",
    split: str = "test",
    split_seed: int = 0,
) -> EvalReport:
    cm = confusion(preds, golds)
    m = metrics(cm)
    return EvalReport(
        model=model_name,
        task=task.value if isinstance(task, Task) else task,
        variant=variant,
        split=split,
        split_seed=split_seed,
        cm=cm,
        precision=m.precision,
        recall=m.recall,
        f1=m.f1,
        accuracy=m.accuracy,
        degenerate=m.degenerate,
        majority_baseline=majority_accuracy(golds),
    )


def to_record(report: EvalReport) -> dict:
    rec = asdict(report)
    rec["cm"] = asdict(report.cm)
    return rec


def from_record(rec: dict) -> EvalReport:
    try:
        cm = ConfusionMatrix(**rec["cm"])
        return EvalReport(
            model=rec["model"],
            task=rec["task"],
            variant=rec["variant"],
            split=rec["split"],
            split_seed=rec["split_seed"],
            cm=cm,
            precision=rec["precision"],
            recall=rec["recall"],
            f1=rec["f1"],
            accuracy=rec["accuracy"],
            degenerate=rec.get("degenerate", False),
            majority_baseline=rec.get("majority_baseline"),
        )
    except (KeyError, TypeError) as e:
        raise EvalError(f"malformed report record: {e}") from e


def write_report(report: EvalReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(to_record(report), ensure_ascii=False) + "\n")


def read_report(path: str | Path) -> EvalReport:
    with open(path, encoding="utf-8") as f:
        line = f.readline().strip()
    if not line:
        raise EvalError(f"{path}: empty report file")
    try:
        return from_record(json.loads(line))
    except json.JSONDecodeError as e:
        raise EvalError(f"{path}: invalid report JSON") from e


def render_text(report: EvalReport) -> str:
    """Human-readable report. Accuracy shows as a percent with 2 decimals,
    the other metrics with 3, mirroring the reference tables."""
    lines = [
        f"model={report.model} task={report.task} variant={report.variant} "
        f"split={report.split} seed={report.split_seed}",
        POSITIVE_CLASS_NOTE,
        f"tp={report.cm.tp} fp={report.cm.fp} fn={report.cm.fn} tn={report.cm.tn}",
        f"accuracy={report.accuracy * 100:.2f}%  precision={report.precision:.3f}  "
        f"recall={report.recall:.3f}  f1={report.f1:.3f}",
    ]
    if report.majority_baseline is not None:
        lines.append(f"majority-vote accuracy={report.majority_baseline * 100:.2f}%")
    if report.degenerate:
        lines.append("warning: degenerate metric (a denominator was zero)")
    return "\n".join(lines)


@dataclass(frozen=True)
class ReferenceRow:
    task: str
    model: str
    accuracy: float  # percent
    precision: float
    recall: float
    f1: float


def load_reference(path: str | Path | None = None) -> dict[tuple[str, str], ReferenceRow]:
    """The stored comparison tables for both tasks."""
    if path is None:
        path = resources.files("csf") / "data" / "reference_tables.jsonl"
    rows: dict[tuple[str, str], ReferenceRow] = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            row = ReferenceRow(**rec)
            rows[(row.task, row.model)] = row
    return rows


@dataclass(frozen=True)
class CompareResult:
    f1: float
    reference_f1: float
    relative_f1_delta: float  # (f1 - ref) / ref


def compare(
    report: EvalReport | float,
    task: str,
    model: str,
    reference: dict[tuple[str, str], ReferenceRow] | None = None,
) -> CompareResult:
    """Relative F1 delta of a report (or bare F1) against a reference row."""
    reference = reference if reference is not None else load_reference()
    key = (task, model)
    if key not in reference:
        raise EvalError(f"no reference row for task={task!r} model={model!r}")
    ref = reference[key]
    f1 = report.f1 if isinstance(report, EvalReport) else float(report)
    if ref.f1 == 0:
        raise EvalError("reference F1 is zero; relative delta undefined")
    return CompareResult(
        f1=f1, reference_f1=ref.f1, relative_f1_delta=(f1 - ref.f1) / ref.f1
    )
