"""Train/test splitting and classification reporting.

The report mirrors the usual layout: one row per class with precision,
recall, F1 and support, then accuracy, macro-average and weighted-average
rows. Zero-denominator rates are reported as 0 and flagged in notes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput
from .forest import DEFAULT_LABEL_NAMES, ForestModel, TrainingSet, predict


@dataclass(frozen=True)
class SplitResult:
    """Disjoint index sets whose union covers range(n)."""

    train_indices: np.ndarray
    test_indices: np.ndarray
    seed: int


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class AverageMetrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class ClassificationReport:
    per_class: dict[int, ClassMetrics]
    accuracy: float
    macro_avg: AverageMetrics
    weighted_avg: AverageMetrics
    total_support: int
    label_names: dict[int, str] = field(default_factory=lambda: dict(DEFAULT_LABEL_NAMES))
    notes: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "per_class": {
                self.label_names.get(c, str(c)): {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for c, m in sorted(self.per_class.items())
            },
            "accuracy": self.accuracy,
            "macro_avg": {"precision": self.macro_avg.precision,
                          "recall": self.macro_avg.recall,
                          "f1": self.macro_avg.f1},
            "weighted_avg": {"precision": self.weighted_avg.precision,
                             "recall": self.weighted_avg.recall,
                             "f1": self.weighted_avg.f1},
            "total_support": self.total_support,
            "notes": list(self.notes),
        }

    def to_text(self) -> str:
        names = [self.label_names.get(c, str(c)) for c in sorted(self.per_class)]
        width = max(len(n) for n in names + ["weighted avg"])
        header = f"{'':>{width}}  {'precision':>9}  {'recall':>9}  {'f1-score':>9}  {'support':>8}"
        lines = [header, ""]
        for c in sorted(self.per_class):
            m = self.per_class[c]
            name = self.label_names.get(c, str(c))
            lines.append(f"{name:>{width}}  {m.precision:>9.4f}  {m.recall:>9.4f}"
                         f"  {m.f1:>9.4f}  {m.support:>8d}")
        lines.append("")
        lines.append(f"{'accuracy':>{width}}  {'':>9}  {'':>9}  {self.accuracy:>9.4f}"
                     f"  {self.total_support:>8d}")
        for name, avg in (("macro avg", self.macro_avg), ("weighted avg", self.weighted_avg)):
            lines.append(f"{name:>{width}}  {avg.precision:>9.4f}  {avg.recall:>9.4f}"
                         f"  {avg.f1:>9.4f}  {self.total_support:>8d}")
        if self.notes:
            lines.append("")
            lines.extend(f"note: {note}" for note in self.notes)
        return "\n".join(lines)


def split_train_test(n: int, test_fraction: float, seed: int) -> SplitResult:
    """Random non-stratified split; test takes floor(n * fraction + 0.5) indices."""
    if n < 2:
        raise InvalidInput(f"need at least 2 examples to split, got {n}")
    if not 0.0 < test_fraction < 1.0:
        raise InvalidInput(f"test_fraction must be in (0, 1), got {test_fraction}")
    permutation = np.random.default_rng(seed).permutation(n)
    n_test = int(np.floor(n * test_fraction + 0.5))
    return SplitResult(train_indices=permutation[n_test:],
                       test_indices=permutation[:n_test],
                       seed=seed)


def _rate(numerator: int, denominator: int, what: str, notes: list[str]) -> float:
    if denominator == 0:
        notes.append(f"{what} undefined (zero denominator), reported as 0")
        return 0.0
    return numerator / denominator


def report_from_predictions(y_true, y_pred, label_names=None) -> ClassificationReport:
    """Build a report from parallel truth/prediction label arrays."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise InvalidInput(f"shape mismatch: {y_true.shape} truth vs {y_pred.shape} predictions")
    if y_true.size == 0:
        raise InvalidInput("cannot report on an empty test set")
    for name, arr in (("truth", y_true), ("prediction", y_pred)):
        if not np.isin(arr, (0, 1)).all():
            raise InvalidInput(f"{name} labels must be 0 or 1")
    if label_names is None:
        label_names = dict(DEFAULT_LABEL_NAMES)

    notes: list[str] = []
    per_class: dict[int, ClassMetrics] = {}
    for c in (0, 1):
        tp = int(np.sum((y_pred == c) & (y_true == c)))
        fp = int(np.sum((y_pred == c) & (y_true != c)))
        fn = int(np.sum((y_pred != c) & (y_true == c)))
        support = int(np.sum(y_true == c))
        name = label_names.get(c, str(c))
        precision = _rate(tp, tp + fp, f"precision[{name}]", notes)
        recall = _rate(tp, tp + fn, f"recall[{name}]", notes)
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        per_class[c] = ClassMetrics(precision, recall, f1, support)

    total = int(y_true.size)
    accuracy = float(np.mean(y_true == y_pred))
    macro = AverageMetrics(
        precision=sum(m.precision for m in per_class.values()) / 2,
        recall=sum(m.recall for m in per_class.values()) / 2,
        f1=sum(m.f1 for m in per_class.values()) / 2,
    )
    weighted = AverageMetrics(
        precision=sum(m.precision * m.support for m in per_class.values()) / total,
        recall=sum(m.recall * m.support for m in per_class.values()) / total,
        f1=sum(m.f1 * m.support for m in per_class.values()) / total,
    )
    return ClassificationReport(per_class=per_class, accuracy=accuracy, macro_avg=macro,
                                weighted_avg=weighted, total_support=total,
                                label_names=dict(label_names), notes=tuple(notes))


def evaluate(model: ForestModel, test: TrainingSet) -> ClassificationReport:
    """Predict every test vector and summarize against the true labels."""
    if len(test.vectors) == 0:
        raise InvalidInput("cannot evaluate on an empty test set")
    predictions = np.array([predict(model, v) for v in test.vectors], dtype=np.int64)
    return report_from_predictions(test.labels, predictions, test.label_names)
