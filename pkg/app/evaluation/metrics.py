"""
Confusion matrix and the per-class precision/recall/F1 report.

All report values are percentages. Metrics are functions of the confusion
matrix only.
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from core.exceptions import DataError


@dataclass
class ConfusionMatrix:
    """counts[true][predicted]."""
    counts: np.ndarray

    @property
    def num_classes(self):
        return self.counts.shape[0]

    @property
    def total(self):
        return int(self.counts.sum())


@dataclass
class ClassMetrics:
    label: int
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class ClassificationReport:
    classes: List[ClassMetrics]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    accuracy: float
    total: int
    digits: Optional[int] = None
    warnings: List[str] = field(default_factory=list)


def confusion(y_true, y_pred, num_classes):
    """Tally (true, predicted) pairs into a K x K matrix."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise DataError(
            f'{y_true.size} true labels but {y_pred.size} predictions'
        )
    for name, values in (('true', y_true), ('predicted', y_pred)):
        bad = np.flatnonzero((values < 0) | (values >= num_classes))
        if bad.size:
            raise DataError(
                f'{name} label {values[bad[0]]} at position {bad[0]} '
                f'is outside [0, {num_classes})'
            )
    counts = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(counts, (y_true.astype(np.int64), y_pred.astype(np.int64)), 1)
    return ConfusionMatrix(counts)


def _ratio(numerator, denominator):
    return numerator / denominator if denominator else 0.0


def _rounded(value, digits):
    return value if digits is None else round(value, digits)


def report(cm, digits=None):
    """Per-class and macro precision/recall/F1 plus accuracy.

    With ``digits`` set, per-class fractions are rounded to that many
    fractional digits (2 gives whole percentages) and the macro row is the
    mean of the rounded values. A zero denominator yields 0.0 and a warning.
    """
    counts = np.asarray(cm.counts)
    total = int(counts.sum())
    if total == 0:
        raise DataError('confusion matrix is empty')

    warnings = []
    classes = []
    for k in range(counts.shape[0]):
        tp = int(counts[k, k])
        predicted = int(counts[:, k].sum())
        actual = int(counts[k, :].sum())
        if predicted == 0:
            warnings.append(f'class {k}: precision undefined (no predictions)')
        if actual == 0:
            warnings.append(f'class {k}: recall undefined (no samples)')
        precision = _ratio(tp, predicted)
        recall = _ratio(tp, actual)
        f1 = _ratio(2 * precision * recall, precision + recall)
        classes.append(ClassMetrics(
            label=k,
            precision=100.0 * _rounded(precision, digits),
            recall=100.0 * _rounded(recall, digits),
            f1=100.0 * _rounded(f1, digits),
            support=actual,
        ))

    accuracy = _ratio(int(np.trace(counts)), total)
    return ClassificationReport(
        classes=classes,
        macro_precision=float(np.mean([c.precision for c in classes])),
        macro_recall=float(np.mean([c.recall for c in classes])),
        macro_f1=float(np.mean([c.f1 for c in classes])),
        accuracy=100.0 * _rounded(accuracy, digits),
        total=total,
        digits=digits,
        warnings=warnings,
    )


def render_report(rep):
    """Plain-text table: per-class rows, macro average, accuracy."""
    lines = [
        f'{"Class":<10}{"Precision":>11}{"Recall":>11}{"F1-Score":>11}',
        '-' * 43,
    ]
    for c in rep.classes:
        lines.append(
            f'{c.label:<10}{c.precision:>11.2f}{c.recall:>11.2f}'
            f'{c.f1:>11.2f}'
        )
    lines.append('-' * 43)
    lines.append(
        f'{"Macro Avg":<10}{rep.macro_precision:>11.2f}'
        f'{rep.macro_recall:>11.2f}{rep.macro_f1:>11.2f}'
    )
    lines.append(f'{"Accuracy":<10}{"":>22}{rep.accuracy:>11.2f}')
    for warning in rep.warnings:
        lines.append(f'warning: {warning}')
    return '\n'.join(lines) + '\n'


def render_confusion(cm):
    """Confusion matrix as CSV text: rows true class, columns predicted."""
    k = cm.num_classes
    lines = ['true\\pred,' + ','.join(str(j) for j in range(k))]
    for i in range(k):
        lines.append(f'{i},' + ','.join(str(int(v)) for v in cm.counts[i]))
    return '\n'.join(lines) + '\n'
