"""Binary classification reports in the precision / recall / F1 layout, plus loss-curve export."""
from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

REPORT_VERSION = 1
MODEL_ORDER = ("qsvc", "vqc", "eqnn", "sqnn")
MODEL_LABELS = {"qsvc": "QSVC", "vqc": "VQC", "eqnn": "EstimatorQNN", "sqnn": "SamplerQNN"}
MAP_ORDER = ("zz", "pauli", "z")
MAP_LABELS = {"zz": "ZZFeatureMap", "pauli": "PauliFeatureMap", "z": "ZFeatureMap"}


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @classmethod
    def from_labels(cls, y_true, y_pred) -> "ConfusionCounts":
        t = np.asarray(y_true, dtype=int)
        p = np.asarray(y_pred, dtype=int)
        return cls(
            tp=int(np.sum((t == 1) & (p == 1))),
            fp=int(np.sum((t == 0) & (p == 1))),
            tn=int(np.sum((t == 0) & (p == 0))),
            fn=int(np.sum((t == 1) & (p == 0))),
        )


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class ClassificationReport:
    class0: ClassMetrics
    class1: ClassMetrics
    accuracy: float
    macro: ClassMetrics
    weighted: ClassMetrics
    confusion: ConfusionCounts
    zero_division: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "version": REPORT_VERSION,
            "class_0": asdict(self.class0),
            "class_1": asdict(self.class1),
            "accuracy": self.accuracy,
            "macro_avg": asdict(self.macro),
            "weighted_avg": asdict(self.weighted),
            "confusion": asdict(self.confusion),
            "zero_division": list(self.zero_division),
        }


def _ratio(num: int, den: int, name: str, flags: list[str]) -> float:
    if den == 0:
        flags.append(name)
        return 0.0
    return num / den


def _f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def report(y_true, y_pred) -> ClassificationReport:
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    if y_true.shape != y_pred.shape:
        raise ValueError(f"length mismatch: {y_true.shape} vs {y_pred.shape}")
    if y_true.size == 0:
        raise ValueError("empty input")
    c = ConfusionCounts.from_labels(y_true, y_pred)
    flags: list[str] = []

    p1 = _ratio(c.tp, c.tp + c.fp, "precision_1", flags)
    r1 = _ratio(c.tp, c.tp + c.fn, "recall_1", flags)
    p0 = _ratio(c.tn, c.tn + c.fn, "precision_0", flags)
    r0 = _ratio(c.tn, c.tn + c.fp, "recall_0", flags)
    m0 = ClassMetrics(p0, r0, _f1(p0, r0), c.tn + c.fp)
    m1 = ClassMetrics(p1, r1, _f1(p1, r1), c.tp + c.fn)

    n = c.total
    macro = ClassMetrics((p0 + p1) / 2, (r0 + r1) / 2, (m0.f1 + m1.f1) / 2, n)
    w0, w1 = m0.support / n, m1.support / n
    weighted = ClassMetrics(w0 * p0 + w1 * p1, w0 * r0 + w1 * r1, w0 * m0.f1 + w1 * m1.f1, n)
    return ClassificationReport(m0, m1, (c.tp + c.tn) / n, macro, weighted, c, flags)


def _row(label: str, cells) -> str:
    return f"{label:<14}" + " | ".join(cells)


def render_table(reports: dict) -> tuple[str, dict]:
    """Text table (2 d.p.) and full-precision JSON for ``{(model, featuremap): report}``.

    A cell may also hold an exception message string for a failed run.
    """
    if not reports:
        raise ValueError("need at least one report")
    models = [m for m in MODEL_ORDER if any(k[0] == m for k in reports)]
    models += sorted({k[0] for k in reports} - set(models))
    maps = [f for f in MAP_ORDER if any(k[1] == f for k in reports)]
    maps += sorted({k[1] for k in reports} - set(maps))

    width = 22
    lines = [_row("", [f"{MAP_LABELS.get(f, f):^{width}}" for f in maps]),
             _row("", [f"{'Prec':>6} {'Rec':>6} {'F1':>6}  " for _ in maps])]
    doc = {"version": REPORT_VERSION, "cells": []}

    def fmt(m: ClassMetrics) -> str:
        return f"{m.precision:6.2f} {m.recall:6.2f} {m.f1:6.2f}  "

    for model in models:
        lines.append("")
        lines.append(MODEL_LABELS.get(model, model))
        rows = {"Class 0": [], "Class 1": [], "Accuracy": [], "Macro avg": [], "Weighted avg": []}
        for f in maps:
            rep = reports.get((model, f))
            if isinstance(rep, ClassificationReport):
                rows["Class 0"].append(fmt(rep.class0))
                rows["Class 1"].append(fmt(rep.class1))
                rows["Accuracy"].append(f"{rep.accuracy:^{width}.2f}")
                rows["Macro avg"].append(fmt(rep.macro))
                rows["Weighted avg"].append(fmt(rep.weighted))
                doc["cells"].append({"model": model, "featuremap": f, "report": rep.to_dict()})
            else:
                text = "n/a" if rep is None else "FAILED"
                for r in rows.values():
                    r.append(f"{text:^{width}}")
                if rep is not None:
                    doc["cells"].append({"model": model, "featuremap": f, "error": str(rep)})
        for label, cells in rows.items():
            lines.append(_row("  " + label, cells))
    return "\n".join(lines) + "\n", doc


def export_loss_curves(records: dict, directory) -> list[Path]:
    """One ``loss_<model>_<featuremap>.csv`` per key of ``{(model, featuremap): records}``.

    Records may be ``TrainRecord`` objects or ``(iteration, loss)`` pairs.
    """
    if not records:
        raise ValueError("no loss records")
    directory = Path(directory)
    written = []
    for (model, fmap), recs in sorted(records.items()):
        path = directory / f"loss_{model}_{fmap}.csv"
        try:
            with path.open("w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["iteration", "loss"])
                for r in recs:
                    it, value = (r.iteration, r.loss) if hasattr(r, "loss") else r
                    w.writerow([it, repr(float(value))])
        except OSError as exc:
            raise OSError(f"cannot write loss curve {path}: {exc}") from exc
        written.append(path)
    return written
