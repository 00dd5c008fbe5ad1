"""File-level pipeline behind the CLI: prepare, train, benchmark and kernel dumps.

Everything lives under ``config.out``::

    config.json        resolved run configuration
    transactions.csv   raw rows (synthetic source only)
    dataset.csv        selected rows, numeric codes, unscaled
    split.json         train/test indices, scaling, vocabularies
    pca.json           feature rankings over the nine input columns
    correlation.csv    5x5 Pearson matrix of the model columns + label

Outputs contain no timestamps, so reruns with one seed are byte-identical.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import data
from .config import MODELS, ConfigError, RunConfig
from .featuremap import FAMILIES
from .kernel import gram_matrix
from .metrics import ClassificationReport, export_loss_curves, render_table, report
from .qsvc import decision_function, fit_qsvc
from .variational import TrainRecord, make_model, predict, train

VARIATIONAL = ("vqc", "eqnn", "sqnn")
CORRELATION_COLUMNS = ("age", "gender", "category", "amount", "fraud")


class PipelineError(RuntimeError):
    pass


class MissingInputError(PipelineError):
    """A required input file is absent; maps to a usage error at the CLI."""


def _dump_json(obj, path: Path) -> Path:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


def _out(config: RunConfig) -> Path:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- prepare ----------------------------------------------------------------

def load_rows(config: RunConfig) -> list[data.RawTransaction]:
    if config.source == "synthetic":
        return data.synthesize(config.n_per_class, config.seed)
    path = Path(config.source)
    if not path.is_file():
        raise MissingInputError(f"input csv not found: {path}")
    rows = data.load_csv(path)
    return data.balanced_subset(rows, config.n_per_class, config.seed)


def prepare(config: RunConfig) -> dict[str, Path]:
    out = _out(config)
    rows = load_rows(config)
    written = {"config": config.save(out / "config.json")}
    if config.source == "synthetic":
        written["transactions"] = data.write_csv(rows, out / "transactions.csv")

    X, y, vocabs = data.encode_rows(rows, data.SELECTED)
    path = out / "dataset.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", *data.SELECTED, "fraud"])
        for i, (xi, yi) in enumerate(zip(X, y)):
            w.writerow([i, *(repr(float(v)) for v in xi), int(yi)])
    written["dataset"] = path

    sd = data.split(X, y, config.test_fraction, config.seed, config.feature_max)
    written["split"] = _dump_json({
        "version": 1,
        "seed": config.seed,
        "test_fraction": config.test_fraction,
        "train_index": sd.train_index.tolist(),
        "test_index": sd.test_index.tolist(),
        "scaling": {"lo": list(sd.scaling.lo), "hi": list(sd.scaling.hi), "upper": sd.scaling.upper},
        "vocabs": vocabs,
    }, out / "split.json")

    X_all, _, _ = data.encode_rows(rows, data.FEATURE_COLUMNS)
    names = list(data.FEATURE_COLUMNS)
    written["pca"] = _dump_json({
        "version": 1,
        "ranking": [{"feature": f, "weight": w} for f, w in data.pca_rank(X_all, names)],
        "ranking_centred": [{"feature": f, "weight": w} for f, w in data.pca_rank(X_all, names, False)],
    }, out / "pca.json")

    corr = data.correlation_matrix(np.column_stack([X, y]))
    path = out / "correlation.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["", *CORRELATION_COLUMNS])
        for name, row in zip(CORRELATION_COLUMNS, corr):
            w.writerow([name, *(repr(float(v)) for v in row)])
    written["correlation"] = path
    return written


def load_prepared(config: RunConfig) -> data.SplitDataset:
    out = Path(config.out)
    ds, sp = out / "dataset.csv", out / "split.json"
    if not ds.is_file() or not sp.is_file():
        raise MissingInputError(f"no prepared dataset under {out}; run 'prepare' first")
    with ds.open(newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    X = np.array([[float(v) for v in r[1:5]] for r in rows]).reshape(len(rows), 4)
    y = np.array([int(r[5]) for r in rows], dtype=int)
    manifest = json.loads(sp.read_text())
    tr = np.array(manifest["train_index"], dtype=int)
    te = np.array(manifest["test_index"], dtype=int)
    s = manifest["scaling"]
    scaling = data.MinMaxScaling(tuple(s["lo"]), tuple(s["hi"]), float(s["upper"]))
    return data.SplitDataset(scaling.transform(X[tr]), y[tr], scaling.transform(X[te]), y[te], tr, te, scaling)


# -- training ---------------------------------------------------------------

@dataclass
class CellResult:
    model: str
    featuremap: str
    report: ClassificationReport
    records: list[TrainRecord] | None
    document: dict


def run_cell(config: RunConfig, sd: data.SplitDataset, model: str, featuremap: str) -> CellResult:
    """Train one (model, feature map) pair on the prepared split and score the test part."""
    spec = config.feature_map_spec(featuremap, sd.X_train.shape[1])
    if model == "qsvc":
        mode = "shots" if config.shots else "exact"
        qm = fit_qsvc(spec, sd.X_train, sd.y_train, config.C, mode, config.shots or 1024, config.seed)
        f = decision_function(qm, sd.X_test, mode, config.shots or 1024, config.seed)
        y_pred = (f > 0).astype(int)
        return CellResult(model, featuremap, report(sd.y_test, y_pred), None, qm.to_dict())
    if model not in VARIATIONAL:
        raise ConfigError(f"unknown model {model!r}")
    loss_kind = config.loss if model == "eqnn" else "cross_entropy"
    vm = make_model(model, spec, config.ansatz_reps, config.seed, loss_kind)
    vm, records = train(vm, sd.X_train, sd.y_train, config.optimizer_config(), shots=config.shots, seed=config.seed)
    y_pred = predict(vm, sd.X_test, shots=config.shots, seed=config.seed + 1)
    return CellResult(model, featuremap, report(sd.y_test, y_pred), records, vm.to_dict())


def _write_cell(cell: CellResult, directory: Path) -> None:
    tag = f"{cell.model}_{cell.featuremap}"
    _dump_json(cell.document, directory / f"model_{tag}.json")
    _dump_json(cell.report.to_dict(), directory / f"report_{tag}.json")
    if cell.records is not None:
        export_loss_curves({(cell.model, cell.featuremap): cell.records}, directory)


def train_one(config: RunConfig) -> CellResult:
    if config.loss == "squared_error" and config.model != "eqnn":
        raise ConfigError("squared_error loss is only available for eqnn")
    sd = load_prepared(config)
    cell = run_cell(config, sd, config.model, config.featuremap)
    _write_cell(cell, _out(config))
    return cell


def benchmark(config: RunConfig, models=None, featuremaps=None) -> tuple[str, dict]:
    """All (model, feature map) cells on one shared split.

    A failing cell is recorded in the table as FAILED and does not stop the grid.
    """
    sd = load_prepared(config)
    directory = _out(config) / "benchmark"
    directory.mkdir(exist_ok=True)
    cells: dict = {}
    for model in models or MODELS:
        for fmap in featuremaps or FAMILIES:
            try:
                cell = run_cell(config, sd, model, fmap)
            except Exception as exc:  # noqa: BLE001 - reported per cell
                cells[(model, fmap)] = f"{type(exc).__name__}: {exc}"
                continue
            _write_cell(cell, directory)
            cells[(model, fmap)] = cell.report
    text, doc = render_table(cells)
    (directory / "table.txt").write_text(text)
    _dump_json(doc, directory / "table.json")
    return text, doc


def dump_kernel(config: RunConfig, part: str = "train") -> Path:
    sd = load_prepared(config)
    X, idx = (sd.X_train, sd.train_index) if part == "train" else (sd.X_test, sd.test_index)
    spec = config.feature_map_spec(n_features=X.shape[1])
    mode = "shots" if config.shots else "exact"
    gram = gram_matrix(spec, X, mode=mode, shots=config.shots or 1024, seed=config.seed, ids=[str(i) for i in idx])
    return gram.to_csv(_out(config) / f"gram_{config.featuremap}_{part}.csv")
