"""BankSim-schema transactions: loading, cleaning, encoding, analysis and splitting.

Raw BankSim files look like::

    "step","customer","age","gender","zipcodeOri","merchant","zipMerchant","category","amount","fraud"
    0,'C1093826151','4','M','28007','M348934600','28007','es_transportation',4.55,0

String fields may carry single quotes; they are stripped on load.
"""
from __future__ import annotations

import csv
import math
import re
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .rng import make_rng

COLUMNS = ("step", "customer", "age", "gender", "zipcodeOri", "merchant", "zipMerchant", "category", "amount", "fraud")
FEATURE_COLUMNS = COLUMNS[:-1]
SELECTED = ("age", "gender", "category", "amount")
UNKNOWN_AGE = 7
# x -> P(2x) repeats with period pi, so [0, pi/2] is the widest injective range
DEFAULT_FEATURE_MAX = math.pi / 2

CATEGORIES = (
    "es_barsandrestaurants", "es_contents", "es_fashion", "es_food", "es_health",
    "es_home", "es_hotelservices", "es_hyper", "es_leisure", "es_otherservices",
    "es_sportsandtoys", "es_tech", "es_transportation", "es_travel", "es_wellnessandbeauty",
)
AGES = ("0", "1", "2", "3", "4", "5", "6", "U")
GENDERS = ("E", "F", "M", "U")

# class-conditional amount statistics of the BankSim data
FRAUD_AMOUNT = (567.23, 128.47)
NORMAL_AMOUNT = (145.68, 50.32)


class SchemaError(ValueError):
    pass


class RowError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


@dataclass(frozen=True)
class RawTransaction:
    step: int
    customer: str
    age: str
    gender: str
    zipcodeOri: str
    merchant: str
    zipMerchant: str
    category: str
    amount: float
    fraud: int


def _unquote(v: str) -> str:
    return v.strip().strip("'\"")


def load_csv(path) -> list[RawTransaction]:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [_unquote(h) for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: missing header row") from None
        missing = [c for c in COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column {missing[0]!r}")
        pos = {c: header.index(c) for c in COLUMNS}
        rows = []
        for line, rec in enumerate(reader, start=2):
            if not rec:
                continue
            vals = {c: _unquote(rec[pos[c]]) if pos[c] < len(rec) else "" for c in COLUMNS}
            try:
                amount = float(vals["amount"])
            except ValueError:
                raise RowError(line, f"unparsable amount {vals['amount']!r}") from None
            if not math.isfinite(amount) or amount < 0:
                raise RowError(line, f"amount must be finite and >= 0, got {amount}")
            try:
                fraud = int(vals["fraud"])
                step = int(vals["step"])
            except ValueError:
                raise RowError(line, "step and fraud must be integers") from None
            if fraud not in (0, 1):
                raise RowError(line, f"fraud must be 0 or 1, got {fraud}")
            rows.append(RawTransaction(
                step=step, customer=vals["customer"], age=vals["age"], gender=vals["gender"],
                zipcodeOri=vals["zipcodeOri"], merchant=vals["merchant"], zipMerchant=vals["zipMerchant"],
                category=vals["category"], amount=amount, fraud=fraud,
            ))
    return rows


def write_csv(rows, path) -> Path:
    """Write rows in the quoted BankSim layout."""
    path = Path(path)
    quoted = {"customer", "age", "gender", "zipcodeOri", "merchant", "zipMerchant", "category"}
    with path.open("w", newline="") as fh:
        fh.write(",".join(f'"{c}"' for c in COLUMNS) + "\n")
        for r in rows:
            d = asdict(r)
            fh.write(",".join(f"'{d[c]}'" if c in quoted else repr(d[c]) if c == "amount" else str(d[c])
                              for c in COLUMNS) + "\n")
    return path


_DIGITS = re.compile(r"\d+")


def clean_age(raw: str) -> int:
    token = _unquote(str(raw))
    if token.upper() == "U":
        return UNKNOWN_AGE
    m = _DIGITS.search(token)
    if m is None:
        raise ValueError(f"age token {raw!r} has no digits")
    return int(m.group())


def encode_labels(values) -> tuple[list[int], list[str]]:
    values = [str(v) for v in values]
    if not values:
        raise ValueError("need at least one value")
    vocab = sorted(set(values))
    lookup = {v: i for i, v in enumerate(vocab)}
    return [lookup[v] for v in values], vocab


def decode_labels(codes, vocab) -> list[str]:
    return [vocab[c] for c in codes]


def balanced_subset(rows, n_per_class: int, seed: int) -> list[RawTransaction]:
    rng = make_rng(seed, "balanced_subset")
    picked = []
    for label in (0, 1):
        pool = [r for r in rows if r.fraud == label]
        if len(pool) < n_per_class:
            raise ValueError(f"class {label} has {len(pool)} rows, need {n_per_class}")
        idx = rng.choice(len(pool), size=n_per_class, replace=False)
        picked.extend(pool[i] for i in sorted(idx))
    order = rng.permutation(len(picked))
    return [picked[i] for i in order]


def encode_rows(rows, columns=SELECTED) -> tuple[np.ndarray, np.ndarray, dict[str, list[str]]]:
    """Numeric matrix for ``columns`` plus labels and the categorical vocabularies."""
    vocabs = {}
    cols = []
    for c in columns:
        raw = [getattr(r, c) for r in rows]
        if c == "age":
            cols.append([float(clean_age(v)) for v in raw])
        elif c in ("amount", "step"):
            cols.append([float(v) for v in raw])
        else:
            codes, vocab = encode_labels(raw)
            vocabs[c] = vocab
            cols.append([float(v) for v in codes])
    X = np.array(cols, dtype=float).T.reshape(len(rows), len(columns))
    y = np.array([r.fraud for r in rows], dtype=int)
    return X, y, vocabs


@dataclass(frozen=True)
class MinMaxScaling:
    """Per-feature affine map onto [0, upper] fitted on training data.

    Values outside the fitted range are clipped; a constant column maps to 0.
    """

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    upper: float = DEFAULT_FEATURE_MAX

    @classmethod
    def fit(cls, X, upper: float = DEFAULT_FEATURE_MAX) -> "MinMaxScaling":
        X = np.asarray(X, dtype=float)
        if not 0 < upper <= math.pi:
            raise ValueError("upper must be in (0, pi]")
        return cls(tuple(X.min(axis=0).tolist()), tuple(X.max(axis=0).tolist()), float(upper))

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        lo, hi = np.array(self.lo), np.array(self.hi)
        span = hi - lo
        safe = np.where(span > 0, span, 1.0)
        out = np.clip((X - lo) / safe, 0.0, 1.0) * self.upper
        out[..., span <= 0] = 0.0
        return out


def scale_features(X, upper: float = DEFAULT_FEATURE_MAX) -> tuple[np.ndarray, MinMaxScaling]:
    scaling = MinMaxScaling.fit(X, upper)
    return scaling.transform(X), scaling


@dataclass
class SplitDataset:
    X_train: np.ndarray
    y_train: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray
    train_index: np.ndarray
    test_index: np.ndarray
    scaling: MinMaxScaling


def stratified_indices(y, test_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must be in (0, 1)")
    y = np.asarray(y)
    rng = make_rng(seed, "split")
    train, test = [], []
    for label in np.unique(y):
        idx = np.flatnonzero(y == label)
        n_test = int(round(idx.size * test_fraction))
        if n_test < 1 or n_test >= idx.size:
            raise ValueError(f"split would leave class {label} empty in one partition")
        perm = rng.permutation(idx)
        test.extend(perm[:n_test].tolist())
        train.extend(perm[n_test:].tolist())
    return np.array(sorted(train)), np.array(sorted(test))


def split(X, y, test_fraction: float = 0.2, seed: int = 0,
          feature_max: float = DEFAULT_FEATURE_MAX) -> SplitDataset:
    """Stratified split; the feature scaling is fitted on the training part only."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if len(np.unique(y)) < 2:
        raise ValueError("both classes are required")
    tr, te = stratified_indices(y, test_fraction, seed)
    scaling = MinMaxScaling.fit(X[tr], feature_max)
    return SplitDataset(scaling.transform(X[tr]), y[tr], scaling.transform(X[te]), y[te], tr, te, scaling)


def _standardize(X):
    X = np.asarray(X, dtype=float)
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    Z = np.zeros_like(X)
    ok = sd > 1e-12
    Z[:, ok] = (X[:, ok] - mu[ok]) / sd[ok]
    return Z, ok


def pca_rank(X, names, standardize: bool = True) -> list[tuple[str, float]]:
    """Rank features by |loading| summed over components, weighted by explained variance.

    Columns are standardized first unless ``standardize`` is False, in which
    case they are only centred and large-scale columns dominate. Zero-variance
    columns get weight 0 and sort last. Returns ``(name, weight)`` pairs,
    weights summing to 1.
    """
    X = np.asarray(X, dtype=float)
    if X.shape[0] < 2:
        raise ValueError("need at least two rows")
    if len(names) != X.shape[1]:
        raise ValueError("one name per column required")
    Z, ok = _standardize(X)
    if not standardize:
        Z = np.where(ok, X - X.mean(axis=0), 0.0)
    cov = np.cov(Z, rowvar=False).reshape(X.shape[1], X.shape[1])
    evals, evecs = np.linalg.eigh(cov)
    evals = np.clip(evals, 0.0, None)
    total = evals.sum()
    ratio = evals / total if total > 0 else evals
    weight = np.abs(evecs) @ ratio
    weight[~ok] = 0.0
    if weight.sum() > 0:
        weight = weight / weight.sum()
    order = sorted(range(len(names)), key=lambda i: (-round(weight[i], 12), i))
    return [(names[i], float(weight[i])) for i in order]


def correlation_matrix(X) -> np.ndarray:
    """Pearson correlations; a constant column correlates 0 with everything but itself."""
    X = np.asarray(X, dtype=float)
    if X.shape[0] < 2:
        raise ValueError("need at least two rows")
    Z, ok = _standardize(X)
    C = (Z.T @ Z) / X.shape[0]
    C = np.clip(0.5 * (C + C.T), -1.0, 1.0)
    np.fill_diagonal(C, 1.0)
    return C


def _fraud_weights(choices, named: dict[str, float]) -> np.ndarray:
    rest = [c for c in choices if c not in named]
    left = (1.0 - sum(named.values())) / len(rest)
    return np.array([named.get(c, left) for c in choices])


def _truncated_normal(rng, mean, std, size) -> np.ndarray:
    out = rng.normal(mean, std, size)
    bad = out < 0
    while bad.any():
        out[bad] = rng.normal(mean, std, bad.sum())
        bad = out < 0
    return out


def synthesize(n_per_class: int, seed: int) -> list[RawTransaction]:
    """Balanced BankSim-like transactions drawn from the published class statistics.

    Fraud rows follow the reported age, gender and category shares and the
    N(567.23, 128.47) amount law; normal rows use N(145.68, 50.32) and flat
    categorical shares. Amounts are truncated at zero by resampling.
    """
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    rng = make_rng(seed, "synthesize")
    profiles = {
        1: dict(
            age=_fraud_weights(AGES, {"2": 0.45, "3": 0.32}),
            gender=_fraud_weights(GENDERS, {"F": 0.56, "M": 0.34}),
            category=_fraud_weights(CATEGORIES, {"es_sportsandtoys": 0.20, "es_health": 0.15}),
            amount=FRAUD_AMOUNT,
        ),
        0: dict(
            age=np.full(len(AGES), 1.0 / len(AGES)),
            gender=_fraud_weights(GENDERS, {"F": 0.45, "M": 0.45}),
            category=np.full(len(CATEGORIES), 1.0 / len(CATEGORIES)),
            amount=NORMAL_AMOUNT,
        ),
    }
    rows = []
    for label in (0, 1):
        p = profiles[label]
        ages = rng.choice(AGES, size=n_per_class, p=p["age"])
        genders = rng.choice(GENDERS, size=n_per_class, p=p["gender"])
        cats = rng.choice(CATEGORIES, size=n_per_class, p=p["category"])
        amounts = np.round(_truncated_normal(rng, *p["amount"], n_per_class), 2)
        steps = rng.integers(0, 180, n_per_class)
        customers = rng.integers(10**8, 10**10, n_per_class)
        merchants = rng.integers(10**8, 10**10, n_per_class)
        for k in range(n_per_class):
            rows.append(RawTransaction(
                step=int(steps[k]), customer=f"C{customers[k]}", age=str(ages[k]), gender=str(genders[k]),
                zipcodeOri="28007", merchant=f"M{merchants[k]}", zipMerchant="28007",
                category=str(cats[k]), amount=float(amounts[k]), fraud=label,
            ))
    order = rng.permutation(len(rows))
    return [rows[i] for i in order]
