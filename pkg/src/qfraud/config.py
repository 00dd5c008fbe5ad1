"""Run configuration shared by the CLI and the experiment scripts."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .featuremap import FAMILIES, FeatureMapSpec
from .optimize import OptimizerConfig

MODELS = ("qsvc", "vqc", "eqnn", "sqnn")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    source: str = "synthetic"  # "synthetic" or a BankSim CSV path
    n_per_class: int = 100
    test_fraction: float = 0.2
    feature_max: float = math.pi / 2
    featuremap: str = "z"
    reps: int = 2
    entanglement: str = "full"
    pauli_strings: tuple[str, ...] = ("Z", "ZZ")
    model: str = "qsvc"
    C: float = 1.0
    ansatz_reps: int = 3
    loss: str = "cross_entropy"
    optimizer: str = "cobyla"
    maxiter: int = 200
    rho_begin: float = 0.5
    rho_end: float = 1e-4
    shots: int = 0
    seed: int = 0
    out: str = "runs"

    def __post_init__(self):
        object.__setattr__(self, "pauli_strings", tuple(self.pauli_strings))
        if self.featuremap not in FAMILIES:
            raise ConfigError(f"unknown featuremap {self.featuremap!r}; choose from {{{', '.join(FAMILIES)}}}")
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {{{', '.join(MODELS)}}}")
        if self.n_per_class < 1:
            raise ConfigError("n_per_class must be >= 1")
        if not 0 < self.test_fraction < 1:
            raise ConfigError("test_fraction must be in (0, 1)")
        if not 0 < self.feature_max <= math.pi:
            raise ConfigError("feature_max must be in (0, pi]")
        if self.shots < 0:
            raise ConfigError("shots must be >= 0")
        try:
            self.optimizer_config()
            self.feature_map_spec()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def feature_map_spec(self, family: str | None = None, n_features: int = 4) -> FeatureMapSpec:
        return FeatureMapSpec(family or self.featuremap, n_features, self.reps, self.entanglement, self.pauli_strings)

    def optimizer_config(self) -> OptimizerConfig:
        return OptimizerConfig(self.optimizer, self.maxiter, self.rho_begin, self.rho_end, self.seed)

    def replace(self, **changes) -> "RunConfig":
        d = self.to_dict()
        d.update(changes)
        return RunConfig.from_dict(d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pauli_strings"] = list(self.pauli_strings)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(self.to_json())
        return path

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            d = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(d, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_dict(d)
