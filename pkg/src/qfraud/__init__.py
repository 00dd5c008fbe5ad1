"""Quantum machine-learning classifiers for transaction fraud detection.

A small statevector simulator drives fidelity-kernel SVMs and three
variational classifiers over Z, ZZ and Pauli feature maps.
"""
from .config import RunConfig
from .featuremap import FeatureMapSpec, build_feature_map, encode_batch
from .kernel import KernelMatrix, gram_matrix
from .metrics import report
from .optimize import OptimizerConfig, minimize
from .qsim import Circuit, Statevector, run_circuit
from .qsvc import QsvcModel, fit_qsvc, train_qsvc
from .variational import VariationalModel, make_model, train

__all__ = [
    "Circuit", "FeatureMapSpec", "KernelMatrix", "OptimizerConfig", "QsvcModel", "RunConfig",
    "Statevector", "VariationalModel", "build_feature_map", "encode_batch", "fit_qsvc", "gram_matrix",
    "make_model", "minimize", "report", "run_circuit", "train", "train_qsvc",
]
