import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qfraud.featuremap import FeatureMapSpec, build_feature_map, encode_batch, encode_to_state, index_sets, phi
from qfraud.qsim import probabilities

import oracles

features = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.floats(0, math.pi), min_size=n, max_size=n).map(np.array))


def test_phi_examples():
    assert phi([2], (0.1, 0.2, 0.3, 0.4)) == pytest.approx(0.3)
    assert phi([0, 1], (math.pi, math.pi, 0, 0)) == 0.0
    assert phi([0, 1, 2, 3], (1, 1, 1, 1)) == pytest.approx((math.pi - 1) ** 4)
    assert phi([0, 1, 2, 3], (1, 1, 1, 1)) == pytest.approx(21.03524, abs=1e-5)


def test_phi_rejects_empty_set():
    with pytest.raises(ValueError):
        phi([], (1.0,))


def test_single_feature_z_map_by_hand():
    v = 0.37
    circ = build_feature_map(FeatureMapSpec("z", 1, reps=1), [v])
    assert [(g.kind, g.targets) for g in circ.gates] == [("H", (0,)), ("P", (0,))]
    assert circ.gates[1].angle == pytest.approx(2 * v)
    amps = encode_to_state(FeatureMapSpec("z", 1, reps=1), [v]).amplitudes
    np.testing.assert_allclose(amps, np.array([1, np.exp(2j * v)]) / math.sqrt(2), atol=1e-15)


def test_zz_at_pi_reduces_to_z_map():
    x = [math.pi, math.pi]
    zz = encode_to_state(FeatureMapSpec("zz", 2, reps=1), x).amplitudes
    z = encode_to_state(FeatureMapSpec("z", 2, reps=1), x).amplitudes
    np.testing.assert_allclose(zz, z, atol=1e-12)


@given(st.integers(1, 6), st.integers(1, 4), st.sampled_from(["full", "linear"]))
def test_gate_count_formulas(n, reps, ent):
    x = np.linspace(0.1, 1.0, n)
    z = build_feature_map(FeatureMapSpec("z", n, reps, ent), x)
    assert len(z) == reps * 2 * n
    assert z.two_qubit_count() == 0
    zz = build_feature_map(FeatureMapSpec("zz", n, reps, "full"), x)
    assert len(zz) == reps * (2 * n + 3 * math.comb(n, 2))


def test_linear_entanglement_uses_neighbours():
    assert index_sets(2, 4, "linear") == [(0, 1), (1, 2), (2, 3)]
    assert index_sets(2, 3, "full") == [(0, 1), (0, 2), (1, 2)]
    assert index_sets(1, 3) == [(0,), (1,), (2,)]


@given(features, st.integers(1, 3), st.sampled_from(["z", "zz"]), st.sampled_from(["full", "linear"]))
def test_diagonal_families_match_phase_oracle(x, reps, family, ent):
    n = x.size
    sets = [(i,) for i in range(n)]
    if family == "zz":
        sets += oracles.pairs(n) if ent == "full" else [(i, i + 1) for i in range(n - 1)]
    got = encode_to_state(FeatureMapSpec(family, n, reps, ent), x).amplitudes
    want = oracles.diagonal_phase_state(x, sets, reps)
    assert oracles.equal_up_to_phase(got, want, atol=1e-9)
    if reps == 1:
        np.testing.assert_allclose(np.abs(got), 2 ** (-n / 2), atol=1e-9)


@given(features)
def test_single_rep_z_family_probabilities_are_uniform(x):
    p = probabilities(encode_to_state(FeatureMapSpec("z", x.size, 1), x))
    np.testing.assert_allclose(p, 2.0**-x.size, atol=1e-12)


def test_second_rep_breaks_uniformity():
    # H P(0) H = I, so two reps at x = 0 return |0...0>
    p = probabilities(encode_to_state(FeatureMapSpec("z", 2, 2), [0.0, 0.0]))
    np.testing.assert_allclose(p, [1, 0, 0, 0], atol=1e-12)


def _dense_pauli_map(x, strings, reps, ent):
    """H layer then exp(-i phi_S P_S) = cos(phi) I - i sin(phi) P_S for every placed string."""
    n = len(x)
    dim = 2**n
    Hn = oracles.circuit_unitary([_G("H", (q,)) for q in range(n)], n)
    steps = []
    for word in strings:
        for S in index_sets(len(word), n, ent):
            active = [(q, p) for q, p in zip(S, word) if p != "I"]
            if not active:
                continue
            P = np.eye(dim, dtype=complex)
            for q, p in active:
                P = oracles.full_matrix(p, (q,), n) @ P
            f = oracles.phi([q for q, _ in active], x)
            steps.append(math.cos(f) * np.eye(dim) - 1j * math.sin(f) * P)
    psi = np.zeros(dim, dtype=complex)
    psi[0] = 1
    for _ in range(reps):
        psi = Hn @ psi
        for U in steps:
            psi = U @ psi
    return psi


class _G:
    def __init__(self, kind, targets, angle=None):
        self.kind, self.targets, self.angle = kind, targets, angle


@pytest.mark.parametrize("strings", [("Z", "ZZ"), ("X",), ("Y", "XY"), ("Z", "YZ", "XYZ"), ("ZZZZ",), ("IZ", "XI")])
@pytest.mark.parametrize("ent", ["full", "linear"])
def test_pauli_family_matches_dense_evolution(strings, ent):
    rng = np.random.default_rng(len(strings))
    for _ in range(5):
        x = rng.uniform(0, math.pi, 4)
        spec = FeatureMapSpec("pauli", 4, 2, ent, strings)
        got = encode_to_state(spec, x).amplitudes
        assert oracles.equal_up_to_phase(got, _dense_pauli_map(x, strings, 2, ent), atol=1e-9)


def test_pauli_default_equals_zz():
    x = np.array([0.2, 0.9, 1.4, 0.5])
    np.testing.assert_allclose(encode_to_state(FeatureMapSpec("pauli", 4), x).amplitudes,
                               encode_to_state(FeatureMapSpec("zz", 4), x).amplitudes, atol=1e-14)


@given(features)
def test_encoding_is_normalized_and_deterministic(x):
    spec = FeatureMapSpec("zz", x.size)
    a = encode_to_state(spec, x).amplitudes
    b = encode_to_state(spec, x.copy()).amplitudes
    assert np.array_equal(a, b)
    assert abs(np.sum(np.abs(a) ** 2) - 1) < 1e-9


def test_z_family_injective_on_half_period_grid():
    grid = np.linspace(0.01, math.pi / 2 - 0.01, 40)
    states = encode_batch(FeatureMapSpec("z", 1, reps=2), grid[:, None])
    fid = np.abs(states.conj() @ states.T) ** 2
    for i, j in itertools.combinations(range(grid.size), 2):
        assert fid[i, j] < 1 - 1e-9


def test_encode_batch_matches_single_encodings():
    X = np.random.default_rng(0).uniform(0, math.pi, (5, 3))
    spec = FeatureMapSpec("zz", 3)
    batch = encode_batch(spec, X)
    assert batch.shape == (5, 8)
    for row, x in zip(batch, X):
        np.testing.assert_array_equal(row, encode_to_state(spec, x).amplitudes)


@pytest.mark.parametrize("kwargs", [
    dict(family="zzz"), dict(entanglement="ring"), dict(reps=0), dict(n_features=0),
    dict(family="pauli", pauli_strings=("ZQ",)), dict(family="pauli", n_features=2, pauli_strings=("ZZZ",)),
])
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        FeatureMapSpec(**kwargs)


def test_feature_length_mismatch():
    with pytest.raises(ValueError):
        build_feature_map(FeatureMapSpec("z", 3), [0.1, 0.2])


@given(st.sampled_from(["z", "zz", "pauli"]), st.integers(1, 4), st.integers(1, 3),
       st.sampled_from(["full", "linear"]), st.lists(st.sampled_from(["Z", "X", "ZZ", "YZ"]), min_size=1, max_size=3))
def test_spec_dict_roundtrip(family, n, reps, ent, strings):
    strings = tuple(s for s in strings if len(s) <= n) or ("Z",)
    spec = FeatureMapSpec(family, n, reps, ent, strings)
    assert FeatureMapSpec.from_dict(spec.to_dict()) == spec
