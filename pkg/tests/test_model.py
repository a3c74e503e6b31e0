import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mixprod import (
    MixtureModel,
    ModelClassParams,
    load_model,
    model_distance,
    random_model,
    save_model,
    stat_distance,
    validate_membership,
)
from mixprod.errors import DimensionMismatch, EnumerationLimit, InfeasibleParameters, InvalidModel


def brute_force_distance(a, b):
    best = np.inf
    for perm in itertools.permutations(range(a.k)):
        perm = list(perm)
        d = max(np.abs(a.pi - b.pi[perm]).max(), np.abs(a.m - b.m[:, perm]).max())
        best = min(best, d)
    return float(best)


@st.composite
def model_pairs(draw, max_k=5, max_n=4):
    k = draw(st.integers(1, max_k))
    n = draw(st.integers(1, max_n))
    seeds = draw(st.tuples(st.integers(0, 2**32), st.integers(0, 2**32)))
    return tuple(_random_raw(k, n, s) for s in seeds)


def _random_raw(k, n, seed):
    rng = np.random.default_rng(seed)
    return MixtureModel(rng.dirichlet(np.ones(k)), rng.uniform(size=(n, k)))


# -- MixtureModel invariants ------------------------------------------------------------


def test_model_invariants_reject_bad_inputs():
    with pytest.raises(InvalidModel):
        MixtureModel([0.5, 0.6], [[0.1, 0.2]])
    with pytest.raises(InvalidModel):
        MixtureModel([0.5, 0.5], [[0.1, 1.2]])
    with pytest.raises(InvalidModel):
        MixtureModel([1.5, -0.5], [[0.1, 0.2]])
    with pytest.raises(InvalidModel):
        MixtureModel([0.5, 0.5], [[0.1, 0.2, 0.3]])
    with pytest.raises(InvalidModel):
        MixtureModel([0.5, 0.5], [[0.1, np.nan]])


def test_simplex_tolerance_is_absolute_1e12():
    MixtureModel([0.5, 0.5 + 5e-13], [[0.0, 1.0]])
    with pytest.raises(InvalidModel):
        MixtureModel([0.5, 0.5 + 5e-12], [[0.0, 1.0]])


def test_model_arrays_are_read_only(two_component):
    with pytest.raises(ValueError):
        two_component.m[0, 0] = 0.5


def test_json_round_trip(tmp_path, two_component):
    path = tmp_path / "model.json"
    save_model(two_component, path)
    data = json.loads(path.read_text())
    assert set(data) == {"k", "n", "pi", "m"}
    assert data["k"] == 2 and data["n"] == 3
    back = load_model(path)
    assert np.array_equal(back.pi, two_component.pi)
    assert np.array_equal(back.m, two_component.m)


def test_json_declared_dimensions_are_checked():
    with pytest.raises(InvalidModel):
        MixtureModel.from_dict({"k": 3, "n": 1, "pi": [0.5, 0.5], "m": [[0.1, 0.2]]})


# -- validate_membership ----------------------------------------------------------------


def test_membership_examples():
    m = [[0.2, 0.8]]
    assert validate_membership(MixtureModel([0.5, 0.5], m), ModelClassParams(0.5, 0.3))

    report = validate_membership(MixtureModel([0.95, 0.05], m), ModelClassParams(0.5, 0.1))
    assert not report
    assert report.violation == ("pi", 1)

    report = validate_membership(
        MixtureModel([1 / 3, 1 / 3, 1 / 3], [[0.1, 0.15, 0.9]]), ModelClassParams(0.1, 0.01)
    )
    assert not report
    assert report.violation == ("separation", 0, 0, 1)


def test_model_class_params_invariants():
    with pytest.raises(InfeasibleParameters):
        ModelClassParams(0.0, 0.1)
    with pytest.raises(InfeasibleParameters):
        ModelClassParams(0.1, 0.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(1, 6), st.integers(0, 2**32), st.data())
def test_membership_is_monotone_in_params(k, n, seed, data):
    zeta = data.draw(st.floats(0.01, 1.0 / max(k - 1, 1)))
    pi_min = data.draw(st.floats(0.01, 1.0 / k))
    model = random_model(k, n, zeta, pi_min, seed)
    assert validate_membership(model, ModelClassParams(zeta, pi_min))
    shrink = data.draw(st.floats(0.01, 1.0))
    assert validate_membership(model, ModelClassParams(zeta * shrink, pi_min * shrink))


# -- model_distance ---------------------------------------------------------------------


def test_model_distance_examples(two_component):
    assert model_distance(two_component, two_component) == 0.0
    assert model_distance(two_component, two_component.permute_columns([1, 0])) == 0.0
    a = MixtureModel([0.5, 0.5], [[0.2, 0.8]])
    b = MixtureModel([0.4, 0.6], [[0.2, 0.8]])
    assert model_distance(a, b) == pytest.approx(0.1, abs=1e-15)


def test_model_distance_errors():
    a = MixtureModel([0.5, 0.5], [[0.2, 0.8]])
    with pytest.raises(DimensionMismatch):
        model_distance(a, MixtureModel([1.0], [[0.2]]))
    with pytest.raises(DimensionMismatch):
        model_distance(a, MixtureModel([0.5, 0.5], [[0.2, 0.8], [0.1, 0.1]]))
    big = MixtureModel(np.full(11, 1 / 11), np.zeros((1, 11)))
    with pytest.raises(EnumerationLimit, match="enumeration limit"):
        model_distance(big, big)


@settings(max_examples=80, deadline=None)
@given(model_pairs())
def test_model_distance_matches_brute_force(pair):
    a, b = pair
    assert model_distance(a, b) == brute_force_distance(a, b)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32))
def test_model_distance_is_a_pseudometric(k, seed):
    a, b, c = (_random_raw(k, 3, seed + i) for i in range(3))
    assert model_distance(a, b) == pytest.approx(model_distance(b, a), abs=1e-12)
    assert model_distance(a, c) <= model_distance(a, b) + model_distance(b, c) + 1e-12
    perm = np.random.default_rng(seed).permutation(k)
    assert model_distance(a, a.permute_columns(perm)) == 0.0


# -- stat_distance ----------------------------------------------------------------------


def test_stat_distance_examples():
    from mixprod import MomentVector

    mu = MomentVector(1, [1.0, 0.5])
    assert stat_distance(mu, mu) == 0.0
    assert stat_distance(mu, MomentVector(1, [1.0, 0.7])) == pytest.approx(0.2)
    vals = np.random.default_rng(0).uniform(size=8)
    vals[0] = 1.0
    shifted = vals + 1e-3
    shifted[0] = 1.0
    assert stat_distance(MomentVector(3, vals), MomentVector(3, shifted)) == pytest.approx(1e-3, rel=1e-9)
    with pytest.raises(DimensionMismatch):
        stat_distance(mu, MomentVector(2, np.ones(4)))


# -- random_model -----------------------------------------------------------------------


def test_random_model_examples():
    model = random_model(1, 1, 1.0, 1.0, 0)
    assert model.pi.tolist() == [1.0]
    assert 0.0 <= model.m[0, 0] <= 1.0

    for seed in range(5):
        assert random_model(2, 3, 0.5, 0.5, seed).pi.tolist() == [0.5, 0.5]

    a = random_model(4, 7, 0.1, 0.05, 42)
    b = random_model(4, 7, 0.1, 0.05, 42)
    assert np.array_equal(a.pi, b.pi) and np.array_equal(a.m, b.m)


def test_random_model_infeasible():
    with pytest.raises(InfeasibleParameters):
        random_model(3, 2, 0.6, 0.1, 0)
    with pytest.raises(InfeasibleParameters):
        random_model(3, 2, 0.1, 0.4, 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.integers(1, 8), st.integers(0, 2**63), st.data())
def test_random_model_is_in_class(k, n, seed, data):
    zeta = data.draw(st.floats(1e-3, 1.0 / max(k - 1, 1)))
    pi_min = data.draw(st.floats(1e-3, 1.0 / k))
    model = random_model(k, n, zeta, pi_min, seed)
    assert model.k == k and model.n == n
    assert validate_membership(model, ModelClassParams(zeta, pi_min))
