"""R-vine structure selection, density, simulation, and serialization.

Oracle notes
------------
- Structure selection in d=3 is compared against brute-force enumeration
  of all three spanning trees; the tie-break case is checked against the
  documented lexicographic rule.
- The all-Gaussian d=3 vine density is compared pointwise with the
  trivariate Gaussian copula density computed independently via Cholesky.
- Simulation is validated by simulate-then-fit parameter recovery and by
  reproducing the exact uniforms fed through the inverse-Rosenblatt
  cascade.
"""

import itertools

import numpy as np
import pytest
from scipy import stats

from vineflood.copulas import EPS, PairCopula, kendall_tau
from vineflood.errors import StructureError, ValidationError
from vineflood.synth import build_vine
from vineflood.vine import RVineCopula, _prim_mst, gaussian_vine, independence_vine


def known_3dim_vine():
    return build_vine(
        3,
        [
            ((0, 1), (), PairCopula("gaussian", (0.8,))),
            ((1, 2), (), PairCopula("clayton", (2.0,))),
            ((0, 2), (1,), PairCopula("frank", (2.0,))),
        ],
    )


# ------------------------------------------------------------------ structure
def test_d2_single_edge():
    rng = np.random.default_rng(0)
    u = PairCopula("gaussian", (0.5,)).sample(200, rng)
    m = RVineCopula(families=("gaussian",)).fit(u)
    assert m.tree_edges(1) == ["1,2"]
    assert sum(len(lvl) for lvl in m.trees_) == 1


def test_d3_structure_matches_brute_force():
    # trivariate Gaussian tuned so tau-hat ~ (0.6, 0.5, 0.2)
    R = np.array([[1.0, 0.809, 0.3], [0.809, 1.0, 0.707], [0.3, 0.707, 1.0]])
    L = np.linalg.cholesky(R)
    z = np.random.default_rng(4).standard_normal((2000, 3)) @ L.T
    u = stats.norm.cdf(z)
    taus = {
        (i, j): abs(kendall_tau(u[:, i], u[:, j]))
        for i, j in itertools.combinations(range(3), 2)
    }
    spanning = [[(0, 1), (1, 2)], [(0, 1), (0, 2)], [(0, 2), (1, 2)]]
    best = max(spanning, key=lambda t: sum(taus[e] for e in t))
    assert best == [(0, 1), (1, 2)]

    m = RVineCopula(families=("gaussian",))
    structure = m.select_structure(u)
    assert sorted(c for c, _ in structure[0]) == best
    assert m.tree_edges(1) in (["1,2", "2,3"], ["2,3", "1,2"])


def test_equal_weights_tie_break_gives_star():
    weights = {(i, j): 0.4 for i, j in itertools.combinations(range(5), 2)}
    edges = _prim_mst(range(5), weights)
    assert sorted(edges) == [(0, 1), (0, 2), (0, 3), (0, 4)]


def test_independent_data_all_independence():
    u = np.random.default_rng(7).uniform(size=(2000, 4))
    m = RVineCopula().fit(u)
    assert sum(len(lvl) for lvl in m.trees_) == 6
    assert all(e.copula.family == "independence" for lvl in m.trees_ for e in lvl)
    assert abs(m.loglik_) < 1e-9


def test_simulate_then_fit_recovers_known_vine():
    truth = known_3dim_vine()
    u = truth.simulate(5000, np.random.default_rng(11))
    m = RVineCopula(families=("gaussian", "clayton", "frank")).fit(u)
    assert set(m.tree_edges(1)) == {"1,2", "2,3"}
    assert m.tree_edges(2) == ["1,3;2"]
    by_label = {e.label(): e.copula for lvl in m.trees_ for e in lvl}
    # brackets are truth +/- 3 asymptotic se at n=5000
    assert by_label["1,2"].family == "gaussian"
    assert abs(by_label["1,2"].theta[0] - 0.8) < 0.03
    assert by_label["2,3"].family == "clayton"
    assert abs(by_label["2,3"].theta[0] - 2.0) < 0.25
    assert by_label["1,3;2"].family == "frank"
    assert abs(by_label["1,3;2"].theta[0] - 2.0) < 0.8


def test_structure_assertions_and_validation():
    rng = np.random.default_rng(1)
    with pytest.raises(ValidationError):
        RVineCopula().fit(rng.uniform(size=(20, 3)))  # too few rows
    with pytest.raises(ValidationError):
        RVineCopula().fit(np.full((100, 3), 0.5) + 1e-3 * 0)  # constant columns
    bad = rng.uniform(size=(100, 3))
    bad[0, 0] = 1.5
    with pytest.raises(ValidationError):
        RVineCopula().fit(bad)


# ------------------------------------------------------------------ density
def mvn_copula_logpdf(u, R):
    z = stats.norm.ppf(u)
    L = np.linalg.cholesky(R)
    half = np.linalg.solve(L, z.T)
    logdet = 2.0 * np.sum(np.log(np.diag(L)))
    quad = np.sum(half**2, axis=0) - np.sum(z**2, axis=1)
    return -0.5 * (logdet + quad)


def test_gaussian_vine_density_matches_mvn_oracle():
    m = build_vine(
        3,
        [
            ((0, 1), (), PairCopula("gaussian", (0.5,))),
            ((1, 2), (), PairCopula("gaussian", (0.5,))),
            ((0, 2), (1,), PairCopula("gaussian", (0.0,))),
        ],
    )
    # rho13 = rho12 * rho23 + rho13|2 * sqrt((1-rho12^2)(1-rho23^2)) = 0.25
    R = np.array([[1.0, 0.5, 0.25], [0.5, 1.0, 0.5], [0.25, 0.5, 1.0]])
    g = np.linspace(0.05, 0.95, 7)
    u = np.array(list(itertools.product(g, g, g)))
    np.testing.assert_allclose(m.log_density(u), mvn_copula_logpdf(u, R), atol=1e-8)


def test_log_density_integrates_to_one():
    m = known_3dim_vine()
    g = (np.arange(50) + 0.5) / 50.0
    u = np.array(list(itertools.product(g, g, g)))
    total = np.mean(np.exp(m.log_density(u)))
    assert abs(total - 1.0) < 2e-2


def test_independence_vine_density_zero():
    m = independence_vine(6)
    assert sum(len(lvl) for lvl in m.trees_) == 15
    u = np.random.default_rng(3).uniform(size=(100, 6))
    np.testing.assert_array_equal(m.log_density(u), 0.0)


def test_gaussian_vine_loglik_near_mvn_oracle():
    R = np.array([[1.0, 0.6, 0.3], [0.6, 1.0, 0.5], [0.3, 0.5, 1.0]])
    L = np.linalg.cholesky(R)
    z = np.random.default_rng(9).standard_normal((4000, 3)) @ L.T
    u = stats.norm.cdf(z)
    m = gaussian_vine(u)
    oracle = float(np.sum(mvn_copula_logpdf(u, R)))
    assert abs(m.loglik_ - oracle) < 0.02 * abs(oracle)


def test_gaussian_vine_aic_no_better_than_full():
    u = PairCopula("clayton", (2.0,)).sample(5000, np.random.default_rng(13))
    full = RVineCopula().fit(u)
    gauss = gaussian_vine(u)
    assert gauss.aic_ >= full.aic_


# ------------------------------------------------------------------ simulation
def test_independence_simulation_is_independent_and_uniform():
    m = independence_vine(3)
    u = m.simulate(100_000, np.random.default_rng(17))
    for i, j in itertools.combinations(range(3), 2):
        assert abs(kendall_tau(u[:, i], u[:, j])) < 0.02
    for j in range(3):
        assert stats.kstest(u[:, j], "uniform").pvalue > 0.01


def test_simulation_deterministic_under_seed():
    m = known_3dim_vine()
    a = m.simulate(200, np.random.default_rng(5))
    b = m.simulate(200, np.random.default_rng(5))
    np.testing.assert_array_equal(a, b)


def test_simulated_margins_uniform():
    m = known_3dim_vine()
    u = m.simulate(4000, np.random.default_rng(19))
    for j in range(3):
        assert stats.kstest(u[:, j], "uniform").pvalue > 0.01


def test_conditional_simulate_gaussian_mean_shift():
    m = build_vine(2, [((0, 1), (), PairCopula("gaussian", (0.8,)))])
    u = m.conditional_simulate({0: 0.9}, 10_000, np.random.default_rng(23))
    np.testing.assert_allclose(u[:, 0], 0.9)
    mean = float(np.mean(u[:, 1]))
    se = float(np.std(u[:, 1])) / np.sqrt(len(u))
    assert mean > 0.5 + 10 * se


def test_conditional_simulate_invalid_prefix():
    m = known_3dim_vine()
    # the top-tree edge is 1,3|2, so {1,3} cannot start a sampling order
    with pytest.raises(StructureError):
        m.conditional_simulate({0: 0.5, 2: 0.5}, 10, np.random.default_rng(0))
    # any single variable is a valid prefix
    for j in range(3):
        out = m.conditional_simulate({j: 0.7}, 50, np.random.default_rng(1))
        np.testing.assert_allclose(out[:, j], 0.7)


def test_rosenblatt_reproduces_input_uniforms():
    m = known_3dim_vine()
    n = 200
    u = m.simulate(n, np.random.default_rng(29))
    w = m.rosenblatt(u)
    rng = np.random.default_rng(29)
    expected = np.empty((n, 3))
    for j in m.sampling_order():
        expected[:, j] = rng.uniform(EPS, 1 - EPS, size=n)
    np.testing.assert_allclose(w, expected, atol=1e-8)


def test_truncation_level():
    truth = known_3dim_vine()
    u = truth.simulate(2000, np.random.default_rng(31))
    m = RVineCopula(families=("gaussian", "clayton", "frank"), trunc_level=1).fit(u)
    assert all(e.copula.family == "independence" for e in m.trees_[1])


# ------------------------------------------------------------------ serialization
def test_serialization_round_trip(tmp_path):
    truth = known_3dim_vine()
    u = truth.simulate(1500, np.random.default_rng(37))
    m = RVineCopula(families=("gaussian", "clayton", "frank")).fit(u)
    path = tmp_path / "vine.json"
    m.save(path)
    m2 = RVineCopula.load(path)
    probe = np.random.default_rng(0).uniform(0.05, 0.95, size=(50, 3))
    np.testing.assert_array_equal(m.log_density(probe), m2.log_density(probe))
    for lvl, lvl2 in zip(m.trees_, m2.trees_):
        for e, e2 in zip(lvl, lvl2):
            assert e.conditioned == e2.conditioned
            assert e.conditioning == e2.conditioning
            assert e.copula.family == e2.copula.family
            assert e.copula.theta == e2.copula.theta  # exact float round trip
    assert m2.get_params() == m.get_params()
