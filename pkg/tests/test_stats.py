"""Tests for covariance views, partial correlation, OLS and Fisher-z testing."""
from __future__ import annotations

import math

import numpy as np
import pytest
from oracles import random_spd

from backdoorforge.errors import (
    ConditioningError,
    DegenerateColumnError,
    DegenerateDirectionError,
    InsufficientSamplesError,
    PopulationViewError,
    SingularDesignError,
)
from backdoorforge.generation import sample_data
from backdoorforge.models import Column, Dataset
from backdoorforge.stats import (
    CovView,
    bonferroni,
    fisher_z_test,
    ols,
    partial_corr,
    sample_cov,
    streaming_cov,
    synthetic_column_cov,
)


def _labels(p: int):
    return tuple(f"v{k}" for k in range(p))


def test_partial_corr_routes_agree():
    """Precision-matrix and residual partial correlations coincide."""
    rng = np.random.default_rng(0)
    for _ in range(100):
        p = int(rng.integers(3, 13))
        view = CovView(random_spd(rng, p), _labels(p))
        k = int(rng.integers(0, p - 1))
        s = view.labels[2 : 2 + k]
        a = partial_corr(view, "v0", "v1", s)
        b = partial_corr(view, "v0", "v1", s, method="residual")
        assert a == pytest.approx(b, abs=1e-10)
        assert -1.0 <= a <= 1.0


def test_partial_corr_without_conditioning_is_correlation():
    """With an empty set the partial correlation is the plain correlation."""
    view = CovView(np.array([[4.0, 1.0], [1.0, 1.0]]), ("a", "b"))
    assert partial_corr(view, "a", "b") == pytest.approx(0.5)
    assert view.correlation()[0, 1] == pytest.approx(0.5)


def test_singular_conditioning_set_raises():
    """A duplicated conditioning column cannot be inverted."""
    m = np.array(
        [[1.0, 0.2, 0.3, 0.3], [0.2, 1.0, 0.1, 0.1], [0.3, 0.1, 1.0, 1.0],
         [0.3, 0.1, 1.0, 1.0]]
    )
    view = CovView.__new__(CovView)
    object.__setattr__(view, "matrix", m)
    object.__setattr__(view, "labels", ("a", "b", "c", "d"))
    object.__setattr__(view, "n_eff", math.inf)
    with pytest.raises(ConditioningError):
        partial_corr(view, "a", "b", ("c", "d"))


def test_cov_view_requires_positive_definite():
    """Views reject asymmetric or rank-deficient matrices."""
    with pytest.raises(ValueError):
        CovView(np.array([[1.0, 0.5], [0.0, 1.0]]), ("a", "b"))
    with pytest.raises(ConditioningError):
        CovView(np.ones((2, 2)), ("a", "b"))


def test_sample_cov_and_streaming_agree(two_equation_sem):
    """Batch and single-pass covariances match; constant columns are rejected."""
    data = sample_data(two_equation_sem, 300, seed=1)
    view = sample_cov(data)
    assert view.n_eff == 300
    np.testing.assert_allclose(view.matrix, np.cov(data.matrix, rowvar=False))
    chunks = np.array_split(data.matrix, 7)
    np.testing.assert_allclose(streaming_cov(chunks), view.matrix, atol=1e-10)

    flat = Dataset(
        matrix=np.column_stack([np.ones(10), np.arange(10.0)]),
        columns=(Column("X", "X"), Column("Y", "Y")),
    )
    with pytest.raises(DegenerateColumnError):
        sample_cov(flat)
    with pytest.raises(InsufficientSamplesError):
        sample_cov(flat.select_rows(np.arange(3)))
    with pytest.raises(InsufficientSamplesError):
        streaming_cov([data.matrix[:1]])


def test_synthetic_column_matches_explicit_column(two_equation_sem):
    """The contracted covariance equals the covariance of beta^T Z computed."""
    data = sample_data(two_equation_sem, 400, seed=2)
    z = data.roles().z
    view = sample_cov(data, ("W", "Y", "X", *z))
    beta = np.array([0.3, -0.2, 0.5, 0.1, 0.7])
    phi = data.matrix[:, [data.index_of(c) for c in z]] @ beta
    explicit = np.cov(
        np.column_stack([data.column("W"), data.column("Y"), data.column("X"), phi]),
        rowvar=False,
    )
    synth = synthetic_column_cov(view, beta)
    assert synth.labels == ("W", "Y", "X", "phi")
    np.testing.assert_allclose(synth.matrix, explicit, atol=1e-10)
    with pytest.raises(DegenerateDirectionError):
        synthetic_column_cov(view, np.zeros(5))


def test_population_ols_recovers_coefficients(two_equation_sem):
    """Y on (X, Z) over the population view returns the structural coefficients."""
    view = two_equation_sem.population_dataset_view()
    z = two_equation_sem.graph.ids_with_role("Z")
    fit = ols(view, "Y", ("X", *z))
    assert fit["X"] == pytest.approx(0.5)
    np.testing.assert_allclose(fit.coef[1:], [1.2, -0.9, 0.7, 0.0, 0.0], atol=1e-12)
    assert fit.residual_var == pytest.approx(1.0)


def test_sample_ols_with_intercept_and_singular_design(two_equation_sem):
    """Sample OLS centres columns and rejects collinear designs."""
    data = sample_data(two_equation_sem, 5000, seed=3)
    fit = ols(data, "X", ("W",))
    assert fit["W"] == pytest.approx(1.0, abs=0.1)
    assert fit.se("W") > 0

    dup = Dataset(
        matrix=np.column_stack([data.column("W"), data.column("W"), data.column("X")]),
        columns=(Column("W", "W"), Column("Z_a", "Z"), Column("X", "X")),
    )
    with pytest.raises(SingularDesignError):
        ols(dup, "X", ("W", "Z_a"))
    ridged = ols(dup, "X", ("W", "Z_a"), ridge=1e-3)
    assert ridged["W"] == pytest.approx(ridged["Z_a"])


def test_fisher_z_edge_cases():
    """|r| = 1 rejects outright; population views have no test."""
    res = fisher_z_test(1.0, 100, 2, 0.05)
    assert res.reject and res.p_value == 0.0 and math.isinf(res.statistic)
    assert not fisher_z_test(0.0, 100, 2, 0.05).reject
    with pytest.raises(PopulationViewError):
        fisher_z_test(0.1, math.inf, 0, 0.05)
    with pytest.raises(InsufficientSamplesError):
        fisher_z_test(0.1, 4, 2, 0.05)
    with pytest.raises(ValueError):
        fisher_z_test(1.5, 100, 2, 0.05)
    assert bonferroni(0.05, 5) == pytest.approx(0.01)


def test_fisher_z_statistic_value():
    """r = 0.1 with n = 10000 and two conditioning variables gives z of 10.03."""
    res = fisher_z_test(0.1, 10_000, 2, 0.05)
    assert res.statistic == pytest.approx(math.sqrt(9995) * math.atanh(0.1))
    assert res.statistic == pytest.approx(10.03, abs=0.01)
    assert res.reject and res.p_value < 1e-20


def test_fisher_z_is_calibrated_under_the_null():
    """Rejection rate of a true conditional independence is close to alpha."""
    rng = np.random.default_rng(42)
    n, trials = 2000, 2000
    labels = ("a", "b", "s0", "s1", "s2")
    rejections = 0
    for _ in range(trials):
        x = rng.standard_normal((n, 5))
        view = CovView(np.cov(x, rowvar=False), labels, n_eff=n)
        r = partial_corr(view, "a", "b", ("s0", "s1", "s2"))
        rejections += fisher_z_test(r, n, 3, 0.05).reject
    assert 0.03 <= rejections / trials <= 0.08
