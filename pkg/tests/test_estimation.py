"""Tests for backdoor adjustment and the ATE error."""
from __future__ import annotations

import math
from itertools import combinations

import numpy as np
import pytest
from oracles import random_dag, random_sem

from backdoorforge.errors import GraphInputError, SingularDesignError
from backdoorforge.estimation import ate_error, backdoor_ate, backdoor_fit
from backdoorforge.generation import sample_data, standardize_dataset
from backdoorforge.graph import is_valid_backdoor_set
from backdoorforge.presets import build_nhs_graph, make_nhs_sem, nhs_adjustment_set


def test_valid_sets_recover_omega_in_the_population():
    """Every valid adjustment set returns the X -> Y coefficient exactly."""
    rng = np.random.default_rng(11)
    valid_seen = 0
    for _ in range(50):
        g = random_dag(rng, int(rng.integers(4, 8)), force_treatment=True)
        sem = random_sem(rng, g)
        view = sem.population_dataset_view()
        z = g.ids_with_role("Z")
        for k in range(len(z) + 1):
            for s in combinations(z, k):
                if is_valid_backdoor_set(g, s):
                    valid_seen += 1
                    assert backdoor_ate(view, s) == pytest.approx(sem.omega, abs=1e-10)
    assert valid_seen > 50


def test_nhs_documented_set_recovers_omega():
    """The staff-survey fixture: the documented set is exact, adding Z1_0 is not."""
    sem = make_nhs_sem(omega=0.3)
    view = sem.population_dataset_view()
    zstar = nhs_adjustment_set()
    assert backdoor_ate(view, zstar) == pytest.approx(0.3, abs=1e-10)
    assert backdoor_ate(view, zstar + ("Z1_0",)) != pytest.approx(0.3, abs=1e-4)
    assert len(build_nhs_graph().ids_with_role("Z")) == 20


def test_nhs_naive_adjustments_are_far_off():
    """Both naive sets miss omega by a wide margin on the staff-survey fixture."""
    sem = make_nhs_sem(omega=0.3)
    view = sem.population_dataset_view()
    every_item = build_nhs_graph().ids_with_role("Z")
    assert abs(backdoor_ate(view, every_item) - 0.3) > 0.2
    assert abs(backdoor_ate(view) - 0.3) > 0.4


def test_empty_set_is_the_marginal_slope(textbook_sem):
    """With no adjustment the estimate is Cov(X, Y) / Var(X)."""
    view = textbook_sem.population_dataset_view()
    assert backdoor_ate(view) == pytest.approx(2.5 / 3.0)
    fit = backdoor_fit(view, ("Z",))
    assert fit.labels == ("X", "Z")
    assert fit["X"] == pytest.approx(0.5)


def test_standardised_estimates_return_to_original_units(two_equation_sem):
    """Rescaling by sd(Y) / sd(X) undoes the standardisation exactly."""
    raw = sample_data(two_equation_sem, 3000, seed=1)
    std = standardize_dataset(raw)
    zstar = ("Z_0", "Z_1", "Z_2")
    assert backdoor_ate(std, zstar) == pytest.approx(backdoor_ate(raw, zstar))
    ratio = backdoor_ate(std, zstar, original_units=False) / backdoor_ate(raw, zstar)
    sd = raw.matrix.std(axis=0, ddof=1)
    assert ratio == pytest.approx(sd[raw.index_of("X")] / sd[raw.index_of("Y")])


def test_adjustment_set_validation(two_equation_sem):
    """Non-Z members and duplicates are input errors."""
    data = sample_data(two_equation_sem, 200, seed=2)
    with pytest.raises(GraphInputError):
        backdoor_ate(data, ("W",))
    with pytest.raises(GraphInputError):
        backdoor_ate(data, ("Z_0", "Z_0"))


def test_singular_design_needs_a_ridge(two_equation_sem):
    """A covariate identical to X makes the design singular."""
    from backdoorforge.models import Column, Dataset

    data = sample_data(two_equation_sem, 200, seed=3)
    clone = Dataset(
        matrix=np.column_stack([data.matrix, data.column("X")]),
        columns=data.columns + (Column("Z_copy", "Z"),),
    )
    with pytest.raises(SingularDesignError):
        backdoor_ate(clone, ("Z_copy",))
    assert math.isfinite(backdoor_ate(clone, ("Z_copy",), ridge=1e-3))


def test_ate_error():
    """Absolute difference, with NaN propagating."""
    assert ate_error(0.7, 0.5) == pytest.approx(0.2)
    assert ate_error(0.3, 0.5) == pytest.approx(0.2)
    assert math.isnan(ate_error(math.nan, 0.5))


def test_error_shrinks_as_the_sample_grows(two_equation_sem):
    """Quadrupling n roughly halves the mean error of a valid adjustment."""
    zstar = ("Z_0", "Z_1", "Z_2")

    def mean_error(n: int) -> float:
        samples = [sample_data(two_equation_sem, n, seed=s) for s in range(50)]
        errs = [ate_error(backdoor_ate(d, zstar), 0.5) for d in samples]
        return float(np.mean(errs))

    assert mean_error(2000) < 0.75 * mean_error(500)
