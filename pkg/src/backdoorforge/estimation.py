# backdoor adjustment in the linear-Gaussian case: the X coefficient of OLS
# standardised samples report the effect back in original units

"""backdoorforge.estimation

Average treatment effect by backdoor adjustment, and its error against a
known truth.
"""
from __future__ import annotations

import math
from typing import Iterable, Optional, Union

from .errors import GraphInputError
from .models import Dataset
from .stats import CovView, OLSResult, ols


def _check_zstar(allowed: Iterable[str], zstar: Iterable[str]) -> tuple:
    allowed = set(allowed)
    zs = tuple(zstar)
    bad = [z for z in zs if z not in allowed]
    if bad:
        raise GraphInputError(f"adjustment set may only hold Z columns, got {bad}")
    if len(set(zs)) != len(zs):
        raise GraphInputError("adjustment set has duplicates")
    return zs


def backdoor_fit(
    source: Union[Dataset, CovView],
    zstar: Iterable[str] = (),
    *,
    x: Optional[str] = None,
    y: Optional[str] = None,
    ridge: float = 0.0,
) -> OLSResult:
    """OLS of Y on X and the adjustment set.

    Args:
        source: A dataset, or a covariance view (population or sample).
        zstar: Adjustment set (Z column ids).
        x: Treatment label; taken from the dataset roles, "X" for views.
        y: Outcome label; taken from the dataset roles, "Y" for views.
        ridge: Optional diagonal ridge on the regressors.

    Returns:
        The `OLSResult`; the treatment coefficient comes first.
    """
    if isinstance(source, Dataset):
        roles = source.roles()
        x, y = x or roles.x, y or roles.y
        zs = _check_zstar(roles.z, zstar)
    else:
        x, y = x or "X", y or "Y"
        zs = _check_zstar((lbl for lbl in source.labels if lbl not in (x, y)), zstar)
    return ols(source, y, (x, *zs), ridge=ridge)


def backdoor_ate(
    source: Union[Dataset, CovView],
    zstar: Iterable[str] = (),
    *,
    x: Optional[str] = None,
    y: Optional[str] = None,
    original_units: bool = True,
    ridge: float = 0.0,
) -> float:
    """ATE by backdoor adjustment on `zstar`.

    Under a linear SEM and a valid adjustment set, this is the X coefficient
    of `Y ~ X + Z*`, i.e. dE[Y | do(X = x)] / dx.

    Args:
        source: A dataset, or a covariance view (population or sample).
        zstar: Adjustment set (Z column ids).
        x: Treatment label override.
        y: Outcome label override.
        original_units: For standardised datasets, rescale the coefficient by
            `sd(Y) / sd(X)` so it is comparable to the generating SEM.
        ridge: Optional diagonal ridge on the regressors.

    Returns:
        The estimated effect.

    Raises:
        GraphInputError: If `zstar` holds a non-Z column.
        SingularDesignError: If the design is rank deficient.
    """
    fit = backdoor_fit(source, zstar, x=x, y=y, ridge=ridge)
    est = float(fit.coef[0])
    if original_units and isinstance(source, Dataset) and source.standardized:
        xs, ys = fit.labels[0], y or source.roles().y
        scale = source.scale_factors
        est *= float(scale[source.index_of(ys)] / scale[source.index_of(xs)])
    return est


def ate_error(estimate: float, truth: float) -> float:
    """Absolute ATE error `|estimate - truth|` (NaN propagates)."""
    if math.isnan(estimate) or math.isnan(truth):
        return math.nan
    return abs(estimate - truth)
