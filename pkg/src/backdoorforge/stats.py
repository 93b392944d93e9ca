# second moments, regressions and independence tests
# partial correlations have two routes: precision matrix and residuals

"""backdoorforge.stats

Covariance views, OLS, partial correlation and Fisher-z testing.

Everything works on a `CovView`: a labelled covariance matrix with an effective
sample size (`inf` for population covariances). Sample views come from
`sample_cov`; population views from `LinearSem.implied_covariance`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg
from scipy.stats import norm

from .constants import COND_TOL, DEGENERATE_VAR, SYM_TOL
from .errors import (
    ConditioningError,
    DegenerateColumnError,
    DegenerateDirectionError,
    GraphInputError,
    InsufficientSamplesError,
    PopulationViewError,
    SingularDesignError,
)

if TYPE_CHECKING:
    from .models import Dataset


@dataclass(frozen=True, slots=True, eq=False)
class CovView:
    """A labelled covariance matrix.

    Attributes:
        matrix: Symmetric positive-definite array.
        labels: One unique label per row/column.
        n_eff: Sample count behind the matrix (`inf` for population views).
    """

    matrix: np.ndarray
    labels: Tuple[str, ...]
    n_eff: float = float("inf")

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        labels = tuple(str(x) for x in self.labels)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != len(labels):
            raise ValueError("CovView.matrix must be square with one label per row")
        if len(set(labels)) != len(labels):
            raise ValueError("CovView labels must be unique")
        scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
        if not np.allclose(m, m.T, rtol=0.0, atol=SYM_TOL * scale):
            raise ValueError("CovView.matrix must be symmetric")
        m = 0.5 * (m + m.T)
        try:
            np.linalg.cholesky(m)
        except np.linalg.LinAlgError:
            raise ConditioningError(
                "covariance is not positive definite", labels
            ) from None
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "n_eff", float(self.n_eff))

    @property
    def is_population(self) -> bool:
        return math.isinf(self.n_eff)

    def index(self, label: str) -> int:
        """Position of a label.

        Raises:
            GraphInputError: If the label is unknown.
        """
        try:
            return self.labels.index(label)
        except ValueError:
            raise GraphInputError(f"unknown label {label!r}") from None

    def indices(self, labels: Iterable[str]) -> list:
        return [self.index(x) for x in labels]

    def sub(self, labels: Sequence[str]) -> "CovView":
        """Restrict (and reorder) to the given labels."""
        idx = self.indices(labels)
        return CovView(
            matrix=self.matrix[np.ix_(idx, idx)], labels=tuple(labels), n_eff=self.n_eff
        )

    def correlation(self) -> np.ndarray:
        """Correlation matrix of this view."""
        sd = np.sqrt(np.diag(self.matrix))
        return self.matrix / np.outer(sd, sd)


@dataclass(frozen=True, slots=True)
class TestResult:
    """Outcome of a Fisher-z test.

    Attributes:
        statistic: sqrt(n - |s| - 3) * atanh(r).
        p_value: Two-sided p-value.
        reject: Whether `p_value < alpha_used`.
        alpha_used: Significance level applied.
    """

    __test__ = False

    statistic: float
    p_value: float
    reject: bool
    alpha_used: float


@dataclass(frozen=True, slots=True, eq=False)
class OLSResult:
    """Least-squares fit.

    Attributes:
        coef: Coefficients, one per regressor (no intercept entry).
        residual_var: Residual variance (unbiased on samples, exact on populations).
        stderr: Coefficient standard errors (zeros for population fits).
        labels: Regressor labels in coefficient order.
    """

    coef: np.ndarray
    residual_var: float
    stderr: np.ndarray
    labels: Tuple[str, ...]

    def __getitem__(self, label: str) -> float:
        return float(self.coef[self.labels.index(label)])

    def se(self, label: str) -> float:
        return float(self.stderr[self.labels.index(label)])


# --- covariance ---------------------------------------------------------------


def _column_positions(
    data: "Dataset", cols: Optional[Sequence[str]]
) -> Tuple[str, ...]:
    return tuple(data.ids if cols is None else cols)


def sample_cov(data: "Dataset", cols: Optional[Sequence[str]] = None) -> CovView:
    """Unbiased sample covariance (divisor n - 1) over the given columns.

    Args:
        data: Source dataset.
        cols: Column ids (all columns when omitted).

    Returns:
        A `CovView` with `n_eff = data.n`.

    Raises:
        InsufficientSamplesError: If `n < |cols| + 2`.
        DegenerateColumnError: If a column has zero variance.
    """
    labels = _column_positions(data, cols)
    if data.n < len(labels) + 2:
        raise InsufficientSamplesError("sample_cov needs n >= |cols| + 2")
    x = data.matrix[:, [data.index_of(c) for c in labels]]
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / (data.n - 1)
    flat = [labels[k] for k in np.flatnonzero(np.diag(cov) <= 0.0)]
    if flat:
        raise DegenerateColumnError(f"zero-variance column(s): {', '.join(flat)}")
    return CovView(matrix=cov, labels=labels, n_eff=float(data.n))


def streaming_cov(rows: Iterable[np.ndarray]) -> np.ndarray:
    """Single-pass (Welford) unbiased covariance over an iterable of rows.

    Args:
        rows: Iterable of 1-D arrays (or 2-D chunks of rows).

    Returns:
        The p x p covariance matrix.

    Raises:
        InsufficientSamplesError: If fewer than two rows were seen.
    """
    count = 0
    mean: Optional[np.ndarray] = None
    m2: Optional[np.ndarray] = None
    for chunk in rows:
        block = np.atleast_2d(np.asarray(chunk, dtype=float))
        for row in block:
            if mean is None:
                mean = np.zeros_like(row)
                m2 = np.zeros((row.size, row.size))
            count += 1
            delta = row - mean
            mean = mean + delta / count
            m2 = m2 + np.outer(delta, row - mean)
    if count < 2 or m2 is None:
        raise InsufficientSamplesError("streaming_cov needs at least two rows")
    cov = m2 / (count - 1)
    return 0.5 * (cov + cov.T)


# --- partial correlation ------------------------------------------------------


def _checked_submatrix(
    cov: CovView, labels: Sequence[str], ridge: float
) -> np.ndarray:
    idx = cov.indices(labels)
    sub = cov.matrix[np.ix_(idx, idx)].copy()
    if ridge > 0.0:
        sub[np.diag_indices_from(sub)] += ridge
    eig = np.linalg.eigvalsh(sub)
    if eig[0] <= COND_TOL * max(eig[-1], 0.0):
        raise ConditioningError(
            "conditioning submatrix is singular", labels=[x for x in labels]
        )
    return sub


def _check_partial_query(a: str, b: str, s: Sequence[str]) -> None:
    if a == b:
        raise GraphInputError("partial correlation needs two distinct variables")
    if a in s or b in s:
        raise GraphInputError("a and b must not be in the conditioning set")


def partial_corr(
    cov: CovView,
    a: str,
    b: str,
    s: Sequence[str] = (),
    *,
    method: Literal["precision", "residual"] = "precision",
    ridge: float = 0.0,
) -> float:
    """Partial correlation rho(a, b | s).

    The precision route inverts the covariance submatrix on `{a, b} + s` and
    returns `-P_ab / sqrt(P_aa * P_bb)`.

    Args:
        cov: Covariance view.
        a: First variable.
        b: Second variable.
        s: Conditioning set.
        method: "precision" (default) or "residual".
        ridge: Optional diagonal ridge added before inversion (0 = exact).

    Returns:
        A value in [-1, 1].

    Raises:
        ConditioningError: If the submatrix is singular.
    """
    s = tuple(s)
    if method == "residual":
        return partial_corr_residual(cov, a, b, s, ridge=ridge)
    _check_partial_query(a, b, s)
    sub = _checked_submatrix(cov, (a, b) + s, ridge)
    prec = linalg.cho_solve(linalg.cho_factor(sub), np.eye(sub.shape[0]))
    r = -prec[0, 1] / math.sqrt(prec[0, 0] * prec[1, 1])
    return float(np.clip(r, -1.0, 1.0))


def partial_corr_residual(
    cov: CovView, a: str, b: str, s: Sequence[str] = (), *, ridge: float = 0.0
) -> float:
    """Partial correlation as the correlation of residuals after regressing on s."""
    s = tuple(s)
    _check_partial_query(a, b, s)
    sub = _checked_submatrix(cov, (a, b) + s, ridge)
    if not s:
        r = sub[0, 1] / math.sqrt(sub[0, 0] * sub[1, 1])
        return float(np.clip(r, -1.0, 1.0))
    s_ss = sub[2:, 2:]
    s_ab_s = sub[:2, 2:]
    coef = linalg.solve(s_ss, s_ab_s.T, assume_a="pos")
    resid = sub[:2, :2] - s_ab_s @ coef
    r = resid[0, 1] / math.sqrt(resid[0, 0] * resid[1, 1])
    return float(np.clip(r, -1.0, 1.0))


def synthetic_column_cov(
    cov: CovView, beta: np.ndarray, *, phi_label: str = "phi"
) -> CovView:
    """Covariance of (W, Y, X, beta^T Z) from a view ordered (W, Y, X, Z_1..Z_d).

    Args:
        cov: View whose first three labels are W, Y, X and the rest are Z.
        beta: Length-d direction.
        phi_label: Label given to the synthetic column.

    Returns:
        A 4 x 4 `CovView` labelled (W, Y, X, phi).

    Raises:
        DegenerateDirectionError: If Var(beta^T Z) < 1e-12.
    """
    m = contract_phi(cov.matrix, np.asarray(beta, dtype=float))
    return CovView(matrix=m, labels=cov.labels[:3] + (phi_label,), n_eff=cov.n_eff)


def contract_phi(full: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """Raw 4 x 4 contraction `T S T^T` behind `synthetic_column_cov`."""
    d = full.shape[0] - 3
    if d < 1 or beta.shape != (d,):
        raise ValueError("beta must have one entry per Z column (d >= 1)")
    t = np.zeros((4, d + 3))
    t[:3, :3] = np.eye(3)
    t[3, 3:] = beta
    m = t @ full @ t.T
    if m[3, 3] < DEGENERATE_VAR:
        raise DegenerateDirectionError("Var(beta^T Z) is numerically zero")
    return 0.5 * (m + m.T)


# --- regression ---------------------------------------------------------------


def ols(
    source: Union["Dataset", CovView],
    y: str,
    xs: Sequence[str],
    *,
    ridge: float = 0.0,
) -> OLSResult:
    """Least squares of `y` on `xs` (with intercept on samples).

    On a `Dataset`, centred columns are regressed with `scipy.linalg.lstsq`; on a
    `CovView`, the normal equations `Sigma_xx^-1 Sigma_xy` are solved.

    Args:
        source: Dataset or covariance view.
        y: Response label.
        xs: Regressor labels (may be empty).
        ridge: Optional diagonal ridge on the regressor block.

    Returns:
        An `OLSResult`.

    Raises:
        SingularDesignError: If the design is rank deficient.
    """
    xs = tuple(xs)
    if isinstance(source, CovView):
        return _population_ols(source, y, xs, ridge)

    yv = source.column(y)
    yc = yv - yv.mean()
    n = source.n
    if not xs:
        resid_var = float(yc @ yc / (n - 1))
        return OLSResult(np.zeros(0), resid_var, np.zeros(0), xs)
    x = source.matrix[:, [source.index_of(c) for c in xs]]
    xc = x - x.mean(axis=0)
    if ridge > 0.0:
        gram = xc.T @ xc + ridge * (n - 1) * np.eye(len(xs))
        coef = linalg.solve(gram, xc.T @ yc, assume_a="pos")
        rank = len(xs)
    else:
        coef, _, rank, sv = linalg.lstsq(xc, yc)
        if rank < len(xs) or sv[-1] <= COND_TOL * sv[0]:
            raise SingularDesignError(f"design on {list(xs)} is rank deficient")
        gram = xc.T @ xc
    dof = n - len(xs) - 1
    if dof < 1:
        raise SingularDesignError("not enough rows for the design")
    resid = yc - xc @ coef
    resid_var = float(resid @ resid / dof)
    stderr = np.sqrt(np.clip(np.diag(np.linalg.inv(gram)) * resid_var, 0.0, None))
    return OLSResult(np.asarray(coef, dtype=float), resid_var, stderr, xs)


def _population_ols(
    cov: CovView, y: str, xs: Tuple[str, ...], ridge: float
) -> OLSResult:
    iy = cov.index(y)
    if not xs:
        return OLSResult(np.zeros(0), float(cov.matrix[iy, iy]), np.zeros(0), xs)
    try:
        sub = _checked_submatrix(cov, xs, ridge)
    except ConditioningError as exc:
        raise SingularDesignError(f"design on {list(xs)} is rank deficient") from exc
    sxy = cov.matrix[cov.indices(xs), iy]
    coef = linalg.solve(sub, sxy, assume_a="pos")
    resid_var = float(cov.matrix[iy, iy] - sxy @ coef)
    return OLSResult(coef, max(resid_var, 0.0), np.zeros(len(xs)), xs)


# --- testing ------------------------------------------------------------------


def fisher_z_test(r: float, n: float, s_size: int, alpha: float) -> TestResult:
    """Two-sided Fisher-z test of zero (partial) correlation.

    Args:
        r: Sample (partial) correlation.
        n: Sample size.
        s_size: Size of the conditioning set.
        alpha: Significance level.

    Returns:
        A `TestResult`; |r| = 1 gives an infinite statistic and p = 0.

    Raises:
        PopulationViewError: If `n` is infinite (population covariance).
        InsufficientSamplesError: If `n - s_size - 3 < 1`.
        ValueError: If |r| > 1.
    """
    if math.isinf(n):
        raise PopulationViewError("no sampling distribution for a population view")
    dof = n - s_size - 3
    if dof < 1:
        raise InsufficientSamplesError("Fisher-z needs n - s_size - 3 >= 1")
    if abs(r) > 1.0:
        raise ValueError("|r| must be <= 1")
    if abs(r) == 1.0:
        return TestResult(math.copysign(math.inf, r), 0.0, True, alpha)
    stat = math.sqrt(dof) * math.atanh(r)
    p = float(2.0 * norm.sf(abs(stat)))
    return TestResult(stat, p, p < alpha, alpha)


def bonferroni(alpha: float, m: int) -> float:
    """Bonferroni-corrected level `alpha / m`.

    Raises:
        ValueError: If `m < 1`.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    return alpha / m
