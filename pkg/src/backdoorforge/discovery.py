# the differentiable adjustment-set search
# everything runs on the (W, Y, X, Z) covariance, the data are never touched
# inside the optimizer; beta^T Z enters only through a 4 x 4 contraction

"""backdoorforge.discovery

Learn a sparse linear summary `phi(Z) = beta^T Z` of the candidate covariates
such that the auxiliary variable W is independent of Y given X and phi, while
W stays dependent on Y given phi alone. The support of beta is the adjustment
set Z*.

The objective, for `beta = gamma / ||gamma||_2`, is

    |rho(W, Y | X, phi)| - lambda1 |rho(W, Y | phi)| + lambda2 ||beta||_1

and is minimised by gradient descent with a backtracking line search and an
analytic gradient. `optimize` wraps the inner solve (`minimize`) in a lambda2
ladder driven by Fisher-z tests; `tune` picks lambda1, eta and the initial
gamma by cross validation.

Inputs are `CovView`s whose labels are ordered (W, Y, X, Z_1..Z_d); build them
with `discovery_view` (samples) or `population_view` (SEMs).
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from .constants import (
    DEFAULT_ALPHA,
    LAMBDA2_GROWTH,
    LAMBDA2_INIT,
    LAMBDA2_ROUNDS,
    SMOOTH_EPS,
)
from .errors import (
    ConditioningError,
    ConfigError,
    DegenerateDirectionError,
    NonDifferentiablePointError,
    SingularDesignError,
)
from .models import Dataset, RoleMap
from .sem import LinearSem
from .stats import (
    CovView,
    bonferroni,
    contract_phi,
    fisher_z_test,
    ols,
    partial_corr,
    sample_cov,
    synthetic_column_cov,
)

logger = logging.getLogger(__name__)

InitSpec = Union[str, int, Tuple[float, ...]]
Lambda2Rule = Literal["constraint", "quoted"]
LAMBDA2_RULES: Tuple[str, ...] = ("constraint", "quoted")

GAMMA_TOL = 1e-12
MAX_HALVINGS = 40

# (W, Y) are always the first two positions of the contracted 4 x 4 matrix
_DEP_KEEP = (0, 1, 2, 3)  # condition on X and phi
_AUX_KEEP = (0, 1, 3)  # condition on phi only


@dataclass(frozen=True, slots=True)
class DiscoveryConfig:
    """Hyperparameters of the discovery optimizer.

    Attributes:
        lambda1: Weight on the auxiliary-dependence reward (>= 0).
        lambda2: Initial sparsity weight (>= 0).
        lambda2_growth: Multiplier applied per lambda2 round (> 1).
        lambda2_rounds: Maximum number of lambda2 rounds.
        lambda2_rule: "constraint" stops the ladder once rho(W, Y | phi) = 0 is
            rejected; "quoted" keeps growing lambda2 while it is rejected.
        eta: Initial (and maximum) step size (> 0).
        max_iters: Iteration cap of one inner solve.
        grad_tol: Stop once the gradient norm drops below this.
        momentum: Heavy-ball coefficient in [0, 1); 0 is plain descent.
        init_gamma: "ols", an integer seed (random direction) or a vector.
        alpha_test: Family-wise level of the lambda2 ladder tests.
        support_threshold: |beta_i| above this selects Z_i; None means
            1 / (4 sqrt(d)).
        cv_folds: Folds used by `tune` (>= 2).
        seed: Seed for the random fallback of the "ols" initialisation.
        constraint_level: Dependence level of the constrained formulation.
            Recorded only; the Lagrangian path does not read it.
        sparsity_budget: l1 budget of the constrained formulation. Recorded only.
    """

    lambda1: float = 0.1
    lambda2: float = LAMBDA2_INIT
    lambda2_growth: float = LAMBDA2_GROWTH
    lambda2_rounds: int = LAMBDA2_ROUNDS
    lambda2_rule: Lambda2Rule = "constraint"
    eta: float = 0.5
    max_iters: int = 500
    grad_tol: float = 1e-7
    momentum: float = 0.0
    init_gamma: InitSpec = "ols"
    alpha_test: float = DEFAULT_ALPHA
    support_threshold: Optional[float] = None
    cv_folds: int = 3
    seed: int = 0
    constraint_level: Optional[float] = None
    sparsity_budget: Optional[float] = None

    def __post_init__(self) -> None:
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ConfigError("lambda1 and lambda2 must be >= 0")
        if self.lambda2_growth <= 1.0:
            raise ConfigError("lambda2_growth must be > 1")
        if self.lambda2_rounds < 1:
            raise ConfigError("lambda2_rounds must be >= 1")
        if self.lambda2_rule not in LAMBDA2_RULES:
            raise ConfigError(f"lambda2_rule must be one of {LAMBDA2_RULES}")
        if self.eta <= 0:
            raise ConfigError("eta must be > 0")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be >= 1")
        if self.grad_tol < 0:
            raise ConfigError("grad_tol must be >= 0")
        if not 0.0 <= self.momentum < 1.0:
            raise ConfigError("momentum must be in [0, 1)")
        if not 0.0 < self.alpha_test < 1.0:
            raise ConfigError("alpha_test must be in (0, 1)")
        if self.support_threshold is not None and not 0.0 <= self.support_threshold < 1:
            raise ConfigError("support_threshold must be in [0, 1)")
        if self.cv_folds < 2:
            raise ConfigError("cv_folds must be >= 2")

        init = self.init_gamma
        if isinstance(init, str):
            if init != "ols":
                raise ConfigError("init_gamma must be 'ols', a seed or a vector")
        elif isinstance(init, (bool, float)):
            raise ConfigError("init_gamma must be 'ols', a seed or a vector")
        elif not isinstance(init, (int, np.integer)):
            vec = tuple(float(v) for v in init)
            if not vec or not any(vec):
                raise ConfigError("init_gamma vector must be non-empty and non-zero")
            object.__setattr__(self, "init_gamma", vec)
        else:
            object.__setattr__(self, "init_gamma", int(init))

    def threshold_for(self, d: int) -> float:
        """Support threshold used for `d` covariates."""
        if self.support_threshold is not None:
            return self.support_threshold
        return 0.25 / math.sqrt(d)

    def init_key(self) -> str:
        """Sortable text key of `init_gamma` (used to break ties in `tune`)."""
        init = self.init_gamma
        if isinstance(init, str):
            return init
        if isinstance(init, int):
            return f"seed:{init:020d}"
        return "vec:" + ",".join(f"{v:.12g}" for v in init)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        if isinstance(self.init_gamma, tuple):
            data["init_gamma"] = list(self.init_gamma)
        return data

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "DiscoveryConfig":
        """Build a config from `to_dict()` output (unknown keys rejected).

        Raises:
            ConfigError: On unknown keys or invalid values.
        """
        known = set(DiscoveryConfig.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown DiscoveryConfig keys: {sorted(extra)}")
        kwargs = dict(data)
        if isinstance(kwargs.get("init_gamma"), list):
            kwargs["init_gamma"] = tuple(kwargs["init_gamma"])
        return DiscoveryConfig(**kwargs)


@dataclass(frozen=True, slots=True)
class ObjectiveTerms:
    """Unweighted objective terms at one beta.

    Attributes:
        dep_term: |rho(W, Y | X, phi)|.
        aux_dep_term: |rho(W, Y | phi)|.
        l1_term: ||beta||_1.
    """

    dep_term: float
    aux_dep_term: float
    l1_term: float

    def value(self, lambda1: float, lambda2: float) -> float:
        return self.dep_term - lambda1 * self.aux_dep_term + lambda2 * self.l1_term


@dataclass(frozen=True, slots=True, eq=False)
class MinimizeResult:
    """Outcome of one inner gradient-descent solve.

    Attributes:
        gamma: Final (unnormalised) parameter.
        beta: `gamma / ||gamma||`.
        value: Objective at `beta`.
        terms: Term breakdown at `beta`.
        trace: Objective at the start point and at every accepted iterate.
        iterations: Accepted steps.
        converged: False only when `max_iters` was hit.
        reason: "gradient", "line_search" or "max_iters".
    """

    gamma: np.ndarray
    beta: np.ndarray
    value: float
    terms: ObjectiveTerms
    trace: Tuple[float, ...]
    iterations: int
    converged: bool
    reason: str


@dataclass(frozen=True, slots=True, eq=False)
class DiscoveryResult:
    """Outcome of `optimize`.

    Attributes:
        beta: Unit-norm direction over the Z columns of the view.
        selected: Positions (into Z) with |beta_i| > threshold.
        selected_ids: Column ids of `selected`.
        objective_terms: Term breakdown at `beta`.
        objective: Objective value at `beta` under the final lambda2.
        trace: Objective values of all accepted iterates, over all rounds.
        tests_run: Fisher-z tests spent by the lambda2 ladder.
        converged: Whether the inner solve and the ladder both terminated.
        lambda2: lambda2 of the returned round.
        rounds: Number of lambda2 rounds run.
        threshold: Support threshold applied.
        config: The configuration used.
    """

    beta: np.ndarray
    selected: Tuple[int, ...]
    selected_ids: Tuple[str, ...]
    objective_terms: ObjectiveTerms
    objective: float
    trace: Tuple[float, ...]
    tests_run: int
    converged: bool
    lambda2: float
    rounds: int
    threshold: float
    config: DiscoveryConfig = field(default_factory=DiscoveryConfig)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "beta": [float(v) for v in self.beta],
            "selected": list(self.selected),
            "selected_ids": list(self.selected_ids),
            "objective_terms": asdict(self.objective_terms),
            "objective": self.objective,
            "trace": list(self.trace),
            "tests_run": self.tests_run,
            "converged": self.converged,
            "lambda2": self.lambda2,
            "rounds": self.rounds,
            "threshold": self.threshold,
            "config": self.config.to_dict(),
        }

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "DiscoveryResult":
        return DiscoveryResult(
            beta=np.asarray(data["beta"], dtype=float),
            selected=tuple(int(i) for i in data["selected"]),
            selected_ids=tuple(str(i) for i in data["selected_ids"]),
            objective_terms=ObjectiveTerms(**data["objective_terms"]),
            objective=float(data["objective"]),
            trace=tuple(float(v) for v in data["trace"]),
            tests_run=int(data["tests_run"]),
            converged=bool(data["converged"]),
            lambda2=float(data["lambda2"]),
            rounds=int(data["rounds"]),
            threshold=float(data["threshold"]),
            config=DiscoveryConfig.from_dict(data["config"]),
        )


# --- views --------------------------------------------------------------------


def arrange(cov: CovView, roles: RoleMap) -> CovView:
    """Reorder a covariance view to (W, Y, X, Z_1..Z_d).

    Raises:
        GraphInputError: If there is no W or a label is missing.
        ConfigError: If there are no Z columns.
    """
    if not roles.z:
        raise ConfigError("discovery needs at least one candidate covariate")
    return cov.sub((roles.require_w(), roles.y, roles.x, *roles.z))


def discovery_view(data: Dataset) -> CovView:
    """Sample covariance of a dataset, arranged for discovery."""
    roles = data.roles()
    view = sample_cov(data, (roles.require_w(), roles.y, roles.x, *roles.z))
    return arrange(view, roles)


def population_view(sem: LinearSem) -> CovView:
    """Exact covariance of the observed nodes of an SEM, arranged for discovery."""
    return arrange(sem.population_dataset_view(), sem.graph.roles())


def _d(cov: CovView) -> int:
    d = cov.matrix.shape[0] - 3
    if d < 1:
        raise ConfigError("discovery needs at least one candidate covariate")
    return d


# --- objective and gradient ---------------------------------------------------


def _unit(gamma: np.ndarray, d: int) -> Tuple[np.ndarray, float]:
    g = np.asarray(gamma, dtype=float)
    if g.shape != (d,):
        raise ValueError(f"gamma must have length {d}")
    norm = float(np.linalg.norm(g))
    if not norm > GAMMA_TOL:
        raise NonDifferentiablePointError("gamma must be non-zero")
    return g / norm, norm


def _pcorr_with_grad(
    m: np.ndarray, keep: Sequence[int], labels: Sequence[str]
) -> Tuple[float, np.ndarray]:
    """rho(first, second | rest of keep) and its gradient w.r.t. `m`.

    With P the inverse of the kept submatrix, p_a, p_b its first two columns,
    `drho = sum(G * dM)` for the symmetric
    `G = p_a p_b^T / sqrt(P_aa P_bb) + rho/2 (p_a p_a^T / P_aa + p_b p_b^T / P_bb)`.
    """
    idx = list(keep)
    sub = m[np.ix_(idx, idx)]
    try:
        prec = linalg.cho_solve(linalg.cho_factor(sub), np.eye(len(idx)))
    except linalg.LinAlgError:
        raise ConditioningError(
            "conditioning submatrix is singular", [labels[k] for k in idx]
        ) from None
    paa, pbb = prec[0, 0], prec[1, 1]
    root = math.sqrt(paa * pbb)
    r = float(np.clip(-prec[0, 1] / root, -1.0, 1.0))
    pa, pb = prec[:, 0], prec[:, 1]
    g = np.outer(pa, pb) / root + 0.5 * r * (
        np.outer(pa, pa) / paa + np.outer(pb, pb) / pbb
    )
    full = np.zeros_like(m)
    full[np.ix_(idx, idx)] = 0.5 * (g + g.T)
    return r, full


def _evaluate(
    full: np.ndarray,
    labels: Sequence[str],
    gamma: np.ndarray,
    lambda1: float,
    lambda2: float,
    with_grad: bool = True,
) -> Tuple[float, ObjectiveTerms, Optional[np.ndarray]]:
    d = full.shape[0] - 3
    beta, norm = _unit(gamma, d)
    m = contract_phi(full, beta)
    r1, g1 = _pcorr_with_grad(m, _DEP_KEEP, labels)
    r2, g2 = _pcorr_with_grad(m, _AUX_KEEP, labels)
    terms = ObjectiveTerms(abs(r1), abs(r2), float(np.abs(beta).sum()))
    value = terms.value(lambda1, lambda2)
    if not with_grad:
        return value, terms, None

    # |r| ~ sqrt(r^2 + eps^2)
    s1 = r1 / math.hypot(r1, SMOOTH_EPS)
    s2 = r2 / math.hypot(r2, SMOOTH_EPS)
    gm = s1 * g1 - lambda1 * s2 * g2

    # M = T S T^T with beta in row 3 of T
    t = np.zeros((4, d + 3))
    t[:3, :3] = np.eye(3)
    t[3, 3:] = beta
    g_beta = 2.0 * (gm @ t @ full)[3, 3:] + lambda2 * np.sign(beta)
    # chain rule through beta = gamma / ||gamma||
    g_gamma = (g_beta - beta * float(beta @ g_beta)) / norm
    return value, terms, g_gamma


def objective(
    cov: CovView, gamma: np.ndarray, lambda1: float, lambda2: float
) -> Tuple[float, ObjectiveTerms]:
    """Exact (unsmoothed) objective and its terms.

    Args:
        cov: View ordered (W, Y, X, Z_1..Z_d).
        gamma: Length-d parameter; only its direction matters.
        lambda1: Auxiliary-dependence weight.
        lambda2: Sparsity weight.

    Returns:
        `(value, terms)`.

    Raises:
        NonDifferentiablePointError: If gamma is zero.
        DegenerateDirectionError: If Var(beta^T Z) is numerically zero.
        ConditioningError: If a conditioning set is singular.
    """
    beta, _ = _unit(gamma, _d(cov))
    phi = synthetic_column_cov(cov, beta)
    w, y, x, p = phi.labels
    terms = ObjectiveTerms(
        dep_term=abs(partial_corr(phi, w, y, (x, p))),
        aux_dep_term=abs(partial_corr(phi, w, y, (p,))),
        l1_term=float(np.abs(beta).sum()),
    )
    return terms.value(lambda1, lambda2), terms


def gradient(
    cov: CovView, gamma: np.ndarray, lambda1: float, lambda2: float
) -> np.ndarray:
    """Analytic gradient of the objective with respect to gamma.

    |rho| is smoothed as sqrt(rho^2 + 1e-16); the l1 subgradient is 0 where
    beta_i = 0. The result is orthogonal to gamma.

    Raises:
        NonDifferentiablePointError: If gamma is zero.
    """
    _d(cov)
    _, _, g = _evaluate(cov.matrix, cov.labels, gamma, lambda1, lambda2)
    assert g is not None
    return g


# --- solvers ------------------------------------------------------------------


def minimize(
    cov: CovView,
    gamma0: np.ndarray,
    *,
    lambda1: float,
    lambda2: float,
    eta: float,
    max_iters: int,
    grad_tol: float = 1e-7,
    momentum: float = 0.0,
) -> MinimizeResult:
    """Gradient descent with a backtracking line search at fixed weights.

    A step is accepted only if the exact objective strictly decreases; the step
    is halved (up to 40 times) until it does, and the next step starts from
    twice the accepted one, capped at `eta`. gamma is never renormalised inside
    the loop.

    Args:
        cov: View ordered (W, Y, X, Z_1..Z_d).
        gamma0: Start point.
        lambda1: Auxiliary-dependence weight.
        lambda2: Sparsity weight.
        eta: Maximum step size.
        max_iters: Iteration cap.
        grad_tol: Gradient-norm stopping tolerance.
        momentum: Heavy-ball coefficient (0 = plain descent).

    Returns:
        A `MinimizeResult`; the last iterate is also the best.
    """
    _d(cov)
    full, labels = cov.matrix, cov.labels
    gamma = np.asarray(gamma0, dtype=float).copy()
    value, terms, grad = _evaluate(full, labels, gamma, lambda1, lambda2)
    trace = [value]
    velocity = np.zeros_like(gamma)
    step = eta
    reason = "max_iters"
    iterations = 0

    for _ in range(max_iters):
        assert grad is not None
        if float(np.linalg.norm(grad)) < grad_tol:
            reason = "gradient"
            break
        accepted = False
        trial = step
        v = momentum * velocity
        for _ in range(MAX_HALVINGS):
            v_new = v - trial * grad
            cand = gamma + v_new
            try:
                cand_value, cand_terms, cand_grad = _evaluate(
                    full, labels, cand, lambda1, lambda2
                )
            except (
                DegenerateDirectionError,
                NonDifferentiablePointError,
                ConditioningError,
            ):
                cand_value = math.inf
            if cand_value < value:
                accepted = True
                break
            trial *= 0.5
            # fall back to plain descent once the momentum step fails
            v = np.zeros_like(v)
        if not accepted:
            reason = "line_search"
            break
        gamma, velocity = cand, v_new
        value, terms, grad = cand_value, cand_terms, cand_grad
        trace.append(value)
        iterations += 1
        step = min(eta, 2.0 * trial)

    logger.debug(
        "minimize stopped: %s after %d steps, f=%.3g", reason, iterations, value
    )
    beta = gamma / np.linalg.norm(gamma)
    return MinimizeResult(
        gamma=gamma,
        beta=beta,
        value=value,
        terms=terms,
        trace=tuple(trace),
        iterations=iterations,
        converged=reason != "max_iters",
        reason=reason,
    )


def initial_gamma(cov: CovView, init: InitSpec = "ols", seed: int = 0) -> np.ndarray:
    """Resolve an `init_gamma` spec into a start vector.

    "ols" is the regression coefficient of Y on Z given X, falling back to a
    random unit vector drawn from `seed` when that is singular or zero; an int
    is a random unit vector from that seed; a vector is used as given.

    Raises:
        ConfigError: If an explicit vector has the wrong length or is zero.
    """
    d = _d(cov)
    labels = cov.labels
    if isinstance(init, str):
        try:
            fit = ols(cov, labels[1], (labels[2], *labels[3:]))
            g = fit.coef[1:]
        except SingularDesignError:
            g = np.zeros(d)
        norm = float(np.linalg.norm(g))
        if norm > GAMMA_TOL:
            return g / norm
        logger.debug("ols initialisation degenerate, using a random direction")
        init = seed
    if isinstance(init, (int, np.integer)):
        v = np.random.default_rng(int(init)).standard_normal(d)
        return v / np.linalg.norm(v)
    vec = np.asarray(init, dtype=float)
    if vec.shape != (d,) or not np.any(vec):
        raise ConfigError(f"init_gamma must be a non-zero vector of length {d}")
    return vec


def _aux_dependence(cov: CovView, beta: np.ndarray) -> float:
    phi = synthetic_column_cov(cov, beta)
    w, y, _, p = phi.labels
    return partial_corr(phi, w, y, (p,))


def optimize(cov: CovView, config: DiscoveryConfig) -> DiscoveryResult:
    """Run the discovery optimizer with the lambda2 ladder.

    Each round runs `minimize` (warm-started from the previous round) and then,
    on sample views, tests rho(W, Y | phi) = 0 with Fisher-z at
    `alpha_test / tests_run`. Under the "constraint" rule the ladder stops once
    the null is rejected; under "quoted" it stops once it is not. Otherwise
    lambda2 is multiplied by `lambda2_growth`. Population views run one round.

    Args:
        cov: View ordered (W, Y, X, Z_1..Z_d).
        config: Hyperparameters.

    Returns:
        A `DiscoveryResult`; `converged` is False when a round hit `max_iters`
        or the ladder ran out of rounds. Never raises for non-convergence.
    """
    d = _d(cov)
    gamma = initial_gamma(cov, config.init_gamma, config.seed)
    lam2 = config.lambda2
    trace: List[float] = []
    tests_run = 0
    ladder_done = False
    rounds = 0
    res: Optional[MinimizeResult] = None

    for rounds in range(1, config.lambda2_rounds + 1):
        res = minimize(
            cov,
            gamma,
            lambda1=config.lambda1,
            lambda2=lam2,
            eta=config.eta,
            max_iters=config.max_iters,
            grad_tol=config.grad_tol,
            momentum=config.momentum,
        )
        trace.extend(res.trace)
        gamma = res.gamma
        if cov.is_population:
            ladder_done = True
            break

        tests_run += 1
        r = _aux_dependence(cov, res.beta)
        test = fisher_z_test(r, cov.n_eff, 1, bonferroni(config.alpha_test, tests_run))
        logger.info(
            "lambda2 round %d: lambda2=%.3g f=%.4g p=%.3g reject=%s",
            rounds,
            lam2,
            res.value,
            test.p_value,
            test.reject,
        )
        stop = test.reject if config.lambda2_rule == "constraint" else not test.reject
        if stop:
            ladder_done = True
            break
        if rounds < config.lambda2_rounds:
            lam2 *= config.lambda2_growth

    assert res is not None
    converged = res.converged and ladder_done
    if not converged:
        logger.warning(
            "discovery did not converge (inner=%s, ladder_done=%s)",
            res.reason,
            ladder_done,
        )
    thr = config.threshold_for(d)
    selected = tuple(int(i) for i in np.flatnonzero(np.abs(res.beta) > thr))
    z_ids = cov.labels[3:]
    return DiscoveryResult(
        beta=res.beta,
        selected=selected,
        selected_ids=tuple(z_ids[i] for i in selected),
        objective_terms=res.terms,
        objective=res.value,
        trace=tuple(trace),
        tests_run=tests_run,
        converged=converged,
        lambda2=lam2,
        rounds=rounds,
        threshold=thr,
        config=config,
    )


def discover(
    data: Dataset, config: Optional[DiscoveryConfig] = None
) -> DiscoveryResult:
    """Convenience wrapper: `optimize(discovery_view(data), config)`."""
    return optimize(discovery_view(data), config or DiscoveryConfig())


# --- tuning -------------------------------------------------------------------


def make_grid(
    base: DiscoveryConfig,
    lambda1: Sequence[float] = (),
    eta: Sequence[float] = (),
    init_gamma: Sequence[InitSpec] = (),
) -> List[DiscoveryConfig]:
    """Cartesian product of hyperparameter values over a base config.

    Empty sequences keep the base value.
    """
    grid = []
    for l1 in lambda1 or (base.lambda1,):
        for e in eta or (base.eta,):
            for init in init_gamma or (base.init_gamma,):
                grid.append(
                    replace(base, lambda1=float(l1), eta=float(e), init_gamma=init)
                )
    return grid


def _heldout_score(fit: CovView, held: CovView, cfg: DiscoveryConfig) -> float:
    try:
        gamma0 = initial_gamma(fit, cfg.init_gamma, cfg.seed)
        res = minimize(
            fit,
            gamma0,
            lambda1=cfg.lambda1,
            lambda2=cfg.lambda2,
            eta=cfg.eta,
            max_iters=cfg.max_iters,
            grad_tol=cfg.grad_tol,
            momentum=cfg.momentum,
        )
        phi = synthetic_column_cov(held, res.beta)
    except (ConditioningError, DegenerateDirectionError, NonDifferentiablePointError):
        return math.inf
    w, y, x, p = phi.labels
    return abs(partial_corr(phi, w, y, (x, p)))


def fold_assignment(n: int, k: int, seed: int) -> np.ndarray:
    """Deterministic fold label (0..k-1) per row, balanced to within one."""
    perm = np.random.default_rng(seed).permutation(n)
    folds = np.empty(n, dtype=int)
    folds[perm] = np.arange(n) % k
    return folds


def tune(
    train: Dataset,
    grid: Sequence[DiscoveryConfig],
    *,
    valid: Optional[Dataset] = None,
    seed: int = 0,
    workers: int = 1,
) -> DiscoveryConfig:
    """Pick the grid point with the lowest held-out |rho(W, Y | X, phi)|.

    Each point is fitted with `minimize` at its own lambda2 (no ladder). Scores
    come from k-fold CV on `train` (k = `grid[0].cv_folds`), or from `valid`
    when given. Ties go to the smaller lambda1, then the smaller eta, then the
    smaller `init_key()`.

    Args:
        train: Training rows.
        grid: Candidate configurations.
        valid: Optional validation split.
        seed: Seed of the fold assignment.
        workers: Threads used to score grid points.

    Returns:
        The selected configuration (the only one, when the grid has one).

    Raises:
        ConfigError: If the grid is empty.
    """
    grid = list(grid)
    if not grid:
        raise ConfigError("tune needs a non-empty grid")
    if len(grid) == 1:
        return grid[0]

    if valid is not None:
        pairs = [(discovery_view(train), discovery_view(valid))]
    else:
        k = grid[0].cv_folds
        folds = fold_assignment(train.n, k, seed)
        pairs = [
            (
                discovery_view(train.select_rows(np.flatnonzero(folds != f))),
                discovery_view(train.select_rows(np.flatnonzero(folds == f))),
            )
            for f in range(k)
        ]

    def score(cfg: DiscoveryConfig) -> float:
        return float(np.mean([_heldout_score(fit, held, cfg) for fit, held in pairs]))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scores = list(pool.map(score, grid))
    else:
        scores = [score(cfg) for cfg in grid]

    best = min(
        range(len(grid)),
        key=lambda i: (scores[i], grid[i].lambda1, grid[i].eta, grid[i].init_key()),
    )
    logger.debug("tune scores: %s; picked %d", scores, best)
    return grid[best]
