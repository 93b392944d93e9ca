# comparison estimators: no adjustment, adjust for everything, and a
# subset search certified by the auxiliary variable

"""backdoorforge.baselines

Baseline estimators the discovery method is benchmarked against.

- `marginal_ate`: regression of Y on X alone.
- `allz_ate`: regression of Y on X and every candidate covariate.
- `entner_search`: greedy or random search for a subset S of Z with
  W independent of Y given S and X, and W dependent on Y given S, judged by
  Fisher-z tests at a Bonferroni-corrected level.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Literal, Optional, Sequence, Set, Tuple

import numpy as np

from .constants import DEFAULT_ALPHA, ENTNER_BUDGET
from .errors import ConditioningError, ConfigError, SingularDesignError
from .estimation import backdoor_ate
from .models import Dataset
from .stats import CovView, bonferroni, fisher_z_test, partial_corr, sample_cov

logger = logging.getLogger(__name__)

Strategy = Literal["greedy", "random"]


def marginal_ate(data: Dataset) -> float:
    """OLS coefficient of X in `Y ~ X`."""
    return backdoor_ate(data, ())


def allz_ate(data: Dataset, *, ridge: float = 0.0) -> float:
    """OLS coefficient of X in `Y ~ X + Z` over all candidate covariates.

    Args:
        data: Observed dataset.
        ridge: Optional diagonal ridge when the design is ill conditioned.

    Raises:
        SingularDesignError: If the design is rank deficient and `ridge == 0`.
    """
    return backdoor_ate(data, data.roles().z, ridge=ridge)


@dataclass(frozen=True, slots=True)
class EntnerConfig:
    """Settings of the auxiliary-variable subset search.

    Attributes:
        alpha: Family-wise significance level.
        max_subset_size: Largest subset considered (None means d).
        budget: Maximum number of subsets tested (>= 1).
        strategy: "greedy" or "random".
        seed: Seed of the random strategy.
    """

    alpha: float = DEFAULT_ALPHA
    max_subset_size: Optional[int] = None
    budget: int = ENTNER_BUDGET
    strategy: Strategy = "greedy"
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must be in (0, 1)")
        if self.budget < 1:
            raise ConfigError("budget must be >= 1")
        if self.max_subset_size is not None and self.max_subset_size < 0:
            raise ConfigError("max_subset_size must be >= 0")
        if self.strategy not in ("greedy", "random"):
            raise ConfigError("strategy must be 'greedy' or 'random'")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "EntnerConfig":
        return EntnerConfig(**data)


@dataclass(frozen=True, slots=True)
class EntnerResult:
    """Outcome of `entner_search`.

    Attributes:
        zstar: Accepted subset (all Z when not certified).
        ate: Backdoor estimate on `zstar`.
        certified: Whether some subset passed both tests.
        tests_run: Fisher-z tests performed (the Bonferroni denominator).
        subsets_tested: Subsets evaluated.
    """

    zstar: Tuple[str, ...]
    ate: float
    certified: bool
    tests_run: int
    subsets_tested: int

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["zstar"] = list(self.zstar)
        return data


class _Certifier:
    """Runs the two Entner tests and keeps the Bonferroni count."""

    def __init__(self, cov: CovView, w: str, x: str, y: str, alpha: float):
        self.cov = cov
        self.w, self.x, self.y = w, x, y
        self.alpha = alpha
        self.tests_run = 0

    def _test(self, s: Tuple[str, ...], alpha: Optional[float] = None) -> bool:
        self.tests_run += 1
        level = alpha if alpha is not None else bonferroni(self.alpha, self.tests_run)
        r = partial_corr(self.cov, self.w, self.y, s)
        return fisher_z_test(r, self.cov.n_eff, len(s), level).reject

    def holds(self, s: Tuple[str, ...], alpha: Optional[float] = None) -> bool:
        """Independence given S + X is kept and dependence given S is rejected."""
        try:
            if self._test(s + (self.x,), alpha):
                return False
            return self._test(s, alpha)
        except ConditioningError:
            return False

    def score(self, s: Tuple[str, ...]) -> float:
        """|rho(W, Y | S + X)|, used to rank greedy candidates (not a test)."""
        return abs(partial_corr(self.cov, self.w, self.y, s + (self.x,)))


def _search_greedy(
    z: Sequence[str], cert: _Certifier, max_size: int, budget: int
) -> Tuple[Optional[Tuple[str, ...]], int]:
    s: Tuple[str, ...] = ()
    tested = 0
    while tested < budget:
        tested += 1
        if cert.holds(s):
            return s, tested
        if len(s) >= max_size:
            break
        best: Optional[Tuple[float, str]] = None
        for c in z:
            if c in s:
                continue
            try:
                sc = cert.score(s + (c,))
            except ConditioningError:
                continue
            if best is None or sc < best[0]:
                best = (sc, c)
        if best is None:
            break
        s = s + (best[1],)
        logger.debug("greedy adds %s (score %.4g)", best[1], best[0])
    return None, tested


def _search_random(
    z: Sequence[str], cert: _Certifier, max_size: int, budget: int, seed: int
) -> Tuple[Optional[Tuple[str, ...]], int]:
    rng = np.random.default_rng(seed)
    seen: Set[Tuple[int, ...]] = set()
    tested = 0
    for _ in range(budget * 4):
        if tested >= budget:
            break
        size = int(rng.integers(0, max_size + 1))
        pick = tuple(sorted(int(i) for i in rng.choice(len(z), size, replace=False)))
        if pick in seen:
            continue
        seen.add(pick)
        tested += 1
        s = tuple(z[i] for i in pick)
        if cert.holds(s):
            return s, tested
    return None, tested


def entner_search(data: Dataset, cfg: Optional[EntnerConfig] = None) -> EntnerResult:
    """Search covariate subsets certified by the auxiliary variable W.

    A subset S is accepted when the Fisher-z test does not reject
    rho(W, Y | S + X) = 0 and does reject rho(W, Y | S) = 0, each at
    `alpha / tests_run` with `tests_run` counting every test of this call.
    The greedy strategy grows S from the empty set, adding the covariate that
    most reduces |rho(W, Y | S + X)|; the random strategy draws subsets of
    size up to `max_subset_size`. An accepted S is re-checked at the final
    Bonferroni level before it is returned.

    Args:
        data: Observed dataset with a W column.
        cfg: Search settings.

    Returns:
        An `EntnerResult`; when nothing is certified the estimate falls back to
        all-Z adjustment (or NaN if that design is singular).

    Raises:
        GraphInputError: If the dataset has no W column.
        ConfigError: If `max_subset_size` exceeds the number of covariates.
    """
    cfg = cfg or EntnerConfig()
    roles = data.roles()
    w = roles.require_w()
    z = roles.z
    max_size = len(z) if cfg.max_subset_size is None else cfg.max_subset_size
    if max_size > len(z):
        raise ConfigError("max_subset_size must be <= the number of covariates")

    cov = sample_cov(data, (w, roles.y, roles.x, *z))
    cert = _Certifier(cov, w, roles.x, roles.y, cfg.alpha)
    tested_total = 0
    accepted: Optional[Tuple[str, ...]] = None
    budget = cfg.budget
    while budget > 0:
        if cfg.strategy == "greedy":
            found, tested = _search_greedy(z, cert, max_size, budget)
        else:
            found, tested = _search_random(
                z, cert, max_size, budget, cfg.seed + tested_total
            )
        tested_total += tested
        budget -= tested
        if found is None:
            break
        if cert.holds(found, cfg.alpha / max(cert.tests_run, 1)):
            accepted = found
            break
        logger.debug("subset %s failed the re-check", found)
        if cfg.strategy == "greedy":
            # greedy is deterministic; a failed re-check cannot improve
            break

    if accepted is not None:
        logger.debug("accepted %s after %d tests", accepted, cert.tests_run)
        ate = backdoor_ate(data, accepted)
        return EntnerResult(accepted, ate, True, cert.tests_run, tested_total)

    logger.debug("no subset certified after %d tests", cert.tests_run)
    try:
        ate = allz_ate(data)
    except SingularDesignError:
        ate = float("nan")
    return EntnerResult(tuple(z), ate, False, cert.tests_run, tested_total)
