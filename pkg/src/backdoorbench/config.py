# scenario configuration for the benchmark harness
# one frozen dataclass, loadable from JSON and from CLI flags

"""backdoorbench.config

`ScenarioConfig` describes one benchmark grid: which graph, which treatment
noise and effect values, how many parameter settings, how the data are split
and which methods run with which hyperparameter grid.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Dict, Literal, Mapping, Optional, Tuple

from backdoorforge.constants import (
    DEFAULT_ALPHA,
    ENTNER_BUDGET,
    FULL_GRID_BLOCK_DIM,
    FULL_GRID_N_SETTINGS,
    FULL_GRID_N_TOTAL,
    FULL_GRID_OMEGA,
    FULL_GRID_SIGMA_X2,
)
from backdoorforge.discovery import LAMBDA2_RULES
from backdoorforge.errors import ConfigError
from backdoorforge.presets import BlockDims

GraphKind = Literal["sim4block", "nhs", "custom-file"]
METHODS: Tuple[str, ...] = ("ours", "allz", "marginal", "entner")

# fields that never change results and stay out of the hash
_UNHASHED = ("workers",)


@dataclass(frozen=True, slots=True)
class ScenarioConfig:
    """One benchmark grid.

    Attributes:
        name: Scenario name used as the prefix of scenario ids.
        graph_kind: "sim4block", "nhs" or "custom-file" (SEM JSON at `graph_path`).
        graph_path: LinearSem JSON for the "custom-file" kind.
        block_dims: Block dimensions of the simulation graph.
        sigma_x2: Treatment noise variances (grid axis).
        omega: True effects (grid axis).
        n_total: Rows sampled per setting before splitting.
        split: Fractions (train, test) or (train, valid, test).
        n_settings: Parameter settings per grid cell.
        seed: Base seed.
        methods: Methods to run, from "ours", "allz", "marginal", "entner".
        sign_flip_prob: Probability of a negative sampled coefficient.
        lambda1_grid: lambda1 values tuned over.
        eta_grid: Step sizes tuned over.
        init_grid: gamma initialisations tuned over ("ols" or integer seeds).
        lambda2: Initial lambda2.
        cv_folds: Cross-validation folds (unused with a validation split).
        lambda2_rule: "constraint" or "quoted".
        alpha_test: Level of the lambda2 ladder tests.
        max_iters: Inner iteration cap.
        ridge: Diagonal ridge for the effect regressions (0 disables it).
        entner_budget: Subsets tested by the Entner search.
        entner_strategy: "greedy" or "random".
        entner_alpha: Level of the Entner search.
        workers: Worker processes (1 runs in-process).
    """

    name: str = "sim"
    graph_kind: GraphKind = "sim4block"
    graph_path: Optional[str] = None
    block_dims: BlockDims = field(default_factory=lambda: BlockDims.uniform(5))
    sigma_x2: Tuple[float, ...] = (0.6,)
    omega: Tuple[float, ...] = (0.5,)
    n_total: int = 4000
    split: Tuple[float, ...] = (0.5, 0.5)
    n_settings: int = 10
    seed: int = 0
    methods: Tuple[str, ...] = METHODS
    sign_flip_prob: float = 0.5
    lambda1_grid: Tuple[float, ...] = (0.05, 0.2)
    eta_grid: Tuple[float, ...] = (0.5,)
    init_grid: Tuple[Any, ...] = ("ols", 0)
    lambda2: float = 1e-4
    cv_folds: int = 3
    lambda2_rule: str = "constraint"
    alpha_test: float = DEFAULT_ALPHA
    max_iters: int = 300
    ridge: float = 0.0
    entner_budget: int = ENTNER_BUDGET
    entner_strategy: str = "greedy"
    entner_alpha: float = DEFAULT_ALPHA
    workers: int = 1

    def __post_init__(self) -> None:
        for name in ("sigma_x2", "omega", "split", "methods", "lambda1_grid"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "eta_grid", tuple(float(e) for e in self.eta_grid))
        object.__setattr__(self, "init_grid", tuple(self.init_grid))
        if isinstance(self.block_dims, Mapping):
            object.__setattr__(self, "block_dims", BlockDims.from_dict(self.block_dims))

        if self.graph_kind not in ("sim4block", "nhs", "custom-file"):
            raise ConfigError("graph_kind must be sim4block, nhs or custom-file")
        if self.graph_kind == "custom-file" and not self.graph_path:
            raise ConfigError("graph_kind 'custom-file' needs graph_path")
        if not self.sigma_x2 or any(v <= 0 for v in self.sigma_x2):
            raise ConfigError("sigma_x2 values must be > 0")
        if not self.omega:
            raise ConfigError("omega needs at least one value")
        if len(self.split) not in (2, 3) or any(f <= 0 for f in self.split):
            raise ConfigError("split must hold two or three positive fractions")
        if abs(sum(self.split) - 1.0) > 1e-9:
            raise ConfigError("split fractions must sum to 1")
        if self.n_settings < 1:
            raise ConfigError("n_settings must be >= 1")
        if self.n_total < 10:
            raise ConfigError("n_total must be >= 10")
        unknown = set(self.methods) - set(METHODS)
        if not self.methods or unknown:
            raise ConfigError(f"methods must be a non-empty subset of {METHODS}")
        if not self.lambda1_grid or not self.eta_grid or not self.init_grid:
            raise ConfigError("hyperparameter grids must be non-empty")
        if self.lambda2_rule not in LAMBDA2_RULES:
            raise ConfigError(f"lambda2_rule must be one of {LAMBDA2_RULES}")
        if self.entner_strategy not in ("greedy", "random"):
            raise ConfigError("entner_strategy must be 'greedy' or 'random'")
        if self.ridge < 0:
            raise ConfigError("ridge must be >= 0")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    @property
    def cells(self) -> Tuple[Tuple[float, float], ...]:
        """Grid cells as (sigma_x2, omega), sigma_x2 outermost."""
        return tuple((s, o) for s in self.sigma_x2 for o in self.omega)

    def scenario_id(self, sigma_x2: float, omega: float) -> str:
        return f"{self.name}/sx2={sigma_x2:g}/omega={omega:g}"

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        for k, v in data.items():
            if isinstance(v, tuple):
                data[k] = list(v)
        return data

    @staticmethod
    def from_dict(data: Mapping[str, Any]) -> "ScenarioConfig":
        """Build a config from a mapping (e.g. parsed JSON).

        Raises:
            ConfigError: On unknown keys or invalid values.
        """
        known = {f.name for f in fields(ScenarioConfig)}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown scenario keys: {sorted(extra)}")
        try:
            return ScenarioConfig(**dict(data))
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def config_hash(self) -> str:
        """First 12 hex digits of the SHA-256 of the canonical JSON."""
        data = self.to_dict()
        for k in _UNHASHED:
            data.pop(k, None)
        text = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]


def full_grid(**overrides: Any) -> ScenarioConfig:
    """The full simulation grid: 2 sigma_x2 x 2 omega x 25 settings, 30 per block."""
    base = ScenarioConfig(
        name="full",
        block_dims=BlockDims.uniform(FULL_GRID_BLOCK_DIM),
        sigma_x2=FULL_GRID_SIGMA_X2,
        omega=FULL_GRID_OMEGA,
        n_total=FULL_GRID_N_TOTAL,
        n_settings=FULL_GRID_N_SETTINGS,
    )
    return replace(base, **overrides)
