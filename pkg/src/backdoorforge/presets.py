# curated graphs and SEMs used by the benchmark and the tests
# the simulation graph encodes the four-block structural equations exactly
# the NHS-shaped graph is a documented fixture, not a fitted model

"""backdoorforge.presets

Preset graphs and structural models.

- `build_simulation_graph`: the four-block simulation (W; Z1..Z4; latent U, U';
  X; Y) at any block dimension.
- `build_nhs_graph` / `make_nhs_sem`: a 25-variable staff-survey-shaped graph
  with a fixed coefficient table.
- `make_two_equation_sem`: the two-equation linear example used to sanity check the
  discovery objective.

These presets exist for:
- the benchmark harness,
- population sanity checks in tests,
- demos.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError
from .generation import sample_parameters
from .models import Edge, GraphSpec, Node
from .sem import LinearSem

TREATMENT = "X"
OUTCOME = "Y"
AUXILIARY = "W"


@dataclass(frozen=True, slots=True)
class BlockDims:
    """Per-block dimensions of the simulation graph.

    Attributes:
        z1: Collider block (children of W, U, U').
        z2: Confounder block (children of W, parents of X and Y).
        z3: Treatment-only block (parents of X).
        z4: Outcome-only block (parents of Y).
        u: Latent block acting on X and Z1.
        u2: Latent block acting on Y and Z1.
    """

    z1: int = 1
    z2: int = 1
    z3: int = 1
    z4: int = 1
    u: int = 1
    u2: int = 1

    def __post_init__(self) -> None:
        for name, value in asdict(self).items():
            if int(value) < 1:
                raise ConfigError(f"block dimension {name} must be >= 1")

    @staticmethod
    def uniform(dim: int) -> "BlockDims":
        """All blocks of the same size."""
        return BlockDims(dim, dim, dim, dim, dim, dim)

    def to_dict(self) -> Dict[str, int]:
        return asdict(self)

    @staticmethod
    def from_dict(data: Mapping[str, int]) -> "BlockDims":
        return BlockDims(**{k: int(v) for k, v in data.items()})


def _block(prefix: str, size: int, role: str) -> List[Node]:
    return [
        Node(id=f"{prefix}_{k}", role=role, block=prefix)  # type: ignore[arg-type]
        for k in range(size)
    ]


def build_simulation_graph(dims: BlockDims) -> GraphSpec:
    """Graph of the four-block simulation.

    Z1 <- {W, U, U'}; Z2 <- {W}; Z3, Z4, W, U, U' exogenous;
    X <- {U, Z2, Z3}; Y <- {U', Z2, Z4, X}. Block parents are fully connected.

    Args:
        dims: Block dimensions.

    Returns:
        A treatment-active `GraphSpec`.
    """
    z1 = _block("Z1", dims.z1, "Z")
    z2 = _block("Z2", dims.z2, "Z")
    z3 = _block("Z3", dims.z3, "Z")
    z4 = _block("Z4", dims.z4, "Z")
    u = _block("U", dims.u, "U")
    u2 = _block("U2", dims.u2, "U")
    nodes = [
        Node(AUXILIARY, "W"),
        Node(TREATMENT, "X"),
        Node(OUTCOME, "Y"),
        *z1,
        *z2,
        *z3,
        *z4,
        *u,
        *u2,
    ]

    edges: List[Edge] = []
    for z in z1:
        edges.append((AUXILIARY, z.id))
        edges.extend((s.id, z.id) for s in u)
        edges.extend((s.id, z.id) for s in u2)
    edges.extend((AUXILIARY, z.id) for z in z2)
    edges.extend((s.id, TREATMENT) for s in (*u, *z2, *z3))
    edges.extend((s.id, OUTCOME) for s in (*u2, *z2, *z4))
    edges.append((TREATMENT, OUTCOME))
    return GraphSpec(nodes=tuple(nodes), edges=tuple(edges))


def make_simulation_sem(
    dims: BlockDims,
    seed: int,
    *,
    sigma_x2: float,
    omega: float,
    sign_flip_prob: float = 0.5,
    sigma_y2: float = 1.0,
    sigma_z1_2: float = 1.0,
    sigma_z3_2: float = 1.0,
) -> LinearSem:
    """Sample one parameter setting of the four-block simulation.

    All coefficients are drawn by `sample_parameters` except X -> Y, which is
    fixed to `omega` (the true ATE).

    Args:
        dims: Block dimensions.
        seed: Parameter seed.
        sigma_x2: Treatment noise variance.
        omega: True treatment effect.
        sign_flip_prob: Probability of a negative coefficient.
        sigma_y2: Outcome noise variance.
        sigma_z1_2: Z1 noise variance.
        sigma_z3_2: Z3 noise variance.

    Returns:
        A `LinearSem` over `build_simulation_graph(dims)`.
    """
    g = build_simulation_graph(dims)
    noise: Dict[str, float] = {TREATMENT: sigma_x2, OUTCOME: sigma_y2}
    for n in g.nodes:
        if n.block == "Z1":
            noise[n.id] = sigma_z1_2
        elif n.block == "Z3":
            noise[n.id] = sigma_z3_2
    return sample_parameters(
        g,
        seed,
        sign_flip_prob,
        noise_vars=noise,
        fixed={(TREATMENT, OUTCOME): omega},
    )


# --- staff-survey-shaped graph ------------------------------------------------

NHS_Z1 = 10  # personal job satisfaction items
NHS_Z2 = 10  # organisation / manager effectiveness items
NHS_HARMFUL = "Z1_0"  # job-satisfaction item driven by both latent traits
NHS_HARMFUL_NOISE = 0.25

NHS_DESCRIPTIONS: Dict[str, str] = {
    "W": "workplace training undertaken",
    "X": "benefit from training",
    "Y": "job is good for well-being",
    "Z1": "personal job satisfaction",
    "Z2": "organisation and manager effectiveness",
    "U": "openness / ability to learn (latent)",
    "U2": "personal affinity for the job (latent)",
}


def build_nhs_graph() -> GraphSpec:
    """25-node graph shaped after the staff-survey study.

    Edge set (a fixture, chosen to respect the W -> X -> Y ordering):

    - W -> X; U -> X; every Z2 item -> X and -> Y; X -> Y.
    - U -> Z1_0 and U2 -> every Z1 item; Z1_0 has no children, so adjusting for
      it opens X <- U -> Z1_0 <- U2 -> Y.
    - Z1_k -> Y for k >= 1; Z2_j -> Z1_(1 + j mod 9).
    - U2 -> Y.

    The documented valid adjustment set is every Z2 item plus Z1_1..Z1_9.

    Returns:
        A treatment-active `GraphSpec` with 25 nodes.
    """
    z1 = _block("Z1", NHS_Z1, "Z")
    z2 = _block("Z2", NHS_Z2, "Z")
    nodes = [
        Node(AUXILIARY, "W"),
        Node(TREATMENT, "X"),
        Node(OUTCOME, "Y"),
        *z1,
        *z2,
        Node("U", "U", "U"),
        Node("U2", "U", "U2"),
    ]
    edges: List[Edge] = [(AUXILIARY, TREATMENT), ("U", TREATMENT), ("U", NHS_HARMFUL)]
    edges.extend(("U2", z.id) for z in z1)
    edges.append(("U2", OUTCOME))
    for j, z in enumerate(z2):
        edges.append((z.id, TREATMENT))
        edges.append((z.id, OUTCOME))
        edges.append((z.id, f"Z1_{1 + j % (NHS_Z1 - 1)}"))
    edges.extend((z.id, OUTCOME) for z in z1 if z.id != NHS_HARMFUL)
    edges.append((TREATMENT, OUTCOME))
    return GraphSpec(nodes=tuple(nodes), edges=tuple(edges))


def nhs_adjustment_set() -> Tuple[str, ...]:
    """The documented valid adjustment set of `build_nhs_graph`."""
    g = build_nhs_graph()
    return tuple(i for i in g.ids_with_role("Z") if i != NHS_HARMFUL)


def _nhs_coefficient(parent: str, child: str) -> float:
    """Fixture coefficient table for the staff-survey-shaped SEM.

    Every Z2 item pushes X and Y the same way, so the marginal slope is far
    off; U and U2 load heavily on Z1_0 and only weakly on the other Z1 items,
    so adjusting for every item is far off too.
    """
    if (parent, child) == (AUXILIARY, TREATMENT):
        return 1.0
    if parent == "U":
        return 1.5
    if parent == "U2":
        return {OUTCOME: 1.5, NHS_HARMFUL: 1.5}.get(child, 0.3)
    if parent.startswith("Z2"):
        return {TREATMENT: 0.6, OUTCOME: 0.8}.get(child, 0.3)
    # Z1_k -> Y
    k = int(parent.split("_")[1])
    return 0.2 if k % 2 == 0 else -0.2


def make_nhs_sem(
    *,
    omega: float = 0.3,
    sigma_x2: float = 0.6,
    coeffs: Optional[Mapping[Edge, float]] = None,
    noise_vars: Optional[Mapping[str, float]] = None,
) -> LinearSem:
    """The staff-survey-shaped SEM with fixture (or user-supplied) parameters.

    Args:
        omega: True treatment effect (coefficient on X -> Y).
        sigma_x2: Treatment noise variance.
        coeffs: Optional overrides of individual edge coefficients.
        noise_vars: Optional overrides of noise variances (default 1.0, 0.25 for
            Z1_0).

    Returns:
        A `LinearSem` over `build_nhs_graph()`.
    """
    g = build_nhs_graph()
    table = {e: _nhs_coefficient(*e) for e in g.edges if e != (TREATMENT, OUTCOME)}
    table[(TREATMENT, OUTCOME)] = omega
    table.update({e: float(v) for e, v in (coeffs or {}).items()})
    noise = {i: 1.0 for i in g.ids}
    noise[NHS_HARMFUL] = NHS_HARMFUL_NOISE
    noise[TREATMENT] = sigma_x2
    noise.update({k: float(v) for k, v in (noise_vars or {}).items()})
    return LinearSem(graph=g, coeffs=table, noise_vars=noise)


# --- two-equation example -----------------------------------------------------

TWO_EQUATION_BETA_YZ = (1.2, -0.9, 0.7, 0.0, 0.0)


def make_two_equation_sem(
    beta_yz: Sequence[float] = TWO_EQUATION_BETA_YZ,
    beta_xz: Optional[Sequence[float]] = None,
    *,
    beta_yx: float = 0.5,
    beta_xw: float = 1.0,
    sigma_x2: float = 1.0,
    sigma_y2: float = 1.0,
) -> LinearSem:
    """Two-equation linear system with exogenous W and Z.

    `Y = beta_yx X + beta_yz^T Z + e_y` and `X = beta_xw W + beta_xz^T Z + e_x`.
    When `beta_xz` is omitted it is `0.8 * beta_yz`: one shared confounding
    direction, which makes `beta_yz` the only direction (up to sign) with
    W independent of Y given X and beta^T Z.

    Args:
        beta_yz: Outcome-side covariate coefficients (length d).
        beta_xz: Treatment-side covariate coefficients (length d).
        beta_yx: Treatment effect.
        beta_xw: Effect of W on X.
        sigma_x2: Noise variance of X.
        sigma_y2: Noise variance of Y.

    Returns:
        A `LinearSem`; Z nodes are named `Z_0..Z_{d-1}`.
    """
    byz = np.asarray(beta_yz, dtype=float)
    bxz = 0.8 * byz if beta_xz is None else np.asarray(beta_xz, dtype=float)
    if byz.ndim != 1 or byz.size < 1 or bxz.shape != byz.shape:
        raise ConfigError("beta_yz and beta_xz must be vectors of the same length")
    z_ids = [f"Z_{k}" for k in range(byz.size)]
    nodes = [Node(AUXILIARY, "W"), Node(TREATMENT, "X"), Node(OUTCOME, "Y")]
    nodes.extend(Node(i, "Z", "Z") for i in z_ids)

    coeffs: Dict[Edge, float] = {(AUXILIARY, TREATMENT): beta_xw}
    for i, bx, by in zip(z_ids, bxz, byz):
        if bx != 0.0:
            coeffs[(i, TREATMENT)] = float(bx)
        if by != 0.0:
            coeffs[(i, OUTCOME)] = float(by)
    coeffs[(TREATMENT, OUTCOME)] = beta_yx
    g = GraphSpec(nodes=tuple(nodes), edges=tuple(coeffs))
    noise = {i: 1.0 for i in g.ids}
    noise[TREATMENT] = sigma_x2
    noise[OUTCOME] = sigma_y2
    return LinearSem(graph=g, coeffs=coeffs, noise_vars=noise)
