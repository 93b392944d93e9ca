# seeded generation helpers
# parameter sampling follows the simulation protocol: |N(0,1)| then a random sign
# sampling is ancestral and every rng stream comes from a SeedSequence

"""backdoorforge.generation

Seeded sampling for linear-Gaussian SEMs.

- `sample_parameters` draws edge coefficients (half-normal magnitude, random
  sign) for a graph.
- `sample_data` draws an i.i.d. sample by ancestral sampling.
- `standardize_dataset` / `split_dataset` prepare the sample the way the
  benchmark uses it: standardise the full pool, then split.
- `derive_seed` splits one base seed into independent, reproducible streams.
"""
from __future__ import annotations

import logging
from typing import Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import GraphInputError
from .models import Column, Dataset, Edge, GraphSpec
from .sem import LinearSem

logger = logging.getLogger(__name__)

SeedKey = Union[int, str]


def derive_seed(base: int, *keys: SeedKey) -> int:
    """Deterministically derive a child seed from a base seed and keys.

    String keys are folded to integers by their UTF-8 bytes so the mapping does
    not depend on Python's hash randomisation.

    Args:
        base: Base seed.
        *keys: Integers or strings identifying the stream.

    Returns:
        A 63-bit non-negative integer seed.
    """
    entropy = [int(base)]
    for key in keys:
        if isinstance(key, str):
            entropy.append(int.from_bytes(key.encode("utf-8"), "little") % (2**63))
        else:
            entropy.append(int(key))
    state = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1]))


def sample_parameters(
    g: GraphSpec,
    seed: int,
    sign_flip_prob: float = 0.5,
    *,
    noise_vars: Optional[Mapping[str, float]] = None,
    fixed: Optional[Mapping[Edge, float]] = None,
) -> LinearSem:
    """Sample edge coefficients for a graph.

    Each coefficient is `|N(0, 1)|`; a uniform draw above `1 - sign_flip_prob`
    flips it negative. Noise variances are not sampled.

    Args:
        g: The graph.
        seed: RNG seed.
        sign_flip_prob: Probability of a negative sign, in [0, 1].
        noise_vars: Per-node noise variances (missing nodes default to 1.0).
        fixed: Edges whose coefficients are set rather than drawn (e.g. X -> Y).

    Returns:
        A `LinearSem` over `g`.

    Raises:
        ValueError: If `sign_flip_prob` is outside [0, 1].
    """
    if not 0.0 <= sign_flip_prob <= 1.0:
        raise ValueError("sign_flip_prob must be in [0, 1]")
    rng = np.random.default_rng(seed)
    m = len(g.edges)
    magnitude = np.abs(rng.standard_normal(m))
    flip = rng.random(m) > 1.0 - sign_flip_prob
    values = np.where(flip, -magnitude, magnitude)

    coeffs = {edge: float(v) for edge, v in zip(g.edges, values)}
    for edge, v in (fixed or {}).items():
        if edge not in coeffs:
            raise GraphInputError(f"fixed coefficient for non-edge {edge!r}")
        coeffs[edge] = float(v)

    noise = {i: 1.0 for i in g.ids}
    noise.update({k: float(v) for k, v in (noise_vars or {}).items()})
    return LinearSem(graph=g, coeffs=coeffs, noise_vars=noise)


def sample_data(
    sem: LinearSem,
    n: int,
    seed: int,
    standardize: bool = False,
    *,
    include_latent: bool = False,
) -> Dataset:
    """Draw `n` i.i.d. rows from the SEM by ancestral sampling.

    Args:
        sem: The model.
        n: Number of rows (>= 1).
        seed: RNG seed.
        standardize: Rescale every returned column to unit sample variance.
        include_latent: Keep U-role columns (internal use and tests only).

    Returns:
        A `Dataset` whose columns follow the graph's node order.

    Raises:
        ValueError: If `n < 1`.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    g = sem.graph
    ids = g.ids
    pos = {i: k for k, i in enumerate(ids)}
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((n, len(ids))) * np.sqrt(sem.noise_vector())

    x = np.zeros((n, len(ids)))
    for node in g.topological_order():
        parents = g.parents(node)
        col = noise[:, pos[node]]
        if parents:
            w = np.array([sem.coeffs[(p, node)] for p in parents])
            col = col + x[:, [pos[p] for p in parents]] @ w
        x[:, pos[node]] = col

    columns = tuple(Column(id=nd.id, role=nd.role, block=nd.block) for nd in g.nodes)
    data = Dataset(matrix=x, columns=columns)
    if not include_latent:
        data = data.drop_latent()
    return standardize_dataset(data) if standardize else data


def standardize_dataset(data: Dataset) -> Dataset:
    """Centre and scale every column to unit sample variance (ddof = 1).

    Raises:
        ValueError: If a column is constant or fewer than two rows exist.
    """
    if data.n < 2:
        raise ValueError("standardize needs at least two rows")
    mean = data.matrix.mean(axis=0)
    sd = data.matrix.std(axis=0, ddof=1)
    if np.any(sd <= 0.0):
        raise ValueError("cannot standardize a constant column")
    return Dataset(
        matrix=(data.matrix - mean) / sd,
        columns=data.columns,
        standardized=True,
        scale_factors=data.scale_factors * sd,
        row_index=data.row_index,
    )


def split_dataset(
    data: Dataset, fractions: Sequence[float], seed: int
) -> Tuple[Dataset, ...]:
    """Randomly partition rows into consecutive parts (e.g. train/test).

    Args:
        data: Pool to split.
        fractions: Positive fractions summing to 1 (two or three parts).
        seed: RNG seed for the permutation.

    Returns:
        One `Dataset` per fraction; `row_index` keeps the pool row ids.

    Raises:
        ValueError: If fractions are invalid.
    """
    fr = np.asarray(fractions, dtype=float)
    if fr.ndim != 1 or fr.size < 1 or np.any(fr <= 0) or abs(fr.sum() - 1.0) > 1e-9:
        raise ValueError("fractions must be positive and sum to 1")
    perm = np.random.default_rng(seed).permutation(data.n)
    cuts = np.round(np.cumsum(fr)[:-1] * data.n).astype(int)
    parts = np.split(perm, cuts)
    logger.debug("split %d rows into %s", data.n, [len(p) for p in parts])
    return tuple(data.select_rows(np.sort(p)) for p in parts)
