# the linear-Gaussian SEM container
# one graph plus its parameters, JSON friendly
# the implied covariance doubles as the population oracle in the tests

"""backdoorforge.sem

Defines `LinearSem`, a linear-Gaussian structural causal model over a
`GraphSpec`, and its closed-form population covariance.

Every node is `x_j = sum_{i -> j} coef(i, j) * x_i + e_j` with
`e_j ~ N(0, noise_vars[j])` and zero intercepts.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Mapping, Tuple

import numpy as np

from .errors import GraphInputError
from .models import Edge, GraphSpec
from .stats import CovView


@dataclass(frozen=True, slots=True)
class LinearSem:
    """A linear-Gaussian SEM.

    Attributes:
        graph: The causal graph.
        coeffs: One coefficient per edge, keyed by `(parent, child)`.
        noise_vars: Positive noise variance per node id.
    """

    graph: GraphSpec
    coeffs: Mapping[Edge, float]
    noise_vars: Mapping[str, float]

    def __post_init__(self) -> None:
        coeffs = {(str(p), str(c)): float(v) for (p, c), v in self.coeffs.items()}
        if set(coeffs) != set(self.graph.edges):
            raise GraphInputError("coeffs must have exactly one entry per edge")
        noise = {str(k): float(v) for k, v in self.noise_vars.items()}
        if set(noise) != set(self.graph.ids):
            raise GraphInputError("noise_vars must have exactly one entry per node")
        if any(v <= 0.0 for v in noise.values()):
            raise GraphInputError("noise variances must be > 0")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "noise_vars", noise)

    @property
    def omega(self) -> float:
        """Coefficient on X -> Y (the true ATE); 0.0 when the edge is absent."""
        return self.coeffs.get((self.graph.treatment, self.graph.outcome), 0.0)

    def coefficient_matrix(self) -> np.ndarray:
        """Matrix B with `B[i, j]` the coefficient of edge i -> j (node order)."""
        ids = self.graph.ids
        pos = {i: k for k, i in enumerate(ids)}
        b = np.zeros((len(ids), len(ids)))
        for (p, c), v in self.coeffs.items():
            b[pos[p], pos[c]] = v
        return b

    def noise_vector(self) -> np.ndarray:
        """Noise variances in node order."""
        return np.array([self.noise_vars[i] for i in self.graph.ids])

    def implied_covariance(self) -> CovView:
        """Exact population covariance over all nodes (latent included).

        With row-vector samples `x = x B + e`, `x = e (I - B)^-1`, so
        `Sigma = (I - B)^-T D (I - B)^-1`.

        Returns:
            A population `CovView` (n_eff = inf) labelled by node id.
        """
        b = self.coefficient_matrix()
        p = b.shape[0]
        a = np.linalg.solve(np.eye(p) - b, np.eye(p))
        # unit upper-triangular in topological order, so never singular
        assert np.all(np.isfinite(a)), "I - B must be invertible for a DAG"
        sigma = a.T @ np.diag(self.noise_vector()) @ a
        return CovView(matrix=sigma, labels=self.graph.ids, n_eff=float("inf"))

    def population_dataset_view(self) -> CovView:
        """Population covariance restricted to observed (non-U) nodes."""
        observed = [n.id for n in self.graph.nodes if n.role != "U"]
        return self.implied_covariance().sub(observed)

    def with_coeffs(self, updates: Mapping[Edge, float]) -> "LinearSem":
        """Copy with some edge coefficients replaced."""
        coeffs = dict(self.coeffs)
        for edge, v in updates.items():
            if edge not in coeffs:
                raise GraphInputError(f"{edge!r} is not an edge")
            coeffs[edge] = float(v)
        return LinearSem(graph=self.graph, coeffs=coeffs, noise_vars=self.noise_vars)

    def with_noise(self, updates: Mapping[str, float]) -> "LinearSem":
        """Copy with some noise variances replaced."""
        noise = dict(self.noise_vars)
        noise.update({k: float(v) for k, v in updates.items()})
        return LinearSem(graph=self.graph, coeffs=self.coeffs, noise_vars=noise)

    def to_dict(self) -> Dict[str, Any]:
        """Serialize to the graph JSON shape plus coefficient and variance maps."""
        data = self.graph.to_dict()
        data["coefficients"] = [
            [p, c, self.coeffs[(p, c)]] for p, c in self.graph.edges
        ]
        data["noise_vars"] = {i: self.noise_vars[i] for i in self.graph.ids}
        return data

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "LinearSem":
        """Construct a LinearSem from the dict produced by `to_dict()`.

        Raises:
            KeyError: If expected keys are missing.
        """
        graph = GraphSpec.from_dict(data)
        coeffs: Dict[Tuple[str, str], float] = {
            (str(p), str(c)): float(v) for p, c, v in data["coefficients"]
        }
        return LinearSem(graph=graph, coeffs=coeffs, noise_vars=data["noise_vars"])
