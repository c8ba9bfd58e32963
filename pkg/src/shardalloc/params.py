"""Allocation hyperparameters and their stream-derived defaults."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .graph import TxGraph

DEFAULT_ETA = 2.0
DEFAULT_MAX_SWEEPS = 100
EPSILON_FRACTION = 1e-5  # convergence threshold as a fraction of |T|


@dataclass(frozen=True)
class AlloParams:
    """Shard count, cross-shard workload factor, capacity and stop rule.

    ``capacity`` is the per-shard workload budget per time unit (one
    intra-shard transaction costs 1, a cross-shard one costs ``eta``).
    """

    k: int
    eta: float = DEFAULT_ETA
    capacity: float = 1.0
    epsilon: float = 1e-5
    max_sweeps: int = DEFAULT_MAX_SWEEPS

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"shard count must be >= 1, got {self.k}")
        if self.eta < 1.0:
            raise ValueError(f"eta must be >= 1, got {self.eta}")
        if self.capacity <= 0.0:
            raise ValueError(f"capacity must be > 0, got {self.capacity}")
        if self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_sweeps < 1:
            raise ValueError(f"max_sweeps must be >= 1, got {self.max_sweeps}")

    @classmethod
    def for_graph(
        cls,
        graph: TxGraph,
        k: int,
        eta: float = DEFAULT_ETA,
        capacity: float | None = None,
        epsilon: float | None = None,
        max_sweeps: int = DEFAULT_MAX_SWEEPS,
    ) -> "AlloParams":
        """Defaults tied to the stream size: capacity |T|/k, epsilon 1e-5*|T|."""
        if graph.tx_count < 1:
            raise ValueError("cannot derive defaults from an empty stream")
        if capacity is None:
            capacity = graph.tx_count / k
        if epsilon is None:
            epsilon = EPSILON_FRACTION * graph.tx_count
        return cls(k=k, eta=eta, capacity=capacity, epsilon=epsilon, max_sweeps=max_sweeps)

    def with_capacity(self, capacity: float) -> "AlloParams":
        return replace(self, capacity=capacity)
