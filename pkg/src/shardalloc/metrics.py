"""Performance metrics of an allocation: cross-shard ratio, balance,
capacity-bounded throughput and confirmation latency.

All functions are pure and recompute from the graph; the cached
aggregates carried by :class:`Allocation` exist for the optimizer and
can always be checked against the from-scratch values here.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .graph import AccountId, Transaction, TxGraph, UnmappedAccountError, mu
from .params import AlloParams


@dataclass
class Allocation:
    """Total account-to-shard mapping with optional per-shard caches.

    ``sigma[i]`` and ``lambda_hat[i]`` cache the workload and the
    capacity-free throughput of shard ``i``; they are populated by
    :meth:`from_assignment` or :meth:`refresh_cache` and must agree with
    a from-scratch recomputation (see :meth:`cache_drift`).
    """

    assign: dict[AccountId, int]
    k: int
    sigma: list[float] | None = None
    lambda_hat: list[float] | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"shard count must be >= 1, got {self.k}")
        for account, shard in self.assign.items():
            if not 0 <= shard < self.k:
                raise ValueError(f"shard {shard} for {account!r} outside [0,{self.k})")

    @classmethod
    def from_assignment(
        cls, graph: TxGraph, assign: Mapping[AccountId, int], k: int, params: AlloParams
    ) -> "Allocation":
        alloc = cls(dict(assign), k)
        alloc.refresh_cache(graph, params)
        return alloc

    def shard_of(self, account: AccountId) -> int:
        try:
            return self.assign[account]
        except KeyError:
            raise UnmappedAccountError(account) from None

    def copy(self) -> "Allocation":
        return Allocation(
            dict(self.assign),
            self.k,
            None if self.sigma is None else list(self.sigma),
            None if self.lambda_hat is None else list(self.lambda_hat),
        )

    def refresh_cache(self, graph: TxGraph, params: AlloParams) -> None:
        intra, cross = shard_weight_sums(graph, self)
        self.sigma = [intra[i] + params.eta * cross[i] for i in range(self.k)]
        self.lambda_hat = [intra[i] + cross[i] / 2.0 for i in range(self.k)]

    def cache_drift(self, graph: TxGraph, params: AlloParams) -> float:
        """Largest relative disagreement between caches and recomputation."""
        if self.sigma is None or self.lambda_hat is None:
            raise ValueError("allocation carries no cached aggregates")
        intra, cross = shard_weight_sums(graph, self)
        drift = 0.0
        for i in range(self.k):
            fresh_sigma = intra[i] + params.eta * cross[i]
            fresh_lhat = intra[i] + cross[i] / 2.0
            drift = max(
                drift,
                abs(self.sigma[i] - fresh_sigma) / max(abs(fresh_sigma), 1.0),
                abs(self.lambda_hat[i] - fresh_lhat) / max(abs(fresh_lhat), 1.0),
            )
        return drift

    def total_throughput(self, capacity: float) -> float:
        """Capacity-bounded system throughput from the cached aggregates."""
        if self.sigma is None or self.lambda_hat is None:
            raise ValueError("allocation carries no cached aggregates")
        return sum(
            capped_throughput(self.lambda_hat[i], self.sigma[i], capacity)
            for i in range(self.k)
        )


@dataclass
class ShardReport:
    sigma: float
    throughput: float
    latency: float
    intra_weight: float
    cross_weight: float


@dataclass
class SystemReport:
    gamma: float
    rho: float
    throughput_total: float
    throughput_normalized: float
    latency_mean: float
    latency_worst: float
    shards: list[ShardReport] = field(default_factory=list)


def shard_weight_sums(graph: TxGraph, alloc: Allocation) -> tuple[list[float], list[float]]:
    """Per-shard intra and cross edge-weight totals in one edge pass.

    Each cross edge is charged once to both incident shards; self-loops
    count as intra.
    """
    intra = [0.0] * alloc.k
    cross = [0.0] * alloc.k
    assign = alloc.assign
    for u, v, w in graph.iter_edges():
        try:
            su = assign[u]
            sv = assign[v]
        except KeyError as exc:
            raise UnmappedAccountError(exc.args[0]) from None
        if su == sv:
            intra[su] += w
        else:
            cross[su] += w
            cross[sv] += w
    return intra, cross


def capped_throughput(lambda_hat: float, sigma: float, capacity: float) -> float:
    """Truncate the capacity-free throughput when the shard is overloaded."""
    if sigma <= capacity:
        return lambda_hat
    return (capacity / sigma) * lambda_hat


def shard_workload(graph: TxGraph, alloc: Allocation, params: AlloParams, i: int) -> float:
    """Workload of shard i: intra weight plus eta times cross weight."""
    if not 0 <= i < alloc.k:
        raise IndexError(f"shard {i} outside [0,{alloc.k})")
    intra, cross = shard_weight_sums(graph, alloc)
    return intra[i] + params.eta * cross[i]


def shard_throughput(graph: TxGraph, alloc: Allocation, params: AlloParams, i: int) -> float:
    """Capacity-bounded throughput of shard i on the graph."""
    if not 0 <= i < alloc.k:
        raise IndexError(f"shard {i} outside [0,{alloc.k})")
    intra, cross = shard_weight_sums(graph, alloc)
    sigma = intra[i] + params.eta * cross[i]
    lambda_hat = intra[i] + cross[i] / 2.0
    return capped_throughput(lambda_hat, sigma, params.capacity)


def shard_latency(sigma: float, capacity: float) -> float:
    """Mean confirmation latency for a shard, in processing-round units.

    Evaluates the exact integral of ceil(x) over [0, sigma/capacity],
    divided by the normalized workload. Empty shards report 0.
    """
    if capacity <= 0.0:
        raise ValueError(f"capacity must be > 0, got {capacity}")
    if sigma < 0.0:
        raise ValueError(f"negative workload {sigma}")
    if sigma == 0.0:
        return 0.0
    s = sigma / capacity
    m = math.ceil(s) - 1  # completed full rounds before the last partial one
    return (m * (m + 1) / 2.0 + (s - m) * (m + 1)) / s


def balance(sigmas: Sequence[float]) -> float:
    """Population standard deviation of per-shard workloads."""
    if not sigmas:
        raise ValueError("no shard workloads given")
    return statistics.pstdev(sigmas)


def gamma_graph(graph: TxGraph, alloc: Allocation) -> float:
    """Fraction of total edge weight that crosses shard boundaries."""
    total = graph.total_weight()
    if total <= 0.0:
        raise ValueError("cross-shard ratio undefined on an empty graph")
    assign = alloc.assign
    cross = 0.0
    for u, v, w in graph.iter_edges():
        try:
            if assign[u] != assign[v]:
                cross += w
        except KeyError as exc:
            raise UnmappedAccountError(exc.args[0]) from None
    return cross / total


def gamma_exact(txs: Sequence[Transaction], alloc: Allocation) -> float:
    """Fraction of transactions touching more than one shard."""
    if not txs:
        raise ValueError("cross-shard ratio undefined on an empty stream")
    crossing = sum(1 for tx in txs if mu(tx, alloc.assign) > 1)
    return crossing / len(txs)


def system_report(
    graph: TxGraph,
    alloc: Allocation,
    params: AlloParams,
    txs: Sequence[Transaction] | None = None,
) -> SystemReport:
    """All metrics of an allocation in one pass.

    The cross-shard ratio is exact (per transaction) when the stream is
    supplied, otherwise the graph-level proxy is used.
    """
    intra, cross = shard_weight_sums(graph, alloc)
    shards = []
    for i in range(alloc.k):
        sigma = intra[i] + params.eta * cross[i]
        lambda_hat = intra[i] + cross[i] / 2.0
        shards.append(
            ShardReport(
                sigma=sigma,
                throughput=capped_throughput(lambda_hat, sigma, params.capacity),
                latency=shard_latency(sigma, params.capacity),
                intra_weight=intra[i],
                cross_weight=cross[i],
            )
        )
    total = sum(s.throughput for s in shards)
    gamma = gamma_exact(txs, alloc) if txs is not None else gamma_graph(graph, alloc)
    return SystemReport(
        gamma=gamma,
        rho=balance([s.sigma for s in shards]),
        throughput_total=total,
        throughput_normalized=total / params.capacity,
        latency_mean=sum(s.latency for s in shards) / alloc.k,
        latency_worst=max(s.latency for s in shards),
        shards=shards,
    )
