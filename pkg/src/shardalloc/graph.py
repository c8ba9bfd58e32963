"""Transactions and the weighted account graph they induce.

Accounts are opaque byte strings; their raw lexicographic order is the
canonical iteration order used everywhere determinism matters. A
transaction spreads one unit of weight over the unordered pairs of its
accounts, so the total weight of a graph always equals the number of
transactions that built it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, KeysView, Mapping, Sequence

AccountId = bytes


class UnmappedAccountError(LookupError):
    """An account required by an operation is missing from the allocation."""

    def __init__(self, account: AccountId):
        self.account = account
        super().__init__(f"account {account!r} is not mapped to any shard")


@dataclass(frozen=True)
class Transaction:
    """One ledger entry: block height plus the deduplicated account set.

    Input/output roles are erased; ``accounts`` is stored as a sorted
    tuple so iteration order is canonical.
    """

    block: int
    accounts: tuple[AccountId, ...]

    def __post_init__(self):
        if self.block < 0:
            raise ValueError(f"negative block height {self.block}")
        accounts = tuple(sorted(set(self.accounts)))
        if not accounts:
            raise ValueError("transaction involves no accounts")
        for account in accounts:
            if not account:
                raise ValueError("empty account identifier")
        object.__setattr__(self, "accounts", accounts)


def pair_count(tx: Transaction) -> int:
    """Number of unordered account pairs a transaction expands into.

    Single-account transactions count as one pair (their self-loop), so
    every transaction contributes total weight 1 to the graph.
    """
    n = len(tx.accounts)
    if n == 1:
        return 1
    return n * (n - 1) // 2


class TxGraph:
    """Undirected weighted graph over accounts.

    Edges are kept in a symmetric adjacency map with self-loops stored
    once at ``adj[v][v]``. Instances are treated as immutable snapshots
    once handed out; only this module and the optimizer state mutate
    them, through the underscore methods.
    """

    __slots__ = ("_adj", "tx_count", "_total_weight")

    def __init__(self):
        self._adj: dict[AccountId, dict[AccountId, float]] = {}
        self.tx_count: int = 0
        self._total_weight: float | None = None

    @property
    def nodes(self) -> KeysView[AccountId]:
        return self._adj.keys()

    @property
    def node_count(self) -> int:
        return len(self._adj)

    def neighbors(self, v: AccountId) -> Mapping[AccountId, float]:
        return self._adj[v]

    def edge_weight(self, u: AccountId, v: AccountId) -> float:
        return self._adj.get(u, {}).get(v, 0.0)

    def iter_edges(self) -> Iterator[tuple[AccountId, AccountId, float]]:
        """Yield each unordered pair once (u <= v), self-loops included."""
        for u, nbrs in self._adj.items():
            for v, w in nbrs.items():
                if u <= v:
                    yield u, v, w

    @property
    def edge_count(self) -> int:
        return sum(1 for _ in self.iter_edges())

    def total_weight(self) -> float:
        """Sum of all edge weights, self-loops counted once."""
        if self._total_weight is None:
            self._total_weight = sum(w for _, _, w in self.iter_edges())
        return self._total_weight

    def copy(self) -> "TxGraph":
        g = TxGraph()
        g._adj = {v: dict(nbrs) for v, nbrs in self._adj.items()}
        g.tx_count = self.tx_count
        g._total_weight = self._total_weight
        return g

    def _add_edge(self, u: AccountId, v: AccountId, w: float) -> None:
        self._total_weight = None
        row = self._adj.setdefault(u, {})
        row[v] = row.get(v, 0.0) + w
        if u != v:
            row = self._adj.setdefault(v, {})
            row[u] = row.get(u, 0.0) + w

    def _merge_inplace(self, other: "TxGraph") -> None:
        # single-writer; used by the replay loop to avoid re-copying O(E) per epoch
        for u, v, w in other.iter_edges():
            self._add_edge(u, v, w)
        self.tx_count += other.tx_count


def build_graph(txs: Sequence[Transaction]) -> TxGraph:
    """Accumulate a transaction graph, each tx spreading unit weight.

    The stream is stably sorted by block first so floating-point sums
    are reproducible regardless of how callers interleaved blocks.
    """
    g = TxGraph()
    for tx in sorted(txs, key=lambda t: t.block):
        accounts = tx.accounts
        if len(accounts) == 1:
            g._add_edge(accounts[0], accounts[0], 1.0)
        else:
            w = 1.0 / pair_count(tx)
            for a, b in combinations(accounts, 2):
                g._add_edge(a, b, w)
    g.tx_count = len(txs)
    return g


def merge_graph(base: TxGraph, delta: TxGraph) -> TxGraph:
    """Edge-wise sum of two graphs; tx counts add, node sets union."""
    merged = base.copy()
    merged._merge_inplace(delta)
    return merged


def mu(tx: Transaction, assign: Mapping[AccountId, int]) -> int:
    """Number of distinct shards touched by a transaction's accounts."""
    shards = set()
    for account in tx.accounts:
        try:
            shards.add(assign[account])
        except KeyError:
            raise UnmappedAccountError(account) from None
    return len(shards)


def collect_accounts(txs: Iterable[Transaction]) -> set[AccountId]:
    """Union of account sets over a transaction stream."""
    out: set[AccountId] = set()
    for tx in txs:
        out.update(tx.accounts)
    return out
