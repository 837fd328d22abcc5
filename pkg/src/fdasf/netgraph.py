"""Random sensor-network topologies and their per-iteration routing trees.

Node ids are 1-based throughout (node ``1`` .. node ``K``), matching the
round-robin schedule ``q = (i mod K) + 1`` used by the distributed solver.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Topology",
    "PrunedTree",
    "TopologyError",
    "generate_erdos_renyi",
    "prune_to_tree",
]

_MAX_CONNECTIVITY_DRAWS = 1000


class TopologyError(ValueError):
    """Invalid or unusable network topology."""


def _normalize_edge(i: int, j: int) -> tuple[int, int]:
    if i == j:
        raise TopologyError(f"self-loop on node {i}")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Topology:
    """Undirected connected graph plus per-node sensor channel counts."""

    node_count: int
    edges: frozenset[tuple[int, int]]
    channels: tuple[int, ...]
    _neighbors: dict[int, tuple[int, ...]] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        k = self.node_count
        if k < 1:
            raise TopologyError("node_count must be >= 1")
        if len(self.channels) != k:
            raise TopologyError("channels must have one entry per node")
        if any(c < 1 for c in self.channels):
            raise TopologyError("every node needs at least one channel")
        nbrs: dict[int, list[int]] = {node: [] for node in range(1, k + 1)}
        for i, j in self.edges:
            if not (1 <= i < j <= k):
                raise TopologyError(f"edge ({i},{j}) out of range or unordered")
            nbrs[i].append(j)
            nbrs[j].append(i)
        object.__setattr__(
            self, "_neighbors", {n: tuple(sorted(v)) for n, v in nbrs.items()}
        )
        if not self._is_connected():
            raise TopologyError("graph is not connected")

    def _is_connected(self) -> bool:
        seen = {1}
        queue = deque([1])
        while queue:
            u = queue.popleft()
            for v in self._neighbors[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == self.node_count

    @property
    def total_channels(self) -> int:
        return int(sum(self.channels))

    def neighbors(self, node: int) -> tuple[int, ...]:
        return self._neighbors[node]

    def degree(self, node: int) -> int:
        return len(self._neighbors[node])

    def channel_slice(self, node: int) -> slice:
        """Column range of this node's channels in the stacked signal."""
        start = int(sum(self.channels[: node - 1]))
        return slice(start, start + self.channels[node - 1])

    def to_json(self) -> str:
        doc = {
            "K": self.node_count,
            "edges": sorted([list(e) for e in self.edges]),
            "channels": list(self.channels),
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "Topology":
        doc = json.loads(text)
        edges = frozenset(_normalize_edge(int(i), int(j)) for i, j in doc["edges"])
        return cls(int(doc["K"]), edges, tuple(int(c) for c in doc["channels"]))


@dataclass(frozen=True)
class PrunedTree:
    """Spanning tree rooted at the updating node.

    ``clusters[n]`` is the set of nodes whose tree path to the root passes
    through root-neighbor ``n`` (``n`` included); the clusters partition all
    non-root nodes.
    """

    root: int
    edges: frozenset[tuple[int, int]]
    parent: dict[int, int]
    neighbor_sets: dict[int, tuple[int, ...]]
    clusters: dict[int, frozenset[int]]
    leaf_first_order: tuple[int, ...]

    def children(self, node: int) -> tuple[int, ...]:
        return tuple(v for v in self.neighbor_sets[node] if self.parent.get(v) == node)


def generate_erdos_renyi(
    k: int, p: float, channels, seed: int
) -> Topology:
    """Draw a connected Erdos-Renyi graph, redrawing disconnected samples.

    Each non-incident node pair is joined independently with probability
    ``p``.  Disconnected draws are retried with seed ``seed + attempt`` so
    the result keeps the ER distribution conditioned on connectivity; after
    1000 failed draws the probability is considered too small for ``k`` and
    an error is raised.
    """
    if k < 2:
        raise TopologyError("need at least 2 nodes")
    if not 0.0 <= p <= 1.0:
        raise TopologyError("edge probability must lie in [0, 1]")
    channels = tuple(int(c) for c in channels)
    if len(channels) != k:
        raise TopologyError("channels must have one entry per node")

    pairs = [(i, j) for i in range(1, k + 1) for j in range(i + 1, k + 1)]
    for attempt in range(_MAX_CONNECTIVITY_DRAWS):
        rng = np.random.default_rng(seed + attempt)
        mask = rng.random(len(pairs)) < p
        edges = frozenset(pair for pair, keep in zip(pairs, mask) if keep)
        try:
            return Topology(k, edges, channels)
        except TopologyError:
            continue
    raise TopologyError(
        f"no connected graph in {_MAX_CONNECTIVITY_DRAWS} draws (K={k}, p={p})"
    )


def prune_to_tree(topology: Topology, q: int, seed: int | None = None) -> PrunedTree:
    """Breadth-first shortest-path tree rooted at ``q``.

    Every topology edge incident to ``q`` is kept (all distance-1 nodes
    attach directly to the root).  Among equal-length paths the parent with
    the smallest node id is chosen, so the result is deterministic; ``seed``
    is accepted as a hook for alternative per-iteration pruning strategies
    and is unused by the default rule.
    """
    del seed
    k = topology.node_count
    if not 1 <= q <= k:
        raise TopologyError(f"updating node {q} out of range 1..{k}")

    dist = {q: 0}
    queue = deque([q])
    while queue:
        u = queue.popleft()
        for v in topology.neighbors(u):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)

    parent: dict[int, int] = {}
    for v in range(1, k + 1):
        if v == q:
            continue
        parent[v] = min(n for n in topology.neighbors(v) if dist[n] == dist[v] - 1)

    edges = frozenset(_normalize_edge(v, parent[v]) for v in parent)
    nbrs: dict[int, list[int]] = {node: [] for node in range(1, k + 1)}
    for i, j in edges:
        nbrs[i].append(j)
        nbrs[j].append(i)
    neighbor_sets = {n: tuple(sorted(v)) for n, v in nbrs.items()}

    children: dict[int, list[int]] = {node: [] for node in range(1, k + 1)}
    for v, u in parent.items():
        children[u].append(v)

    clusters: dict[int, frozenset[int]] = {}
    for n in neighbor_sets[q]:
        stack = [n]
        members = set()
        while stack:
            u = stack.pop()
            members.add(u)
            stack.extend(children[u])
        clusters[n] = frozenset(members)

    order = tuple(
        sorted((v for v in range(1, k + 1) if v != q), key=lambda v: (-dist[v], v))
    )
    return PrunedTree(q, edges, parent, neighbor_sets, clusters, order)
