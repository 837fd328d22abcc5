"""Distributed solver engine.

One iteration, driven from the updating node q chosen round-robin:

1. prune the network into a shortest-path tree rooted at q;
2. every other node compresses its signal block through its current filter
   block and the compressed data is summed leaf-to-root over the tree;
3. q evaluates the current ratio on its compressed view, then performs either
   a single auxiliary minimization at that ratio (interleaved mode) or a full
   parametric solve of the compressed fractional problem (baseline mode);
4. the solution is partitioned into q's new block plus one Q x Q mixing
   matrix per root-neighbor, which is disseminated into that neighbor's
   cluster where every node right-multiplies its block.

The compressed view relates to the network-wide variable through an implicit
block-structured linear map (identity rows at q, per-cluster stacked filter
blocks elsewhere); statistics are compressed through it blockwise without
ever materializing the map, except for the dense debug oracle.
"""

from __future__ import annotations

import abc
import hashlib
import warnings
from dataclasses import dataclass

import numpy as np

from .fracprog import FractionalProblem, dinkelbach_solve
from .netgraph import PrunedTree, Topology, prune_to_tree
from .problems import (
    QolData,
    QolProblem,
    RtlsData,
    RtlsProblem,
    TroData,
    TroProblem,
)
from .signals import SampleBatch, SecondOrderStats, batch_stats
from .kernels import match_column_signs

__all__ = [
    "DistributedState",
    "IterationMetrics",
    "CompressionView",
    "SpatialTask",
    "TroTask",
    "RtlsTask",
    "QolTask",
    "ModelSource",
    "NetworkSolver",
    "ConstraintBoundReport",
    "compress",
    "fuse_forward",
    "build_local_view",
    "local_rho",
    "local_solve",
    "select_solution",
    "disseminate_update",
    "iterate",
    "kkt_residual",
    "check_constraint_bounds",
]


@dataclass(frozen=True)
class DistributedState:
    """Per-node filter blocks plus iteration bookkeeping."""

    blocks: tuple[np.ndarray, ...]
    iteration: int = 0
    rho: float | None = None
    mode: str = "fdasf"

    def stacked(self) -> np.ndarray:
        return np.vstack(self.blocks)

    @classmethod
    def from_stacked(
        cls, x: np.ndarray, channels, mode: str = "fdasf"
    ) -> "DistributedState":
        blocks = []
        offset = 0
        for width in channels:
            blocks.append(np.array(x[offset : offset + width], dtype=float))
            offset += width
        if offset != x.shape[0]:
            raise ValueError("channel counts do not cover the stacked filter")
        return cls(tuple(blocks), mode=mode)


@dataclass
class IterationMetrics:
    updating_node: int
    aux_solves: int
    scalars_transmitted: int
    rho_local: float
    rho_after: float
    constraint_residual: float
    kkt_residual: float | None = None
    domain_ok: bool = True
    debug_consistency: float | None = None
    debug_expand: float | None = None
    batch_digest: str | None = None


def compress(
    x_k: np.ndarray, y_k: np.ndarray, b_k: np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray | None]:
    """One node's compression: samples to y_k X_k, matrix rows to X_k^T B_k."""
    if x_k.shape[0] != y_k.shape[1]:
        raise ValueError("filter block and signal block disagree on channels")
    y_hat = y_k @ x_k
    b_hat = None
    if b_k is not None:
        if b_k.shape[0] != x_k.shape[0]:
            raise ValueError("filter block and matrix block disagree on channels")
        b_hat = x_k.T @ b_k
    return y_hat, b_hat


def fuse_forward(
    tree: PrunedTree, contributions: dict[int, np.ndarray]
) -> dict[int, np.ndarray]:
    """Leaf-initiated sum-and-forward toward the root.

    Every non-root node adds its own contribution to its children's messages
    and passes the sum to its parent; the returned per-root-neighbor messages
    equal the direct sums over the corresponding clusters.
    """
    q = tree.root
    messages: dict[int, np.ndarray] = {}
    for node in tree.leaf_first_order:
        total = contributions[node]
        for child in tree.children(node):
            total = total + messages[child]
        messages[node] = total
    return {n: messages[n] for n in tree.neighbor_sets[q]}


class CompressionView:
    """The updating node's compressed coordinate system for one iteration.

    Local vectors stack q's own channels first, then one Q-wide block per
    root-neighbor in ascending node order.
    """

    def __init__(
        self, topology: Topology, tree: PrunedTree, blocks: tuple[np.ndarray, ...]
    ):
        self.topology = topology
        self.tree = tree
        self.blocks = blocks
        self.q = tree.root
        self.filter_cols = blocks[0].shape[1]
        self.neighbors = tree.neighbor_sets[self.q]
        self.q_width = topology.channels[self.q - 1]
        self.m_local = self.q_width + len(self.neighbors) * self.filter_cols

    def _cluster_nodes(self, n: int):
        return sorted(self.tree.clusters[n])

    def reference(self) -> np.ndarray:
        """The local coordinates of the current network-wide filter."""
        parts = [self.blocks[self.q - 1]]
        eye = np.eye(self.filter_cols)
        parts.extend(eye for _ in self.neighbors)
        return np.vstack(parts)

    def compress_batch(self, samples: np.ndarray) -> np.ndarray:
        """Map N x M samples into the N x M_local compressed coordinates."""
        contribs = {
            k: samples[:, self.topology.channel_slice(k)] @ self.blocks[k - 1]
            for k in range(1, self.topology.node_count + 1)
            if k != self.q
        }
        fused = fuse_forward(self.tree, contribs)
        parts = [samples[:, self.topology.channel_slice(self.q)]]
        parts.extend(fused[n] for n in self.neighbors)
        return np.hstack(parts)

    def compress_cols(self, mat: np.ndarray) -> np.ndarray:
        """Map an M x L matrix into M_local x L compressed rows."""
        contribs = {
            k: self.blocks[k - 1].T @ mat[self.topology.channel_slice(k)]
            for k in range(1, self.topology.node_count + 1)
            if k != self.q
        }
        fused = fuse_forward(self.tree, contribs)
        parts = [mat[self.topology.channel_slice(self.q)]]
        parts.extend(fused[n] for n in self.neighbors)
        return np.vstack(parts)

    def compress_gram(self, mat: np.ndarray) -> np.ndarray:
        """Blockwise congruence of a symmetric M x M matrix into local space."""
        cols = [mat[:, self.topology.channel_slice(self.q)]]
        for n in self.neighbors:
            acc = np.zeros((mat.shape[0], self.filter_cols))
            for k in self._cluster_nodes(n):
                acc += mat[:, self.topology.channel_slice(k)] @ self.blocks[k - 1]
            cols.append(acc)
        half = np.hstack(cols)
        rows = [half[self.topology.channel_slice(self.q)]]
        for n in self.neighbors:
            acc = np.zeros((self.filter_cols, half.shape[1]))
            for k in self._cluster_nodes(n):
                acc += self.blocks[k - 1].T @ half[self.topology.channel_slice(k)]
            rows.append(acc)
        out = np.vstack(rows)
        return 0.5 * (out + out.T)

    def identity_gram(self) -> np.ndarray:
        """Gram matrix of the compression map (block diagonal by clusters)."""
        out = np.zeros((self.m_local, self.m_local))
        out[: self.q_width, : self.q_width] = np.eye(self.q_width)
        offset = self.q_width
        for n in self.neighbors:
            acc = np.zeros((self.filter_cols, self.filter_cols))
            for k in self._cluster_nodes(n):
                acc += self.blocks[k - 1].T @ self.blocks[k - 1]
            out[offset : offset + self.filter_cols, offset : offset + self.filter_cols] = acc
            offset += self.filter_cols
        return out

    def expand_blocks(self, x_tilde: np.ndarray) -> tuple[np.ndarray, ...]:
        """Apply the update rule: install q's block, mix each cluster's blocks."""
        new_blocks = list(self.blocks)
        new_blocks[self.q - 1] = np.array(x_tilde[: self.q_width], dtype=float)
        offset = self.q_width
        for n in self.neighbors:
            mix = x_tilde[offset : offset + self.filter_cols]
            offset += self.filter_cols
            for k in self._cluster_nodes(n):
                new_blocks[k - 1] = self.blocks[k - 1] @ mix
        return tuple(new_blocks)

    def dense_compression(self) -> np.ndarray:
        """Materialize the M x M_local map (debug oracle only)."""
        out = np.zeros((self.topology.total_channels, self.m_local))
        out[self.topology.channel_slice(self.q), : self.q_width] = np.eye(self.q_width)
        offset = self.q_width
        for n in self.neighbors:
            for k in self._cluster_nodes(n):
                out[
                    self.topology.channel_slice(k), offset : offset + self.filter_cols
                ] = self.blocks[k - 1]
            offset += self.filter_cols
        return out


def build_local_view(
    topology: Topology, tree: PrunedTree, blocks
) -> CompressionView:
    return CompressionView(topology, tree, tuple(blocks))


class SpatialTask(abc.ABC):
    """Binds a fractional problem to its network-wide deterministic data."""

    problem: FractionalProblem
    uses_v = False
    uses_d = False
    b_total_cols = 0

    @abc.abstractmethod
    def global_data(self, stats: SecondOrderStats): ...

    @abc.abstractmethod
    def local_data(self, view: CompressionView, stats: SecondOrderStats): ...

    @abc.abstractmethod
    def global_constraint_residual(self, x: np.ndarray) -> float: ...

    @abc.abstractmethod
    def repair_feasible(self, x: np.ndarray) -> np.ndarray: ...

    def align_reference(self, x_star: np.ndarray, x_final: np.ndarray) -> np.ndarray:
        """Pick the solution-set member best matching the final iterate."""
        return np.array(x_star, dtype=float)


class TroTask(SpatialTask):
    uses_v = True

    def __init__(self, q: int, m: int):
        self.problem = TroProblem(q)
        self.m = m
        self.b_total_cols = m  # the identity matrix backing the constraint

    def global_data(self, stats):
        return TroData(stats.r_vv, stats.r_yy, np.eye(self.m))

    def local_data(self, view, stats):
        return TroData(stats.r_vv, stats.r_yy, view.identity_gram())

    def global_constraint_residual(self, x):
        return float(np.linalg.norm(x.T @ x - np.eye(x.shape[1])))

    def repair_feasible(self, x):
        q_mat, _ = np.linalg.qr(x)
        return q_mat

    def align_reference(self, x_star, x_final):
        return match_column_signs(x_star, x_final)


class RtlsTask(SpatialTask):
    uses_d = True

    def __init__(self, l_mat: np.ndarray):
        self.problem = RtlsProblem()
        self.l_outer = l_mat @ l_mat.T
        self.m = l_mat.shape[0]
        self.b_total_cols = 2 * self.m  # identity plus the regularizer matrix

    def global_data(self, stats):
        return RtlsData(
            stats.r_yy, stats.r_yd, stats.r_dd, np.eye(self.m), self.l_outer
        )

    def local_data(self, view, stats):
        return RtlsData(
            stats.r_yy,
            stats.r_yd,
            stats.r_dd,
            view.identity_gram(),
            view.compress_gram(self.l_outer),
        )

    def global_constraint_residual(self, x):
        v = x[:, 0]
        return max(0.0, float(v @ (self.l_outer @ v)) - 1.0)

    def repair_feasible(self, x):
        v = x[:, 0]
        s = float(v @ (self.l_outer @ v))
        if s > 1.0:
            return x / np.sqrt(s)
        return x


class QolTask(SpatialTask):
    def __init__(self, a: np.ndarray, b: np.ndarray, c: float):
        self.problem = QolProblem(a.shape[1])
        self.a = a
        self.b = b
        self.c = c
        self.b_total_cols = 2 * a.shape[1]

    def global_data(self, stats):
        return QolData(stats.r_yy, self.a, self.b, self.c)

    def local_data(self, view, stats):
        return QolData(
            stats.r_yy, view.compress_cols(self.a), view.compress_cols(self.b), self.c
        )

    def global_constraint_residual(self, x):
        return max(0.0, -(float(np.sum(x * self.b)) + self.c))

    def repair_feasible(self, x):
        value = float(np.sum(x * self.b)) + self.c
        if value > 0.0:
            return x
        target = 0.5 * abs(self.c) + 1.0
        trace_b = float(np.sum(x * self.b))
        if abs(trace_b) > 1e-12:
            return x * ((target - self.c) / trace_b)
        gamma = (target - self.c - trace_b) / float(np.sum(self.b * self.b))
        return x + gamma * self.b


class ModelSource:
    """Window-indexed data source backed by a signal model.

    Iteration ``i`` covers time indices ``[i n, (i+1) n)``; both algorithm
    variants therefore consume identical sample batches for the same stream
    seed, and exact statistics are evaluated at the window start.
    """

    def __init__(self, model, n: int, stream_seed: int, channels):
        from .signals import exact_stats, sample_batch

        self._sample_batch = sample_batch
        self._exact_stats = exact_stats
        self.model = model
        self.samples_per_iteration = n
        self.stream_seed = stream_seed
        self.channels = tuple(channels)

    def batch(self, iteration: int) -> SampleBatch:
        n = self.samples_per_iteration
        return self._sample_batch(
            self.model, iteration * n, n, self.stream_seed, self.channels
        )

    def exact(self, iteration: int) -> SecondOrderStats:
        return self._exact_stats(
            self.model, iteration * self.samples_per_iteration
        )


def local_rho(problem: FractionalProblem, data, view: CompressionView) -> float:
    """The current ratio evaluated on the compressed view (equals the
    network-wide ratio at the stacked filter)."""
    return problem.ratio(view.reference(), data)


def local_solve(
    problem: FractionalProblem,
    data,
    view: CompressionView,
    rho: float,
    mode: str,
    baseline_tol: float = 1e-8,
    baseline_max_iter: int = 10,
) -> tuple[np.ndarray, int, bool]:
    """Solve the compressed problem at the updating node.

    Interleaved mode performs exactly one auxiliary minimization at the
    incoming ratio; baseline mode runs the full parametric loop on the
    compressed fractional problem.  Returns (solution, auxiliary solve
    count, domain flag).
    """
    reference = view.reference()
    if mode == "fdasf":
        aux = problem.solve_auxiliary(rho, data, warm_start=reference)
        return aux.x, 1, aux.domain_ok
    if mode == "dasf":
        x_new, _, trace = dinkelbach_solve(
            problem, data, reference, tol=baseline_tol, max_iter=baseline_max_iter
        )
        return x_new, trace.aux_solve_count, True
    raise ValueError(f"unknown mode {mode!r}")


def select_solution(candidates, reference: np.ndarray) -> np.ndarray:
    """Closest candidate to the reference in Frobenius norm (ties keep the
    earliest candidate, so canonical orderings win)."""
    candidates = list(candidates)
    if not candidates:
        raise ValueError("empty candidate set")
    dists = [float(np.linalg.norm(c - reference)) for c in candidates]
    return candidates[int(np.argmin(dists))]


def disseminate_update(
    state: DistributedState, view: CompressionView, x_tilde: np.ndarray
) -> DistributedState:
    """Install the partitioned local solution into every node's block."""
    return DistributedState(
        view.expand_blocks(x_tilde),
        state.iteration + 1,
        rho=state.rho,
        mode=state.mode,
    )


def _local_stats_from_batch(
    view: CompressionView, batch: SampleBatch, task: SpatialTask
) -> SecondOrderStats:
    n = batch.n
    y_t = view.compress_batch(batch.y)
    r_yy = y_t.T @ y_t / n
    r_vv = None
    if task.uses_v:
        v_t = view.compress_batch(batch.v)
        r_vv = v_t.T @ v_t / n
    r_yd = None
    r_dd = None
    if task.uses_d:
        r_yd = y_t.T @ batch.d / n
        r_dd = float(batch.d[:, 0] @ batch.d[:, 0] / n)
    return SecondOrderStats(r_yy, r_vv, r_yd, r_dd)


def _local_stats_from_exact(
    view: CompressionView, stats: SecondOrderStats, task: SpatialTask
) -> SecondOrderStats:
    r_yy = view.compress_gram(stats.r_yy)
    r_vv = view.compress_gram(stats.r_vv) if task.uses_v else None
    r_yd = view.compress_cols(stats.r_yd) if task.uses_d else None
    r_dd = stats.r_dd if task.uses_d else None
    return SecondOrderStats(r_yy, r_vv, r_yd, r_dd)


class NetworkSolver:
    """Runs the distributed iterations of one algorithm variant.

    ``stats_mode`` selects between sample-average statistics over each
    iteration's fresh batch and analytically exact statistics compressed
    through the current view (the infinite-sample regime in which the
    convergence guarantees are stated).
    """

    def __init__(
        self,
        task: SpatialTask,
        topology: Topology,
        source,
        mode: str = "fdasf",
        stats_mode: str = "exact",
        baseline_tol: float = 1e-8,
        baseline_max_iter: int = 10,
        schedule=None,
        debug: bool = False,
        track_digests: bool = False,
    ):
        if mode not in ("fdasf", "dasf"):
            raise ValueError(f"unknown mode {mode!r}")
        if stats_mode not in ("empirical", "exact"):
            raise ValueError(f"unknown stats_mode {stats_mode!r}")
        q_cols = task.problem.q
        if q_cols > min(topology.channels):
            raise ValueError(
                "filter width exceeds a node's channel count; such networks "
                "are rejected (no raw-relay fallback)"
            )
        self.task = task
        self.topology = topology
        self.source = source
        self.mode = mode
        self.stats_mode = stats_mode
        self.baseline_tol = baseline_tol
        self.baseline_max_iter = baseline_max_iter
        self.schedule = schedule or (
            lambda i: (i % topology.node_count) + 1
        )
        self.debug = debug
        self.track_digests = track_digests

    def initial_state(self, x0: np.ndarray) -> DistributedState:
        return DistributedState.from_stacked(x0, self.topology.channels, self.mode)

    def _scalars_per_iteration(self) -> int:
        k = self.topology.node_count
        q_cols = self.task.problem.q
        n = self.source.samples_per_iteration
        return (k - 1) * (n * q_cols + q_cols * self.task.b_total_cols + q_cols * q_cols)

    def step(self, state: DistributedState) -> tuple[DistributedState, IterationMetrics]:
        i = state.iteration
        q = self.schedule(i)
        tree = prune_to_tree(self.topology, q, seed=i)
        view = CompressionView(self.topology, tree, state.blocks)
        problem = self.task.problem

        batch = None
        if self.stats_mode == "empirical":
            batch = self.source.batch(i)
            stats_loc = _local_stats_from_batch(view, batch, self.task)
        else:
            stats_glob = self.source.exact(i)
            stats_loc = _local_stats_from_exact(view, stats_glob, self.task)
        data_loc = self.task.local_data(view, stats_loc)

        rho_i = local_rho(problem, data_loc, view)
        x_tilde, solves, domain_ok = local_solve(
            problem,
            data_loc,
            view,
            rho_i,
            self.mode,
            self.baseline_tol,
            self.baseline_max_iter,
        )
        x_before = state.stacked()
        new_state = DistributedState(
            view.expand_blocks(x_tilde), i + 1, rho=rho_i, mode=self.mode
        )

        metrics = IterationMetrics(
            updating_node=q,
            aux_solves=solves,
            scalars_transmitted=self._scalars_per_iteration(),
            rho_local=rho_i,
            rho_after=problem.ratio(x_tilde, data_loc),
            constraint_residual=self.task.global_constraint_residual(x_before),
            domain_ok=domain_ok,
        )
        if self.track_digests and batch is not None:
            metrics.batch_digest = hashlib.sha256(
                np.ascontiguousarray(batch.y).tobytes()
            ).hexdigest()
        if self.debug:
            self._debug_checks(view, state, new_state, data_loc, x_tilde, batch, metrics)
        return new_state, metrics

    def run(
        self, state: DistributedState, iterations: int, keep_iterates: bool = False
    ) -> tuple[DistributedState, list[IterationMetrics], list[np.ndarray]]:
        iterates = []
        history = []
        for _ in range(iterations):
            if keep_iterates:
                iterates.append(state.stacked())
            state, metrics = self.step(state)
            history.append(metrics)
        return state, history, iterates

    def _debug_checks(
        self, view, state, new_state, data_loc, x_tilde, batch, metrics
    ) -> None:
        problem = self.task.problem
        if self.stats_mode == "empirical":
            stats_glob = batch_stats(batch)
        else:
            stats_glob = self.source.exact(state.iteration)
        data_glob = self.task.global_data(stats_glob)
        x_ref = view.reference()
        x_glob = state.stacked()

        def rel(a: float, b: float) -> float:
            return abs(a - b) / max(1.0, abs(a), abs(b))

        worst = rel(problem.f1(x_ref, data_loc), problem.f1(x_glob, data_glob))
        worst = max(worst, rel(problem.f2(x_ref, data_loc), problem.f2(x_glob, data_glob)))
        h_loc = problem.constraint_values(x_ref, data_loc)
        h_glob = problem.constraint_values(x_glob, data_glob)
        for a, b in zip(h_loc, h_glob):
            worst = max(worst, rel(float(a), float(b)))
        metrics.debug_consistency = worst

        explicit = view.dense_compression() @ x_tilde
        stacked = new_state.stacked()
        denom = max(1e-30, float(np.linalg.norm(explicit)))
        metrics.debug_expand = float(np.linalg.norm(stacked - explicit)) / denom


def iterate(
    state: DistributedState,
    topology: Topology,
    task: SpatialTask,
    source,
    mode: str = "fdasf",
    stats_mode: str = "exact",
    schedule=None,
    **solver_kwargs,
) -> tuple[DistributedState, IterationMetrics]:
    """Single iteration convenience wrapper around :class:`NetworkSolver`."""
    solver = NetworkSolver(
        task, topology, source, mode=mode, stats_mode=stats_mode,
        schedule=schedule, **solver_kwargs,
    )
    return solver.step(state)


def kkt_residual(
    x: np.ndarray,
    problem: FractionalProblem,
    data,
    active_tol: float = 1e-8,
) -> float:
    """First-order optimality residual of the fractional problem at ``x``.

    Multipliers are fitted by least squares to the stationarity equation of
    the ratio objective; the returned scalar adds the stationarity norm to
    the primal, dual and complementary-slackness violations.  A rank
    deficient active-gradient set (constraint-qualification failure) is
    reported as a warning.
    """
    rho = problem.ratio(x, data)
    f2 = problem.f2(x, data)
    grad_ratio = problem.f_gradient(x, rho, data) / f2

    values = problem.constraint_values(x, data)
    kinds = problem.constraint_kinds
    grads = problem.constraint_gradients(x, data)

    active = [
        j
        for j in range(len(kinds))
        if kinds[j] == "eq" or values[j] >= -active_tol
    ]
    primal = problem.constraint_residual(x, data)
    if not active:
        return float(np.linalg.norm(grad_ratio)) + primal

    basis = np.column_stack([grads[j].ravel() for j in active])
    rhs = -grad_ratio.ravel()
    mult, _, rank, _ = np.linalg.lstsq(basis, rhs, rcond=None)
    if rank < len(active):
        warnings.warn(
            "active constraint gradients are rank deficient (constraint "
            "qualification violated)",
            stacklevel=2,
        )
    stationarity = float(np.linalg.norm(basis @ mult - rhs))
    dual = sum(
        max(0.0, -float(mult[idx]))
        for idx, j in enumerate(active)
        if kinds[j] == "ineq"
    )
    comp = sum(
        abs(float(mult[idx]) * float(values[j]))
        for idx, j in enumerate(active)
        if kinds[j] == "ineq"
    )
    return stationarity + primal + dual + comp


@dataclass(frozen=True)
class ConstraintBoundReport:
    constraint_count: int
    filter_cols: int
    simple_bound: int
    simple_ok: bool
    topology_bound: float
    topology_ok: bool

    @property
    def satisfied(self) -> bool:
        return self.simple_ok or self.topology_ok


def check_constraint_bounds(
    constraint_count: int, filter_cols: int, topology: Topology
) -> ConstraintBoundReport:
    """Check the constraint-count bounds backing the stationarity guarantees.

    The simple bound requires at most Q^2 constraints; the topology-aware
    bound relaxes it using node degrees.  Advisory only: a warning is
    emitted when neither holds.
    """
    simple_bound = filter_cols**2
    k = topology.node_count
    degrees = [topology.degree(node) for node in range(1, k + 1)]
    topo_bound = min(
        filter_cols**2 / (k - 1) * sum(degrees) if k > 1 else np.inf,
        (1 + min(degrees)) * filter_cols**2,
    )
    report = ConstraintBoundReport(
        constraint_count,
        filter_cols,
        simple_bound,
        constraint_count <= simple_bound,
        float(topo_bound),
        constraint_count <= topo_bound,
    )
    if not report.satisfied:
        warnings.warn(
            f"{constraint_count} constraints exceed both stationarity bounds "
            f"({simple_bound} and {topo_bound:.3g}); fixed points may not be "
            "stationary",
            stacklevel=2,
        )
    return report
