"""Experiment orchestration: Monte Carlo campaigns, references, MedSE, export.

Each Monte Carlo run draws its own topology, signal model, problem constants
and initial filter from seeds derived from (experiment seed, run id); all
algorithm variants within a run consume byte-identical sample streams so
cost comparisons are paired.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dasf import (
    ModelSource,
    NetworkSolver,
    QolTask,
    RtlsTask,
    SpatialTask,
    TroTask,
)
from .fracprog import FractionalProblem, dinkelbach_solve
from .netgraph import Topology, generate_erdos_renyi
from .problems import QolData, qol_feasibility_bounds
from .signals import RampProfile, SignalModel, batch_stats, draw_model, exact_stats

__all__ = [
    "ExperimentConfig",
    "AdaptiveSettings",
    "ExperimentError",
    "ConfigError",
    "RunRecord",
    "RunResult",
    "ExperimentReport",
    "ExperimentOutput",
    "DEFAULT_RAMP",
    "centralized_reference",
    "align_reference",
    "medse",
    "prepare_run",
    "execute_mode",
    "execute_modes",
    "run_experiment",
    "run_adaptive",
    "write_outputs",
]

PROBLEMS = ("tro", "rtls", "qol")
MODES = ("fdasf", "dasf", "both")
STATS_MODES = ("empirical", "exact")

RTLS_TARGET_NOISE_VAR = 0.02
RTLS_REGULARIZER_MEAN = 1.0
RTLS_REGULARIZER_VAR = 0.1

# One gradual drift followed by one abrupt change (time in sample indices).
# The hold level stays well below 1 so the final step crosses the balance
# point between the base mixture and its perturbation, visibly rotating the
# optimum instead of moving within an already perturbation-dominated span.
DEFAULT_RAMP = ((0.0, 0.0), (15000.0, 0.0), (35000.0, 0.1),
                (44999.0, 0.1), (45000.0, 1.0))

_MAX_FAILED_FRACTION = 0.05


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class ExperimentError(RuntimeError):
    """Too many Monte Carlo runs failed."""


@dataclass(frozen=True)
class AdaptiveSettings:
    drift_var: float
    ramp: tuple[tuple[float, float], ...] = DEFAULT_RAMP


@dataclass
class ExperimentConfig:
    problem: str
    mode: str = "both"
    q: int = 1
    k: int = 10
    m: int = 50
    source_var: float = 0.5
    noise_var: float = 0.2
    mixture_var: float = 0.3
    samples: int = 10_000
    iterations: int = 200
    runs: int = 100
    seed: int = 0
    stats_mode: str = "empirical"
    er_probability: float = 0.8
    adaptive: AdaptiveSettings | None = None
    baseline_tol: float = 1e-8
    baseline_max_iter: int = 10

    def validate(self) -> None:
        if self.problem not in PROBLEMS:
            raise ConfigError(f"unknown problem {self.problem!r}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.stats_mode not in STATS_MODES:
            raise ConfigError(f"unknown stats_mode {self.stats_mode!r}")
        if self.k < 1 or self.m < 1 or self.q < 1:
            raise ConfigError("dimensions must be positive")
        if self.m % self.k != 0:
            raise ConfigError("total channel count must be divisible by the node count")
        if self.q > self.m // self.k:
            raise ConfigError("filter width must not exceed per-node channels")
        if self.problem == "rtls" and self.q != 1:
            raise ConfigError("the RTLS filter is a vector (q = 1)")
        if min(self.source_var, self.noise_var, self.mixture_var) <= 0:
            raise ConfigError("variances must be positive")
        if self.samples < 1 or self.iterations < 0 or self.runs < 1:
            raise ConfigError("samples/iterations/runs out of range")
        if not 0.0 <= self.er_probability <= 1.0:
            raise ConfigError("er_probability must lie in [0, 1]")
        if self.adaptive is not None and self.adaptive.drift_var <= 0:
            raise ConfigError("drift_var must be positive")

    @property
    def modes(self) -> tuple[str, ...]:
        return ("fdasf", "dasf") if self.mode == "both" else (self.mode,)

    @property
    def channels(self) -> tuple[int, ...]:
        return (self.m // self.k,) * self.k

    def to_dict(self) -> dict:
        doc = {
            name: getattr(self, name)
            for name in (
                "problem", "mode", "q", "k", "m", "source_var", "noise_var",
                "mixture_var", "samples", "iterations", "runs", "seed",
                "stats_mode", "er_probability", "baseline_tol",
                "baseline_max_iter",
            )
        }
        doc["adaptive"] = (
            None
            if self.adaptive is None
            else {
                "drift_var": self.adaptive.drift_var,
                "ramp": [list(knot) for knot in self.adaptive.ramp],
            }
        )
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        if "problem" not in doc:
            raise ConfigError("config requires a 'problem' field")
        kwargs = dict(doc)
        adaptive = kwargs.pop("adaptive", None)
        if adaptive is not None:
            kwargs["adaptive"] = AdaptiveSettings(
                float(adaptive["drift_var"]),
                tuple(
                    (float(t), float(v))
                    for t, v in adaptive.get("ramp", DEFAULT_RAMP)
                ),
            )
        return cls(**kwargs)


@dataclass(frozen=True)
class RunRecord:
    iteration: int
    t: int
    updating_node: int
    rho: float
    rel_sq_error: float
    aux_solves_cum: int
    scalars_cum: int
    constraint_residual: float


@dataclass
class RunResult:
    run_id: int
    mode: str
    records: list[RunRecord]


@dataclass
class ModeSummary:
    medse: list[float]
    aux_solves_median_cum: list[float]
    t: list[int]


@dataclass
class ExperimentReport:
    config: dict
    modes: dict[str, ModeSummary]
    aux_ratio: float | None
    failed_runs: int
    ramp: list[float] | None = None

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "modes": {
                name: {
                    "medse": summary.medse,
                    "aux_solves_median_cum": summary.aux_solves_median_cum,
                    "t": summary.t,
                }
                for name, summary in self.modes.items()
            },
            "aux_ratio": self.aux_ratio,
            "failed_runs": self.failed_runs,
            "ramp": self.ramp,
        }


@dataclass
class RunSetup:
    run_id: int
    topology: Topology
    model: SignalModel
    task: SpatialTask
    global_data: object
    x0: np.ndarray
    reference: np.ndarray | None
    stream_seed: int


@dataclass
class ModeRun:
    mode: str
    metrics: list
    iterates: list[np.ndarray]
    final: np.ndarray


@dataclass
class RunDetail:
    setup: RunSetup
    mode_runs: dict[str, ModeRun]


@dataclass
class ExperimentOutput:
    report: ExperimentReport
    runs: dict[str, list[RunResult]]
    details: list[RunDetail] = field(default_factory=list)


def _derived_seeds(seed: int, run_id: int) -> dict[str, int]:
    words = np.random.SeedSequence([seed, run_id]).generate_state(5, dtype=np.uint64)
    names = ("topology", "model", "consts", "init", "stream")
    return {name: int(word) for name, word in zip(names, words)}


def _make_model(config: ExperimentConfig, seed: int) -> SignalModel:
    drift_var = None
    ramp = None
    if config.adaptive is not None:
        drift_var = config.adaptive.drift_var
        ramp = RampProfile(config.adaptive.ramp)
    common = dict(
        source_var=config.source_var,
        noise_var=config.noise_var,
        mixture_var=config.mixture_var,
        seed=seed,
        drift_var=drift_var,
        ramp=ramp,
    )
    if config.problem == "tro":
        return draw_model(config.m, config.q, config.q, **common)
    if config.problem == "rtls":
        return draw_model(
            config.m, 1, 0, target_noise_var=RTLS_TARGET_NOISE_VAR, **common
        )
    return draw_model(config.m, config.q, 0, **common)


def _make_task(config: ExperimentConfig, model: SignalModel, seed: int) -> SpatialTask:
    rng = np.random.default_rng(seed)
    if config.problem == "tro":
        return TroTask(config.q, config.m)
    if config.problem == "rtls":
        diag = rng.normal(
            RTLS_REGULARIZER_MEAN, np.sqrt(RTLS_REGULARIZER_VAR), config.m
        )
        return RtlsTask(np.diag(diag))
    a = rng.normal(0.0, 1.0, (config.m, config.q))
    b = rng.normal(0.0, 1.0, (config.m, config.q))
    r_yy = exact_stats(model, 0).r_yy
    lo, hi = qol_feasibility_bounds(QolData(r_yy, a, b, 0.0))
    cross, root = 0.5 * (lo + hi), 0.5 * (hi - lo)
    c = 0.5 * (cross + 1.5 * root)  # strictly inside the upper branch
    return QolTask(a, b, c)


def _initial_filter(task: SpatialTask, data, seed: int) -> np.ndarray:
    """Random start repaired to feasibility.

    Feasible starts keep the constraint-residual guarantee meaningful from
    iteration 0 while staying O(1) away from the optimum, so error curves
    begin at their natural random-initialization level.
    """
    problem = task.problem
    m = data.r_yy.shape[0]
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((m, problem.q))
    return task.repair_feasible(raw)


def centralized_reference(
    problem: FractionalProblem,
    data,
    x0: np.ndarray,
    tol: float = 1e-12,
    max_iter: int = 100,
) -> np.ndarray:
    """Tightly solved network-wide problem on uncompressed data."""
    x_star, _, _ = dinkelbach_solve(problem, data, x0, tol=tol, max_iter=max_iter)
    return x_star


def align_reference(
    x_star: np.ndarray, x_final: np.ndarray, task: SpatialTask
) -> np.ndarray:
    """Solution-set member of the reference best matching the final iterate."""
    return task.align_reference(x_star, x_final)


def medse(curves) -> np.ndarray:
    """Element-wise median across runs; even counts use the lower median."""
    arr = np.asarray(curves, dtype=float)
    if arr.size == 0 or arr.shape[0] == 0:
        raise ValueError("medse needs at least one run")
    return np.sort(arr, axis=0)[(arr.shape[0] - 1) // 2]


def prepare_run(config: ExperimentConfig, run_id: int) -> RunSetup:
    seeds = _derived_seeds(config.seed, run_id)
    topology = generate_erdos_renyi(
        config.k, config.er_probability, config.channels, seeds["topology"]
    )
    model = _make_model(config, seeds["model"])
    task = _make_task(config, model, seeds["consts"])
    gdata = task.global_data(exact_stats(model, 0))
    x0 = _initial_filter(task, gdata, seeds["init"])
    reference = None
    if config.adaptive is None:
        reference = centralized_reference(task.problem, gdata, x0)
    return RunSetup(run_id, topology, model, task, gdata, x0, reference,
                    seeds["stream"])


class _MemoizedSource:
    """Caches the current iteration's batch so paired modes share it."""

    def __init__(self, inner: ModelSource):
        self.inner = inner
        self._iteration: int | None = None
        self._batch = None

    @property
    def samples_per_iteration(self) -> int:
        return self.inner.samples_per_iteration

    def batch(self, iteration: int):
        if self._iteration != iteration:
            self._batch = self.inner.batch(iteration)
            self._iteration = iteration
        return self._batch

    def exact(self, iteration: int):
        return self.inner.exact(iteration)


def execute_modes(
    setup: RunSetup,
    config: ExperimentConfig,
    modes=None,
    debug: bool = False,
    track_digests: bool = False,
) -> dict[str, ModeRun]:
    """Run the configured variants in lockstep on identical batches."""
    modes = config.modes if modes is None else tuple(modes)
    source = _MemoizedSource(
        ModelSource(
            setup.model, config.samples, setup.stream_seed, setup.topology.channels
        )
    )
    solvers = {}
    states = {}
    for mode in modes:
        solvers[mode] = NetworkSolver(
            setup.task,
            setup.topology,
            source,
            mode=mode,
            stats_mode=config.stats_mode,
            baseline_tol=config.baseline_tol,
            baseline_max_iter=config.baseline_max_iter,
            debug=debug,
            track_digests=track_digests,
        )
        states[mode] = solvers[mode].initial_state(setup.x0)
    metrics = {mode: [] for mode in modes}
    iterates = {mode: [] for mode in modes}
    for _ in range(config.iterations):
        for mode in modes:
            iterates[mode].append(states[mode].stacked())
            states[mode], step_metrics = solvers[mode].step(states[mode])
            metrics[mode].append(step_metrics)
    return {
        mode: ModeRun(mode, metrics[mode], iterates[mode], states[mode].stacked())
        for mode in modes
    }


def execute_mode(
    setup: RunSetup,
    config: ExperimentConfig,
    mode: str,
    debug: bool = False,
    track_digests: bool = False,
) -> ModeRun:
    return execute_modes(setup, config, (mode,), debug, track_digests)[mode]


def _error_curve(
    setup: RunSetup, mode_run: ModeRun, reference: np.ndarray
) -> np.ndarray:
    aligned = align_reference(reference, mode_run.final, setup.task)
    denom = float(np.linalg.norm(aligned) ** 2)
    return np.array(
        [float(np.linalg.norm(x - aligned) ** 2) / denom for x in mode_run.iterates]
    )


def _records_for_mode(
    setup: RunSetup,
    config: ExperimentConfig,
    mode_run: ModeRun,
    errors: np.ndarray,
) -> RunResult:
    sign = setup.task.problem.report_sign
    records = []
    aux_cum = 0
    scalars_cum = 0
    for i, metrics in enumerate(mode_run.metrics):
        aux_cum += metrics.aux_solves
        scalars_cum += metrics.scalars_transmitted
        records.append(
            RunRecord(
                iteration=i,
                t=i * config.samples,
                updating_node=metrics.updating_node,
                rho=sign * metrics.rho_local,
                rel_sq_error=float(errors[i]),
                aux_solves_cum=aux_cum,
                scalars_cum=scalars_cum,
                constraint_residual=metrics.constraint_residual,
            )
        )
    return RunResult(setup.run_id, mode_run.mode, records)


def _aggregate(
    config: ExperimentConfig,
    runs: dict[str, list[RunResult]],
    failed: int,
    ramp: list[float] | None = None,
) -> ExperimentReport:
    modes: dict[str, ModeSummary] = {}
    t_axis = [i * config.samples for i in range(config.iterations)]
    for mode, results in runs.items():
        if results and config.iterations > 0:
            err = np.array(
                [[rec.rel_sq_error for rec in rr.records] for rr in results]
            )
            aux = np.array(
                [[rec.aux_solves_cum for rec in rr.records] for rr in results]
            )
            modes[mode] = ModeSummary(
                medse=medse(err).tolist(),
                aux_solves_median_cum=medse(aux).tolist(),
                t=t_axis,
            )
        else:
            modes[mode] = ModeSummary([], [], [])
    ratio = None
    if "fdasf" in modes and "dasf" in modes and config.iterations > 0:
        fd = np.asarray(modes["fdasf"].aux_solves_median_cum)
        da = np.asarray(modes["dasf"].aux_solves_median_cum)
        if fd.size and np.all(fd > 0):
            ratio = float(np.mean(da / fd))
    return ExperimentReport(config.to_dict(), modes, ratio, failed, ramp)


def _run_all(
    config: ExperimentConfig,
    one_run,
    keep_details: bool,
) -> ExperimentOutput:
    runs: dict[str, list[RunResult]] = {mode: [] for mode in config.modes}
    details: list[RunDetail] = []
    failures: list[tuple[int, Exception]] = []
    ramp_values: list[float] | None = None
    for run_id in range(config.runs):
        try:
            setup, mode_runs, errors, ramp_values = one_run(run_id)
        except Exception as exc:  # noqa: BLE001 - per-run isolation
            failures.append((run_id, exc))
            continue
        for mode, mode_run in mode_runs.items():
            runs[mode].append(
                _records_for_mode(setup, config, mode_run, errors[mode])
            )
        if keep_details:
            details.append(RunDetail(setup, mode_runs))
    if failures:
        fraction = len(failures) / config.runs
        summary = "; ".join(f"run {rid}: {exc}" for rid, exc in failures[:5])
        if fraction > _MAX_FAILED_FRACTION:
            raise ExperimentError(
                f"{len(failures)}/{config.runs} runs failed ({summary})"
            )
        warnings.warn(
            f"excluded {len(failures)}/{config.runs} failed runs ({summary})",
            stacklevel=2,
        )
    report = _aggregate(config, runs, len(failures), ramp_values)
    return ExperimentOutput(report, runs, details)


def run_experiment(
    config: ExperimentConfig, keep_details: bool = False
) -> ExperimentOutput:
    """Stationary Monte Carlo campaign with a fixed centralized reference."""
    config.validate()
    if config.adaptive is not None:
        return run_adaptive(config, keep_details)

    def one_run(run_id: int):
        setup = prepare_run(config, run_id)
        mode_runs = execute_modes(setup, config)
        errors = {
            mode: _error_curve(setup, mode_run, setup.reference)
            for mode, mode_run in mode_runs.items()
        }
        return setup, mode_runs, errors, None

    return _run_all(config, one_run, keep_details)


def run_adaptive(
    config: ExperimentConfig, keep_details: bool = False
) -> ExperimentOutput:
    """Tracking campaign: per-window empirical references follow the drift.

    Window ``i`` covers samples ``[i n, (i+1) n)``; the reference for window
    ``i`` is the tightly solved problem on that window's own sample
    covariances, and the error compares it against the filter in use when
    the window begins.
    """
    config.validate()
    if config.adaptive is None:
        raise ConfigError("run_adaptive requires adaptive settings")

    def one_run(run_id: int):
        setup = prepare_run(config, run_id)
        source = _MemoizedSource(
            ModelSource(
                setup.model, config.samples, setup.stream_seed,
                setup.topology.channels,
            )
        )
        solvers = {}
        states = {}
        for mode in config.modes:
            solvers[mode] = NetworkSolver(
                setup.task,
                setup.topology,
                source,
                mode=mode,
                stats_mode=config.stats_mode,
                baseline_tol=config.baseline_tol,
                baseline_max_iter=config.baseline_max_iter,
            )
            states[mode] = solvers[mode].initial_state(setup.x0)
        metrics = {mode: [] for mode in config.modes}
        iterates = {mode: [] for mode in config.modes}
        errors = {mode: [] for mode in config.modes}
        warm = setup.x0
        for i in range(config.iterations):
            stats = batch_stats(source.batch(i))
            star = centralized_reference(
                setup.task.problem, setup.task.global_data(stats), warm
            )
            warm = star
            for mode in config.modes:
                x_i = states[mode].stacked()
                iterates[mode].append(x_i)
                aligned = align_reference(star, x_i, setup.task)
                errors[mode].append(
                    float(np.linalg.norm(x_i - aligned) ** 2)
                    / float(np.linalg.norm(aligned) ** 2)
                )
                states[mode], step_metrics = solvers[mode].step(states[mode])
                metrics[mode].append(step_metrics)
        mode_runs = {
            mode: ModeRun(
                mode, metrics[mode], iterates[mode], states[mode].stacked()
            )
            for mode in config.modes
        }
        ramp = setup.model.drift.ramp
        ramp_values = [
            float(ramp.value(i * config.samples)) for i in range(config.iterations)
        ]
        return setup, mode_runs, {m: np.array(e) for m, e in errors.items()}, ramp_values

    return _run_all(config, one_run, keep_details)


def write_outputs(output: ExperimentOutput, out_dir) -> None:
    """Write curves.csv, medse.csv and report.json into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "curves.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "mode", "run", "iteration", "t", "updating_node", "rho",
                "rel_sq_error", "aux_solves_cum", "scalars_cum",
                "constraint_residual",
            ]
        )
        for mode in sorted(output.runs):
            for rr in output.runs[mode]:
                for rec in rr.records:
                    writer.writerow(
                        [
                            mode, rr.run_id, rec.iteration, rec.t,
                            rec.updating_node, repr(rec.rho),
                            repr(rec.rel_sq_error), rec.aux_solves_cum,
                            rec.scalars_cum, repr(rec.constraint_residual),
                        ]
                    )

    with open(out / "medse.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mode", "iteration", "t", "medse", "aux_solves_median_cum"])
        for mode in sorted(output.report.modes):
            summary = output.report.modes[mode]
            for i, (t, value, aux) in enumerate(
                zip(summary.t, summary.medse, summary.aux_solves_median_cum)
            ):
                writer.writerow([mode, i, t, repr(value), repr(aux)])

    with open(out / "report.json", "w") as fh:
        json.dump(output.report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
