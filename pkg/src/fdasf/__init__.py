"""Distributed solvers and simulation harness for fractional spatial filtering."""

from .fracprog import (
    AuxResult,
    DinkelbachTrace,
    FractionalProblem,
    dinkelbach_solve,
    evaluate_ratio,
    g_value,
)
from .kernels import evd_top_q, gevd_top_q, gtrs_solve
from .netgraph import PrunedTree, Topology, generate_erdos_renyi, prune_to_tree
from .problems import (
    QolData,
    QolProblem,
    RtlsData,
    RtlsProblem,
    TroData,
    TroProblem,
    qol_problem,
    rtls_problem,
    tro_problem,
)
from .signals import (
    RampProfile,
    SampleBatch,
    SecondOrderStats,
    SignalModel,
    batch_stats,
    draw_model,
    exact_stats,
    mixture_at,
    sample_batch,
)
from .dasf import (
    CompressionView,
    DistributedState,
    ModelSource,
    NetworkSolver,
    QolTask,
    RtlsTask,
    TroTask,
    check_constraint_bounds,
    kkt_residual,
)
from .harness import (
    ExperimentConfig,
    ExperimentOutput,
    ExperimentReport,
    centralized_reference,
    medse,
    run_adaptive,
    run_experiment,
    write_outputs,
)

__version__ = "0.1.0"
