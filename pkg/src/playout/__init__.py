"""Starvation analytics for streaming playout buffers.

Exact starvation-count distributions for M/M/1 and slotted playback, a
recursive solver extended to ON/OFF bursty arrivals, fluid-limit tails over
file-size populations, QoE-optimal prefetch thresholds, and an event-driven
Monte Carlo simulator that cross-validates all of the above.
"""

from .ballot import (
    BandedToeplitzMatrix,
    EventVectors,
    asymptotic_starvation_probability,
    event_vectors,
    first_starvation_vector,
    gaussian_term,
    gaussian_term_error_bound,
    inter_starvation_matrix,
    last_starvation_vector,
    mean_starvation_interval,
    pgf,
    starvation_pmf,
    starvation_probability,
)
from .core import (
    IppParams,
    QueueParams,
    ScenarioSpec,
    SlotParams,
    StarvationDistribution,
    log_binomial_pmf,
    poisson_pmf,
)
from .fluid import (
    Exponential,
    FluidScenario,
    LogNormal,
    Pareto,
    fluid_starvation_probability,
    match_means,
    no_starvation_horizon,
)
from .qoe import (
    OptimizationResult,
    QoeWeights,
    cost_finite,
    lambert_w0,
    optimize_file_level,
    optimize_finite,
    optimize_infinite_subcritical,
    optimize_infinite_supercritical,
)
from .recursive import (
    DepartureKernel,
    RecursionTable,
    build_recursion_table,
    ipp_kernel,
    mm1_kernel,
    starvation_pmf_recursive,
    starvation_probability_recursive,
)
from .sim import SimConfig, SimReport, simulate, simulate_kernel_check
from .takacs import (
    SlottedScenario,
    takacs_first_starvation,
    takacs_pmf,
    takacs_starvation_probability,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "QueueParams",
    "IppParams",
    "SlotParams",
    "ScenarioSpec",
    "StarvationDistribution",
    "log_binomial_pmf",
    "poisson_pmf",
    "BandedToeplitzMatrix",
    "EventVectors",
    "starvation_probability",
    "first_starvation_vector",
    "last_starvation_vector",
    "event_vectors",
    "inter_starvation_matrix",
    "starvation_pmf",
    "pgf",
    "gaussian_term",
    "gaussian_term_error_bound",
    "asymptotic_starvation_probability",
    "mean_starvation_interval",
    "SlottedScenario",
    "takacs_first_starvation",
    "takacs_starvation_probability",
    "takacs_pmf",
    "DepartureKernel",
    "RecursionTable",
    "mm1_kernel",
    "ipp_kernel",
    "starvation_probability_recursive",
    "starvation_pmf_recursive",
    "build_recursion_table",
    "Exponential",
    "Pareto",
    "LogNormal",
    "FluidScenario",
    "no_starvation_horizon",
    "fluid_starvation_probability",
    "match_means",
    "QoeWeights",
    "OptimizationResult",
    "lambert_w0",
    "cost_finite",
    "optimize_finite",
    "optimize_infinite_supercritical",
    "optimize_infinite_subcritical",
    "optimize_file_level",
    "SimConfig",
    "SimReport",
    "simulate",
    "simulate_kernel_check",
]
