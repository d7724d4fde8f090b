"""Key-distribution-aware load balancing for MapReduce Reduce tasks."""

from .bss import BssSolution, brute_force_bss, delta_for_eta, exact_bss, relax_bss, trim
from .estimators import DPDPartitioner, HashPartitioner
from .partition import (
    FlowEstimate,
    OperationLoads,
    assign_hash_baseline,
    combine_operations,
    hash_key,
    map_rounds,
    network_flow_estimate,
)
from .scheduler import BalanceMetrics, Schedule, compare_schedulers, compute_metrics, schedule_dpd
from .simulator import CostModel, JobReport, TaskTimeline, simulate_job, simulate_task
from .workload import KeyHistogram, gen_uniform, gen_zipf, load_histogram

__all__ = [
    "BalanceMetrics", "BssSolution", "CostModel", "DPDPartitioner", "FlowEstimate",
    "HashPartitioner", "JobReport", "KeyHistogram", "OperationLoads", "Schedule",
    "TaskTimeline", "assign_hash_baseline", "brute_force_bss", "combine_operations",
    "compare_schedulers", "compute_metrics", "delta_for_eta", "exact_bss", "gen_uniform",
    "gen_zipf", "hash_key", "load_histogram", "map_rounds", "network_flow_estimate",
    "relax_bss", "schedule_dpd", "simulate_job", "simulate_task", "trim",
]
