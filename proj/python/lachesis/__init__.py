"""Heterogeneous DAG scheduling simulator and policies."""

from ._core import (
    Cluster,
    Edge,
    Job,
    SchedulerError,
    TaskNode,
    critical_path_lower_bound,
    generate,
    load_workload,
    make_cluster,
    rank_down,
    rank_up,
    save_workload,
    simulate,
    train,
)

__all__ = [
    "Cluster",
    "Edge",
    "Job",
    "SchedulerError",
    "TaskNode",
    "critical_path_lower_bound",
    "generate",
    "load_workload",
    "make_cluster",
    "rank_down",
    "rank_up",
    "save_workload",
    "simulate",
    "train",
]
