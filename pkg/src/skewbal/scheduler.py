"""Slot assignment by dynamic programming decomposition, and balance metrics."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .bss import delta_for_eta, exact_bss, relax_bss
from .partition import DEFAULT_GROUP_THRESHOLD, OperationLoads, assign_hash_baseline, operations_for
from .workload import KeyHistogram

DEFAULT_ETA = 0.002
DEFAULT_EXACT_THRESHOLD = 2_000_000


@dataclass(frozen=True)
class Schedule:
    """``assignment[j]`` is the 1-based slot of operation ``j``."""

    m: int
    assignment: tuple[int, ...]
    slot_loads: tuple[int, ...]

    @classmethod
    def from_assignment(cls, assignment: Sequence[int], loads: Sequence[int], m: int) -> "Schedule":
        if len(assignment) != len(loads):
            raise ValueError("assignment and loads differ in length")
        slot_loads = [0] * m
        for slot, load in zip(assignment, loads):
            if not 1 <= slot <= m:
                raise ValueError(f"slot {slot} outside 1..{m}")
            slot_loads[slot - 1] += load
        return cls(m, tuple(int(s) for s in assignment), tuple(slot_loads))

    def slot_members(self) -> list[list[int]]:
        members: list[list[int]] = [[] for _ in range(self.m)]
        for j, slot in enumerate(self.assignment):
            members[slot - 1].append(j)
        return members

    def to_dict(self) -> dict:
        return {"m": self.m, "assignment": list(self.assignment), "slot_loads": list(self.slot_loads)}

    @classmethod
    def from_dict(cls, data: dict, loads: Sequence[int] | None = None) -> "Schedule":
        m = int(data["m"])
        assignment = [int(s) for s in data["assignment"]]
        if loads is None:
            return cls(m, tuple(assignment), tuple(int(p) for p in data["slot_loads"]))
        sched = cls.from_assignment(assignment, loads, m)
        if "slot_loads" in data and list(sched.slot_loads) != [int(p) for p in data["slot_loads"]]:
            raise ValueError("slot_loads do not match the assignment and loads")
        return sched

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["op_index", "slot"])
        w.writerows(enumerate(self.assignment))
        return buf.getvalue()


@dataclass(frozen=True)
class BalanceMetrics:
    max_load: int
    variance: float
    ideal_load: float
    max_over_ideal: float


def compute_metrics(schedule: Schedule, loads: OperationLoads | Sequence[int]) -> BalanceMetrics:
    loads = loads.loads if isinstance(loads, OperationLoads) else tuple(loads)
    if len(loads) != len(schedule.assignment):
        raise ValueError("schedule and loads cover different numbers of operations")
    p = np.array(Schedule.from_assignment(schedule.assignment, loads, schedule.m).slot_loads, dtype=float)
    ideal = sum(loads) / schedule.m
    max_load = int(p.max())
    return BalanceMetrics(
        max_load=max_load,
        variance=float(np.mean((p - p.mean()) ** 2)),
        ideal_load=ideal,
        max_over_ideal=max_load / ideal,
    )


def schedule_dpd(
    loads: OperationLoads | Sequence[int],
    m: int,
    eta: float = DEFAULT_ETA,
    exact_threshold: int = DEFAULT_EXACT_THRESHOLD,
) -> Schedule:
    """Fill slots one at a time, each with a subset closest to its fair share.

    With ``k`` slots left and remaining operations ``S`` the target is
    ``ceil(sum(S) / k)``. Small instances (``|S| * target <= exact_threshold``)
    are solved exactly, larger ones on loads rounded to keep the relative
    error within ``eta``. The last slot takes whatever remains.
    """
    loads = loads.loads if isinstance(loads, OperationLoads) else tuple(loads)
    if m < 1:
        raise ValueError("m must be >= 1")
    if not loads or any(k < 1 for k in loads):
        raise ValueError("loads must be a nonempty list of positive integers")
    assignment = [0] * len(loads)
    remaining = sorted(range(len(loads)), key=lambda j: (-loads[j], j))
    for slot in range(1, m):
        if not remaining:
            break
        k = m - slot + 1
        sub = [loads[j] for j in remaining]
        target = -(-sum(sub) // k)
        if len(sub) * target <= exact_threshold:
            sol = exact_bss(sub, target)
        else:
            sol = relax_bss(sub, target, delta_for_eta(eta, target, len(sub)))
        for j, y in zip(remaining, sol.selection):
            if y:
                assignment[j] = slot
        remaining = [j for j, y in zip(remaining, sol.selection) if not y]
    for j in remaining:
        assignment[j] = m
    return Schedule.from_assignment(assignment, loads, m)


@dataclass
class ComparisonReport:
    m: int
    n_keys: int
    n_operations: int
    grouped: bool
    hash: BalanceMetrics
    dpd: BalanceMetrics
    max_load_ratio: float
    hash_schedule: Schedule = field(repr=False)
    dpd_schedule: Schedule = field(repr=False)
    operations: OperationLoads = field(repr=False)
    solver_seconds: float = 0.0

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "m": self.m,
            "n_keys": self.n_keys,
            "n_operations": self.n_operations,
            "grouped": self.grouped,
            "hash": asdict(self.hash),
            "dpd": asdict(self.dpd),
            "max_load_ratio": self.max_load_ratio,
        }
        if timing:
            out["solver_seconds"] = self.solver_seconds
        return out


def compare_schedulers(
    hist: KeyHistogram,
    m: int,
    eta: float = DEFAULT_ETA,
    group_threshold: int = DEFAULT_GROUP_THRESHOLD,
    exact_threshold: int = DEFAULT_EXACT_THRESHOLD,
) -> ComparisonReport:
    """Hash-mod routing versus DPD scheduling on the same histogram."""
    if m < 1:
        raise ValueError("m must be >= 1")
    hash_sched = assign_hash_baseline(hist, m)
    hash_metrics = compute_metrics(hash_sched, hist.counts)
    ops = operations_for(hist, group_threshold)
    start = time.perf_counter()
    dpd_sched = schedule_dpd(ops, m, eta, exact_threshold)
    elapsed = time.perf_counter() - start
    dpd_metrics = compute_metrics(dpd_sched, ops)
    return ComparisonReport(
        m=m,
        n_keys=len(hist),
        n_operations=len(ops),
        grouped=len(hist) > group_threshold,
        hash=hash_metrics,
        dpd=dpd_metrics,
        max_load_ratio=dpd_metrics.max_load / hash_metrics.max_load,
        hash_schedule=hash_sched,
        dpd_schedule=dpd_sched,
        operations=ops,
        solver_seconds=elapsed,
    )
