"""Timing model of a Reduce task's copy, sort and run phases.

Each slot owns three lanes (network copier, disk sorter, CPU runner) that
process one operation at a time. Phase durations are linear in the
operation's load. In sequential mode every phase finishes for the whole
task before the next phase starts; in pipelined mode operations flow
through the lanes one by one, smallest load first.
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass
from typing import Sequence

from .partition import OperationLoads

SEQUENTIAL = "sequential"
PIPELINED = "pipelined"
MODES = (SEQUENTIAL, PIPELINED)

AFTER_ALL_MAPS = "after_all_maps"
AFTER_FIRST_ROUND = "after_first_round"
COPY_START_POLICIES = (AFTER_ALL_MAPS, AFTER_FIRST_ROUND)


@dataclass(frozen=True)
class CostModel:
    """Per-pair phase costs. Defaults put the three phases within 2x of each other."""

    bytes_per_pair: float = 100.0
    network_bw: float = 14.3e6
    disk_sort_rate: float = 225_000.0
    cpu_rate: float = 300_000.0
    map_finish_time: float = 0.0

    def __post_init__(self):
        for name in ("bytes_per_pair", "network_bw", "disk_sort_rate", "cpu_rate"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.map_finish_time < 0:
            raise ValueError("map_finish_time must be nonnegative")

    def copy_time(self, load: int) -> float:
        return load * self.bytes_per_pair / self.network_bw

    def sort_time(self, load: int) -> float:
        return load / self.disk_sort_rate

    def run_time(self, load: int) -> float:
        return load / self.cpu_rate


@dataclass(frozen=True)
class OpTiming:
    op_index: int
    load: int
    copy_start: float
    copy_end: float
    sort_start: float
    sort_end: float
    run_start: float
    run_end: float


@dataclass(frozen=True)
class TaskTimeline:
    ops: tuple[OpTiming, ...]
    start: float
    makespan: float
    sort_delay: float
    run_delay: float

    @property
    def duration(self) -> float:
        return self.makespan - self.start

    def to_dict(self) -> dict:
        return {
            "start": self.start,
            "makespan": self.makespan,
            "sort_delay": self.sort_delay,
            "run_delay": self.run_delay,
            "ops": [asdict(o) for o in self.ops],
        }


def simulate_task(
    op_loads: Sequence[int],
    cost: CostModel,
    mode: str = PIPELINED,
    copy_start_time: float = 0.0,
    op_indices: Sequence[int] | None = None,
) -> TaskTimeline:
    """Phase intervals of one Reduce task.

    ``op_indices`` labels the operations in the returned timeline and
    defaults to their positions in ``op_loads``.
    """
    if len(op_loads) == 0:
        raise ValueError("a task needs at least one operation")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if op_indices is None:
        op_indices = range(len(op_loads))
    items = list(zip(op_indices, op_loads))
    if mode == PIPELINED:
        items.sort(key=lambda it: (it[1], it[0]))

    copies = []
    t = copy_start_time
    for _, load in items:
        copies.append((t, t + cost.copy_time(load)))
        t = copies[-1][1]

    sorts, runs = [], []
    if mode == SEQUENTIAL:
        t = copies[-1][1]
        for _, load in items:
            sorts.append((t, t + cost.sort_time(load)))
            t = sorts[-1][1]
        for _, load in items:
            runs.append((t, t + cost.run_time(load)))
            t = runs[-1][1]
    else:
        sort_free = run_free = copy_start_time
        for (_, load), (_, copy_end) in zip(items, copies):
            s0 = max(copy_end, sort_free)
            sort_free = s0 + cost.sort_time(load)
            sorts.append((s0, sort_free))
            r0 = max(sort_free, run_free)
            run_free = r0 + cost.run_time(load)
            runs.append((r0, run_free))

    ops = tuple(
        OpTiming(j, load, c[0], c[1], s[0], s[1], r[0], r[1])
        for (j, load), c, s, r in zip(items, copies, sorts, runs)
    )
    return TaskTimeline(
        ops=ops,
        start=copy_start_time,
        makespan=max(o.run_end for o in ops),
        sort_delay=min(o.sort_start for o in ops) - cost.map_finish_time,
        run_delay=min(o.run_start for o in ops) - cost.map_finish_time,
    )


@dataclass(frozen=True)
class JobReport:
    mode: str
    copy_start_policy: str
    copy_start_time: float
    timelines: tuple[TaskTimeline | None, ...]
    slot_makespans: tuple[float, ...]
    makespan: float
    mean_task_duration: float
    mean_sort_delay: float
    mean_run_delay: float

    def to_dict(self, include_timelines: bool = True) -> dict:
        out = {
            "mode": self.mode,
            "copy_start_policy": self.copy_start_policy,
            "copy_start_time": self.copy_start_time,
            "makespan": self.makespan,
            "slot_makespans": list(self.slot_makespans),
            "mean_task_duration": self.mean_task_duration,
            "mean_sort_delay": self.mean_sort_delay,
            "mean_run_delay": self.mean_run_delay,
        }
        if include_timelines:
            out["timelines"] = [None if tl is None else tl.to_dict() for tl in self.timelines]
        return out

    def to_csv(self) -> str:
        """Gantt-style rows, one per operation."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["slot", "op_index", "load", "copy_start", "copy_end",
                    "sort_start", "sort_end", "run_start", "run_end"])
        for slot, tl in enumerate(self.timelines, start=1):
            if tl is None:
                continue
            for o in tl.ops:
                w.writerow([slot, o.op_index, o.load, o.copy_start, o.copy_end,
                            o.sort_start, o.sort_end, o.run_start, o.run_end])
        return buf.getvalue()


def simulate_job(
    schedule,
    loads: OperationLoads | Sequence[int],
    cost: CostModel | None = None,
    mode: str = PIPELINED,
    copy_start_policy: str = AFTER_ALL_MAPS,
    first_round_end: float | None = None,
    map_rounds: int = 1,
) -> JobReport:
    """Simulate every slot of ``schedule`` independently.

    Under ``after_all_maps`` copying starts at ``cost.map_finish_time``.
    Under ``after_first_round`` it starts at ``first_round_end``, which
    defaults to ``map_finish_time / map_rounds``. Empty slots finish at
    their copy start and are left out of the averages.
    """
    cost = cost or CostModel()
    loads = loads.loads if isinstance(loads, OperationLoads) else tuple(loads)
    if len(loads) != len(schedule.assignment):
        raise ValueError("schedule and loads cover different numbers of operations")
    if copy_start_policy == AFTER_ALL_MAPS:
        start = cost.map_finish_time
    elif copy_start_policy == AFTER_FIRST_ROUND:
        if map_rounds < 1:
            raise ValueError("map_rounds must be >= 1")
        start = cost.map_finish_time / map_rounds if first_round_end is None else first_round_end
        if not 0 <= start <= cost.map_finish_time:
            raise ValueError("first_round_end must lie in [0, map_finish_time]")
    else:
        raise ValueError(f"copy_start_policy must be one of {COPY_START_POLICIES}")

    timelines = []
    for members in schedule.slot_members():
        if not members:
            timelines.append(None)
            continue
        timelines.append(simulate_task([loads[j] for j in members], cost, mode, start, op_indices=members))
    busy = [tl for tl in timelines if tl is not None]
    slot_makespans = tuple(start if tl is None else tl.makespan for tl in timelines)
    return JobReport(
        mode=mode,
        copy_start_policy=copy_start_policy,
        copy_start_time=start,
        timelines=tuple(timelines),
        slot_makespans=slot_makespans,
        makespan=max(slot_makespans),
        mean_task_duration=sum(tl.duration for tl in busy) / len(busy),
        mean_sort_delay=sum(tl.sort_delay for tl in busy) / len(busy),
        mean_run_delay=sum(tl.run_delay for tl in busy) / len(busy),
    )
