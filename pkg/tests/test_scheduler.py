import itertools
import json
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewbal.partition import OperationLoads
from skewbal.scheduler import (
    Schedule,
    compare_schedulers,
    compute_metrics,
    schedule_dpd,
)
from skewbal.workload import KeyHistogram, gen_uniform, gen_zipf


def optimal_makespan(loads, m):
    """Exhaustive P||Cmax over all m**n assignments."""
    best = None
    for assignment in itertools.product(range(m), repeat=len(loads)):
        p = [0] * m
        for slot, load in zip(assignment, loads):
            p[slot] += load
        best = max(p) if best is None else min(best, max(p))
    return best


def check_schedule(sched, loads, m):
    assert sched.m == m
    assert len(sched.assignment) == len(loads)
    assert all(1 <= s <= m for s in sched.assignment)
    recomputed = [0] * m
    for s, k in zip(sched.assignment, loads):
        recomputed[s - 1] += k
    assert list(sched.slot_loads) == recomputed
    assert sum(sched.slot_loads) == sum(loads)
    assert max(sched.slot_loads) >= math.ceil(sum(loads) / m)


def test_example_one_schedule():
    sched = schedule_dpd([1, 3, 2], 2)
    assert sched.assignment == (1, 2, 1)
    assert sched.slot_loads == (3, 3)
    metrics = compute_metrics(sched, [1, 3, 2])
    assert metrics.max_load == 3 and metrics.variance == 0 and metrics.ideal_load == 3


def test_fewer_operations_than_slots():
    sched = schedule_dpd([7], 3)
    assert sorted(sched.slot_loads) == [0, 0, 7]


def test_single_slot():
    sched = schedule_dpd([4, 9, 1], 1)
    assert sched.slot_loads == (14,)


def test_metrics_unbalanced():
    sched = Schedule.from_assignment([1, 1, 1], [1, 3, 2], 2)
    metrics = compute_metrics(sched, [1, 3, 2])
    assert metrics.max_load == 6 and metrics.variance == 9.0
    assert metrics.max_over_ideal == 2.0


def test_metrics_length_mismatch():
    with pytest.raises(ValueError):
        compute_metrics(Schedule.from_assignment([1, 2], [1, 1], 2), [1, 1, 1])


def test_invalid_inputs():
    with pytest.raises(ValueError):
        schedule_dpd([1, 2], 0)
    with pytest.raises(ValueError):
        schedule_dpd([1, 0], 2)
    with pytest.raises(ValueError):
        Schedule.from_assignment([3], [1], 2)


@settings(max_examples=300, deadline=None)
@given(
    loads=st.lists(st.integers(1, 10_000), min_size=1, max_size=60),
    m=st.integers(1, 20),
    exact_threshold=st.sampled_from([1, 1000, 2_000_000]),
)
def test_schedule_invariants(loads, m, exact_threshold):
    sched = schedule_dpd(loads, m, exact_threshold=exact_threshold)
    check_schedule(sched, loads, m)
    assert sched == schedule_dpd(loads, m, exact_threshold=exact_threshold)
    metrics = compute_metrics(sched, loads)
    assert metrics.max_load >= metrics.ideal_load


@settings(max_examples=150, deadline=None)
@given(loads=st.lists(st.integers(1, 40), min_size=1, max_size=7), m=st.integers(1, 3))
def test_against_optimal_makespan(loads, m):
    opt = optimal_makespan(loads, m)
    got = max(schedule_dpd(loads, m).slot_loads)
    assert opt <= got <= 2 * opt


def test_usually_optimal_on_small_instances():
    rng = random.Random(0)
    hits = 0
    trials = 200
    for _ in range(trials):
        n, m = rng.randint(1, 8), rng.randint(1, 4)
        loads = [rng.randint(1, 50) for _ in range(n)]
        hits += max(schedule_dpd(loads, m).slot_loads) == optimal_makespan(loads, m)
    assert hits / trials >= 0.85


def test_schedule_serialization():
    loads = [5, 1, 4, 4]
    sched = schedule_dpd(loads, 2)
    data = json.loads(sched.to_json())
    assert set(data) == {"m", "assignment", "slot_loads"}
    assert Schedule.from_dict(data, loads) == sched
    assert Schedule.from_dict(data) == sched
    rows = sched.to_csv().splitlines()
    assert rows[0] == "op_index,slot"
    assert rows[1:] == [f"{j},{s}" for j, s in enumerate(sched.assignment)]
    data["slot_loads"][0] += 1
    with pytest.raises(ValueError):
        Schedule.from_dict(data, loads)


def test_accepts_operation_loads():
    ops = OperationLoads((3, 3, 2, 2))
    assert schedule_dpd(ops, 2) == schedule_dpd([3, 3, 2, 2], 2)


def test_compare_uniform():
    rep = compare_schedulers(gen_uniform(64, 64_000, seed=1), 16)
    assert rep.dpd.max_load == 4000
    assert rep.dpd.max_over_ideal == 1.0
    assert rep.max_load_ratio <= 1.0


def test_compare_single_key():
    rep = compare_schedulers(KeyHistogram((b"only",), (123,)), 8)
    assert rep.hash.max_load == rep.dpd.max_load == 123


def test_compare_groups_large_histograms():
    rep = compare_schedulers(gen_zipf(500, 200_000, 0.8, seed=2), 16, group_threshold=120)
    assert rep.grouped and rep.n_operations <= 120
    assert sum(rep.dpd_schedule.slot_loads) == 200_000
    assert "solver_seconds" not in rep.to_dict()
    assert "solver_seconds" in rep.to_dict(timing=True)


def test_dpd_beats_hash_on_skew():
    wins = sum(
        compare_schedulers(gen_zipf(80, 100_000, 1.2, seed), 16).max_load_ratio <= 1.0
        for seed in range(20)
    )
    assert wins >= 19
