import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewbal.scheduler import Schedule, schedule_dpd
from skewbal.partition import assign_hash_baseline
from skewbal.simulator import (
    AFTER_ALL_MAPS,
    AFTER_FIRST_ROUND,
    PIPELINED,
    SEQUENTIAL,
    CostModel,
    simulate_job,
    simulate_task,
)
from skewbal.workload import gen_zipf

UNIT = CostModel(bytes_per_pair=1.0, network_bw=1.0, disk_sort_rate=1.0, cpu_rate=1.0)
EPS = 1e-9


def flow_shop_makespan(durations, start=0.0):
    """Longest lattice path through a 3-stage flow shop (copy, sort, run).

    Completion time is the max over split points a <= b of
    sum(copy[:a+1]) + sum(sort[a:b+1]) + sum(run[b:]).
    """
    n = len(durations)
    best = 0.0
    for a in range(n):
        for b in range(a, n):
            path = (
                sum(d[0] for d in durations[: a + 1])
                + sum(d[1] for d in durations[a : b + 1])
                + sum(d[2] for d in durations[b:])
            )
            best = max(best, path)
    return start + best


def check_timeline(tl):
    for o in tl.ops:
        assert o.copy_start <= o.copy_end <= o.sort_start + EPS
        assert o.sort_start <= o.sort_end <= o.run_start + EPS
        assert o.run_start <= o.run_end
    for lane in ("copy", "sort", "run"):
        spans = sorted((getattr(o, lane + "_start"), getattr(o, lane + "_end")) for o in tl.ops)
        for (_, end), (start, _) in zip(spans, spans[1:]):
            assert end <= start + EPS


def test_single_op_modes_agree():
    cost = CostModel()
    seq = simulate_task([1000], cost, SEQUENTIAL)
    pipe = simulate_task([1000], cost, PIPELINED)
    expected = cost.copy_time(1000) + cost.sort_time(1000) + cost.run_time(1000)
    assert seq.makespan == pytest.approx(expected)
    assert pipe.makespan == pytest.approx(expected)


def test_two_unit_ops():
    assert simulate_task([1, 1], UNIT, SEQUENTIAL).makespan == 6
    pipe = simulate_task([1, 1], UNIT, PIPELINED)
    assert pipe.makespan == 4
    assert [(o.sort_start, o.run_start) for o in pipe.ops] == [(1, 2), (2, 3)]


def test_pipelined_orders_by_load():
    tl = simulate_task([5, 1, 3], UNIT, PIPELINED)
    assert [o.load for o in tl.ops] == [1, 3, 5]
    assert [o.op_index for o in tl.ops] == [1, 2, 0]
    assert tl.sort_delay == 1 and tl.run_delay == 2


def test_empty_task_rejected():
    with pytest.raises(ValueError):
        simulate_task([], UNIT)
    with pytest.raises(ValueError):
        simulate_task([1], UNIT, mode="bogus")


def test_cost_model_validation():
    with pytest.raises(ValueError):
        CostModel(network_bw=0)
    with pytest.raises(ValueError):
        CostModel(map_finish_time=-1)


@settings(max_examples=300, deadline=None)
@given(
    loads=st.lists(st.integers(1, 1000), min_size=1, max_size=12),
    rates=st.tuples(*[st.floats(0.1, 10) for _ in range(3)]),
    start=st.floats(0, 100),
)
def test_pipeline_against_flow_shop_oracle(loads, rates, start):
    cost = CostModel(bytes_per_pair=1.0, network_bw=rates[0], disk_sort_rate=rates[1], cpu_rate=rates[2])
    seq = simulate_task(loads, cost, SEQUENTIAL, start)
    pipe = simulate_task(loads, cost, PIPELINED, start)
    check_timeline(seq)
    check_timeline(pipe)
    ordered = sorted(loads)
    durations = [(cost.copy_time(k), cost.sort_time(k), cost.run_time(k)) for k in ordered]
    assert pipe.makespan == pytest.approx(flow_shop_makespan(durations, start))
    assert seq.makespan == pytest.approx(start + sum(map(sum, durations)))
    assert pipe.makespan <= seq.makespan + EPS
    assert pipe.ops[0].load == min(loads)


def test_job_symmetric_balanced():
    sched = Schedule.from_assignment([1, 1, 2, 2, 3, 3], [10] * 6, 3)
    rep = simulate_job(sched, [10] * 6, UNIT)
    assert len(set(rep.slot_makespans)) == 1


def test_job_empty_slot():
    sched = schedule_dpd([7], 3)
    rep = simulate_job(sched, [7], UNIT, mode=SEQUENTIAL)
    assert rep.timelines.count(None) == 2
    assert rep.makespan == 21
    assert rep.mean_task_duration == 21


def test_job_rejects_bad_policy():
    sched = schedule_dpd([7], 1)
    with pytest.raises(ValueError):
        simulate_job(sched, [7], UNIT, copy_start_policy="whenever")
    with pytest.raises(ValueError):
        simulate_job(sched, [7, 1], UNIT)


@pytest.mark.parametrize("seed", range(20))
def test_dpd_job_not_slower_than_hash(seed):
    # sequential task time is linear in slot load, so max-load order carries over
    hist = gen_zipf(60, 50_000, 1.0, seed)
    hash_sched = assign_hash_baseline(hist, 8)
    dpd_sched = schedule_dpd(hist.counts, 8)
    assert max(dpd_sched.slot_loads) <= max(hash_sched.slot_loads)
    h = simulate_job(hash_sched, hist.counts, CostModel(), SEQUENTIAL)
    d = simulate_job(dpd_sched, hist.counts, CostModel(), SEQUENTIAL)
    assert d.makespan <= h.makespan + EPS


def test_first_round_copy_start_shortens_sort_delay():
    rng = random.Random(4)
    for _ in range(50):
        loads = [rng.randint(1, 5000) for _ in range(rng.randint(1, 30))]
        m = rng.randint(1, 6)
        cost = CostModel(map_finish_time=rng.uniform(0.5, 30))
        sched = schedule_dpd(loads, m)
        late = simulate_job(sched, loads, cost, SEQUENTIAL, AFTER_ALL_MAPS)
        early = simulate_job(sched, loads, cost, SEQUENTIAL, AFTER_FIRST_ROUND, map_rounds=rng.randint(1, 5))
        assert early.mean_sort_delay <= late.mean_sort_delay + EPS
        assert early.copy_start_time <= late.copy_start_time


def test_first_round_end_bounds():
    sched = schedule_dpd([3, 3], 1)
    cost = CostModel(map_finish_time=10)
    assert simulate_job(sched, [3, 3], cost, copy_start_policy=AFTER_FIRST_ROUND, map_rounds=4).copy_start_time == 2.5
    assert simulate_job(sched, [3, 3], cost, copy_start_policy=AFTER_FIRST_ROUND, first_round_end=1).copy_start_time == 1
    with pytest.raises(ValueError):
        simulate_job(sched, [3, 3], cost, copy_start_policy=AFTER_FIRST_ROUND, first_round_end=11)


def test_report_serialization():
    sched = schedule_dpd([4, 2, 9, 1], 2)
    rep = simulate_job(sched, [4, 2, 9, 1], UNIT)
    data = json.loads(json.dumps(rep.to_dict()))
    assert data["makespan"] == rep.makespan
    assert len(data["timelines"]) == 2
    op = data["timelines"][0]["ops"][0]
    assert set(op) == {"op_index", "load", "copy_start", "copy_end", "sort_start", "sort_end", "run_start", "run_end"}
    rows = rep.to_csv().splitlines()
    assert rows[0].startswith("slot,op_index,load")
    assert len(rows) == 5
