"""Balanced Subset Sum: pick a subset of loads whose sum is closest to a target.

Unlike classical Subset Sum the chosen sum may overshoot the target. The
exact solver builds the reachable-sum layers ``L_0 .. L_s`` one load at a
time, trimming each layer to every sum below the target plus the single
smallest sum at or above it, then backtraces from whichever of the two
largest surviving sums lies closer to the target. The relaxed solver runs
the same procedure on loads rounded to multiples of ``delta``.

Layers are kept as Python ints used as bitsets (bit ``v`` set iff sum ``v``
is reachable), so one layer step is a shift, an OR and a mask.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

BRUTE_FORCE_MAX_ITEMS = 24


@dataclass(frozen=True)
class BssSolution:
    """A 0/1 selection over the loads and the sum it achieves.

    ``sum`` is always measured on the original loads. For relaxed solves
    ``relaxed_sum`` is the sum over the rounded loads and ``delta`` the
    rounding unit; for exact solves they equal ``sum`` and 1.
    """

    selection: tuple[int, ...]
    sum: int
    target: int
    relaxed_sum: int
    delta: int = 1

    @property
    def objective(self) -> int:
        return abs(self.sum - self.target)

    @property
    def selected(self) -> list[int]:
        return [i for i, y in enumerate(self.selection) if y]


def _check_instance(loads: Sequence[int], target: int):
    if len(loads) == 0:
        raise ValueError("a BSS instance needs at least one load")
    if any(k < 1 for k in loads):
        raise ValueError("loads must be positive integers")
    if target < 0:
        raise ValueError("target must be nonnegative")


def trim(values: Sequence[int], target: int) -> tuple[int, ...]:
    """Keep every value below ``target`` and the smallest one at or above it.

    ``values`` must be sorted ascending without duplicates.
    """
    kept = []
    for v in values:
        kept.append(v)
        if v >= target:
            break
    return tuple(kept)


def _trim_bits(bits: int, threshold: int) -> int:
    low = bits & ((1 << threshold) - 1)
    high = bits >> threshold
    if high:
        low |= (high & -high) << threshold
    return low


def _layers(weights: Sequence[int], threshold: int) -> list[int]:
    layer = 1
    layers = [layer]
    for w in weights:
        layer = _trim_bits(layer | (layer << w), threshold)
        layers.append(layer)
    return layers


def _bits_to_values(bits: int) -> tuple[int, ...]:
    return tuple(i for i, c in enumerate(reversed(bin(bits)[2:])) if c == "1")


def _pick(last: int, scale: int, target: int) -> int:
    """Closer of the two largest reachable sums; ties go to the smaller."""
    t2 = last.bit_length() - 1
    rest = last ^ (1 << t2)
    if not rest:
        return t2
    t1 = rest.bit_length() - 1
    if abs(t1 * scale - target) <= abs(t2 * scale - target):
        return t1
    return t2


def _backtrace(layers: list[int], weights: Sequence[int], t: int) -> tuple[int, ...]:
    # prefers including item i whenever t - w_i was reachable one layer down
    selection = [0] * len(weights)
    for i in range(len(weights), 0, -1):
        w = weights[i - 1]
        below = layers[i - 1]
        if w and t >= w and (below >> (t - w)) & 1:
            selection[i - 1] = 1
            t -= w
        elif not (below >> t) & 1:
            raise AssertionError("backtrace left the reachable set")
    if t:
        raise AssertionError("backtrace did not reach zero")
    return tuple(selection)


def _solve(weights: Sequence[int], loads: Sequence[int], target: int, scale: int) -> BssSolution:
    threshold = -(-target // scale)
    layers = _layers(weights, threshold)
    best = _pick(layers[-1], scale, target)
    selection = _backtrace(layers, weights, best)
    achieved = sum(k for k, y in zip(loads, selection) if y)
    return BssSolution(selection, achieved, target, best * scale, scale)


def reachable_layers(loads: Sequence[int], target: int) -> list[tuple[int, ...]]:
    """The trimmed layers ``L_0 .. L_s`` that ``exact_bss`` searches."""
    _check_instance(loads, target)
    return [_bits_to_values(b) for b in _layers(loads, target)]


def exact_bss(loads: Sequence[int], target: int) -> BssSolution:
    """Optimal BSS selection in O(s * target) time."""
    _check_instance(loads, target)
    return _solve(list(loads), loads, target, 1)


def relax_loads(loads: Sequence[int], delta: int) -> tuple[int, ...]:
    """Round each load to the nearest multiple of ``delta`` (halves round up)."""
    if delta < 1:
        raise ValueError("delta must be a positive integer")
    return tuple((2 * k + delta) // (2 * delta) * delta for k in loads)


def relax_bss(loads: Sequence[int], target: int, delta: int) -> BssSolution:
    """Solve BSS on loads rounded to multiples of ``delta``.

    The selection is optimal for the rounded instance, and the sum on the
    original loads stays within ``len(loads) * delta / 2`` of the rounded sum.
    Loads that round to zero are never selected.
    """
    _check_instance(loads, target)
    if delta < 1:
        raise ValueError("delta must be a positive integer")
    units = [(2 * k + delta) // (2 * delta) for k in loads]
    return _solve(units, loads, target, delta)


def delta_for_eta(eta: float, target: int, s: int) -> int:
    """Rounding unit keeping the relative relaxation error within ``eta``."""
    if not 0 < eta < 1:
        raise ValueError("eta must lie strictly between 0 and 1")
    if target < 1 or s < 1:
        raise ValueError("target and s must be positive")
    return max(1, int(2 * eta * target // s))


def relative_error(solution: BssSolution) -> float:
    return abs(solution.relaxed_sum - solution.sum) / solution.target


def brute_force_bss(loads: Sequence[int], target: int) -> BssSolution:
    """Exhaustive BSS over all 2**s selections.

    Ties go to the smaller sum, then to the lexicographically smallest
    selection.
    """
    _check_instance(loads, target)
    s = len(loads)
    if s > BRUTE_FORCE_MAX_ITEMS:
        raise ValueError(f"brute force is limited to {BRUTE_FORCE_MAX_ITEMS} loads")
    # built back to front so that index i spells the selection with item 0 as the top bit,
    # making numeric order of i the lexicographic order of selections
    sums = np.zeros(1, dtype=np.int64)
    for k in reversed(loads):
        sums = np.concatenate((sums, sums + k))
    gap = np.abs(sums - target)
    candidates = np.flatnonzero(gap == gap.min())
    best_sum = sums[candidates].min()
    index = int(candidates[sums[candidates] == best_sum][0])
    selection = tuple((index >> (s - 1 - i)) & 1 for i in range(s))
    return BssSolution(selection, int(best_sum), target, int(best_sum))
