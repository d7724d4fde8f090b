"""Partitioners with a fit/predict interface.

``fit`` takes the key distribution of a job's intermediate pairs and learns
a key -> slot routing table; ``predict`` routes keys through it. Parameters
follow scikit-learn conventions so partitioners can be cloned, compared and
grid-searched like any other estimator.
"""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .partition import DEFAULT_GROUP_THRESHOLD, assign_hash_baseline, hash_key, operations_for
from .scheduler import DEFAULT_ETA, DEFAULT_EXACT_THRESHOLD, compute_metrics, schedule_dpd
from .workload import KeyHistogram


def check_histogram(X) -> KeyHistogram:
    """Coerce a histogram, a ``{key: count}`` mapping or ``(key, count)`` pairs."""
    if isinstance(X, KeyHistogram):
        return X
    if isinstance(X, Mapping):
        X = X.items()
    hist = KeyHistogram.from_pairs(X)
    if len(hist) == 0:
        raise ValueError("histogram has no keys")
    return hist


def check_positive_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def _as_key(key) -> bytes:
    return key.encode("utf-8") if isinstance(key, str) else bytes(key)


class _SlotPartitioner(BaseEstimator):
    def predict(self, keys):
        """1-based slot for each key; unseen keys fall back to hash routing."""
        check_is_fitted(self, "slot_of_key_")
        out = np.empty(len(keys), dtype=np.int64)
        for i, key in enumerate(keys):
            key = _as_key(key)
            slot = self.slot_of_key_.get(key)
            out[i] = hash_key(key) % self.n_slots + 1 if slot is None else slot
        return out

    def fit_predict(self, X, y=None):
        self.fit(X)
        return np.asarray(self.key_slots_)

    def slot_loads(self):
        check_is_fitted(self, "schedule_")
        return np.asarray(self.schedule_.slot_loads)


class HashPartitioner(_SlotPartitioner):
    """Standard MapReduce routing: ``hash(key) mod n_slots + 1``."""

    def __init__(self, n_slots: int = 16):
        self.n_slots = n_slots

    def fit(self, X, y=None):
        check_positive_int(self.n_slots, "n_slots")
        hist = check_histogram(X)
        self.schedule_ = assign_hash_baseline(hist, self.n_slots)
        self.key_slots_ = self.schedule_.assignment
        self.slot_of_key_ = dict(zip(hist.keys, self.key_slots_))
        self.metrics_ = compute_metrics(self.schedule_, hist.counts)
        return self


class DPDPartitioner(_SlotPartitioner):
    """Key-distribution-aware routing via dynamic programming decomposition.

    Parameters
    ----------
    n_slots : int
        Number of Reduce task slots.
    eta : float
        Bound on the relative error of each relaxed subset-sum solve.
    group_threshold : int
        Keys are hash-combined into at most this many operations when the
        histogram holds more keys than this.
    exact_threshold : int
        Subproblems with ``size * target`` at most this are solved exactly.

    Attributes
    ----------
    operations_ : OperationLoads
        The scheduled units (keys, or key groups).
    schedule_ : Schedule
        Slot of each operation.
    slot_of_key_ : dict
        Routing table learned by ``fit``.
    metrics_ : BalanceMetrics
    """

    def __init__(
        self,
        n_slots: int = 16,
        eta: float = DEFAULT_ETA,
        group_threshold: int = DEFAULT_GROUP_THRESHOLD,
        exact_threshold: int = DEFAULT_EXACT_THRESHOLD,
    ):
        self.n_slots = n_slots
        self.eta = eta
        self.group_threshold = group_threshold
        self.exact_threshold = exact_threshold

    def fit(self, X, y=None):
        check_positive_int(self.n_slots, "n_slots")
        check_positive_int(self.group_threshold, "group_threshold")
        check_positive_int(self.exact_threshold, "exact_threshold")
        if not 0 < self.eta < 1:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta!r}")
        hist = check_histogram(X)
        self.operations_ = operations_for(hist, self.group_threshold)
        self.schedule_ = schedule_dpd(self.operations_, self.n_slots, self.eta, self.exact_threshold)
        self.slot_of_key_ = {
            key: slot
            for members, slot in zip(self.operations_.members, self.schedule_.assignment)
            for key in members
        }
        self.key_slots_ = tuple(self.slot_of_key_[k] for k in hist.keys)
        self.metrics_ = compute_metrics(self.schedule_, self.operations_)
        return self
