"""Key hashing, operation grouping and the closed-form cost formulas."""

from __future__ import annotations

from dataclasses import dataclass

from .workload import KeyHistogram

FNV_OFFSET_BASIS = 14695981039346656037
FNV_PRIME = 1099511628211
_MASK64 = (1 << 64) - 1

DEFAULT_GROUP_THRESHOLD = 120


def hash_key(key: bytes | str) -> int:
    """64-bit FNV-1a of ``key``."""
    if isinstance(key, str):
        key = key.encode("utf-8")
    h = FNV_OFFSET_BASIS
    for byte in key:
        h ^= byte
        h = (h * FNV_PRIME) & _MASK64
    return h


@dataclass(frozen=True)
class OperationLoads:
    """Loads of the schedulable units, plus the keys behind each unit.

    ``members[j]`` lists the keys folded into operation ``j``; when no
    grouping was applied every operation holds exactly one key.
    """

    loads: tuple[int, ...]
    members: tuple[tuple[bytes, ...], ...] | None = None

    def __post_init__(self):
        if not self.loads:
            raise ValueError("at least one operation is required")
        if any(k < 1 for k in self.loads):
            raise ValueError("operation loads must be positive integers")
        if self.members is not None and len(self.members) != len(self.loads):
            raise ValueError("members and loads differ in length")

    def __len__(self):
        return len(self.loads)

    @property
    def total(self) -> int:
        return sum(self.loads)

    @classmethod
    def from_histogram(cls, hist: KeyHistogram) -> "OperationLoads":
        return cls(tuple(hist.counts), tuple((k,) for k in hist.keys))


def assign_hash_baseline(hist: KeyHistogram, m: int):
    """Route each key to slot ``hash_key(key) % m + 1``."""
    from .scheduler import Schedule

    if m < 1:
        raise ValueError("m must be >= 1")
    assignment = tuple(hash_key(k) % m + 1 for k in hist.keys)
    return Schedule.from_assignment(assignment, hist.counts, m)


def combine_operations(hist: KeyHistogram, n_target: int) -> OperationLoads:
    """Merge keys whose hashes agree modulo ``n_target`` into one operation.

    Groups come out in ascending residue order; empty residues are dropped.
    """
    if n_target < 1:
        raise ValueError("n_target must be >= 1")
    groups: dict[int, list[bytes]] = {}
    sums: dict[int, int] = {}
    for key, count in hist.items():
        g = hash_key(key) % n_target
        groups.setdefault(g, []).append(key)
        sums[g] = sums.get(g, 0) + count
    order = sorted(groups)
    return OperationLoads(
        tuple(sums[g] for g in order),
        tuple(tuple(groups[g]) for g in order),
    )


def operations_for(hist: KeyHistogram, group_threshold: int = DEFAULT_GROUP_THRESHOLD) -> OperationLoads:
    """One operation per key, or hash groups once there are too many keys."""
    if len(hist) > group_threshold:
        return combine_operations(hist, group_threshold)
    return OperationLoads.from_histogram(hist)


def map_rounds(input_size: int, block_size: int, m: int) -> int:
    if block_size < 1 or m < 1:
        raise ValueError("block_size and m must be positive")
    if input_size < 0:
        raise ValueError("input_size must be nonnegative")
    return max(1, -(-input_size // (block_size * m)))


@dataclass(frozen=True)
class FlowEstimate:
    collect_bytes_upper: int
    broadcast_bytes_upper: int
    M: int
    n: int


def network_flow_estimate(M: int, n: int) -> FlowEstimate:
    """Upper bounds on statistics traffic for M map and n reduce operations.

    Counts travel as 8-byte longs (map -> tracker -> job tracker), the
    schedule as 4-byte ints (job tracker -> tracker -> reduce).
    """
    if M < 1 or n < 1:
        raise ValueError("M and n must be positive")
    return FlowEstimate(collect_bytes_upper=16 * M * n, broadcast_bytes_upper=8 * M * n, M=M, n=n)
