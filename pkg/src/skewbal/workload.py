"""Key-count histograms: CSV ingestion and synthetic generators."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np


class HistogramError(ValueError):
    """Raised for malformed or inconsistent histogram input."""


@dataclass(frozen=True)
class KeyHistogram:
    """Number of intermediate pairs per key, in a fixed key order."""

    keys: tuple[bytes, ...]
    counts: tuple[int, ...]
    total_pairs: int = field(init=False)

    def __post_init__(self):
        if len(self.keys) != len(self.counts):
            raise HistogramError("keys and counts differ in length")
        if len(set(self.keys)) != len(self.keys):
            raise HistogramError("duplicate key in histogram")
        for c in self.counts:
            if c < 1:
                raise HistogramError(f"nonpositive count {c}")
        object.__setattr__(self, "total_pairs", sum(self.counts))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[bytes | str, int]]) -> "KeyHistogram":
        keys, counts = [], []
        for k, c in pairs:
            keys.append(k.encode("utf-8") if isinstance(k, str) else bytes(k))
            counts.append(int(c))
        return cls(tuple(keys), tuple(counts))

    def __len__(self):
        return len(self.keys)

    def items(self):
        return zip(self.keys, self.counts)

    def as_dict(self) -> dict[bytes, int]:
        return dict(zip(self.keys, self.counts))


def load_histogram(source: IO[bytes] | IO[str], format: str = "csv") -> KeyHistogram:
    """Parse ``key,count`` lines into a histogram, preserving file order.

    Errors name the offending 1-based line number.
    """
    if format != "csv":
        raise HistogramError(f"unsupported histogram format {format!r}")
    data = source.read()
    if isinstance(data, str):
        data = data.encode("utf-8")
    keys: list[bytes] = []
    counts: list[int] = []
    seen: set[bytes] = set()
    for lineno, raw in enumerate(data.splitlines(), start=1):
        if not raw.strip():
            continue
        parts = raw.split(b",")
        if len(parts) != 2:
            raise HistogramError(f"line {lineno}: expected 'key,count'")
        key, count_text = parts
        try:
            count = int(count_text.strip().decode("ascii"))
        except (UnicodeDecodeError, ValueError):
            raise HistogramError(f"line {lineno}: count is not an integer") from None
        if count <= 0:
            raise HistogramError(f"line {lineno}: nonpositive count {count}")
        if key in seen:
            raise HistogramError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        keys.append(key)
        counts.append(count)
    if not keys:
        raise HistogramError("empty histogram input")
    return KeyHistogram(tuple(keys), tuple(counts))


def dump_histogram(hist: KeyHistogram, sink: IO[bytes] | None = None) -> bytes:
    out = b"".join(k + b"," + str(c).encode("ascii") + b"\n" for k, c in hist.items())
    if sink is not None:
        sink.write(out)
    return out


def loads_histogram(text: str | bytes) -> KeyHistogram:
    if isinstance(text, str):
        text = text.encode("utf-8")
    return load_histogram(io.BytesIO(text))


def _key_labels(n_keys: int) -> list[bytes]:
    width = len(str(n_keys - 1))
    return [f"key-{i:0{width}d}".encode("ascii") for i in range(n_keys)]


def _check_sizes(n_keys: int, total_pairs: int):
    if n_keys < 1 or total_pairs < 1:
        raise HistogramError("n_keys and total_pairs must be positive")
    if n_keys > total_pairs:
        raise HistogramError(
            f"n_keys={n_keys} exceeds total_pairs={total_pairs}; every key needs at least one pair"
        )


def _labelled(rank_counts: list[int], seed: int) -> KeyHistogram:
    # the seed only decides which label holds which rank
    rng = np.random.default_rng(seed)
    rank_of_label = rng.permutation(len(rank_counts))
    labels = _key_labels(len(rank_counts))
    counts = tuple(int(rank_counts[r]) for r in rank_of_label)
    return KeyHistogram(tuple(labels), counts)


def zipf_counts(n_keys: int, total_pairs: int, skew: float) -> list[int]:
    """Counts per rank (rank 1 first) with exact total and every count >= 1."""
    _check_sizes(n_keys, total_pairs)
    if skew < 0:
        raise HistogramError("skew must be nonnegative")
    ranks = np.arange(1, n_keys + 1, dtype=float)
    weights = ranks ** (-float(skew))
    quotas = total_pairs * weights / weights.sum()
    counts = [int(q) for q in np.floor(quotas)]
    remainders = quotas - np.floor(quotas)
    short = total_pairs - sum(counts)
    # largest remainder first; ties go to the lower rank
    order = sorted(range(n_keys), key=lambda r: (-remainders[r], r))
    for r in order[:short]:
        counts[r] += 1
    if sum(counts) != total_pairs:
        # float drift in the quotas; rank 1 absorbs it
        counts[0] += total_pairs - sum(counts)
    deficit = 0
    for r in range(n_keys):
        if counts[r] < 1:
            deficit += 1 - counts[r]
            counts[r] = 1
    r = 0
    while deficit:
        take = min(deficit, counts[r] - 1)
        counts[r] -= take
        deficit -= take
        r += 1
    return counts


def gen_zipf(n_keys: int, total_pairs: int, skew: float, seed: int = 0) -> KeyHistogram:
    """Histogram with counts proportional to ``rank ** -skew``."""
    return _labelled(zipf_counts(n_keys, total_pairs, skew), seed)


def gen_uniform(n_keys: int, total_pairs: int, seed: int = 0) -> KeyHistogram:
    _check_sizes(n_keys, total_pairs)
    base, extra = divmod(total_pairs, n_keys)
    counts = [base + 1] * extra + [base] * (n_keys - extra)
    return _labelled(counts, seed)
