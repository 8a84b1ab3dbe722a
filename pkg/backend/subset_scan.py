# -*- coding: utf-8 -*-
"""
subset_scan.py - Vectorized neighbor / unique-neighbor counts over vertex subsets.

Both the gadget checker and the expansion audits ask the same question for
every subset S of one side with |S| = t: how many neighbors does S have,
and how many of them see S exactly once? Subsets are handled in batches:
the padded neighbor rows of a batch are gathered into one array, sorted
row-wise, and counted with a couple of comparisons against the shifted
array. Parallel edges show up as repeated values, so a vertex joined to S
by two edges is never counted as a unique neighbor.

Subsets are enumerated exhaustively while C(n, t) stays within the budget,
and sampled uniformly otherwise. Batches run on a thread pool sized by
FORGE_WORKERS; the per-size result is a worst-case reduction that does not
depend on the order in which batches finish.
"""

from __future__ import annotations

import itertools
import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Iterator

import numpy as np

_EXHAUSTIVE_BUDGET = 2_000_000  # subsets per size before switching to sampling
_SAMPLES_PER_SIZE = 10_000
_BATCH = 4096  # subsets per vectorized batch
_SAMPLE_CELLS = 2_000_000  # random keys drawn per sampling chunk

Predicate = Callable[[np.ndarray, np.ndarray], np.ndarray]


def worker_count() -> int:
    """Threads for subset scans: FORGE_WORKERS, else the CPU count."""
    raw = os.environ.get("FORGE_WORKERS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def stage_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for one stage of a seeded run."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def sub_seed(seed: int, *key: int) -> int:
    """64-bit seed for a sub-stage, derived from the run seed and a key."""
    state = np.random.SeedSequence(seed, spawn_key=tuple(key)).generate_state(1, dtype=np.uint64)
    return int(state[0])


# ── Results ────────────────────────────────────────────────────────────────

@dataclass
class SizeScan:
    """Worst cases found among the examined subsets of one size.

    A witness is kept for the smallest neighbor count, the smallest
    unique-neighbor count and the first subset rejected by the predicate.
    """

    t: int
    mode: str
    examined: int = 0
    min_neighbors: int | None = None
    min_neighbors_witness: list[int] | None = None
    min_unique: int | None = None
    min_unique_witness: list[int] | None = None
    failures: int = 0
    failure_witness: list[int] | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def merge(self, other: SizeScan) -> SizeScan:
        """Combine two partial scans; ties keep the earlier witness."""
        out = SizeScan(self.t, self.mode, self.examined + other.examined)
        for attr in ("min_neighbors", "min_unique"):
            a, b = getattr(self, attr), getattr(other, attr)
            pick = self if b is None or (a is not None and a <= b) else other
            setattr(out, attr, getattr(pick, attr))
            setattr(out, attr + "_witness", getattr(pick, attr + "_witness"))
        out.failures = self.failures + other.failures
        out.failure_witness = self.failure_witness if self.failure_witness is not None else other.failure_witness
        return out

    def to_dict(self) -> dict:
        return asdict(self)


# ── Counting ───────────────────────────────────────────────────────────────

def batch_counts(table: np.ndarray, subsets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(|N(S)|, |UN(S)|) for each row S of subsets.

    Args:
        table: Padded neighbor table, -1 for empty slots.
        subsets: (B, t) array of vertex indices.
    """
    b, t = subsets.shape
    vals = table[subsets].reshape(b, -1)
    vals.sort(axis=1)
    valid = vals >= 0
    differs = vals[:, 1:] != vals[:, :-1]
    first = valid.copy()
    first[:, 1:] &= differs
    alone = valid.copy()
    alone[:, 1:] &= differs
    alone[:, :-1] &= differs
    n_count = first.sum(axis=1)
    un_count = alone.sum(axis=1)
    if np.any(un_count > n_count) or np.any(n_count > table.shape[1] * t):
        raise AssertionError("subset counts left the envelope |UN| <= |N| <= d|S|")
    return n_count, un_count


def recount(table: np.ndarray, subset: Iterable[int]) -> tuple[int, int]:
    """Independent (|N(S)|, |UN(S)|) for one subset, used to re-check witnesses."""
    hits = Counter(int(v) for s in subset for v in table[s] if v >= 0)
    return len(hits), sum(1 for c in hits.values() if c == 1)


def _scan_batch(table: np.ndarray, subsets: np.ndarray, t: int, mode: str, predicate: Predicate) -> SizeScan:
    n_count, un_count = batch_counts(table, subsets)
    out = SizeScan(t, mode, len(subsets))
    if len(subsets) == 0:
        return out
    i = int(np.argmin(n_count))
    out.min_neighbors, out.min_neighbors_witness = int(n_count[i]), subsets[i].tolist()
    i = int(np.argmin(un_count))
    out.min_unique, out.min_unique_witness = int(un_count[i]), subsets[i].tolist()
    bad = np.flatnonzero(~predicate(n_count, un_count))
    out.failures = len(bad)
    if len(bad):
        out.failure_witness = subsets[bad[0]].tolist()
    return out


# ── Subset sources ─────────────────────────────────────────────────────────

def choose_mode(n: int, t: int, budget: int = _EXHAUSTIVE_BUDGET, exhaustive_limit: int | None = None) -> str:
    if exhaustive_limit is not None and t > exhaustive_limit:
        return "sampled"
    return "exhaustive" if math.comb(n, t) <= budget else "sampled"


def iter_combinations(n: int, t: int, batch: int = _BATCH) -> Iterator[np.ndarray]:
    """All t-subsets of range(n) in lexicographic order, as (B, t) arrays."""
    combos = itertools.combinations(range(n), t)
    while True:
        chunk = list(itertools.islice(combos, batch))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.int64).reshape(-1, t)


def sample_subsets(n: int, t: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """count uniformly random t-subsets of range(n), one per row."""
    rows = max(1, _SAMPLE_CELLS // max(n, 1))
    parts = []
    remaining = count
    while remaining > 0:
        m = min(rows, remaining)
        keys = rng.random((m, n))
        parts.append(np.argpartition(keys, t - 1, axis=1)[:, :t] if t < n else np.tile(np.arange(n), (m, 1)))
        remaining -= m
    out = np.concatenate(parts) if parts else np.empty((0, t), dtype=np.int64)
    return np.sort(out, axis=1).astype(np.int64)


def _batched(arr: np.ndarray, batch: int = _BATCH) -> Iterator[np.ndarray]:
    for start in range(0, len(arr), batch):
        yield arr[start:start + batch]


# ── Driver ─────────────────────────────────────────────────────────────────

def scan_size(
    table: np.ndarray,
    t: int,
    predicate: Predicate,
    *,
    rng: np.random.Generator,
    budget: int = _EXHAUSTIVE_BUDGET,
    samples: int = _SAMPLES_PER_SIZE,
    exhaustive_limit: int | None = None,
    mode: str | None = None,
    workers: int | None = None,
) -> SizeScan:
    """Scan all (or sampled) t-subsets of the table's vertices.

    Args:
        table: Padded neighbor table of the side being audited.
        t: Subset size.
        predicate: Maps (N counts, UN counts) to a boolean pass mask.
        rng: Generator for sampled mode.
        budget: Largest C(n, t) scanned exhaustively.
        samples: Subsets drawn in sampled mode.
        exhaustive_limit: Sizes above this are always sampled.
        mode: Force "exhaustive" or "sampled".
        workers: Thread count (default worker_count()).

    Returns:
        The merged SizeScan, with witnesses re-checked by recount().
    """
    n = len(table)
    if t < 1 or t > n:
        return SizeScan(t, "empty")
    mode = mode or choose_mode(n, t, budget, exhaustive_limit)
    if mode == "exhaustive":
        batches: Iterable[np.ndarray] = iter_combinations(n, t)
    else:
        batches = _batched(sample_subsets(n, t, samples, rng))

    workers = workers or worker_count()
    result = SizeScan(t, mode)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        window: list[np.ndarray] = []
        for batch in itertools.chain(batches, [None]):
            if batch is not None:
                window.append(batch)
            if len(window) >= 2 * workers or (batch is None and window):
                for part in pool.map(lambda s: _scan_batch(table, s, t, mode, predicate), window):
                    result = result.merge(part)
                window = []

    _revalidate(table, result)
    return result


def _revalidate(table: np.ndarray, scan: SizeScan) -> None:
    if scan.min_neighbors_witness is not None:
        n, _ = recount(table, scan.min_neighbors_witness)
        if n != scan.min_neighbors:
            raise AssertionError(f"neighbor witness does not replay: {n} != {scan.min_neighbors}")
    if scan.min_unique_witness is not None:
        _, un = recount(table, scan.min_unique_witness)
        if un != scan.min_unique:
            raise AssertionError(f"unique-neighbor witness does not replay: {un} != {scan.min_unique}")
