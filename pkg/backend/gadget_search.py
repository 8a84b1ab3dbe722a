# -*- coding: utf-8 -*-
"""
gadget_search.py - Random biregular graphs and the gadget search.

A gadget is a small (d1,d2)-biregular graph H on n1+n2 vertices whose
subsets expand almost as well as a random graph predicts: with
p = d1/n2 = d2/n1, for every t up to C/p and every S of size t on the left,

    |UN_H(S)| / |S| >= (1 - delta) * d1 * exp(-p t)

and the same on the right with d2. ("tail" mode compares against the
concentration bound p(1-p)^(t-1) n_other - sqrt(4 p (1-p)^(t-1) n_other log n_side)
instead.) search_gadget() samples uniformly random biregular graphs until
one passes.

Found gadgets can be cached in a catalog directory (FORGE_CATALOG_DIR,
default ~/Documents/UNForge/gadgets), one graph file and one certificate
per (n1, n2, d1, d2, seed).

Usage:
    spec = GadgetSpec(n1=24, n2=24, d1=6, d2=6, delta=0.8, seed=7)
    graph, cert = search_gadget(spec)
"""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from errors import GadgetSearchExhausted, ParameterError, SamplingBudgetExceeded
from graph_io import checksum, read_graph, read_json, write_graph, write_json
from graphs import LEFT, RIGHT, SIDE_NAMES, DenseBipartiteGraph
from subset_scan import _EXHAUSTIVE_BUDGET, _SAMPLES_PER_SIZE, scan_size, stage_rng

_SAMPLE_TRIES = 1_000  # restarted pairings before giving up
_STAGE_SAMPLE = 0
_STAGE_CHECK = 1
CATALOG_DIR = os.path.join(os.path.expanduser("~"), "Documents", "UNForge", "gadgets")


@dataclass(frozen=True)
class GadgetSpec:
    """What a gadget must satisfy and how hard to look for one."""

    n1: int
    n2: int
    d1: int
    d2: int
    C: float = 1.0
    delta: float = 0.5
    t_exhaustive: int = 3
    samples_per_size: int = _SAMPLES_PER_SIZE
    max_attempts: int = 100
    seed: int = 0
    threshold_mode: str = "exp"
    budget: int = _EXHAUSTIVE_BUDGET

    def __post_init__(self) -> None:
        if min(self.n1, self.n2, self.d1, self.d2) < 1:
            raise ParameterError("gadget sizes and degrees must be positive")
        if self.n1 * self.d1 != self.n2 * self.d2:
            raise ParameterError(f"n1*d1 = {self.n1 * self.d1} but n2*d2 = {self.n2 * self.d2}")
        if self.d1 > self.n2 or self.d2 > self.n1:
            raise ParameterError("degrees exceed the opposite side; no simple graph exists")
        if not 0 < self.delta < 1:
            raise ParameterError(f"delta must be in (0, 1), got {self.delta}")
        if self.C <= 0:
            raise ParameterError("C must be positive")
        if self.threshold_mode not in ("exp", "tail"):
            raise ParameterError(f"threshold_mode must be 'exp' or 'tail', got {self.threshold_mode!r}")

    @property
    def p(self) -> float:
        return self.d1 / self.n2

    def max_size(self, side: int) -> int:
        """floor(C n2 / d1) on the left, floor(C n1 / d2) on the right."""
        if side == LEFT:
            return min(self.n1, math.floor(self.C * self.n2 / self.d1 + 1e-9))
        return min(self.n2, math.floor(self.C * self.n1 / self.d2 + 1e-9))

    def to_dict(self) -> dict:
        return asdict(self)


def threshold(spec: GadgetSpec, side: int, t: int) -> float:
    """Required |UN(S)|/|S| for |S| = t on the given side."""
    p = spec.p
    d = spec.d1 if side == LEFT else spec.d2
    if spec.threshold_mode == "exp":
        return (1 - spec.delta) * d * math.exp(-p * t)
    n_side, n_other = (spec.n1, spec.n2) if side == LEFT else (spec.n2, spec.n1)
    mean = p * (1 - p) ** (t - 1) * n_other
    return mean - math.sqrt(4 * mean * math.log(n_side)) if n_side > 1 else mean


# ── Sampling ───────────────────────────────────────────────────────────────

def _suitable(edges: set[tuple[int, int]], spare_left: list[int], spare_right: list[int]) -> bool:
    """Whether some leftover left stub can still meet some leftover right stub."""
    return any((u, v) not in edges for u in set(spare_left) for v in set(spare_right))


def _pair_stubs(n1: int, n2: int, d1: int, d2: int, rng: np.random.Generator) -> set[tuple[int, int]] | None:
    """One incremental pairing; None once the leftover stubs cannot be paired."""
    edges: set[tuple[int, int]] = set()
    left = np.repeat(np.arange(n1, dtype=np.int64), d1)
    right = np.repeat(np.arange(n2, dtype=np.int64), d2)
    while len(left):
        right = rng.permutation(right)
        spare_left: list[int] = []
        spare_right: list[int] = []
        for u, v in zip(left.tolist(), right.tolist()):
            if (u, v) in edges:
                spare_left.append(u)
                spare_right.append(v)
            else:
                edges.add((u, v))
        if spare_left and not _suitable(edges, spare_left, spare_right):
            return None
        left = np.asarray(spare_left, dtype=np.int64)
        right = np.asarray(spare_right, dtype=np.int64)
    return edges


def sample_biregular(
    n1: int, n2: int, d1: int, d2: int, rng: np.random.Generator, max_tries: int = _SAMPLE_TRIES
) -> DenseBipartiteGraph:
    """Random simple (d1,d2)-biregular graph by incremental stub pairing.

    Left stubs meet a random permutation of right stubs; pairs that would
    repeat an edge go back into the pool and are reshuffled among
    themselves. A pairing whose leftovers can only form repeated edges is
    restarted.

    Raises:
        SamplingBudgetExceeded: after max_tries restarted pairings.
    """
    if n1 * d1 != n2 * d2:
        raise ParameterError(f"n1*d1 = {n1 * d1} but n2*d2 = {n2 * d2}")
    for _ in range(max_tries):
        edges = _pair_stubs(n1, n2, d1, d2, rng)
        if edges is not None:
            return DenseBipartiteGraph(n1, n2, sorted(edges), name=f"H({n1},{n2},{d1},{d2})")
    raise SamplingBudgetExceeded(f"no simple ({d1},{d2})-biregular graph in {max_tries} pairings", attempts=max_tries)


# ── Verification ───────────────────────────────────────────────────────────

@dataclass
class GadgetCertificate:
    graph_checksum: str
    spec: dict
    p: float
    sizes: list[dict] = field(default_factory=list)
    passed: bool = True
    eligible: dict = field(default_factory=dict)

    def margin(self) -> float:
        """Smallest worst_ratio / threshold over all checked sizes."""
        ratios = [s["worst_ratio"] / s["threshold"] for s in self.sizes if s["threshold"] > 0]
        return min(ratios) if ratios else math.inf

    def to_dict(self) -> dict:
        return asdict(self)


def check_gadget(H: DenseBipartiteGraph, spec: GadgetSpec) -> GadgetCertificate:
    """Verify the two-sided unique-neighbor profile of H.

    Sizes up to t_exhaustive are checked over all subsets when C(n, t) is
    within the budget; larger sizes are sampled with a generator derived
    from spec.seed, so the certificate replays exactly.
    """
    if (H.n_left, H.n_right) != (spec.n1, spec.n2) or not H.is_biregular(spec.d1, spec.d2):
        raise ParameterError(f"{H.name} is not ({spec.d1},{spec.d2})-biregular on {spec.n1}+{spec.n2}")
    cert = GadgetCertificate(
        graph_checksum=checksum(H),
        spec=spec.to_dict(),
        p=spec.p,
        eligible={
            "left": spec.d1 >= 4 * math.log(spec.n1),
            "right": spec.d2 >= 4 * math.log(spec.n2),
        },
    )
    for side in (LEFT, RIGHT):
        table = H.neighbor_matrix(side)
        for t in range(1, spec.max_size(side) + 1):
            need = threshold(spec, side, t)
            scan = scan_size(
                table, t,
                lambda n, un, need=need, t=t: un >= need * t - 1e-9,
                rng=stage_rng(spec.seed, _STAGE_CHECK, side, t),
                budget=spec.budget,
                samples=spec.samples_per_size,
                exhaustive_limit=spec.t_exhaustive,
            )
            entry = {
                "side": SIDE_NAMES[side],
                "t": t,
                "mode": scan.mode,
                "examined": scan.examined,
                "threshold": need,
                "worst_ratio": (scan.min_unique or 0) / t,
                "worst_witness": scan.min_unique_witness,
                "failures": scan.failures,
                "passed": scan.passed,
            }
            cert.sizes.append(entry)
            cert.passed = cert.passed and scan.passed
    return cert


def search_gadget(spec: GadgetSpec) -> tuple[DenseBipartiteGraph, GadgetCertificate]:
    """Sample and check graphs until one passes.

    Attempt a draws its graph from stage_rng(seed, 0, a), so the result
    depends only on the spec. An attempt whose draw fails still counts.

    Raises:
        GadgetSearchExhausted: after max_attempts, carrying the certificate
            with the best margin seen (None if no draw succeeded).
    """
    best: GadgetCertificate | None = None
    for attempt in range(spec.max_attempts):
        try:
            H = sample_biregular(spec.n1, spec.n2, spec.d1, spec.d2, stage_rng(spec.seed, _STAGE_SAMPLE, attempt))
        except SamplingBudgetExceeded:
            continue
        cert = check_gadget(H, spec)
        if cert.passed:
            H.name = gadget_name(spec)
            return H, cert
        if best is None or cert.margin() > best.margin():
            best = cert
    raise GadgetSearchExhausted(
        f"no gadget passed in {spec.max_attempts} attempts "
        f"(best margin {best.margin() if best else float('nan'):.3f})",
        best=best,
    )


# ── Catalog ────────────────────────────────────────────────────────────────

def gadget_name(spec: GadgetSpec) -> str:
    return f"gadget_{spec.n1}-{spec.n2}-{spec.d1}-{spec.d2}_{spec.seed}"


def catalog_dir() -> str:
    return os.environ.get("FORGE_CATALOG_DIR") or CATALOG_DIR


def catalog_paths(spec: GadgetSpec, directory: str | None = None) -> tuple[str, str]:
    """(graph file, certificate file) for the spec's catalog key."""
    base = os.path.join(directory or catalog_dir(), gadget_name(spec))
    return base + ".txt", base + ".json"


def load_or_search(spec: GadgetSpec, directory: str | None = None) -> tuple[DenseBipartiteGraph, GadgetCertificate, bool]:
    """Return (graph, certificate, from_catalog).

    A cached gadget is re-checked against the current spec before use;
    one that no longer passes is replaced.
    """
    graph_path, cert_path = catalog_paths(spec, directory)
    if os.path.isfile(graph_path) and os.path.isfile(cert_path):
        H, _ = read_graph(graph_path)
        cert = check_gadget(H, spec)
        if cert.passed:
            H.name = gadget_name(spec)
            return H, cert, True
    H, cert = search_gadget(spec)
    write_graph(H, graph_path, manifest_ref=os.path.basename(cert_path))
    write_json(cert_path, cert.to_dict())
    return H, cert, False


def certificate_from_file(path: str) -> dict:
    return read_json(path)
