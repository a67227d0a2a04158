"""Estimating the overlap ``lam = m(Q) / m(A)`` under the uniform initial state.

Random numbers come from numpy's PCG64. Shard ``i`` of a Monte Carlo run
uses ``SeedSequence(seed, spawn_key=(i,))``, so its stream depends only on
``(seed, i)`` and results do not change with the number of worker threads.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .problems import SearchProblem

SHARD_SIZE = 1 << 18
MIN_ACCEPTANCE = 1e-3
METHODS = ("monte_carlo", "grid")


class LowAcceptanceError(RuntimeError):
    pass


@dataclass(frozen=True)
class OverlapEstimate:
    lam: float
    std_error: float
    samples_or_cells: int
    method: str
    seed: Optional[int] = None
    # grid only: (lower, upper) bracket from settled cells; not serialized
    bounds: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda estimate {self.lam} outside [0, 1]")

    def to_record(self) -> dict:
        return {
            "lambda": self.lam,
            "std_error": self.std_error,
            "method": self.method,
            "samples_or_cells": self.samples_or_cells,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record())

    @classmethod
    def from_record(cls, rec: dict) -> "OverlapEstimate":
        return cls(rec["lambda"], rec["std_error"], rec["samples_or_cells"], rec["method"], rec["seed"])

    @classmethod
    def from_json(cls, text: str) -> "OverlapEstimate":
        return cls.from_record(json.loads(text))


def shard_generator(seed: int, shard: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(shard,))))


def _mc_shard(problem, seed, shard, n):
    rng = shard_generator(seed, shard)
    lo, hi = problem.bounding_box[:, 0], problem.bounding_box[:, 1]
    x = lo + (hi - lo) * rng.random((n, problem.dimension))
    accepted = problem.in_region(x)
    hits = problem.indicator(x).astype(bool)
    return int(accepted.sum()), int(hits.sum())


def estimate_lambda_mc(problem: SearchProblem, samples: int, seed: int, workers: int = 1) -> OverlapEstimate:
    """Hit fraction of uniform points in the search region.

    ``samples`` points are drawn uniformly from the bounding box; those
    outside the region are rejected. The standard error is binomial over the
    accepted points.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    sizes = [min(SHARD_SIZE, samples - s) for s in range(0, samples, SHARD_SIZE)]
    jobs = list(enumerate(sizes))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda job: _mc_shard(problem, seed, *job), jobs))
    else:
        results = [_mc_shard(problem, seed, i, n) for i, n in jobs]
    accepted = sum(r[0] for r in results)
    hits = sum(r[1] for r in results)
    if accepted < MIN_ACCEPTANCE * samples:
        raise LowAcceptanceError(
            f"only {accepted} of {samples} box samples fell in the region; use the grid method"
        )
    lam = hits / accepted
    return OverlapEstimate(lam, math.sqrt(lam * (1.0 - lam) / accepted), accepted, "monte_carlo", seed)


def _classify(problem, lower, h, criterion_box):
    """Evaluate corners and centre of each cell; return region/target corner flags and a near flag."""
    d = problem.dimension
    offsets = np.array(list(itertools.product((0.0, 1.0), repeat=d)))
    corners = lower[:, None, :] + offsets[None, :, :] * h
    center = lower + 0.5 * h
    in_a = problem.in_region(corners)
    in_q = problem.indicator(corners).astype(bool)
    near = np.zeros(len(lower), dtype=bool)
    if criterion_box is not None:
        gc = np.asarray(problem.feature(center), dtype=float)
        gk = np.asarray(problem.feature(corners), dtype=float)
        gk = np.where(np.isfinite(gk), gk, np.nan)
        with np.errstate(invalid="ignore"), warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            spread = np.nanmax(np.abs(gk - gc[:, None, :]), axis=1)
        spread = np.where(np.isfinite(spread), spread, np.inf)
        lo_g, hi_g = gc - 2 * spread, gc + 2 * spread
        near = criterion_box(lo_g, hi_g)
        contains = getattr(problem.criterion, "contains", None)
        if contains is not None:
            # cells whose feature range sits inside the ball are settled by their corners
            near &= ~contains(lo_g, hi_g)
        near &= in_a.any(axis=1) | problem.in_region(center)
    return in_a, in_q, near


def _subsample_fractions(problem, lower, h, per_axis=4):
    d = problem.dimension
    ticks = (np.arange(per_axis) + 0.5) / per_axis
    offsets = np.array(list(itertools.product(ticks, repeat=d)))
    pts = lower[:, None, :] + offsets[None, :, :] * h
    frac_a = problem.in_region(pts).mean(axis=1)
    frac_q = problem.indicator(pts).astype(bool).mean(axis=1)
    return frac_a, frac_q


def estimate_lambda_grid(problem: SearchProblem, base_resolution: int = 256, refine_levels: int = 6,
                         chunk: int = 1 << 16) -> OverlapEstimate:
    """Tensor-grid quadrature with recursive refinement of boundary cells.

    A cell is refined when its corners disagree on region or target
    membership, or (for l-infinity criteria) when the feature's variation over
    the cell could reach the criterion set. Cells still undecided after
    ``refine_levels`` subdivisions are scored by a 4-per-axis midpoint sample.
    ``bounds`` brackets the ratio by counting those cells as all-out or all-in;
    it tightens monotonically with ``refine_levels``.
    """
    d = problem.dimension
    if d > 3:
        raise ValueError(f"grid quadrature supports d <= 3, got {d}; use monte_carlo")
    if base_resolution < 16:
        raise ValueError("base_resolution must be at least 16")
    lo, hi = problem.bounding_box[:, 0], problem.bounding_box[:, 1]
    h = (hi - lo) / base_resolution
    idx = np.indices((base_resolution,) * d).reshape(d, -1).T
    cells = lo + idx * h
    criterion_box = getattr(problem.criterion, "may_intersect", None)
    children = np.array(list(itertools.product((0.0, 0.5), repeat=d)))

    m_a = 0.0
    m_q = 0.0
    n_cells = 0
    open_vol = 0.0
    sub_a = sub_q = 0.0
    for level in range(refine_levels + 1):
        vol = float(np.prod(h))
        pending = []
        for start in range(0, len(cells), chunk):
            lower = cells[start:start + chunk]
            n_cells += len(lower)
            in_a, in_q, near = _classify(problem, lower, h, criterion_box)
            a_all, a_any = in_a.all(axis=1), in_a.any(axis=1)
            q_all, q_any = in_q.all(axis=1), in_q.any(axis=1)
            settled_q = (q_all | ~q_any) & ~near
            full_a = a_all & settled_q
            m_a += vol * full_a.sum()
            m_q += vol * (full_a & q_all).sum()
            undecided = ~(full_a | (~a_any & ~q_any & ~near))
            if level == refine_levels:
                open_vol += vol * undecided.sum()
                fa, fq = _subsample_fractions(problem, lower[undecided], h)
                sub_a += vol * fa.sum()
                sub_q += vol * fq.sum()
            else:
                pending.append(lower[undecided])
        if level == refine_levels:
            break
        parents = np.concatenate(pending) if pending else np.empty((0, d))
        cells = (parents[:, None, :] + children[None, :, :] * h).reshape(-1, d)
        h = h / 2
    if m_a + sub_a <= 0:
        raise ValueError("search region has zero measure on this grid")
    lower_bound = m_q / (m_a + open_vol)
    upper_bound = min(1.0, (m_q + open_vol) / m_a) if m_a > 0 else 1.0
    lam = min(1.0, (m_q + sub_q) / (m_a + sub_a))
    return OverlapEstimate(lam, 0.0, n_cells, "grid", None, bounds=(lower_bound, upper_bound))


def classical_expected_iterations(lam: float) -> float:
    """Mean number of independent uniform draws until the first hit, ``1 / lam``."""
    if lam < 0 or lam > 1:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    if lam == 0:
        warnings.warn("zero overlap: classical search never succeeds", RuntimeWarning, stacklevel=2)
        return math.inf
    return 1.0 / lam
