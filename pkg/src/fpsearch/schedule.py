"""Chebyshev phase schedules and closed-form query counts."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AngleSchedule:
    """Phase sequence for ``q`` fixed-point Grover iterations.

    ``alphas[j]`` and ``betas[j]`` are the phases of the ``j``-th iteration
    (0-indexed here), with ``betas`` equal to ``alphas`` reversed.
    """

    q: int
    L: int
    delta: float
    eta: float
    alphas: np.ndarray
    betas: np.ndarray

    def __iter__(self):
        return iter(zip(self.alphas, self.betas))

    def __len__(self):
        return self.q


def chebyshev_T(L, x):
    """Chebyshev polynomial of the first kind for real (possibly fractional) order.

    Uses ``cos(L arccos x)`` on ``[-1, 1]`` and ``cosh(L arccosh x)`` above 1.
    Below -1 the order must be an integer.
    """
    L = float(L)
    x = float(x)
    if L < 0:
        raise ValueError(f"order must be non-negative, got {L}")
    if abs(x) <= 1.0:
        return math.cos(L * math.acos(x))
    if x > 1.0:
        return math.cosh(L * math.acosh(x))
    if not L.is_integer():
        raise ValueError(f"non-integer order {L} is undefined for x < -1")
    sign = -1.0 if int(L) % 2 else 1.0
    return sign * math.cosh(L * math.acosh(-x))


def _check_delta(delta, *, allow_one):
    ok = 0.0 < delta <= 1.0 if allow_one else 0.0 < delta < 1.0
    if not ok:
        bound = "(0, 1]" if allow_one else "(0, 1)"
        raise ValueError(f"delta must lie in {bound}, got {delta}")


def _check_lambda(lam, *, allow_one=True):
    ok = 0.0 < lam <= 1.0 if allow_one else 0.0 < lam < 1.0
    if not ok:
        bound = "(0, 1]" if allow_one else "(0, 1)"
        raise ValueError(f"lambda must lie in {bound}, got {lam}")


def schedule_eta(q: int, delta: float) -> float:
    L = 2 * q + 1
    return 1.0 / chebyshev_T(1.0 / L, 1.0 / math.sqrt(delta))


def build_schedule(q: int, delta: float) -> AngleSchedule:
    """Fixed-point phases for ``q`` queries and target failure probability ``delta``.

    ``alpha_j = -2 arccot(tan(2 pi j / L) sqrt(1 - eta^2))`` with the arccot
    branch taking values in ``(0, pi)``.
    """
    if int(q) != q or q < 1:
        raise ValueError(f"q must be a positive integer, got {q}")
    q = int(q)
    _check_delta(delta, allow_one=True)
    L = 2 * q + 1
    eta = schedule_eta(q, delta)
    width = math.sqrt(max(0.0, 1.0 - eta * eta))
    j = np.arange(1, q + 1)
    # L is odd, so 2j/L never equals 1/2 and tan stays finite
    assert not np.any(4 * j == L)
    t = np.tan(2.0 * np.pi * j / L) * width
    alphas = -2.0 * (np.pi / 2.0 - np.arctan(t))
    betas = alphas[::-1].copy()
    alphas.setflags(write=False)
    betas.setflags(write=False)
    return AngleSchedule(q=q, L=L, delta=float(delta), eta=eta, alphas=alphas, betas=betas)


def required_queries(lam: float, delta: float) -> int:
    """Sufficient query count ``ceil((ln(2/sqrt(delta))/sqrt(lam) - 1)/2)``, floored at 0."""
    _check_lambda(lam)
    _check_delta(delta, allow_one=False)
    q = 0.5 * (math.log(2.0 / math.sqrt(delta)) / math.sqrt(lam) - 1.0)
    return max(0, math.ceil(q))


def lower_bound_queries(p: float, lam: float) -> float:
    """Lower bound on queries any quantum search needs to reach success ``p``."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    _check_lambda(lam)
    # 1/(1/237) rounds to 237.00000000000003; do not let that bump the ceiling
    n = math.ceil(1.0 / lam * (1.0 - 1e-12))
    bound = ((1.0 + math.sqrt(p) - math.sqrt(1.0 - p)) * math.sqrt(n) - 2.0) / (2.0 * math.sqrt(2.0))
    return max(0.0, bound)


def pi3_queries(lam: float, delta: float, asymptotic: bool = False) -> float:
    """Query count of the recursive pi/3 search, ``(ln delta / ln(1 - lam) - 1) / 2``.

    With ``asymptotic=True`` the small-overlap form ``(-ln delta / lam - 1) / 2``
    is returned instead. A full overlap needs no queries.
    """
    _check_lambda(lam)
    _check_delta(delta, allow_one=False)
    if asymptotic:
        return 0.5 * (-math.log(delta) / lam - 1.0)
    if lam == 1.0:
        return 0.0
    return 0.5 * (math.log(delta) / math.log1p(-lam) - 1.0)


def pi3_success(lam: float, m: int) -> float:
    """Closed-form success probability ``1 - (1 - lam)^(3^m)``."""
    return 1.0 - (1.0 - lam) ** (3**m)


def fixed_point_success(lam: float, q: int, delta: float) -> float:
    """Closed-form final success ``1 - delta * T_L(T_{1/L}(1/sqrt(delta)) sqrt(1 - lam))^2``."""
    L = 2 * q + 1
    gamma_inv = chebyshev_T(1.0 / L, 1.0 / math.sqrt(delta))
    return 1.0 - delta * chebyshev_T(L, gamma_inv * math.sqrt(1.0 - lam)) ** 2
