"""Exact search dynamics in the two-level subspace spanned by |t_bar> and |t>.

Every state in this module is expressed in the basis ``(|t_bar>, |t>)``; the
initial state is ``(sqrt(1 - lam), sqrt(lam))``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .schedule import build_schedule, required_queries

MODES = ("fixed_point", "naive", "pi3", "noisy")
PI3_MAX_LEVEL = 20


@dataclass(frozen=True)
class TwoLevelState:
    a_tbar: complex
    a_t: complex

    @property
    def success(self) -> float:
        return abs(self.a_t) ** 2

    @property
    def norm(self) -> float:
        return math.sqrt(abs(self.a_tbar) ** 2 + abs(self.a_t) ** 2)

    def to_array(self) -> np.ndarray:
        return np.array([self.a_tbar, self.a_t], dtype=complex)


@dataclass(frozen=True)
class DensityState:
    rho: np.ndarray

    @property
    def success(self) -> float:
        return float(self.rho[1, 1].real)

    @classmethod
    def from_pure(cls, state: TwoLevelState) -> "DensityState":
        v = state.to_array()
        return cls(np.outer(v, v.conj()))


@dataclass
class Trace:
    """Success probability after each iteration of one run.

    ``final`` carries the end state of the run; it is not serialized.
    """

    lam: float
    delta: Optional[float]
    mode: str
    q: np.ndarray
    p: np.ndarray
    depol: Optional[float] = None
    final: Union[TwoLevelState, DensityState, None] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        self.q = np.asarray(self.q, dtype=int)
        self.p = np.asarray(self.p, dtype=float)
        if self.q.shape != self.p.shape:
            raise ValueError("q and p must have the same length")
        if np.any(np.diff(self.q) <= 0):
            raise ValueError("q must be strictly increasing")
        if np.any((self.p < -1e-12) | (self.p > 1 + 1e-12)):
            raise ValueError("success probabilities must lie in [0, 1]")

    @property
    def final_p(self) -> float:
        return float(self.p[-1])

    def metadata(self) -> dict:
        return {"lambda": self.lam, "delta": self.delta, "mode": self.mode, "depol": self.depol}


def _check_lambda(lam):
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")


def initial_state(lam: float) -> TwoLevelState:
    _check_lambda(lam)
    return TwoLevelState(complex(math.sqrt(1.0 - lam)), complex(math.sqrt(lam)))


def apply_iteration(state: TwoLevelState, alpha: float, beta: float, lam: float) -> TwoLevelState:
    """One Grover iteration ``G = R_phi(alpha) R_t(beta)``: target phase first."""
    _check_lambda(lam)
    c0 = math.sqrt(1.0 - lam)
    c1 = math.sqrt(lam)
    a0 = state.a_tbar
    a1 = state.a_t * cmath.exp(1j * beta)
    k = (1.0 - cmath.exp(1j * alpha)) * (c0 * a0 + c1 * a1)
    return TwoLevelState(a0 - k * c0, a1 - k * c1)


def iteration_matrix(alpha: float, beta: float, lam: float) -> np.ndarray:
    _check_lambda(lam)
    phi = np.array([math.sqrt(1.0 - lam), math.sqrt(lam)])
    r_phi = np.eye(2) - (1.0 - np.exp(1j * alpha)) * np.outer(phi, phi)
    r_t = np.diag([1.0, np.exp(1j * beta)])
    return r_phi @ r_t


def _evolve(lam, alphas, betas):
    state = initial_state(lam)
    ps = np.empty(len(alphas))
    for j, (a, b) in enumerate(zip(alphas, betas)):
        state = apply_iteration(state, a, b, lam)
        ps[j] = state.success
    return state, ps


def run_fixed_point(lam: float, q: int, delta: float) -> Trace:
    """Apply the ``q``-query fixed-point schedule; ``p[j]`` is recorded after step ``j``.

    Only the last entry carries the ``p >= 1 - delta`` guarantee.
    """
    sched = build_schedule(q, delta)
    state, ps = _evolve(lam, sched.alphas, sched.betas)
    return Trace(lam, delta, "fixed_point", np.arange(1, q + 1), ps, final=state)


def run_naive_grover(lam: float, q_max: int) -> Trace:
    if q_max < 1:
        raise ValueError("q_max must be at least 1")
    phases = np.full(q_max, math.pi)
    state, ps = _evolve(lam, phases, phases)
    return Trace(lam, None, "naive", np.arange(1, q_max + 1), ps, final=state)


def fixed_point_sweep(lam: float, delta: float, q_values) -> np.ndarray:
    """Final success for each ``q``, each run with its own ``q``-query schedule."""
    return np.array([run_fixed_point(lam, int(q), delta).final_p for q in q_values])


def _pi3_unitaries(lam, m):
    c0, c1 = math.sqrt(1.0 - lam), math.sqrt(lam)
    # U maps the source |s> = |t_bar> onto the initial state
    u = np.array([[c0, -c1], [c1, c0]], dtype=complex)
    w = 1.0 - cmath.exp(1j * math.pi / 3)
    r_s = np.diag([1.0 - w, 1.0])
    r_t = np.diag([1.0, 1.0 - w])
    out = [u]
    for _ in range(m):
        u = u @ r_s @ u.conj().T @ r_t @ u
        # each level triples the rounding error; snap back to the nearest unitary
        w_left, _, v_right = np.linalg.svd(u)
        u = w_left @ v_right
        out.append(u)
    return out


def run_pi3(lam: float, m: int) -> tuple[int, float]:
    """Recursive pi/3 search after ``m`` levels: returns (oracle queries, success)."""
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"lambda must lie in (0, 1], got {lam}")
    if int(m) != m or m < 0:
        raise ValueError(f"m must be a non-negative integer, got {m}")
    if m > PI3_MAX_LEVEL:
        raise ValueError(f"m={m} exceeds the supported recursion depth {PI3_MAX_LEVEL}")
    u = _pi3_unitaries(lam, int(m))[-1]
    return (3**m - 1) // 2, float(abs(u[1, 0]) ** 2)


def pi3_trace(lam: float, m: int) -> Trace:
    if m < 0 or m > PI3_MAX_LEVEL:
        raise ValueError(f"m must lie in [0, {PI3_MAX_LEVEL}]")
    us = _pi3_unitaries(lam, int(m))
    q = [(3**k - 1) // 2 for k in range(m + 1)]
    p = [abs(u[1, 0]) ** 2 for u in us]
    final = TwoLevelState(complex(us[-1][0, 0]), complex(us[-1][1, 0]))
    return Trace(lam, None, "pi3", q, p, final=final)


def depolarize(rho: np.ndarray, depol: float) -> np.ndarray:
    return (1.0 - depol) * rho + 0.5 * depol * np.eye(2)


def run_noisy(lam: float, q: int, delta: float, depol: float) -> Trace:
    """Fixed-point run with a depolarizing channel after every iteration."""
    if not 0.0 <= depol <= 1.0:
        raise ValueError(f"depol must lie in [0, 1], got {depol}")
    sched = build_schedule(q, delta)
    rho = DensityState.from_pure(initial_state(lam)).rho
    ps = np.empty(q)
    for j, (a, b) in enumerate(sched):
        g = iteration_matrix(a, b, lam)
        rho = depolarize(g @ rho @ g.conj().T, depol)
        rho = 0.5 * (rho + rho.conj().T)
        ps[j] = rho[1, 1].real
    return Trace(lam, delta, "noisy", np.arange(1, q + 1), ps, depol=depol, final=DensityState(rho))


def noisy_sweep(lam: float, delta: float, depol: float, q_values) -> np.ndarray:
    return np.array([run_noisy(lam, int(q), delta, depol).final_p for q in q_values])


def minimal_queries(lam: float, delta: float, q_cap: int = 100_000) -> Optional[int]:
    """Smallest ``q`` whose own schedule ends with ``p >= 1 - delta``.

    The scan starts at the closed-form sufficient count and walks down while
    the run still succeeds, or up until it does. Returns ``None`` if no
    ``q <= q_cap`` succeeds.
    """
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"lambda must lie in (0, 1], got {lam}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    target = 1.0 - delta
    if lam >= target:
        return 0

    def ok(q):
        return run_fixed_point(lam, q, delta).final_p >= target

    q = min(max(1, required_queries(lam, delta)), q_cap)
    if ok(q):
        while q > 1 and ok(q - 1):
            q -= 1
        return q
    while q < q_cap:
        q += 1
        if ok(q):
            return q
    return None
