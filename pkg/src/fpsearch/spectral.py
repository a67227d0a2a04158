"""Eigenvalue-window search for grid-discretized operators ``B = poly(x, p)``.

Position and momentum act on a periodic uniform grid with ``[x, p] = i``:
``x`` is diagonal and ``p`` is diagonal in the discrete Fourier basis.
Mixed monomials are Weyl (fully symmetric) ordered, using
``W(x^a p^b) = 2^-a sum_k C(a, k) x^k p^b x^(a-k)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .engine import TwoLevelState

MAX_DEGREE = 4
MAX_POINTS = 1024
TIE_TOL = 1e-9
EDGE_FRACTION = 0.1
EDGE_MASS = 1e-6


class EmptyWindowWarning(RuntimeWarning):
    """The input has no weight on eigenstates inside the window."""


class LeakageWarning(RuntimeWarning):
    """A test packet reaches the grid or bandwidth edge; results are unreliable."""


@dataclass(frozen=True)
class ModeGrid:
    n_points: int
    x_max: float

    def __post_init__(self):
        n = self.n_points
        if n < 2 or n & (n - 1):
            raise ValueError(f"n_points must be a power of two, got {n}")
        if self.x_max <= 0:
            raise ValueError("x_max must be positive")

    @property
    def spacing(self) -> float:
        return 2.0 * self.x_max / self.n_points

    @property
    def positions(self) -> np.ndarray:
        return -self.x_max + self.spacing * np.arange(self.n_points)

    @property
    def momenta(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, self.spacing)

    @property
    def momentum_spacing(self) -> float:
        return math.pi / self.x_max

    def translate(self, psi, shift, axis=-1):
        """Exact periodic translation ``exp(-i shift p)`` by Fourier phase ramp."""
        phase = np.exp(-1j * np.multiply.outer(shift, self.momenta))
        return np.fft.ifft(np.fft.fft(psi, axis=axis) * phase, axis=axis)

    def parity_permutation(self) -> np.ndarray:
        return (-np.arange(self.n_points)) % self.n_points


def _momentum_power(grid, b):
    if b == 0:
        return np.eye(grid.n_points, dtype=complex)
    eye = np.eye(grid.n_points)
    return np.fft.ifft(grid.momenta[:, None] ** b * np.fft.fft(eye, axis=0), axis=0)


def discretize_operator(terms: Sequence[tuple], grid: ModeGrid) -> np.ndarray:
    """Hermitian matrix of ``sum c * W(x^a p^b)`` for terms ``(c, a, b)``."""
    if grid.n_points > MAX_POINTS:
        raise ValueError(f"grid has {grid.n_points} points; at most {MAX_POINTS} supported")
    x = grid.positions
    n = grid.n_points
    out = np.zeros((n, n), dtype=complex)
    p_cache = {}
    for coeff, a, b in terms:
        a, b = int(a), int(b)
        if a < 0 or b < 0 or a > MAX_DEGREE or b > MAX_DEGREE:
            raise ValueError(f"term powers ({a}, {b}) outside 0..{MAX_DEGREE}")
        if b == 0:
            out[np.diag_indices(n)] += coeff * x**a
            continue
        if b not in p_cache:
            p_cache[b] = _momentum_power(grid, b)
        pb = p_cache[b]
        for k in range(a + 1):
            w = coeff * math.comb(a, k) / 2**a
            out += w * (x**k)[:, None] * pb * (x ** (a - k))[None, :]
    return 0.5 * (out + out.conj().T)


def _resolve_parity(values, vectors, grid, tol=1e-8):
    perm = grid.parity_permutation()
    i = 0
    n = len(values)
    while i < n:
        j = i + 1
        while j < n and values[j] - values[i] < tol * max(1.0, abs(values[i])):
            j += 1
        if j - i > 1:
            block = vectors[:, i:j]
            par = block.conj().T @ block[perm, :]
            par = 0.5 * (par + par.conj().T)
            _, rot = np.linalg.eigh(par)
            vectors[:, i:j] = block @ rot
        i = j
    return vectors


def eigensystem(matrix: np.ndarray, grid: ModeGrid, retain: bool = True):
    """Eigenvalues (ascending) and eigenvectors of a discretized operator.

    Degenerate pairs are rotated to definite parity when the operator commutes
    with ``x -> -x``. With ``retain`` only eigenvectors carrying less than
    ``1e-6`` probability in the outer 10% of the grid are kept.
    """
    values, vectors = np.linalg.eigh(matrix)
    perm = grid.parity_permutation()
    if np.allclose(matrix[np.ix_(perm, perm)], matrix, atol=1e-10):
        vectors = _resolve_parity(values, vectors, grid)
    if retain:
        edge = np.abs(grid.positions) > (1.0 - EDGE_FRACTION) * grid.x_max
        edge_mass = np.sum(np.abs(vectors[edge, :]) ** 2, axis=0)
        keep = edge_mass < EDGE_MASS
        values, vectors = values[keep], vectors[:, keep]
    return values, vectors


def in_window(values, window, tol=TIE_TOL):
    a, b = window
    return (values >= a - tol) & (values <= b + tol)


@dataclass
class SpectralProblem:
    """Window search over the retained eigenbasis of a discretized operator.

    Give either ``input_amplitudes`` (over the retained eigenbasis, ascending
    eigenvalue order) or a position-space ``input_wavefunction``, which is
    projected onto the retained eigenvectors and renormalized.
    """

    terms: Sequence[tuple]
    grid: ModeGrid
    window: tuple
    input_amplitudes: Optional[np.ndarray] = None
    input_wavefunction: Optional[np.ndarray] = None
    max_states: Optional[int] = None
    eigenvalues: np.ndarray = field(init=False, repr=False)
    eigenvectors: np.ndarray = field(init=False, repr=False)
    amplitudes: np.ndarray = field(init=False, repr=False)
    projection_mass: float = field(init=False, default=1.0)

    def __post_init__(self):
        a, b = self.window
        if a > b:
            raise ValueError("window must satisfy a <= b")
        self.matrix = discretize_operator(self.terms, self.grid)
        values, vectors = eigensystem(self.matrix, self.grid)
        if self.max_states is not None:
            values, vectors = values[: self.max_states], vectors[:, : self.max_states]
        self.eigenvalues, self.eigenvectors = values, vectors
        if (self.input_amplitudes is None) == (self.input_wavefunction is None):
            raise ValueError("give exactly one of input_amplitudes or input_wavefunction")
        if self.input_wavefunction is not None:
            psi = np.asarray(self.input_wavefunction, dtype=complex)
            amps = vectors.conj().T @ (psi / np.linalg.norm(psi))
        else:
            amps = np.zeros(len(values), dtype=complex)
            given = np.asarray(self.input_amplitudes, dtype=complex)
            if len(given) > len(values):
                raise ValueError(f"{len(given)} amplitudes but only {len(values)} retained eigenstates")
            amps[: len(given)] = given
        self.projection_mass = float(np.sum(np.abs(amps) ** 2))
        if self.projection_mass == 0:
            raise ValueError("input has no weight on the retained eigenstates")
        self.amplitudes = amps / math.sqrt(self.projection_mass)

    @property
    def mask(self) -> np.ndarray:
        return in_window(self.eigenvalues, self.window)


def equal_superposition(count: int) -> np.ndarray:
    return np.full(count, 1.0 / math.sqrt(count), dtype=complex)


def spectral_lambda(problem: SpectralProblem) -> float:
    """Input weight on eigenstates with eigenvalue in the closed window."""
    lam = float(np.sum(np.abs(problem.amplitudes[problem.mask]) ** 2))
    if lam == 0.0:
        warnings.warn("no input weight inside the eigenvalue window; search is impossible",
                      EmptyWindowWarning, stacklevel=2)
    return min(1.0, lam)


def window_lambda(problem: SpectralProblem, window) -> float:
    return float(np.sum(np.abs(problem.amplitudes[in_window(problem.eigenvalues, window)]) ** 2))


def post_search_distribution(problem: SpectralProblem, final_state: TwoLevelState) -> np.ndarray:
    """Eigenbasis amplitudes of ``a_tbar |t_bar> + a_t |t>``.

    In-window amplitudes are scaled by ``a_t / sqrt(lam)``, the rest by
    ``a_tbar / sqrt(1 - lam)``. With ``lam`` of 0 or 1 only one of the two
    states exists and the projected input is returned.
    """
    amps = problem.amplitudes
    mask = problem.mask
    lam = float(np.sum(np.abs(amps[mask]) ** 2))
    if lam <= 0.0 or lam >= 1.0:
        out = amps.copy()
    else:
        out = np.where(mask, amps * (final_state.a_t / math.sqrt(lam)),
                       amps * (final_state.a_tbar / math.sqrt(1.0 - lam)))
    return out / np.linalg.norm(out)


def window_mass(problem: SpectralProblem, amplitudes) -> float:
    return float(np.sum(np.abs(np.asarray(amplitudes)[problem.mask]) ** 2))


# --- oracle pipeline ------------------------------------------------------

@dataclass
class PipelineReport:
    eigenvalues: np.ndarray
    expected_flag: np.ndarray
    flag_shift_prob: np.ndarray
    flag_correct: np.ndarray
    pointer_fidelity: np.ndarray
    flag_distribution: np.ndarray
    norm: float
    pointer_purity: float
    lam: float

    @property
    def all_correct(self) -> bool:
        return bool(np.all(self.flag_correct))

    @property
    def min_fidelity(self) -> float:
        return float(np.min(self.pointer_fidelity))

    def to_record(self) -> dict:
        return {
            "retained_states": int(len(self.eigenvalues)),
            "all_flags_correct": self.all_correct,
            "min_pointer_fidelity": self.min_fidelity,
            "flag_distribution": [float(v) for v in self.flag_distribution],
            "lambda": self.lam,
            "norm": self.norm,
            "pointer_purity": self.pointer_purity,
            "states": [
                {"E": float(e), "in_window": bool(f), "flag_shift_prob": float(s),
                 "correct": bool(c), "pointer_fidelity": float(p)}
                for e, f, s, c, p in zip(self.eigenvalues, self.expected_flag, self.flag_shift_prob,
                                         self.flag_correct, self.pointer_fidelity)
            ],
        }


def pointer_grid_for(values, window, width=0.1, margin=0.2) -> ModeGrid:
    """Pointer grid covering the spectrum and window with ``margin`` to spare."""
    reach = max(float(np.max(np.abs(values))), abs(window[0]), abs(window[1]))
    x_max = (1.0 + margin) * reach + 12.0 * width
    n = 1 << math.ceil(math.log2(2.0 * x_max / (width / 4.0)))
    return ModeGrid(n, x_max)


def simulate_oracle_pipeline(problem: SpectralProblem, flag_levels: int = 4,
                             pointer: Optional[ModeGrid] = None, pointer_width: float = 0.1,
                             max_states: int = 64, tol: float = 1e-6) -> PipelineReport:
    """Run ``O = U_H^dag U_C U_H`` on every retained eigenstate and on the input.

    ``U_H`` translates the pointer by the eigenvalue, ``U_C`` adds one to the
    flag register (mod ``flag_levels``) where the pointer lies in the window,
    and ``U_H^dag`` translates back. The pointer starts as a narrow Gaussian
    at the origin standing in for the position eigenstate ``|0>``.
    """
    if flag_levels < 2:
        raise ValueError("flag_levels must be at least 2")
    values = problem.eigenvalues[:max_states]
    amps = problem.amplitudes[:max_states]
    if pointer is None:
        pointer = pointer_grid_for(values, problem.window, pointer_width)
    reach = max(float(np.max(np.abs(values))), abs(problem.window[0]), abs(problem.window[1]))
    if reach + 8.0 * pointer_width > pointer.x_max:
        raise ValueError(f"spectrum reach {reach:.4g} exceeds the pointer window +-{pointer.x_max:.4g}")

    xs = pointer.positions
    ptr0 = np.exp(-xs**2 / (4.0 * pointer_width**2)).astype(complex)
    ptr0 /= np.linalg.norm(ptr0)
    m = len(values)

    # state[alpha, flag, pointer] for each eigenstate started with flag 0
    state = np.zeros((m, flag_levels, len(xs)), dtype=complex)
    state[:, 0, :] = ptr0
    state = pointer.translate(state, values[:, None])
    win = in_window(xs, problem.window, tol=0.0)
    shifted = np.roll(state, 1, axis=1)
    state = np.where(win[None, None, :], shifted, state)
    state = pointer.translate(state, -values[:, None])

    expected = in_window(values, problem.window).astype(int)
    flag_probs = np.sum(np.abs(state) ** 2, axis=2)
    shift_prob = flag_probs[:, 1]
    correct = flag_probs[np.arange(m), expected] >= 1.0 - tol
    overlaps = np.einsum("x,afx->af", ptr0.conj(), state)
    fidelity = np.sum(np.abs(overlaps) ** 2, axis=1)

    # superposition input: the system basis is orthonormal, so weights combine incoherently
    weights = np.abs(amps) ** 2
    weights = weights / weights.sum()
    flag_dist = weights @ flag_probs
    joint = np.sqrt(weights)[:, None, None] * state
    norm = float(np.sqrt(np.sum(np.abs(joint) ** 2)))
    flat = joint.reshape(-1, len(xs))
    # tr(rho^2) of the reduced pointer state via the Gram matrix of its branches
    gram = flat.conj() @ flat.T
    purity = float(np.sum(np.abs(gram) ** 2))
    lam = float(np.sum(weights[expected == 1]))
    return PipelineReport(values, expected, shift_prob, correct, fidelity, flag_dist, norm, purity, lam)


# --- two-mode gate decomposition -----------------------------------------

def gaussian_packet(grid: ModeGrid, center: float, width: float, momentum: float = 0.0) -> np.ndarray:
    x = grid.positions
    psi = np.exp(-((x - center) ** 2) / (2 * width**2) + 1j * momentum * x)
    return psi / np.linalg.norm(psi)


def _edge_leakage(grid, psi, margin=4):
    """Largest probability within ``margin`` spacings of the position or momentum edge."""
    n = grid.n_points
    pos = np.sum(np.abs(psi) ** 2, axis=1)
    pos_edge = pos[:margin].sum() + pos[n - margin:].sum()
    mom = np.sum(np.abs(np.fft.fft(psi, axis=0)) ** 2, axis=1)
    mom /= mom.sum()
    k = np.abs(np.fft.fftfreq(n) * n)
    mom_edge = mom[k >= n // 2 - margin].sum()
    return max(pos_edge, mom_edge)


@dataclass
class DecompositionResult:
    max_infidelity: float
    infidelities: np.ndarray
    reliable: bool


def verify_gate_decomposition(theta1: float, theta2: float, grid: Optional[ModeGrid] = None,
                              test_states: int = 10, seed: int = 0,
                              leak_tol: float = 1e-10) -> DecompositionResult:
    """Compare ``exp(-i B (x) p)`` with ``exp(-i t2 x^3) exp(-i t1 p (x) p) exp(i t2 x^3)``.

    ``B = t1 (p + 3 t2 x^2)`` acts on the first mode and ``p`` on the second.
    The left side is built from the eigendecomposition of the discretized
    ``B``; the right side from diagonal phases in position and momentum.
    Test states are random product Gaussian packets near the grid centre.
    """
    if grid is None:
        grid = ModeGrid(64, 6.0)
    if grid.n_points > 64:
        raise ValueError("two-mode check supports at most 64 points per mode")
    x, p = grid.positions, grid.momenta
    values, vectors = np.linalg.eigh(discretize_operator([(theta1, 0, 1), (3 * theta1 * theta2, 2, 0)], grid))
    cubic = np.exp(1j * theta2 * x**3)[:, None]
    pp = np.exp(-1j * theta1 * np.outer(p, p))
    rng = np.random.default_rng(seed)
    scale = grid.x_max / 6.0
    infid = np.empty(test_states)
    reliable = True
    for k in range(test_states):
        c1, c2 = rng.uniform(-scale, scale, 2)
        k1, k2 = rng.uniform(-1.0, 1.0, 2)
        w1, w2 = rng.uniform(0.6, 0.9, 2) * scale
        psi = np.outer(gaussian_packet(grid, c1, w1, k1), gaussian_packet(grid, c2, w2, k2))
        if max(_edge_leakage(grid, psi), _edge_leakage(grid, psi.T), _edge_leakage(grid, cubic * psi)) > leak_tol:
            reliable = False
        coeff = np.fft.fft(vectors.conj().T @ psi, axis=1) * np.exp(-1j * np.outer(values, p))
        lhs = vectors @ np.fft.ifft(coeff, axis=1)
        rhs = np.conj(cubic) * np.fft.ifft2(pp * np.fft.fft2(cubic * psi))
        infid[k] = max(0.0, 1.0 - abs(np.vdot(lhs, rhs)) ** 2)
    if not reliable:
        warnings.warn("test packets reach the grid edge; decomposition check is unreliable",
                      LeakageWarning, stacklevel=2)
    return DecompositionResult(float(infid.max()), infid, reliable)
