"""Brute-force checks on a finite box of field modes.

The continuum formulas elsewhere in the package rest on a long-time limit
and on replacing mode sums by integrals. This module keeps the sums finite:
a box of length ``L`` with ``N`` positive-k modes, each with normalisation
C_k^2 = 2 pi / (omega_k L). Everything here is deterministic.

Two evaluation routes exist for the momentum variance. ``"toeplitz"`` uses
the fact that the finite-time kernel depends on omega_K - omega_k only,
which on a uniform grid is a function of the index difference, so each row
sum is one entry of a discrete convolution. ``"direct"`` forms the N x N
matrix in row blocks and is kept as an independent cross-check.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import GridTooCoarse, NotConverged
from .numerics import (
    QuadratureSpec,
    _check_cauchy,
    dormand_prince,
    gauss_kronrod,
    neville_extrapolants,
)
from .response import OscillatorParams, polarizability
from .rindler import RindlerParams, xi_eta_closed_form
from .spectral import Occupation

__all__ = [
    "ModeGrid",
    "VarianceCurve",
    "ProbeSignal",
    "HannTone",
    "finite_time_kernel",
    "discrete_variance",
    "diagonal_fraction",
    "variance_curve",
    "windowed_xi_check",
    "rr_kernel",
    "rr_kernel_check",
    "driven_response",
    "transfer_function_check",
    "DEFAULT_VARIANCE_GRID",
    "DEFAULT_RR_GRID",
]

_SMALL_PHASE = 1e-6


@dataclass(frozen=True)
class ModeGrid:
    """Modes k_j = 2 pi j / L for j = 1..N (the mirror modes -k_j are implied)."""

    L: float
    N: int

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("box length must be positive")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be a positive integer")

    @property
    def spacing(self) -> float:
        return 2.0 * math.pi / self.L

    @property
    def k(self) -> np.ndarray:
        """All 2N wavenumbers, negative ones first."""
        pos = self.omega
        return np.concatenate([-pos[::-1], pos])

    @property
    def omega(self) -> np.ndarray:
        return self.spacing * np.arange(1, self.N + 1)

    @property
    def C2(self) -> np.ndarray:
        """C_j^2 = 2 pi / (omega_j L) for the positive modes."""
        return 2.0 * math.pi / (self.omega * self.L)

    @property
    def omega_max(self) -> float:
        return self.spacing * self.N

    def require_resolved(self, p: OscillatorParams) -> None:
        """Raise GridTooCoarse if the spacing exceeds the damping width."""
        if self.spacing > p.beta:
            raise GridTooCoarse(
                f"mode spacing 2 pi/L = {self.spacing:.4g} exceeds beta = {p.beta:.4g}; increase L"
            )

    def refined(self, factor: int = 2) -> "ModeGrid":
        """Same frequency range, ``factor`` times the mode density."""
        return ModeGrid(self.L * factor, self.N * factor)


DEFAULT_VARIANCE_GRID = ModeGrid(4000.0, 8000)
DEFAULT_RR_GRID = ModeGrid(200.0, 8000)


def finite_time_kernel(delta, t: float):
    """sin^2(delta t / 2) / (delta / 2)^2, equal to t^2 in the limit delta -> 0."""
    if t < 0:
        raise ValueError("t must be non-negative")
    d = np.asarray(delta, dtype=float)
    half = 0.5 * d
    small = np.abs(d * t) < _SMALL_PHASE
    safe = np.where(small, 1.0, half)
    out = np.where(small, t * t, np.sin(half * t) ** 2 / safe**2)
    return float(out) if out.ndim == 0 else out


def _variance_parts(grid: ModeGrid, occ: Occupation, p: OscillatorParams):
    w = grid.omega
    n = np.asarray(occ(w), dtype=float)
    # C_K^2 C_k^2 omega_K^4 k^2 summed over the four sign choices of (K, k)
    weight_K = 4.0 * grid.spacing**2 * w**3 * np.abs(polarizability(w, p)) ** 2
    return w, n, weight_K


def _row_sums_toeplitz(kernel_row, vec, N):
    # sum_l K[(i - l) + N - 1] vec[l], one output per i
    return np.convolve(kernel_row, vec)[N - 1 : 2 * N - 1]


def _row_sums_hankel(kernel_row, vec, N):
    # sum_l K[i + l] vec[l]
    return np.convolve(kernel_row, vec[::-1])[N - 1 : 2 * N - 1]


def discrete_variance(
    t: float,
    grid: ModeGrid,
    occ: Occupation,
    p: OscillatorParams,
    method: str = "toeplitz",
    include_anti_resonant: bool = False,
    workers: int | None = None,
    block: int = 512,
) -> float:
    """<P_y^2(t)> as an exact double sum over the grid.

    Sum over K, k of C_K^2 C_k^2 omega_K^4 k^2 |alpha(omega_K)|^2
    {(n_K+1) n_k + n_K (n_k+1)} times the kernel at omega_K - omega_k.
    Diagonal terms K = k are included. With ``include_anti_resonant`` the
    sum-frequency terms, weighted by (n_K+1)(n_k+1) + n_K n_k, are added; they
    stay bounded in t and exist only as a diagnostic.

    ``method="direct"`` sums row blocks of ``block`` rows and combines block
    totals with ``math.fsum`` in block order, so ``workers`` does not change
    the result.
    """
    grid.require_resolved(p)
    if not t >= 0:
        raise ValueError("t must be non-negative")
    w, n, weight_K = _variance_parts(grid, occ, p)
    N = grid.N
    u = w * n
    v = w * (n + 1.0)
    if method == "toeplitz":
        diff_kernel = finite_time_kernel(grid.spacing * np.arange(-(N - 1), N), t)
        rows = (n + 1.0) * _row_sums_toeplitz(diff_kernel, u, N) + n * _row_sums_toeplitz(diff_kernel, v, N)
        if include_anti_resonant:
            sum_kernel = finite_time_kernel(grid.spacing * np.arange(2, 2 * N + 1), t)
            rows = rows + (n + 1.0) * _row_sums_hankel(sum_kernel, v, N) + n * _row_sums_hankel(sum_kernel, u, N)
        return float(math.fsum(weight_K * rows))
    if method != "direct":
        raise ValueError("method must be 'toeplitz' or 'direct'")

    def block_total(start):
        sl = slice(start, min(start + block, N))
        wK = w[sl, None]
        kern = finite_time_kernel(wK - w[None, :], t)
        rows = (n[sl] + 1.0) * (kern @ u) + n[sl] * (kern @ v)
        if include_anti_resonant:
            kern = finite_time_kernel(wK + w[None, :], t)
            rows = rows + (n[sl] + 1.0) * (kern @ v) + n[sl] * (kern @ u)
        return math.fsum(weight_K[sl] * rows)

    starts = range(0, N, block)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            totals = list(pool.map(block_total, starts))
    else:
        totals = [block_total(s) for s in starts]
    return float(math.fsum(totals))


def diagonal_fraction(t: float, grid: ModeGrid, occ: Occupation, p: OscillatorParams) -> float:
    """Share of ``discrete_variance`` carried by the K = k terms."""
    w, n, weight_K = _variance_parts(grid, occ, p)
    diag = math.fsum(weight_K * t * t * w * (2.0 * n * n + 2.0 * n))
    total = discrete_variance(t, grid, occ, p)
    return diag / total if total else 0.0


@dataclass
class VarianceCurve:
    times: np.ndarray
    values: np.ndarray
    fitted_slope: float
    fit_window: tuple[float, float]
    intercept: float = 0.0
    grid: ModeGrid | None = field(default=None, compare=False)

    def local_slope(self, t: float) -> float:
        """Secant slope over [t, 2t] from the sampled curve (linear interpolation)."""
        a, b = np.interp([t, 2 * t], self.times, self.values)
        return (b - a) / t

    def rows(self) -> list[dict]:
        return [{"t": float(t), "variance": float(v)} for t, v in zip(self.times, self.values)]

    def to_csv(self, path) -> None:
        """Write ``t,variance`` with the fit recorded in ``#`` comment lines."""
        with open(Path(path), "w", newline="") as fh:
            fh.write(f"# fitted_slope={self.fitted_slope!r}\n")
            fh.write(f"# fit_window={self.fit_window[0]!r},{self.fit_window[1]!r}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t", "variance"])
            for t, v in zip(self.times, self.values):
                writer.writerow([repr(float(t)), repr(float(v))])


def variance_curve(
    grid: ModeGrid,
    occ: Occupation,
    p: OscillatorParams,
    fit_window: tuple[float, float] = (20.0, 100.0),
    n_points: int = 41,
    times: Sequence[float] | None = None,
    method: str = "toeplitz",
) -> VarianceCurve:
    """Sample ``discrete_variance`` and fit a straight line by least squares.

    By default ``n_points`` equally spaced times span ``fit_window``. The box
    re-coheres once t approaches L/2, so the window's upper end must stay well
    below that; ``L >= 40 t_max`` is required.
    """
    t0, t1 = fit_window
    if not 0 < t0 < t1:
        raise ValueError("fit window must satisfy 0 < t_min < t_max")
    if grid.L < 40.0 * t1:
        raise GridTooCoarse(f"box length {grid.L} is below 40 * t_max = {40 * t1}; box echoes would contaminate the fit")
    ts = np.linspace(t0, t1, n_points) if times is None else np.asarray(times, dtype=float)
    if np.any(np.diff(ts) <= 0):
        raise ValueError("times must be strictly increasing")
    vals = np.array([discrete_variance(t, grid, occ, p, method=method) for t in ts])
    mask = (ts >= t0) & (ts <= t1)
    if mask.sum() < 2:
        raise ValueError("need at least two samples inside the fit window")
    slope, intercept = np.polyfit(ts[mask], vals[mask], 1)
    return VarianceCurve(ts, vals, float(slope), (t0, t1), float(intercept), grid)


# ---------------------------------------------------------------------------
# finite-window chirp transform
# ---------------------------------------------------------------------------


def windowed_xi_check(
    omega: float,
    Omega: float,
    r: RindlerParams,
    T_window: float,
    spec: QuadratureSpec | None = None,
    which: str = "xi",
):
    """Integrate the chirp transform over a finite proper-time window.

    The window [-T, T] is integrated by adaptive quadrature (in the variable
    z = e^{a tau} for tau > 0). The pieces outside the window are attached to
    first order only: below -T the chirp is expanded to linear order in
    (omega/a) e^{a tau}; above T a single integration by parts is applied to
    the e^{-eps tau} damped tail and extrapolated along ``spec.epsilon_ladder``.
    The neglected terms shrink like e^{-2 a T}, which is what the deviation
    measures.

    Returns ``(numeric, closed, deviation)`` with deviation
    |numeric - closed| / |closed|.
    """
    if not T_window > 0:
        raise ValueError("T_window must be positive")
    if which not in ("xi", "eta"):
        raise ValueError("which must be 'xi' or 'eta'")
    spec = spec or QuadratureSpec()
    a = r.a
    w = omega / a
    sign = 1 if which == "xi" else -1
    iw = 1j * sign * w
    T = T_window
    Z = math.exp(a * T)
    part_tol = 0.1 * spec.rel_tol / Omega

    def lower(tau):
        return np.exp(1j * Omega * tau + iw * np.exp(a * tau))

    core, _ = gauss_kronrod(lower, -T, 0.0, spec.rel_tol, part_tol, spec.max_subdivisions)

    c = 1j * Omega / a - 1.0
    period = 2.0 * math.pi / w
    # split the chirp into a few cycles per panel up front
    breaks = np.arange(1.0, Z, 4.0 * period)[1:]

    def upper(z):
        return z**c * np.exp(iw * z)

    up, _ = gauss_kronrod(
        upper, 1.0, Z, spec.rel_tol, part_tol * a, max(spec.max_subdivisions, 4 * breaks.size), points=breaks
    )
    core += up / a

    below = cmath_exp(-1j * Omega * T) * (1.0 / (1j * Omega) + iw * math.exp(-a * T) / (a + 1j * Omega))

    eps_values = [e * a for e in spec.epsilon_ladder]
    tails = []
    for eps in eps_values:
        s = 1j * Omega - eps
        tails.append(-cmath_exp(s * T + iw * Z) / (s + iw * a * Z))
    extrap = neville_extrapolants(eps_values, tails)
    _check_cauchy(extrap, max(spec.rel_tol * abs(extrap[-1]), spec.abs_tol))
    numeric = complex(core + below + extrap[-1])
    closed = xi_eta_closed_form(omega, Omega, r, which)
    return numeric, closed, abs(numeric - closed) / abs(closed)


def cmath_exp(z: complex) -> complex:
    return complex(np.exp(complex(z)))


# ---------------------------------------------------------------------------
# radiation-reaction kernel
# ---------------------------------------------------------------------------


class ProbeSignal:
    """A test velocity x'(tau) supported on [0, duration].

    Subclasses supply the value and the finite Fourier integral
    int_0^t x'(tau) e^{-i omega tau} dtau for an array of omegas.
    """

    duration: float

    def __call__(self, tau):
        raise NotImplementedError

    def partial_transform(self, omega: np.ndarray, t: float) -> np.ndarray:
        raise NotImplementedError

    @property
    def band_edge(self) -> float:
        """Highest frequency carrying appreciable weight."""
        raise NotImplementedError


@dataclass(frozen=True)
class HannTone(ProbeSignal):
    """sin(omega tau) sin^2(pi tau / duration) on [0, duration], zero elsewhere."""

    omega: float = 1.0
    duration: float = 30.0
    amplitude: float = 1.0

    def _components(self):
        # sin(w t) (1 - cos(W t)) / 2 as six complex exponentials
        W = 2.0 * math.pi / self.duration
        coefs, freqs = [], []
        for s, cs in ((1.0, 1.0 / 2j), (-1.0, -1.0 / 2j)):
            coefs += [cs / 2, -cs / 4, -cs / 4]
            freqs += [s * self.omega, s * self.omega + W, s * self.omega - W]
        return self.amplitude * np.array(coefs), np.array(freqs)

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        inside = (tau >= 0) & (tau <= self.duration)
        out = self.amplitude * np.sin(self.omega * tau) * np.sin(np.pi * tau / self.duration) ** 2
        out = np.where(inside, out, 0.0)
        return float(out) if out.ndim == 0 else out

    def partial_transform(self, omega, t):
        omega = np.asarray(omega, dtype=float)
        te = min(max(t, 0.0), self.duration)
        coefs, freqs = self._components()
        dn = freqs[:, None] - omega[None, :]
        small = np.abs(dn * te) < 1e-12
        safe = np.where(small, 1.0, dn)
        g = np.where(small, te + 0j, np.expm1(1j * safe * te) / (1j * safe))
        return (coefs[:, None] * g).sum(axis=0)

    @property
    def band_edge(self) -> float:
        return self.omega + 2.0 * math.pi / self.duration


@dataclass(frozen=True)
class _ZeroProbe(ProbeSignal):
    duration: float = 1.0

    def __call__(self, tau):
        out = np.zeros_like(np.asarray(tau, dtype=float))
        return float(out) if out.ndim == 0 else out

    def partial_transform(self, omega, t):
        return np.zeros(np.shape(omega), dtype=complex)

    @property
    def band_edge(self) -> float:
        return 0.0


def rr_kernel(times, grid: ModeGrid, probe: ProbeSignal, p: OscillatorParams) -> np.ndarray:
    """K(t) = 2e sum_k C_k^2 omega_k int_0^t x'(tau) cos(omega_k (t - tau)) dtau.

    The sum runs over +k and -k, which contribute equally.
    """
    grid.require_resolved(p)
    w = grid.omega
    pref = 2.0 * p.e * 2.0 * grid.spacing  # C_k^2 omega_k = 2 pi / L, times 2 for +/-k
    out = []
    for t in np.atleast_1d(np.asarray(times, dtype=float)):
        G = probe.partial_transform(w, t)
        out.append(pref * math.fsum(np.real(np.exp(1j * w * t) * G)))
    return np.array(out)


def rr_kernel_check(
    grid: ModeGrid,
    probe: ProbeSignal | None,
    p: OscillatorParams,
    n_times: int = 601,
) -> float:
    """Max |K(t) - 2 pi e x'(t)| over the probe support, relative to max |2 pi e x'|.

    A zero probe returns 0 (the kernel vanishes identically).
    """
    grid.require_resolved(p)
    probe = probe if probe is not None else HannTone()
    if probe.band_edge > 0.5 * grid.omega_max:
        raise ValueError("probe band must sit well inside the grid's frequency range")
    ts = np.linspace(0.0, probe.duration, n_times)
    K = rr_kernel(ts, grid, probe, p)
    target = 2.0 * math.pi * p.e * probe(ts)
    scale = np.max(np.abs(target))
    if scale == 0:
        return float(np.max(np.abs(K)))
    return float(np.max(np.abs(K - target)) / scale)


# ---------------------------------------------------------------------------
# single-mode driven oscillator
# ---------------------------------------------------------------------------


@dataclass
class DrivenResponse:
    amplitude: complex
    expected: complex
    settle_change: float
    n_steps: int

    @property
    def deviation(self) -> float:
        return abs(self.amplitude - self.expected) / abs(self.expected)


def _fit_amplitude(ts, ys, omega):
    # y = A e^{-i w t} + c.c. = 2 Re A cos(w t) + 2 Im A sin(w t)
    basis = np.column_stack([np.cos(omega * ts), np.sin(omega * ts)])
    coef, *_ = np.linalg.lstsq(basis, ys, rcond=None)
    return complex(coef[0] / 2.0, coef[1] / 2.0)


def driven_response(
    p: OscillatorParams,
    omega_drive: float,
    C: float,
    settle: float = 20.0,
    fit_periods: int = 5,
    samples_per_period: int = 32,
    rel_tol: float = 1e-11,
    max_steps: int = 2_000_000,
    settle_tol: float = 1e-4,
) -> DrivenResponse:
    """Integrate x'' + 2 beta x' + omega0^2 x = -(e/m) d phi/dt for one mode of unit amplitude.

    The field is phi(t) = C (e^{-i w t} + e^{i w t}). The run lasts
    ``settle / beta``; the complex amplitude of e x(t) is fitted over the last
    ``fit_periods`` periods and compared with the previous block of the same
    length to judge whether transients have died out.

    Raises
    ------
    NotConverged
        If the two fitted amplitudes differ by more than ``settle_tol`` in
        relative terms, or the step budget runs out.
    """
    w = omega_drive
    force = 2.0 * p.e / p.m * w * C  # -(e/m) d phi/dt = (2 e w C / m) sin(w t)
    t_end = settle / p.beta
    period = 2.0 * math.pi / w
    span = fit_periods * period
    if 2 * span >= t_end:
        raise ValueError("run too short for the requested fit window")
    n_fit = fit_periods * samples_per_period
    early = np.linspace(t_end - 2 * span, t_end - span, n_fit, endpoint=False)
    late = np.linspace(t_end - span, t_end, n_fit + 1)
    samples = np.concatenate([early, late])

    def rhs(t, y):
        return np.array([y[1], force * math.sin(w * t) - 2.0 * p.beta * y[1] - p.omega0**2 * y[0]])

    try:
        xs, ys, steps = dormand_prince(
            rhs, 0.0, [0.0, 0.0], t_end, rel_tol=rel_tol, abs_tol=1e-14 * abs(force),
            samples=samples, max_steps=max_steps, first_step=0.01 * period,
        )
    except Exception as exc:  # step budget or underflow
        raise NotConverged(f"driven oscillator did not reach steady state: {exc}") from exc
    ex = p.e * ys[1:, 0]
    t_s = xs[1:]
    A_early = _fit_amplitude(t_s[:n_fit], ex[:n_fit], w)
    A_late = _fit_amplitude(t_s[n_fit:], ex[n_fit:], w)
    change = abs(A_late - A_early) / abs(A_late)
    if change > settle_tol:
        raise NotConverged(f"amplitude still changing by {change:.2e} at t = {t_end:g}")
    expected = 1j * C * w * polarizability(w, p)
    return DrivenResponse(A_late, expected, change, steps)


def transfer_function_check(
    grid: ModeGrid, p: OscillatorParams, omega_drive: float, settle: float = 20.0
) -> float:
    """Relative deviation of the steady-state amplitude of e x(t) from i C w alpha(w).

    C is the box normalisation (2 pi / (w L))^{1/2} evaluated at the drive
    frequency, which must lie inside the grid's range.
    """
    if not grid.spacing <= omega_drive <= grid.omega_max:
        raise ValueError("drive frequency outside the grid's range")
    C = math.sqrt(2.0 * math.pi / (omega_drive * grid.L))
    return driven_response(p, omega_drive, C, settle=settle).deviation
