"""Special functions, quadrature and ODE integration used by the physics modules.

Everything here is written in natural units (hbar = c = k_B = 1) but nothing
in this module depends on the physics; the routines are generic.
"""
from __future__ import annotations

import cmath
import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DivergentTail,
    ExtrapolationUnstable,
    NonConvergence,
    NumericalError,
    PoleError,
    StepUnderflow,
)

__all__ = [
    "FixedCutoff",
    "AdaptiveTail",
    "QuadratureSpec",
    "QuadResult",
    "ScalarCurve",
    "log_gamma_complex",
    "gauss_kronrod",
    "quad_semi_infinite",
    "integrate_semi_infinite",
    "neville_extrapolants",
    "oscillatory_phase_integral",
    "dormand_prince",
    "solve_scalar_ode",
]

_EPS = np.finfo(float).eps

# Extends the classic four-rung ladder {0.2, 0.1, 0.05, 0.025} with further halvings;
# four rungs leave ~1e-5 extrapolation error on the Doppler kernels.
DEFAULT_EPSILON_LADDER = tuple(0.2 * 2.0**-k for k in range(10))


# ---------------------------------------------------------------------------
# Quadrature configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FixedCutoff:
    """Integrate on ``[0, omega_max]`` and ignore everything above."""

    omega_max: float

    def __post_init__(self):
        if not self.omega_max > 0:
            raise ValueError("omega_max must be positive")


@dataclass(frozen=True)
class AdaptiveTail:
    """Integrate over doubling panels until the last panel is negligible.

    A panel is negligible once its contribution falls below
    ``tail_fraction * max(rel_tol * |total|, abs_tol)``.
    """

    tail_fraction: float = 1e-3
    first_panel: float = 1.0
    max_panels: int = 200
    stall_panels: int = 8

    def __post_init__(self):
        if not 0 < self.tail_fraction <= 1:
            raise ValueError("tail_fraction must lie in (0, 1]")
        if not self.first_panel > 0:
            raise ValueError("first_panel must be positive")


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and policies shared by the quadrature and ODE routines.

    ``epsilon_ladder`` is expressed in units of the acceleration ``a`` when
    used by :func:`oscillatory_phase_integral`.
    """

    rel_tol: float = 1e-12
    abs_tol: float = 1e-30
    max_subdivisions: int = 4000
    tail_cutoff_policy: FixedCutoff | AdaptiveTail = field(default_factory=AdaptiveTail)
    epsilon_ladder: tuple[float, ...] = DEFAULT_EPSILON_LADDER

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")
        ladder = tuple(float(e) for e in self.epsilon_ladder)
        if len(ladder) < 2:
            raise ValueError("epsilon_ladder needs at least two rungs")
        if any(e <= 0 for e in ladder) or any(b >= a for a, b in zip(ladder, ladder[1:])):
            raise ValueError("epsilon_ladder must be positive and strictly decreasing")
        object.__setattr__(self, "epsilon_ladder", ladder)

    def with_cutoff(self, omega_max: float) -> "QuadratureSpec":
        return QuadratureSpec(
            self.rel_tol, self.abs_tol, self.max_subdivisions, FixedCutoff(omega_max), self.epsilon_ladder
        )

    def replace(self, **changes) -> "QuadratureSpec":
        values = dict(
            rel_tol=self.rel_tol,
            abs_tol=self.abs_tol,
            max_subdivisions=self.max_subdivisions,
            tail_cutoff_policy=self.tail_cutoff_policy,
            epsilon_ladder=self.epsilon_ladder,
        )
        values.update(changes)
        return QuadratureSpec(**values)


@dataclass
class QuadResult:
    value: float | complex
    error: float
    cutoff: float
    nodes: np.ndarray | None = None


# ---------------------------------------------------------------------------
# Gamma function
# ---------------------------------------------------------------------------

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)


def _lanczos_log_gamma(z: np.ndarray) -> np.ndarray:
    # valid for Re z >= 0.5
    z = z - 1.0
    x = np.full_like(z, _LANCZOS_COEF[0])
    for i in range(1, len(_LANCZOS_COEF)):
        x = x + _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(x)


def _log_sin_pi(z: np.ndarray) -> np.ndarray:
    # log(sin(pi z)) for Im z >= 0, written to avoid overflow of sinh at large Im z:
    # sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z})
    return -1j * np.pi * z + np.log1p(-np.exp(2j * np.pi * z)) + np.log(0.5j)


def log_gamma_complex(z):
    """Principal-branch logarithm of the Gamma function.

    Uses the Lanczos approximation (g=7, n=9) for ``Re z >= 0.5`` and the
    reflection formula below that. Accepts a scalar or an array; a scalar
    input returns a Python ``complex``.

    Raises
    ------
    PoleError
        If any ``z`` lies within 1e-12 of a non-positive integer.
    """
    scalar = np.ndim(z) == 0
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    if not np.all(np.isfinite(zz)):
        raise ValueError("log_gamma_complex needs finite arguments")
    near = np.round(zz.real)
    if np.any((near <= 0) & (np.abs(zz - near) < 1e-12)):
        raise PoleError(f"Gamma pole at z={zz[(near <= 0) & (np.abs(zz - near) < 1e-12)][0]}")

    # conj(log Gamma(z)) = log Gamma(conj z): work in the closed upper half plane
    flip = zz.imag < 0
    w = np.where(flip, np.conj(zz), zz)
    out = np.empty_like(w)
    right = w.real >= 0.5
    if np.any(right):
        out[right] = _lanczos_log_gamma(w[right])
    left = ~right
    if np.any(left):
        wl = w[left]
        out[left] = _LOG_PI - _log_sin_pi(wl) - _lanczos_log_gamma(1.0 - wl)
    out = np.where(flip, np.conj(out), out)
    # principal branch: imaginary part in (-pi, pi]
    im = np.remainder(out.imag + np.pi, 2.0 * np.pi) - np.pi
    im = np.where(im == -np.pi, np.pi, im)
    out = out.real + 1j * im
    if not np.all(np.isfinite(out)):
        raise NumericalError("log Gamma overflowed")
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Gauss-Kronrod quadrature
# ---------------------------------------------------------------------------

_XGK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ]
)
_WGK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_WG = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)
# 15 nodes on [-1, 1]: -x0..-x6, 0, x6..x0
_NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
_KWEIGHTS = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[[1, 3, 5]] = _WG[:3]
_GWEIGHTS[7] = _WG[3]
_GWEIGHTS[[13, 11, 9]] = _WG[:3]


def _gk_panel(f, a: float, b: float, record: list | None):
    half = 0.5 * (b - a)
    center = 0.5 * (a + b)
    x = center + half * _NODES
    fx = np.asarray(f(x))
    if fx.shape != x.shape:
        fx = np.broadcast_to(fx, x.shape)
    if not np.all(np.isfinite(fx)):
        raise NumericalError(f"integrand not finite on [{a}, {b}]")
    if record is not None:
        record.append(x)
    k = half * np.dot(_KWEIGHTS, fx)
    g = half * np.dot(_GWEIGHTS, fx)
    resabs = abs(half) * np.dot(_KWEIGHTS, np.abs(fx))
    mean = k / (2.0 * half) if half != 0 else 0.0
    resasc = abs(half) * np.dot(_KWEIGHTS, np.abs(fx - mean))
    err = abs(k - g)
    if resasc != 0 and err != 0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > np.finfo(float).tiny / (50 * _EPS):
        err = max(50 * _EPS * resabs, err)
    return k, err


def _fsum(values):
    values = list(values)
    if values and any(isinstance(v, complex) or np.iscomplexobj(v) for v in values):
        return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))
    return math.fsum(values)


def gauss_kronrod(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rel_tol: float = 1e-12,
    abs_tol: float = 1e-30,
    max_subdivisions: int = 4000,
    points: Sequence[float] = (),
    record: list | None = None,
) -> tuple[float | complex, float]:
    """Globally adaptive 7-15 Gauss-Kronrod quadrature on ``[a, b]``.

    ``f`` must accept an array of abscissae. Complex integrands are allowed.
    Returns ``(value, error_estimate)``.
    """
    if a == b:
        return 0.0, 0.0
    if b < a:
        value, err = gauss_kronrod(f, b, a, rel_tol, abs_tol, max_subdivisions, points, record)
        return -value, err
    edges = sorted({a, b, *[p for p in points if a < p < b]})
    heap = []
    for lo, hi in zip(edges, edges[1:]):
        val, err = _gk_panel(f, lo, hi, record)
        heap.append((-err, lo, hi, val))
    heapq.heapify(heap)
    n_panels = len(heap)
    while True:
        total = _fsum(item[3] for item in heap)
        total_err = math.fsum(-item[0] for item in heap)
        if total_err <= max(rel_tol * abs(total), abs_tol):
            return total, total_err
        if n_panels >= max_subdivisions:
            raise NonConvergence(
                f"no convergence on [{a}, {b}] after {n_panels} panels "
                f"(error {total_err:.3e}, value {total})"
            )
        neg_err, lo, hi, _ = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise NonConvergence(f"panel [{lo}, {hi}] cannot be bisected further")
        for sub in ((lo, mid), (mid, hi)):
            val, err = _gk_panel(f, sub[0], sub[1], record)
            heapq.heappush(heap, (-err, sub[0], sub[1], val))
        n_panels += 1


def quad_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    spec: QuadratureSpec | None = None,
    points: Sequence[float] = (),
    keep_nodes: bool = False,
) -> QuadResult:
    """Integrate ``f`` over ``[0, inf)`` under ``spec.tail_cutoff_policy``.

    With :class:`FixedCutoff` this is a single adaptive integral on
    ``[0, omega_max]``. With :class:`AdaptiveTail` the half line is covered by
    panels ``[0, s], [s, 2s], [2s, 4s], ...`` and the march stops when the last
    panel is negligible. A tail whose panel contributions stay flat (as for a
    ``1/omega`` integrand) raises :class:`DivergentTail`.
    """
    spec = spec or QuadratureSpec()
    record = [] if keep_nodes else None
    policy = spec.tail_cutoff_policy
    if isinstance(policy, FixedCutoff):
        value, err = gauss_kronrod(
            f, 0.0, policy.omega_max, spec.rel_tol, spec.abs_tol, spec.max_subdivisions, points, record
        )
        nodes = np.sort(np.concatenate(record)) if record else None
        return QuadResult(value, err, policy.omega_max, nodes)

    contributions = []
    errors = []
    lo, hi = 0.0, policy.first_panel
    flat_run = 0
    for _ in range(policy.max_panels):
        running = abs(_fsum(contributions)) if contributions else 0.0
        panel_abs = max(spec.abs_tol, 0.1 * spec.rel_tol * running)
        value, err = gauss_kronrod(
            f, lo, hi, spec.rel_tol, panel_abs, spec.max_subdivisions, points, record
        )
        contributions.append(value)
        errors.append(err)
        total = _fsum(contributions)
        budget = max(spec.rel_tol * abs(total), spec.abs_tol)
        last = abs(value)
        prev = abs(contributions[-2]) if len(contributions) > 1 else math.inf
        if last < policy.tail_fraction * budget and last <= prev:
            nodes = np.sort(np.concatenate(record)) if record else None
            return QuadResult(total, math.fsum(errors), hi, nodes)
        if len(contributions) > 1 and prev > 0 and 0.7 < last / prev < 1.4:
            flat_run += 1
        else:
            flat_run = 0
        if flat_run >= policy.stall_panels:
            raise DivergentTail(
                f"tail contributions stopped shrinking near omega={hi:.3g} "
                f"(last panel {value:.3e}, total {total:.3e})"
            )
        lo, hi = hi, 2.0 * hi
    raise DivergentTail(f"tail still significant after {policy.max_panels} panels (omega={lo:.3g})")


def integrate_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    spec: QuadratureSpec | None = None,
    points: Sequence[float] = (),
) -> float:
    """Value of the integral of ``f`` over ``[0, inf)``; see :func:`quad_semi_infinite`."""
    return quad_semi_infinite(f, spec, points).value


# ---------------------------------------------------------------------------
# Extrapolation and the regularised chirp integral
# ---------------------------------------------------------------------------


def neville_extrapolants(xs: Sequence[float], ys: Sequence, x0: float = 0.0) -> list:
    """Polynomial extrapolants to ``x0``.

    Entry ``k`` of the result is the value at ``x0`` of the polynomial through
    the first ``k + 1`` points.
    """
    xs = [float(x) for x in xs]
    out = []
    row: list = []
    for k, (xk, yk) in enumerate(zip(xs, ys)):
        new = [yk]
        for m in range(1, k + 1):
            xi = xs[k - m]
            new.append(((x0 - xi) * new[m - 1] - (x0 - xk) * row[m - 1]) / (xk - xi))
        row = new
        out.append(row[-1])
    return out


def _check_cauchy(extrapolants, tol: float) -> None:
    diffs = [abs(b - a) for a, b in zip(extrapolants, extrapolants[1:])]
    if diffs[-1] > tol:
        raise ExtrapolationUnstable(
            f"last extrapolants differ by {diffs[-1]:.3e} > {tol:.3e} (sequence {diffs})"
        )
    above = [d for d in diffs if d > tol]
    if any(b > a for a, b in zip(above, above[1:])):
        raise ExtrapolationUnstable(f"extrapolant differences are not monotone: {diffs}")


def _asymptotic_tail(c: complex, iw: complex, z0: float) -> complex:
    # int_{z0}^inf z^c e^{iw z} dz by repeated integration by parts (Re c < 0)
    phase = cmath.exp(iw * z0)
    coef = 1.0 + 0j
    total = 0j
    last = math.inf
    for k in range(200):
        term = -((-1) ** k) * coef * z0 ** (c - k) * phase / iw ** (k + 1)
        total += term
        size = abs(term)
        if size <= 1e-17 * abs(total):
            return total
        if size > last:
            raise NonConvergence("asymptotic tail series started to diverge")
        last = size
        coef *= c - k
    raise NonConvergence("asymptotic tail series did not converge")


def _damped_chirp_integral(w: float, Om: float, a: float, sign: int, eps: float, spec: QuadratureSpec):
    """int dtau e^{-eps|tau|} e^{i Om tau} exp(sign * i * w * e^{a tau}) over the real line."""
    iw = 1j * sign * w
    # absolute accuracy is referred to the size of the parts (~1/Om), not of their sum
    part_tol = 0.1 * spec.rel_tol / Om

    # tau < 0: the pure phase e^{(i Om + eps) tau} integrates to 1/s; the remainder decays like e^{a tau}
    s = 1j * Om + eps
    tau_min = math.log(1e-18 / w) / a if w < 1e18 else 0.0
    def left(tau):
        return np.exp(s * tau) * np.expm1(iw * np.exp(a * tau))
    lval, lerr = (0j, 0.0) if tau_min >= 0 else gauss_kronrod(
        left, tau_min, 0.0, spec.rel_tol, part_tol, spec.max_subdivisions
    )

    # tau > 0 in z = e^{a tau}: (1/a) int_1^inf z^c e^{i w z} dz
    c = (1j * Om - eps) / a - 1.0
    z_split = max(2.0, 60.0 / w)
    def right(z):
        return z**c * np.exp(iw * z)
    rval, rerr = gauss_kronrod(right, 1.0, z_split, spec.rel_tol, part_tol * a, spec.max_subdivisions)
    rval += _asymptotic_tail(c, iw, z_split)
    return 1.0 / s + lval + rval / a, lerr + rerr / a


def oscillatory_phase_integral(
    omega: float,
    Omega: float,
    a: float,
    sign: int = 1,
    spec: QuadratureSpec | None = None,
    return_ladder: bool = False,
):
    """Abel-regularised integral of ``e^{i Omega tau} exp(sign i (omega/a) e^{a tau})`` over all tau.

    For every rung ``eps`` of ``spec.epsilon_ladder`` (in units of ``a``) the
    integrand is damped by ``e^{-eps |tau|}`` and integrated numerically. The
    damped values carry a simple pole at ``eps = -i Omega`` coming from the
    non-decaying ``tau -> -inf`` tail, so the product ``(i Omega + eps) I(eps)``
    is extrapolated polynomially to ``eps = 0`` and divided by ``i Omega``.

    Returns a complex number, or ``(value, extrapolants)`` with ``return_ladder``.

    Raises
    ------
    ExtrapolationUnstable
        If successive extrapolants fail the Cauchy test at ``spec.rel_tol``,
        measured against the larger of the result and the damped integrals
        themselves (they can exceed the result by orders of magnitude).
    """
    if not (omega > 0 and Omega > 0 and a > 0):
        raise ValueError("omega, Omega and a must be positive")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    spec = spec or QuadratureSpec()
    w = omega / a
    eps_values = [e * a for e in spec.epsilon_ladder]
    g = []
    for eps in eps_values:
        value, _ = _damped_chirp_integral(w, Omega, a, sign, eps, spec)
        g.append((1j * Omega + eps) * value)
    extrapolants = [x / (1j * Omega) for x in neville_extrapolants(eps_values, g)]
    result = extrapolants[-1]
    part_scale = max(abs(x) for x in g) / Omega
    floor = max(spec.rel_tol, 1e3 * _EPS) * part_scale
    _check_cauchy(extrapolants, max(spec.rel_tol * abs(result), spec.abs_tol, floor))
    if return_ladder:
        return result, extrapolants
    return result


# ---------------------------------------------------------------------------
# ODE integration
# ---------------------------------------------------------------------------

_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = np.array(_DP_A[6] + (0.0,))
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_DP_E = _DP_B5 - _DP_B4
_DP_AMAT = np.zeros((7, 7))
for _i, _row in enumerate(_DP_A):
    _DP_AMAT[_i, : len(_row)] = _row


@dataclass
class ScalarCurve:
    """Sampled ODE solution; ``x`` is monotone in the direction of integration."""

    x: np.ndarray
    y: np.ndarray
    n_steps: int = 0


def dormand_prince(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    x0: float,
    y0,
    x1: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-30,
    samples: Sequence[float] | None = None,
    max_steps: int = 1_000_000,
    first_step: float | None = None,
):
    """Embedded 5(4) Dormand-Prince integration from ``x0`` to ``x1``.

    ``y0`` may be a scalar or a 1-D array. If ``samples`` is given the
    integrator lands exactly on each sample abscissa (they must lie between
    ``x0`` and ``x1``) and the solution is reported there; otherwise every
    accepted step is reported.

    Returns ``(xs, ys, n_steps)``.
    """
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    direction = 1.0 if x1 >= x0 else -1.0
    span = abs(x1 - x0)
    floor = 1e-14 * max(abs(x0), 1e-300)
    if samples is None:
        targets = [x1]
        report_all = True
    else:
        targets = sorted((float(s) for s in samples), key=lambda s: direction * s)
        if targets and (direction * (targets[0] - x0) < 0 or direction * (targets[-1] - x1) > 0):
            raise ValueError("samples must lie between x0 and x1")
        if not targets or targets[-1] != x1:
            targets.append(x1)
        report_all = False
    xs = [x0]
    ys = [y.copy()]
    if span == 0:
        return np.array(xs), np.array(ys), 0

    x = x0
    k1 = np.atleast_1d(np.asarray(rhs(x, y), dtype=float))
    K = np.empty((7, y.size))
    h = first_step or min(span, 1e-3 * max(abs(x0), span))
    h = abs(h)
    n_steps = 0
    ti = 0
    if targets[0] == x0:
        ti = 1
    while ti < len(targets):
        target = targets[ti]
        remaining = abs(target - x)
        if 0 < remaining <= floor:
            # target closer than the resolvable step: record it as reached
            xs.append(target)
            ys.append(y.copy())
            ti += 1
            continue
        # stretch a near-miss step onto the target rather than leave a sliver behind
        step = remaining if remaining <= 1.1 * h else h
        if step < floor and remaining > floor:
            raise StepUnderflow(f"step {step:.3e} below floor {floor:.3e} at x={x}")
        hs = direction * step
        K[0] = k1
        for i in range(1, 7):
            yi = y + hs * (_DP_AMAT[i, :i] @ K[:i])
            K[i] = rhs(x + direction * _DP_C[i] * step, yi)
        # the last stage is evaluated at the 5th-order solution (first same as last)
        y_new = yi
        err_vec = hs * (_DP_E @ K)
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.max(np.abs(err_vec) / scale))
        if not np.isfinite(err):
            h = 0.2 * step
            continue
        if err <= 1.0:
            landed = step == remaining
            x = target if landed else x + direction * step
            y = y_new
            k1 = K[6].copy()
            n_steps += 1
            if landed:
                xs.append(x)
                ys.append(y.copy())
                ti += 1
            elif report_all:
                xs.append(x)
                ys.append(y.copy())
            if n_steps >= max_steps:
                raise StepUnderflow(f"exceeded {max_steps} steps")
        factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err**-0.2))
        if err > 1.0:
            factor = min(factor, 1.0)
        h = step * factor
    return np.array(xs), np.array(ys), n_steps


def solve_scalar_ode(
    rhs: Callable[[float, float], float],
    omega_start: float,
    n_start: float,
    omega_end: float,
    spec: QuadratureSpec | None = None,
    samples: Sequence[float] | None = None,
) -> ScalarCurve:
    """Integrate ``dn/domega = rhs(omega, n)`` from ``omega_start`` to ``omega_end``.

    Integration may run backwards (``omega_end < omega_start``). Local error
    is held under ``spec.rel_tol``.

    Raises
    ------
    StepUnderflow
        If the step collapses below ``1e-14 * omega_start``.
    """
    if not omega_start > 0:
        raise ValueError("omega_start must be positive")
    if not n_start > 0:
        raise ValueError("n_start must be positive")
    spec = spec or QuadratureSpec()
    xs, ys, steps = dormand_prince(
        lambda x, y: rhs(x, y[0]),
        omega_start,
        n_start,
        omega_end,
        rel_tol=spec.rel_tol,
        abs_tol=spec.abs_tol,
        samples=samples,
    )
    return ScalarCurve(xs, ys[:, 0], steps)
