"""Drag, momentum diffusion and the power balance for a particle in thermal radiation.

All integrals run over positive frequencies in natural units. The oscillator
mass ``m`` (not the centre-of-mass mass ``M``) appears in the power balance,
because the kinetic energy is written there as P_y^2/2m. ``M`` is carried in
:class:`~qedfriction.response.OscillatorParams` but unused by these formulas.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .numerics import QuadratureSpec, ScalarCurve, quad_semi_infinite, solve_scalar_ode
from .response import OscillatorParams, polarizability
from .spectral import BoostParams, Occupation, PlanckOccupation, planck_occupation

__all__ = [
    "KineticsResult",
    "BalanceResult",
    "drag_force",
    "single_direction_force",
    "drag_force_qed3d",
    "diffusion_rate",
    "balance_residual",
    "recover_planck",
    "integrand_table",
    "drag_sweep",
    "DRAG_FORMS",
]

DRAG_FORMS = ("exact_difference", "linearized")


@dataclass
class KineticsResult:
    value: float
    estimated_error: float
    cutoff_used: float
    integrand_samples: tuple[np.ndarray, np.ndarray] | None = None

    def __float__(self):
        return float(self.value)


def _alpha_imag(omega, p):
    return np.imag(polarizability(omega, p))


def _run(integrand, p: OscillatorParams, spec, keep_samples: bool, scale: float = 1.0):
    spec = spec or QuadratureSpec()
    res = quad_semi_infinite(integrand, spec, points=(p.omega0,), keep_nodes=keep_samples)
    samples = None
    if keep_samples:
        nodes = np.unique(res.nodes)
        samples = (nodes, scale * integrand(nodes))
    return KineticsResult(scale * res.value, abs(scale) * res.error, res.cutoff, samples)


def drag_force(
    v: float,
    occ: Occupation,
    p: OscillatorParams,
    spec: QuadratureSpec | None = None,
    form: str = "exact_difference",
    keep_samples: bool = False,
) -> KineticsResult:
    """Net Doppler drag on a particle moving with velocity ``v``.

    ``exact_difference``:  2 int omega^2 Im(alpha) [n(g w (1+v)) - n(g w (1-v))] d omega
    ``linearized``:        4 v int omega^3 Im(alpha) dn/d omega d omega

    The vacuum 1/2 of each single-direction force cancels in the difference,
    so both forms converge. Returned forces oppose the motion.
    """
    boost = BoostParams(v)
    if form == "exact_difference":
        g = boost.gamma

        def integrand(w):
            return 2.0 * w * w * _alpha_imag(w, p) * (occ(g * w * (1 + v)) - occ(g * w * (1 - v)))

    elif form == "linearized":
        # fail early rather than inside the quadrature
        occ.derivative(np.array([p.omega0]))

        def integrand(w):
            return 4.0 * v * w**3 * _alpha_imag(w, p) * occ.derivative(w)

    else:
        raise ValueError(f"unknown drag form {form!r}; expected one of {DRAG_FORMS}")
    return _run(integrand, p, spec, keep_samples)


def single_direction_force(
    v: float, occ: Occupation, p: OscillatorParams, omega_max: float, direction: int = 1,
    spec: QuadratureSpec | None = None,
) -> KineticsResult:
    """Force from modes travelling one way only, including the vacuum 1/2.

    2 int_0^omega_max omega^2 Im(alpha) [n(gamma omega (1 +/- v)) + 1/2] d omega.
    The integrand falls off like 1/omega, so the value grows with log(omega_max);
    it exists as a diagnostic of that cutoff dependence.
    """
    boost = BoostParams(v)
    g = boost.gamma
    spec = (spec or QuadratureSpec()).with_cutoff(omega_max)

    def integrand(w):
        return 2.0 * w * w * _alpha_imag(w, p) * (occ(g * w * (1 + direction * v)) + 0.5)

    return _run(integrand, p, spec, False)


def drag_force_qed3d(
    v: float, T: float, p: OscillatorParams, spec: QuadratureSpec | None = None
) -> KineticsResult:
    """Nonrelativistic 3D QED friction, for comparison with the 1+1D result.

    F = -4 pi v int omega Im(alpha) [rho - (omega/3) d rho/d omega] d omega
    with the 3D blackbody density rho = omega^3 n / pi^2.
    """
    BoostParams(v)
    if not T > 0:
        raise ValueError("temperature must be positive")
    occ = PlanckOccupation(T)

    def integrand(w):
        n = occ(w)
        rho = w**3 * n / np.pi**2
        drho = (3.0 * w * w * n + w**3 * occ.derivative(w)) / np.pi**2
        return w * _alpha_imag(w, p) * (rho - w / 3.0 * drho)

    return _run(integrand, p, spec, False, scale=-4.0 * np.pi * v)


def diffusion_rate(
    occ: Occupation, p: OscillatorParams, spec: QuadratureSpec | None = None, keep_samples: bool = False
) -> KineticsResult:
    """Long-time growth rate of <P_y^2>: 16 pi int omega^4 |alpha|^2 (n^2 + n) d omega."""

    def integrand(w):
        return 16.0 * np.pi * w**4 * np.abs(polarizability(w, p)) ** 2 * occ.variance(w)

    return _run(integrand, p, spec, keep_samples)


@dataclass
class BalanceResult:
    """Power-balance residual; ``scale`` is the integral of the diffusion term."""

    pointwise_max: float
    integrated: float
    scale: float
    nodes: np.ndarray | None = None

    @property
    def integrated_relative(self) -> float:
        return abs(self.integrated) / self.scale if self.scale else abs(self.integrated)


def _balance_terms(w, T, p, diffusion_occ):
    a = polarizability(w, p)
    heating = 8.0 * np.pi / p.m * w**4 * np.abs(a) ** 2 * diffusion_occ.variance(w)
    cooling = 4.0 * T / p.m * w**3 * np.imag(a) * PlanckOccupation(T).derivative(w)
    return heating, cooling


def balance_residual(
    T: float,
    p: OscillatorParams,
    spec: QuadratureSpec | None = None,
    diffusion_occupation: Occupation | None = None,
) -> BalanceResult:
    """Residual of the fluctuation-dissipation power balance at temperature ``T``.

    Pointwise residual
        r(omega) = (8 pi/m) omega^4 |alpha|^2 (n^2+n) + (4 T/m) omega^3 Im(alpha) dn/domega
    with equipartition <m v^2/2> = T/2. ``pointwise_max`` is the largest
    |r| / max(|heating|, |cooling|) over the quadrature nodes of the heating
    integral; ``integrated`` is the integral of r.

    ``diffusion_occupation`` replaces the occupation in the heating term only,
    so that a mismatched temperature can be injected.
    """
    if not T > 0:
        raise ValueError("temperature must be positive")
    spec = spec or QuadratureSpec()
    diff_occ = diffusion_occupation or PlanckOccupation(T)

    def heating(w):
        return _balance_terms(w, T, p, diff_occ)[0]

    def residual(w):
        h, c = _balance_terms(w, T, p, diff_occ)
        return h + c

    scale_run = quad_semi_infinite(heating, spec, points=(p.omega0,), keep_nodes=True)
    nodes = np.unique(scale_run.nodes)
    h, c = _balance_terms(nodes, T, p, diff_occ)
    denom = np.maximum(np.abs(h), np.abs(c))
    mask = denom > 0
    pointwise = float(np.max(np.abs(h + c)[mask] / denom[mask])) if np.any(mask) else 0.0
    scale = abs(scale_run.value)
    res = quad_semi_infinite(
        residual,
        spec.replace(abs_tol=max(spec.abs_tol, spec.rel_tol * scale)),
        points=(p.omega0,),
    )
    return BalanceResult(pointwise, float(res.value), scale, nodes)


def recover_planck(
    T: float,
    omega_ref: float,
    spec: QuadratureSpec | None = None,
    span: float = 10.0,
    n_start: float | None = None,
    n_samples: int = 81,
) -> ScalarCurve:
    """Integrate dn/domega = -(n^2 + n)/T outward from ``omega_ref``.

    The curve starts from the Planck value at ``omega_ref`` (or ``n_start``)
    and is sampled log-uniformly on ``[omega_ref/span, omega_ref*span]``,
    integrating forwards and backwards from the reference point. Step control
    is purely relative (``spec.abs_tol`` is ignored).
    """
    if not (T > 0 and omega_ref > 0):
        raise ValueError("T and omega_ref must be positive")
    # n falls to ~exp(-span * omega_ref / T); only relative error control makes sense
    spec = (spec or QuadratureSpec()).replace(abs_tol=np.finfo(float).tiny)
    n0 = planck_occupation(omega_ref, T) if n_start is None else n_start

    def rhs(w, n):
        return -(n * n + n) / T

    grid = np.geomspace(omega_ref / span, omega_ref * span, n_samples)
    grid = grid[np.abs(grid / omega_ref - 1.0) > 1e-12]
    grid = np.unique(np.append(grid, omega_ref))
    upper = grid[grid > omega_ref]
    lower = grid[grid < omega_ref][::-1]
    fwd = solve_scalar_ode(rhs, omega_ref, n0, grid[-1], spec, samples=upper)
    bwd = solve_scalar_ode(rhs, omega_ref, n0, grid[0], spec, samples=lower)
    x = np.concatenate([bwd.x[:0:-1], fwd.x])
    y = np.concatenate([bwd.y[:0:-1], fwd.y])
    return ScalarCurve(x, y, fwd.n_steps + bwd.n_steps)


def integrand_table(T: float, v: float, p: OscillatorParams, omegas) -> list[dict]:
    """Rows (omega, integrand_drag, integrand_diffusion, residual) for CSV export."""
    occ = PlanckOccupation(T)
    w = np.asarray(omegas, dtype=float)
    g = BoostParams(v).gamma
    drag = 2.0 * w * w * _alpha_imag(w, p) * (occ(g * w * (1 + v)) - occ(g * w * (1 - v)))
    diff = 16.0 * np.pi * w**4 * np.abs(polarizability(w, p)) ** 2 * occ.variance(w)
    h, c = _balance_terms(w, T, p, occ)
    return [
        {"omega": float(a), "integrand_drag": float(b), "integrand_diffusion": float(d), "residual": float(r)}
        for a, b, d, r in zip(w, drag, diff, h + c)
    ]


def drag_sweep(
    velocities: Sequence[float],
    temperatures: Sequence[float],
    p: OscillatorParams,
    spec: QuadratureSpec | None = None,
    form: str = "exact_difference",
    workers: int | None = None,
) -> np.ndarray:
    """Drag on a (T, v) grid; shape ``(len(temperatures), len(velocities))``.

    Each grid point is independent, so the result does not depend on ``workers``.
    """
    tasks = [(T, v) for T in temperatures for v in velocities]

    def one(task):
        T, v = task
        return drag_force(v, PlanckOccupation(T), p, spec, form).value

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(one, tasks))
    else:
        values = [one(t) for t in tasks]
    return np.array(values).reshape(len(temperatures), len(velocities))
