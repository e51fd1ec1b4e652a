"""Mode occupations, the 1+1D spectral energy density and its Doppler transform.

Natural units: hbar = c = k_B = 1, frequencies in units of the oscillator
resonance.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DerivativeUnavailable

__all__ = [
    "Occupation",
    "PlanckOccupation",
    "ZeroOccupation",
    "TabulatedOccupation",
    "BoostParams",
    "planck_occupation",
    "spectral_density",
    "doppler_shift",
    "transformed_spectral_density",
    "load_occupation_csv",
]

# below this hbar*omega/(k_B T) the Planck function switches to its Laurent series
_SERIES_LIMIT = 1e-6


def planck_occupation(omega, T: float):
    """Mean photon number 1/(exp(omega/T) - 1).

    ``T = 0`` returns zeros. Works on scalars and arrays.
    """
    if T < 0:
        raise ValueError("temperature must be non-negative")
    w = np.asarray(omega, dtype=float)
    if T == 0:
        out = np.zeros_like(w)
        return float(out) if out.ndim == 0 else out
    x = w / T
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        direct = np.exp(-x) / -np.expm1(-x)
        series = 1.0 / x - 0.5 + x / 12.0
    out = np.where(x < _SERIES_LIMIT, series, direct)
    return float(out) if out.ndim == 0 else out


class Occupation:
    """Mean occupation n(omega) of the field modes.

    Subclasses implement ``__call__`` and, where possible, ``derivative``.
    """

    kind = "abstract"

    def __call__(self, omega):
        raise NotImplementedError

    def derivative(self, omega):
        raise DerivativeUnavailable(f"{type(self).__name__} has no derivative")

    def variance(self, omega):
        """Bose-Einstein photon-number variance n^2 + n."""
        n = self(omega)
        return n * n + n


@dataclass(frozen=True)
class PlanckOccupation(Occupation):
    T: float
    kind = "planck"

    def __post_init__(self):
        if self.T < 0:
            raise ValueError("temperature must be non-negative")

    def __call__(self, omega):
        return planck_occupation(omega, self.T)

    def derivative(self, omega):
        # closed form: dn/domega = -(n^2 + n)/T
        if self.T == 0:
            return np.zeros_like(np.asarray(omega, dtype=float))
        n = self(omega)
        return -(n * n + n) / self.T


@dataclass(frozen=True)
class ZeroOccupation(Occupation):
    kind = "zero"

    def __call__(self, omega):
        out = np.zeros_like(np.asarray(omega, dtype=float))
        return float(out) if out.ndim == 0 else out

    def derivative(self, omega):
        return self(omega)


class TabulatedOccupation(Occupation):
    """Occupation given on a grid of (omega, n) pairs.

    Interpolates ``log n`` linearly in omega (exponential interpolation) and
    clamps to the end values outside the table. Segments that touch ``n = 0``
    fall back to plain linear interpolation. Derivatives come from central
    differences on the table grid; ``smooth=False`` marks a table whose
    derivative should not be trusted.
    """

    kind = "tabulated"

    def __init__(self, omega, n, smooth: bool = True):
        omega = np.asarray(omega, dtype=float)
        n = np.asarray(n, dtype=float)
        if omega.ndim != 1 or omega.shape != n.shape or omega.size < 2:
            raise ValueError("need matching 1-D omega and n arrays with at least two entries")
        if np.any(np.diff(omega) <= 0):
            raise ValueError("omega must be strictly increasing")
        if np.any(n < 0) or not np.all(np.isfinite(n)):
            raise ValueError("occupations must be finite and non-negative")
        self.omega = omega
        self.n = n
        self.smooth = smooth
        self._dn = np.gradient(n, omega) if omega.size >= 3 else None

    def __repr__(self):
        return f"TabulatedOccupation({self.omega.size} points, {self.omega[0]:g}..{self.omega[-1]:g})"

    def __call__(self, omega):
        w = np.asarray(omega, dtype=float)
        x = np.clip(w, self.omega[0], self.omega[-1])
        i = np.clip(np.searchsorted(self.omega, x, side="right") - 1, 0, self.omega.size - 2)
        x0, x1 = self.omega[i], self.omega[i + 1]
        n0, n1 = self.n[i], self.n[i + 1]
        frac = (x - x0) / (x1 - x0)
        positive = (n0 > 0) & (n1 > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_interp = np.exp((1 - frac) * np.log(n0) + frac * np.log(n1))
        out = np.where(positive, log_interp, (1 - frac) * n0 + frac * n1)
        return float(out) if out.ndim == 0 else out

    def derivative(self, omega):
        if not self.smooth or self._dn is None:
            raise DerivativeUnavailable("tabulated occupation is not smooth enough to differentiate")
        w = np.asarray(omega, dtype=float)
        out = np.interp(w, self.omega, self._dn, left=0.0, right=0.0)
        return float(out) if out.ndim == 0 else out


def load_occupation_csv(path, smooth: bool = True) -> TabulatedOccupation:
    """Read a two-column CSV ``omega,n`` (header row required)."""
    with open(Path(path), newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header, body = rows[0], [r for r in rows[1:] if r and not r[0].startswith("#")]
    if len(header) != 2:
        raise ValueError(f"{path}: expected a two-column header, got {header}")
    try:
        float(header[0])
    except ValueError:
        pass
    else:
        raise ValueError(f"{path}: first row must be a header, got numbers")
    data = np.array([[float(a), float(b)] for a, b in body])
    if data.size == 0:
        raise ValueError(f"{path}: no data rows")
    return TabulatedOccupation(data[:, 0], data[:, 1], smooth=smooth)


def spectral_density(omega, occ: Occupation):
    """Energy per unit length per unit frequency, (omega/pi)(n + 1/2)."""
    w = np.asarray(omega, dtype=float)
    out = w / np.pi * (occ(w) + 0.5)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class BoostParams:
    v: float

    def __post_init__(self):
        if not abs(self.v) < 1:
            raise ValueError(f"|v| must be < 1, got {self.v}")

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt((1.0 - self.v) * (1.0 + self.v))

    def compose(self, other: "BoostParams") -> "BoostParams":
        """Relativistic velocity addition."""
        return BoostParams((self.v + other.v) / (1.0 + self.v * other.v))


def doppler_shift(omega_prime, boost: BoostParams, direction: int = 1):
    """Lab-frame frequency gamma * omega' * (1 + direction * v)."""
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    return boost.gamma * np.asarray(omega_prime, dtype=float) * (1.0 + direction * boost.v)


def transformed_spectral_density(omega_prime, occ: Occupation, boost: BoostParams):
    """Spectral density seen from a frame moving with ``boost.v``.

    (omega'/pi)[n(gamma omega' (1+v)) + 1/2]; for a Planck occupation this is
    (omega'/2pi) coth[gamma omega'(1+v)/2T].
    """
    w = np.asarray(omega_prime, dtype=float)
    out = w / np.pi * (occ(doppler_shift(w, boost, +1)) + 0.5)
    return float(out) if np.ndim(out) == 0 else out
