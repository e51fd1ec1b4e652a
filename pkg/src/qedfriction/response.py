"""Polarizability of the radiatively damped charged oscillator."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["OscillatorParams", "polarizability", "alpha_identity_residual"]


@dataclass(frozen=True)
class OscillatorParams:
    """Charge ``e``, oscillator mass ``m``, particle mass ``M``, resonance ``omega0``.

    The radiative damping ``beta = pi e^2 / m`` is always derived. Test
    harnesses that need a deliberately wrong damping must go through
    :meth:`unsafe_with_beta`.
    """

    e: float
    m: float
    M: float
    omega0: float = 1.0
    _beta_override: float | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.e == 0:
            raise ValueError("charge must be non-zero")
        if not (self.m > 0 and self.M > 0 and self.omega0 > 0):
            raise ValueError("masses and resonance frequency must be positive")

    @property
    def beta(self) -> float:
        if self._beta_override is not None:
            return self._beta_override
        return math.pi * self.e**2 / self.m

    @property
    def coupling(self) -> float:
        """e^2/m, the numerator of the polarizability."""
        return self.e**2 / self.m

    @classmethod
    def default(cls) -> "OscillatorParams":
        """omega0 = 1, beta = 0.05, m = 1, M = 1000 m."""
        return cls.from_damping(0.05)

    @classmethod
    def from_damping(cls, beta: float, m: float = 1.0, M: float = 1000.0, omega0: float = 1.0):
        """Choose the charge so that pi e^2/m equals ``beta``."""
        if not beta > 0:
            raise ValueError("beta must be positive")
        return cls(e=math.sqrt(beta * m / math.pi), m=m, M=M, omega0=omega0)

    @classmethod
    def unsafe_with_beta(cls, e: float, m: float, M: float, omega0: float, beta: float):
        """Parameters whose damping is NOT pi e^2/m. For test harnesses only."""
        return cls(e, m, M, omega0, _beta_override=beta)


def polarizability(omega, p: OscillatorParams):
    """alpha(omega) = (e^2/m) / (omega0^2 - omega^2 - 2 i beta omega)."""
    w = np.asarray(omega, dtype=float)
    out = p.coupling / (p.omega0**2 - w * w - 2j * p.beta * w)
    return complex(out) if out.ndim == 0 else out


def alpha_identity_residual(omega, p: OscillatorParams):
    """|alpha|^2 - Im(alpha)/(2 pi omega); zero whenever beta = pi e^2/m."""
    w = np.asarray(omega, dtype=float)
    a = polarizability(w, p)
    out = np.abs(a) ** 2 - np.imag(a) / (2.0 * np.pi * w)
    return float(out) if np.ndim(out) == 0 else out
