"""Friction and momentum diffusion of a polarizable particle in 1+1D thermal and accelerated vacua."""
from .errors import (
    CutoffRequired,
    DerivativeUnavailable,
    DivergentTail,
    ExtrapolationUnstable,
    GridTooCoarse,
    NonConvergence,
    NotConverged,
    NumericalError,
    PoleError,
    QEDFrictionError,
    StepUnderflow,
)
from .numerics import (
    AdaptiveTail,
    FixedCutoff,
    QuadratureSpec,
    integrate_semi_infinite,
    log_gamma_complex,
    oscillatory_phase_integral,
)
from .response import OscillatorParams, alpha_identity_residual, polarizability
from .spectral import (
    BoostParams,
    PlanckOccupation,
    TabulatedOccupation,
    ZeroOccupation,
    planck_occupation,
    spectral_density,
    transformed_spectral_density,
)
from .thermal_kinetics import balance_residual, diffusion_rate, drag_force, recover_planck
from .rindler import RindlerParams, correlator_weights, gamma_identity, rindler_diffusion_rate, rindler_drag, xi_eta_closed_form

__version__ = "0.1.0"
