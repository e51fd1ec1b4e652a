"""Exception hierarchy shared by all modules."""


class QEDFrictionError(Exception):
    """Base class for every error raised by this package."""


class NumericalError(QEDFrictionError, ArithmeticError):
    """A numerical procedure could not deliver a trustworthy value."""


class PoleError(NumericalError):
    """Gamma function evaluated at (or within 1e-12 of) a non-positive integer."""


class NonConvergence(NumericalError):
    """Adaptive quadrature exhausted its subdivision budget."""


class DivergentTail(NumericalError):
    """The tail of a semi-infinite integral does not shrink."""


class ExtrapolationUnstable(NumericalError):
    """Extrapolants along the epsilon ladder are not Cauchy."""


class StepUnderflow(NumericalError):
    """ODE step size collapsed below the allowed floor."""


class NotConverged(NumericalError):
    """A time-domain run did not reach its steady-state criterion."""


class DerivativeUnavailable(NumericalError):
    """A derivative was requested from an occupation that cannot supply one."""


class GridTooCoarse(QEDFrictionError, ValueError):
    """Mode spacing 2*pi/L exceeds the damping constant, so the resonance is unresolved."""


class CutoffRequired(QEDFrictionError, ValueError):
    """A divergent integral was requested without an explicit frequency cutoff."""
