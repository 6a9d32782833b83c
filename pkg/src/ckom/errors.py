"""Exception types shared across the package."""


class SingularDenominator(ValueError):
    """The effective mechanical frequency omega_m - m*g_ck is zero or negative."""


class NonConvergedSum(RuntimeError):
    """A phonon-sideband sum was truncated before its tail became negligible."""


class NonConvergence(RuntimeError):
    """Relaxation toward the steady state did not settle within the time budget."""


class StepSizeUnderflow(RuntimeError):
    """The adaptive integrator could not take a step at the requested tolerance."""


class ZeroPhotonNumber(ArithmeticError):
    """g2 is undefined because the mean photon number is numerically zero."""


class DegenerateCat(ArithmeticError):
    """The requested cat branch has vanishing norm at this time."""


class DegenerateBranch(ArithmeticError):
    """The requested measurement branch has vanishing probability."""


class TruncationLoss(RuntimeError):
    """The mechanical cutoff is too small to hold the requested state."""
