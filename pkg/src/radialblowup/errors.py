"""Exception hierarchy. Each class carries a stable ``code`` used by the CLI."""


class RadialBlowupError(Exception):
    code = "error"
    exit_code = 4


class SpecError(RadialBlowupError, ValueError):
    """Invalid problem description or input document."""

    code = "invalid_spec"
    exit_code = 2

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = tuple(violations)


class IneligibleError(SpecError):
    """The problem is valid but outside the hypotheses an operation needs."""

    code = "ineligible"


class NumericalFailure(RadialBlowupError):
    code = "numerical_failure"


class StiffnessError(NumericalFailure):
    """Adaptive step size underflowed."""

    code = "step_underflow"


class PicardDivergence(NumericalFailure):
    code = "picard_divergence"


class BlowupFitError(NumericalFailure):
    code = "blowup_fit"


class MonotonicityError(NumericalFailure):
    """A map assumed increasing was observed to decrease."""

    code = "non_monotone"


class QuadratureError(NumericalFailure):
    code = "quadrature"
