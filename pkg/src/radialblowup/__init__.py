"""Radial solutions of Δu = g(|x|, v), Δv = f(|x|, |∇u|): blow-up, regimes and rates."""

from .errors import (BlowupFitError, IneligibleError, MonotonicityError, NumericalFailure,
                     PicardDivergence, QuadratureError, RadialBlowupError, SpecError, StiffnessError)
from .model import (Ball, EntireSpace, InitialData, NonlinearityDesc, ProblemSpec, ValidationReport,
                    validate_problem)
from .radial_ode import (BlowupReport, RadialSolution, RadialState, SolverConfig, detect_blowup,
                         integrate_radial, picard_solve, rescale_solution, residual, series_start)

__version__ = "0.1.0"
