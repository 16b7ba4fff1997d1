"""Power-law behaviour of entire solutions at infinity (ps < 1).

Along a global radial solution the ratios (X, Y, Z, W) tend to the
interior equilibrium (D, A, B, K) of the autonomous system, so

    v ~ c_v r^A,   u ~ c_u r^D,   c_v^(ps-1) = A B^s K,

and integrating u' = r^(a+1) v^p / Z with Z -> B gives c_u = c_v^p / (B D).
A second candidate for c_u with denominator D K is carried along; the
long-range integration decides between them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .criteria import classify_entire
from .dynsys import DynParams
from .errors import IneligibleError, SpecError
from .model import InitialData, ProblemSpec, require_valid
from .radial_ode import RadialSolution, SolverConfig, integrate_radial

CANDIDATE_DK, CANDIDATE_BD = "DK", "BD"


@dataclass(frozen=True)
class AsymptoticPrediction:
    A: float
    B: float
    K: float
    D: float
    v_exponent: float
    u_exponent: float
    u_exponent_alt: float  # numerator (a+2)(1-ps) + ps(a+1) + bp over (1-ps)
    v_prefactor: float
    u_prefactor_stated: float  # c_v^p / (D K)
    u_prefactor_consistent: float  # c_v^p / (B D)

    @property
    def u_exponent_gap(self) -> float:
        return self.u_exponent - self.u_exponent_alt

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class RateFit:
    exponent: float
    prefactor: float
    exponent_se: float
    prefactor_se: float
    local_slope: float  # d ln(.)/d ln r at the window end


@dataclass(frozen=True)
class AsymptoticsReport:
    prediction: AsymptoticPrediction
    fitted_v_exponent: float
    fitted_u_exponent: float
    fitted_v_prefactor: float
    fitted_u_prefactor: float
    relative_errors: dict
    fit_window: tuple
    u_prefactor_winner: str
    discrimination: float  # |c_DK - c_BD| / standard error of the fitted u prefactor
    prefactor_identity_error: float  # relative error of c_v^(ps-1) against A B^s K
    fits: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "prediction": self.prediction.to_dict(),
            "fitted_v_exponent": self.fitted_v_exponent,
            "fitted_u_exponent": self.fitted_u_exponent,
            "fitted_v_prefactor": self.fitted_v_prefactor,
            "fitted_u_prefactor": self.fitted_u_prefactor,
            "relative_errors": dict(self.relative_errors),
            "fit_window": list(self.fit_window),
            "u_prefactor_winner": self.u_prefactor_winner,
            "discrimination": self.discrimination,
            "prefactor_identity_error": self.prefactor_identity_error,
            "fits": {k: vars(v) for k, v in self.fits.items()},
        }


def predicted_constants(params: DynParams) -> AsymptoticPrediction:
    params.require_subcritical()
    N, a, b, p, s = params.N, params.a, params.b, params.p, params.s
    ps = p * s
    k = (b + s * (1 + a + 2 * p)) / (1 - ps)
    A = 2 + k
    B = N + a + p * A
    K = N + k
    D = 2 + a + p * A
    c_v = (A * B**s * K) ** (1.0 / (ps - 1.0))
    u_alt = ((a + 2) * (1 - ps) + ps * (a + 1) + b * p) / (1 - ps)
    return AsymptoticPrediction(A=A, B=B, K=K, D=D, v_exponent=A, u_exponent=D,
                                u_exponent_alt=u_alt, v_prefactor=c_v,
                                u_prefactor_stated=c_v**p / (D * K),
                                u_prefactor_consistent=c_v**p / (B * D))


def _ols(x, y):
    """Slope, intercept and their standard errors."""
    n = len(x)
    xm = x.mean()
    sxx = float(np.sum((x - xm) ** 2))
    slope = float(np.sum((x - xm) * (y - y.mean())) / sxx)
    icpt = float(y.mean() - slope * xm)
    resid = y - (icpt + slope * x)
    s2 = float(np.sum(resid**2)) / max(n - 2, 1)
    se_slope = math.sqrt(s2 / sxx)
    se_icpt = math.sqrt(s2 * (1.0 / n + xm**2 / sxx))
    return slope, icpt, se_slope, se_icpt


def fit_rate(sol: RadialSolution, window: tuple[float, float], n: int = 400,
             min_decades: float = 2.0) -> dict[str, RateFit]:
    """Least-squares ln(.) = ln c + e ln r for u and v over ``window``.

    The logarithms are resampled at equally spaced ln r so the adaptive
    grid's clustering does not weight the fit.
    """
    lo, hi = float(window[0]), float(window[1])
    if not (0 < lo < hi):
        raise SpecError(f"bad fit window {window}")
    if math.log10(hi / lo) < min_decades - 1e-9:
        raise SpecError(f"fit window spans {math.log10(hi / lo):.3g} decades, need {min_decades}")
    if lo < sol.r[0] or hi > sol.r[-1] * (1 + 1e-12):
        raise SpecError(f"fit window {window} not inside the grid [{sol.r[0]:.3g}, {sol.r[-1]:.3g}]")
    if sol.blowup is not None:
        raise IneligibleError("rates are fitted on global solutions only")
    t = np.log(sol.r)
    tq = np.linspace(math.log(lo), min(math.log(hi), t[-1]), n)
    out = {}
    for name, ly, ldy in (("u", sol.log_u, sol.log_du), ("v", sol.log_v, sol.log_dv)):
        yq = CubicSpline(t, ly)(tq)
        slope, icpt, se_s, se_i = _ols(tq, yq)
        # r y'/y at the last grid point inside the window
        j = int(np.searchsorted(t, tq[-1], side="right")) - 1
        local = math.exp(t[j] + ldy[j] - ly[j])
        c = math.exp(icpt)
        out[name] = RateFit(slope, c, se_s, c * se_i, local)
    return out


def verify_asymptotics(spec: ProblemSpec, init: InitialData | None = None,
                       config: SolverConfig | None = None,
                       window: tuple[float, float] | None = None) -> AsymptoticsReport:
    """Integrate to ``config.r_max`` and compare fitted rates with the predictions."""
    require_valid(spec)
    init = init or InitialData()
    reg = classify_entire(spec)
    if not reg.flags.get("asymptotics_eligible"):
        raise IneligibleError("needs p < 1, ps < 1 and the divergence condition", )
    if spec.g_coef != 1.0 or spec.f_coef != 1.0:
        raise IneligibleError("predicted prefactors assume unit coefficients")
    cfg = config or SolverConfig(r_max=1e5)
    window = window or (cfg.r_max / 100.0, cfg.r_max)
    pred = predicted_constants(DynParams.from_spec(spec))
    sol = integrate_radial(spec, init, cfg)
    if sol.blowup is not None:
        raise IneligibleError("solution blew up; no rates at infinity")
    fits = fit_rate(sol, window)
    fu, fv = fits["u"], fits["v"]
    rel = lambda x, ref: abs(x - ref) / abs(ref)
    errors = {
        "v_exponent": rel(fv.exponent, pred.v_exponent),
        "u_exponent": rel(fu.exponent, pred.u_exponent),
        "u_exponent_alt": rel(fu.exponent, pred.u_exponent_alt),
        "v_prefactor": rel(fv.prefactor, pred.v_prefactor),
        "u_prefactor_stated": rel(fu.prefactor, pred.u_prefactor_stated),
        "u_prefactor_consistent": rel(fu.prefactor, pred.u_prefactor_consistent),
    }
    winner = CANDIDATE_BD if errors["u_prefactor_consistent"] < errors["u_prefactor_stated"] \
        else CANDIDATE_DK
    gap = abs(pred.u_prefactor_stated - pred.u_prefactor_consistent)
    disc = gap / fu.prefactor_se if fu.prefactor_se > 0 else math.inf
    ps = spec.ps
    ident = rel(fv.prefactor ** (ps - 1.0), pred.A * pred.B**spec.s * pred.K)
    return AsymptoticsReport(pred, fv.exponent, fu.exponent, fv.prefactor, fu.prefactor, errors,
                             (float(window[0]), float(window[1])), winner, float(disc),
                             float(ident), fits)


SWEEP_COLUMNS = ("N", "a", "b", "p", "s", "v_exponent_pred", "v_exponent_fit", "v_exponent_relerr",
                 "u_exponent_pred", "u_exponent_fit", "u_exponent_relerr", "v_prefactor_pred",
                 "v_prefactor_fit", "v_prefactor_relerr", "u_prefactor_winner", "status")


def sweep_row(spec: ProblemSpec, init: InitialData | None = None,
              config: SolverConfig | None = None) -> dict:
    """One line of the rate sweep table; ineligible specs get a status instead of numbers."""
    row = {"N": spec.N, "a": spec.a, "b": spec.b, "p": spec.p, "s": spec.s}
    try:
        rep = verify_asymptotics(spec, init, config)
    except IneligibleError as exc:
        row.update({k: "" for k in SWEEP_COLUMNS if k not in row})
        row["status"] = f"ineligible: {exc}"
        return row
    pr = rep.prediction
    row.update(v_exponent_pred=pr.v_exponent, v_exponent_fit=rep.fitted_v_exponent,
               v_exponent_relerr=rep.relative_errors["v_exponent"],
               u_exponent_pred=pr.u_exponent, u_exponent_fit=rep.fitted_u_exponent,
               u_exponent_relerr=rep.relative_errors["u_exponent"],
               v_prefactor_pred=pr.v_prefactor, v_prefactor_fit=rep.fitted_v_prefactor,
               v_prefactor_relerr=rep.relative_errors["v_prefactor"],
               u_prefactor_winner=rep.u_prefactor_winner, status="ok")
    return row
