"""Keller-Osserman type integral conditions and the ball regime classifier.

Every condition is an improper integral ∫_1^∞ σ^w φ(σ) dσ with w ∈ {0, 1}:

    A-form   φ = 1 / g(R, A_{r0}^{-1}(C ∫_0^σ √f(R,t) dt))
    D-form   φ = 1 / g(R, D^{-1}(C (∫_0^σ √f(ρ,t) dt)^2))
    H-form   φ = (C ∫_0^σ H(t) dt)^(-p/(2p+1)),   H(t) = ∫_0^t h

with A_ρ(x) = ∫_0^x g(ρ,t)/√t dt and D(x) = ∫_0^x g(R,t)^2 dt.

When g grows like t^p and f like t^s, all three integrands decay like
σ^-e with e = p(s+2)/(2p+1), so the unweighted integral converges iff
p s > 1 and the weighted one iff s > 2 + 2/p. The numeric engine does
not use this: it integrates over dyadic blocks [2^k, 2^(k+1)] and reads
the decay exponent off the block sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import IneligibleError, MonotonicityError, QuadratureError, SpecError
from .model import NonlinearityDesc, ProblemSpec, divergence_condition_lhs, require_valid

CONVERGENT, DIVERGENT, INCONCLUSIVE = "Convergent", "Divergent", "Inconclusive"

BOTH_BOUNDED = "BothBounded"
U_BOUNDED_V_BLOWS = "UBoundedVBlows"
BOTH_BLOW_UP = "BothBlowUp"
NO_POSITIVE_SOLUTION = "NoPositiveSolution"
GLOBAL_EXISTENCE = "GlobalExistence"
INCONCLUSIVE_REGIME = "Inconclusive"

# condition id -> (integrand form, weight exponent w)
CONDITIONS = {
    "v_blowup_necessary": ("A", 0),
    "v_blowup_sufficient": ("D", 0),
    "u_blowup_necessary": ("D", 1),
    "u_bounded_necessary": ("A", 1),
    "bounded": ("H", 0),
    "u_bounded": ("H", 1),
}
BOTH_BLOWUP = "both_blowup"  # pair: ("bounded" convergent, "u_bounded" divergent)

C_SCAN = (1e-2, 1.0, 1e2)
BAND = 0.005
MAX_LEVEL = 40
FIT_POINTS = 10
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class ConvergenceVerdict:
    verdict: str
    tail_exponent_est: float
    confidence: float
    critical: float = math.nan
    band: float = 0.0
    method: str = "analytic"
    C: float = 1.0

    @property
    def margin(self) -> float:
        return self.tail_exponent_est - self.critical

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "tail_exponent_est": self.tail_exponent_est,
                "confidence": self.confidence, "critical": self.critical, "method": self.method}


@dataclass(frozen=True)
class Certificate:
    condition: str
    verdict: str
    margin: float

    def to_dict(self) -> dict:
        return {"condition": self.condition, "verdict": self.verdict, "margin": self.margin}


@dataclass(frozen=True)
class Regime:
    tag: str
    certificates: tuple = ()
    flags: dict = field(default_factory=dict)

    @property
    def decided(self) -> bool:
        return self.tag != INCONCLUSIVE_REGIME

    def to_dict(self) -> dict:
        return {"regime": self.tag, "certificates": [c.to_dict() for c in self.certificates],
                "flags": dict(self.flags)}


# -- the elementary functionals ----------------------------------------------


def _g_pair(g_desc) -> tuple[NonlinearityDesc, NonlinearityDesc]:
    """Accept a spec, a (radial, value) pair, or a bare value nonlinearity."""
    if isinstance(g_desc, ProblemSpec):
        return g_desc.g_parts()
    if isinstance(g_desc, NonlinearityDesc):
        return NonlinearityDesc.power(1.0, 0.0), g_desc
    g_r, g_t = g_desc
    return g_r, g_t


def eval_H(h: NonlinearityDesc, t: float) -> float:
    """H(t) = ∫_0^t h."""
    if t < 0:
        raise SpecError(f"H needs t >= 0, got {t}")
    return h.power_integral(t)


def eval_A(g_desc, rho: float, s_val: float) -> float:
    """A_ρ(x) = ∫_0^x g(ρ,t)/√t dt."""
    if s_val < 0:
        raise SpecError(f"A needs an argument >= 0, got {s_val}")
    g_r, g_t = _g_pair(g_desc)
    return float(g_r(rho)) * g_t.power_integral(s_val, q=-0.5)


def eval_Dfun(g_desc, R: float, s_val: float) -> float:
    """D(x) = ∫_0^x g(R,t)^2 dt."""
    if s_val < 0:
        raise SpecError(f"D needs an argument >= 0, got {s_val}")
    g_r, g_t = _g_pair(g_desc)
    return float(g_r(R)) ** 2 * g_t.power_integral(s_val, m=2.0)


def integrated_H(h: NonlinearityDesc, sigma: float) -> float:
    """∫_0^σ H(t) dt = ∫_0^σ (σ - k) h(k) dk."""
    if sigma <= 0:
        return 0.0
    return max(sigma * h.power_integral(sigma) - h.power_integral(sigma, q=1.0), 0.0)


def sqrt_vs_F(spec: ProblemSpec, sigma: float, radius: float) -> tuple[float, float]:
    """((∫_0^σ √f)^2, ∫_0^{2σ} F) with F(t) = ∫_0^t f; the first never exceeds the second.

    Cauchy-Schwarz gives (∫_0^σ √f)^2 <= σ F(σ), and monotonicity of F
    gives σ F(σ) <= ∫_σ^{2σ} F.
    """
    f_r, h = spec.f_parts()
    w = float(f_r(radius))
    lhs = w * h.power_integral(sigma, m=0.5) ** 2
    return lhs, w * integrated_H(h, 2.0 * sigma)


def invert_monotone(fun, y: float, bracket=(0.0, 1.0), tol: float = 1e-12,
                    max_expand: int = 400) -> float:
    """Solve fun(x) = y for increasing ``fun``.

    The bracket is widened geometrically until it encloses y; a decrease
    seen while doing so raises :class:`MonotonicityError`. The root itself
    comes from Brent's method (bisection safeguarded secant steps).
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not hi > lo:
        raise SpecError(f"empty bracket {bracket}")
    f_lo, f_hi = fun(lo), fun(hi)
    if f_hi < f_lo:
        raise MonotonicityError(f"map decreases on [{lo:.6g}, {hi:.6g}]")
    for _ in range(max_expand):
        if f_hi >= y:
            break
        width = hi - lo
        lo, f_lo = hi, f_hi
        hi = hi + 2.0 * width
        f_hi = fun(hi)
        if f_hi < f_lo:
            raise MonotonicityError(f"map decreases on [{lo:.6g}, {hi:.6g}]")
    else:
        raise SpecError(f"value {y:.6g} not reached after {max_expand} bracket expansions")
    for _ in range(max_expand):
        if f_lo <= y:
            break
        width = hi - lo
        hi, f_hi = lo, f_lo
        lo = lo - 2.0 * width
        f_lo = fun(lo)
        if f_lo > f_hi:
            raise MonotonicityError(f"map decreases on [{lo:.6g}, {hi:.6g}]")
    else:
        raise SpecError(f"value {y:.6g} not reached below after {max_expand} expansions")
    if f_lo == y:
        return lo
    if f_hi == y:
        return hi
    x = optimize.brentq(lambda z: fun(z) - y, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                        maxiter=500)
    fx = fun(x)
    if abs(fx - y) > tol * max(1.0, abs(y)):
        # Brent stops on the x tolerance; polish with secant steps in y
        x0, x1 = lo if fx > y else hi, x
        f0, f1 = fun(x0) - y, fx - y
        for _ in range(50):
            if f1 == f0:
                break
            x0, x1 = x1, x1 - f1 * (x1 - x0) / (f1 - f0)
            f0, f1 = f1, fun(x1) - y
            if abs(f1) <= tol * max(1.0, abs(y)):
                break
        x = x1
    return float(x)


# -- integrands ---------------------------------------------------------------


def _radii(spec: ProblemSpec, base_radius: float | None) -> tuple[float, float]:
    """(R, base radius); entire-space specs use the unit ball (verdicts are radius-free)."""
    R = spec.R if spec.is_ball else 1.0
    rho = base_radius if base_radius is not None else R / 2.0
    if not 0 < rho <= R:
        raise SpecError(f"base radius must lie in (0, R], got {rho}")
    return R, rho


def _power_exponents(spec: ProblemSpec) -> tuple[float, float]:
    """Growth orders (p of g in v, s of f in |∇u|)."""
    _, g_t = spec.g_parts()
    _, h = spec.f_parts()
    return g_t.growth_exponent, h.growth_exponent


def _integrand(spec: ProblemSpec, form: str, C: float, R: float, rho: float):
    """σ -> φ(σ) along an increasing sequence of σ (the inverse is warm-started)."""
    g_r, g_t = spec.g_parts()
    f_r, h = spec.f_parts()
    if form == "H":
        if spec.p is None:
            raise IneligibleError("the H-form conditions need g = |x|^a v^p")
        e = spec.p / (2.0 * spec.p + 1.0)
        return lambda sig: (C * integrated_H(h, sig)) ** (-e)

    g_R = float(g_r(R))
    if form == "A":
        w = math.sqrt(float(f_r(R)))
        inner = lambda sig: C * w * h.power_integral(sig, m=0.5)
        outer = lambda x: eval_A(spec, rho, x)
    else:
        w = math.sqrt(float(f_r(rho)))
        inner = lambda sig: C * (w * h.power_integral(sig, m=0.5)) ** 2
        outer = lambda x: eval_Dfun(spec, R, x)
    last = [1.0]

    def phi(sig):
        y = inner(sig)
        x = invert_monotone(outer, y, bracket=(0.0, last[0]))
        last[0] = max(x, 1e-300)
        return 1.0 / (g_R * float(g_t(x)))

    return phi


def _block_sums(phi, max_level: int = MAX_LEVEL):
    """Σ_k = ∫_{2^k}^{2^(k+1)} σ^w φ(σ) dσ for w = 0, 1 (log-spaced Gauss-Legendre)."""
    plain, weighted = [], []
    ln2 = math.log(2.0)
    for k in range(max_level):
        u = (k + 0.5 * (_GL_X + 1.0)) * ln2
        sig = np.exp(u)
        vals = np.array([phi(x) for x in sig])
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            if k < FIT_POINTS + 2:
                raise QuadratureError(f"integrand not finite and positive on block {k}")
            break
        jac = 0.5 * ln2 * _GL_W * sig
        plain.append(float(np.sum(jac * vals)))
        weighted.append(float(np.sum(jac * vals * sig)))
    return np.array(plain), np.array(weighted)


def _tail_fit(block, weight: int, band: float, C: float) -> ConvergenceVerdict:
    """Decay exponent of σ^-e from the last ``FIT_POINTS`` dyadic block sums."""
    k = np.arange(len(block))[-FIT_POINTS:] * math.log(2.0)
    y = np.log(block[-FIT_POINTS:])
    A = np.vstack([np.ones_like(k), k]).T
    coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    slope = coef[1]
    dof = len(k) - 2
    rss = float(res[0]) if len(res) else float(np.sum((A @ coef - y) ** 2))
    stderr = math.sqrt(rss / dof / np.sum((k - k.mean()) ** 2)) if dof > 0 else math.inf
    e_est = 1.0 + weight - slope
    crit = 1.0 + weight
    eff_band = max(band, 3.0 * stderr)
    gap = e_est - crit
    if abs(gap) <= eff_band:
        verdict, conf = INCONCLUSIVE, 0.0
    else:
        verdict = CONVERGENT if gap > 0 else DIVERGENT
        conf = min(1.0, (abs(gap) - eff_band) / eff_band)
    return ConvergenceVerdict(verdict, float(e_est), float(conf), crit, eff_band, "numeric", C)


def _analytic(spec: ProblemSpec, weight: int, C: float) -> ConvergenceVerdict:
    p, s = _power_exponents(spec)
    e = p * (s + 2.0) / (2.0 * p + 1.0)
    # decide on the exact product form so that boundary cases are not at the mercy of rounding
    conv = p * s > 1.0 if weight == 0 else p * s > 2.0 * p + 2.0
    return ConvergenceVerdict(CONVERGENT if conv else DIVERGENT, e, 1.0, 1.0 + weight, 0.0,
                              "analytic", C)


def _use_analytic(spec: ProblemSpec, method: str) -> bool:
    if method == "analytic":
        return True
    if method == "numeric":
        return False
    if method != "auto":
        raise SpecError(f"unknown method {method!r}")
    return spec.mode == "power"


def ko_condition(spec: ProblemSpec, which: str, C: float = 1.0, base_radius: float | None = None,
                 method: str = "auto", band: float = BAND):
    """Convergence verdict of one integral condition.

    ``which`` is a key of :data:`CONDITIONS`, or ``"both_blowup"`` which
    returns the pair of verdicts (unweighted, weighted) of the H-form.
    ``method="auto"`` decides analytically in power mode and numerically
    otherwise; ``"analytic"`` uses the growth exponents of the descriptors.
    """
    require_valid(spec)
    if not C > 0:
        raise SpecError(f"C must be > 0, got {C}")
    if which == BOTH_BLOWUP:
        return (ko_condition(spec, "bounded", C, base_radius, method, band),
                ko_condition(spec, "u_bounded", C, base_radius, method, band))
    if which not in CONDITIONS:
        raise SpecError(f"unknown condition {which!r}; expected one of {sorted(CONDITIONS)}")
    form, weight = CONDITIONS[which]
    if form == "H" and spec.p is None:
        raise IneligibleError(f"condition {which!r} needs g = |x|^a v^p")
    if _use_analytic(spec, method):
        return _analytic(spec, weight, C)
    R, rho = _radii(spec, base_radius)
    plain, weighted = _block_sums(_integrand(spec, form, C, R, rho))
    return _tail_fit(weighted if weight else plain, weight, band, C)


def ko_profile(spec: ProblemSpec, which: str, C: float = 1.0, base_radius: float | None = None,
               band: float = BAND) -> tuple[ConvergenceVerdict, ConvergenceVerdict]:
    """Numeric verdicts of the unweighted and weighted integral of one form, sharing the samples."""
    require_valid(spec)
    form = CONDITIONS[which][0]
    R, rho = _radii(spec, base_radius)
    plain, weighted = _block_sums(_integrand(spec, form, C, R, rho))
    return _tail_fit(plain, 0, band, C), _tail_fit(weighted, 1, band, C)


def _scan(spec: ProblemSpec, which: list[str], method: str, base_radius=None) -> dict:
    """Verdict and margin per condition, agreed over the C scan.

    Disagreement between the values of C is reported as Inconclusive.
    Conditions sharing an integrand are evaluated from the same samples.
    """
    if _use_analytic(spec, method):
        out = {}
        for k in which:
            v = ko_condition(spec, k, 1.0, base_radius, method)
            out[k] = (v.verdict, v.margin)
        return out
    runs: dict[str, list] = {k: [] for k in which}
    for form in dict.fromkeys(CONDITIONS[k][0] for k in which):
        first = next(k for k, (f, _) in CONDITIONS.items() if f == form)
        for C in C_SCAN:
            pair = ko_profile(spec, first, C, base_radius)
            for k in which:
                if CONDITIONS[k][0] == form:
                    runs[k].append(pair[CONDITIONS[k][1]])
    out = {}
    for k, verdicts in runs.items():
        tags = {v.verdict for v in verdicts}
        margin = min((v.margin for v in verdicts), key=abs)
        out[k] = (tags.pop() if len(tags) == 1 else INCONCLUSIVE, float(margin))
    return out


# -- classifiers --------------------------------------------------------------


def regime_from_inequalities(p: float, s: float) -> str:
    """Closed-form ball regime for g = |x|^a v^p, f = |x|^b |∇u|^s."""
    if p * s <= 1.0:
        return BOTH_BOUNDED
    if s > 2.0 * (1.0 + 1.0 / p):
        return U_BOUNDED_V_BLOWS
    return BOTH_BLOW_UP


def classify_ball(spec: ProblemSpec, method: str = "auto", base_radius: float | None = None) -> Regime:
    """Regime of positive radial solutions on a ball.

    Power and general-h modes use the H-form pair; a general g uses the
    four A/D certificates, which only partially decide the regime.
    """
    rep = require_valid(spec)
    if not spec.is_ball:
        raise IneligibleError("classify_ball needs a ball domain")
    if spec.mode == "general":
        return _classify_general_g(spec, method, base_radius)
    if not rep.eligible_for("ball_regimes"):
        raise IneligibleError("spec is not eligible for the ball regime classification")
    res = _scan(spec, ["bounded", "u_bounded"], method, base_radius)
    (plain, m0), (weighted, m1) = res["bounded"], res["u_bounded"]
    certs = (Certificate("bounded", plain, m0), Certificate("u_bounded", weighted, m1))
    if INCONCLUSIVE in (plain, weighted):
        tag = INCONCLUSIVE_REGIME
    elif plain == DIVERGENT:
        tag = BOTH_BOUNDED
    elif weighted == CONVERGENT:
        tag = U_BOUNDED_V_BLOWS
    else:
        tag = BOTH_BLOW_UP
    flags = {"method": "analytic" if _use_analytic(spec, method) else "numeric"}
    if spec.mode == "power":
        closed = regime_from_inequalities(spec.p, spec.s)
        flags["closed_form"] = closed
        if tag != INCONCLUSIVE_REGIME and tag != closed:
            flags["closed_form_mismatch"] = True
    return Regime(tag, certs, flags)


def _classify_general_g(spec: ProblemSpec, method: str, base_radius) -> Regime:
    res = _scan(spec, ["v_blowup_necessary", "v_blowup_sufficient", "u_bounded_necessary",
                       "u_blowup_necessary"], method, base_radius)
    certs = tuple(Certificate(k, v, m) for k, (v, m) in res.items())
    verdict = {k: v for k, (v, _) in res.items()}
    if verdict["v_blowup_necessary"] == DIVERGENT:
        tag = BOTH_BOUNDED
    elif verdict["v_blowup_sufficient"] == CONVERGENT:
        if verdict["u_bounded_necessary"] == DIVERGENT:
            tag = BOTH_BLOW_UP
        elif verdict["u_blowup_necessary"] == CONVERGENT:
            tag = U_BOUNDED_V_BLOWS
        else:
            tag = INCONCLUSIVE_REGIME
    else:
        tag = INCONCLUSIVE_REGIME
    return Regime(tag, certs, {"method": "analytic" if _use_analytic(spec, method) else "numeric"})


def classify_entire(spec: ProblemSpec) -> Regime:
    """Existence on R^N and eligibility for the power-law asymptotics."""
    rep = require_valid(spec)
    if spec.is_ball or spec.mode != "power":
        raise IneligibleError("classify_entire needs a power-mode spec on the entire space")
    ps = spec.ps
    certs = [Certificate("ps_at_most_one", "holds" if ps <= 1 else "fails", 1.0 - ps)]
    if ps > 1:
        return Regime(NO_POSITIVE_SOLUTION, tuple(certs), {"asymptotics_eligible": False})
    lhs, rhs = divergence_condition_lhs(spec.N, spec.a, spec.b, spec.p, spec.s) if ps < 1 \
        else (math.nan, 2.0 * (spec.N + spec.a - 1.0))
    if ps < 1:
        certs.append(Certificate("divergence_condition", "holds" if lhs <= rhs else "fails", rhs - lhs))
    flags = {
        "asymptotics_eligible": rep.eligible_for("entire_asymptotics")
        and rep.eligible_for("divergence_condition"),
        "p_below_one": spec.p < 1,
        "ps_below_one": ps < 1,
        "divergence_condition": bool(lhs <= rhs) if ps < 1 else False,
    }
    return Regime(GLOBAL_EXISTENCE, tuple(certs), flags)
