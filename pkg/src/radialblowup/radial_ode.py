"""Radial initial value problem for (u, v).

The solver works with the logarithms of u, u', v, v' as functions of
t = ln r:

    (ln u)_t  = X = r u'/u            (ln u')_t = Z - (N-1),  Z = r g(r, v)/u'
    (ln v)_t  = Y = r v'/v            (ln v')_t = W - (N-1),  W = r f(r, u')/v'

so monotonicity of u, v, u', v' is structural, solutions growing like
exp(r) or faster stay representable, and the ratios X, Y, Z, W are the
phase-space coordinates used by :mod:`radialblowup.dynsys`.

A finite-radius singularity is recognised from the local pole distance

    R - r ≈ r / (W - (N-1) - Y)

which is exact for v ~ (R - r)^-β. Blow-up is declared once v (or u)
exceeds the threshold *and* the pole lies within ``pole_fraction * r``;
exponential growth (p s = 1) crosses any fixed threshold but keeps the
estimated pole distance of order r, so it is never mistaken for blow-up.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate

from .errors import BlowupFitError, MonotonicityError, NumericalFailure, PicardDivergence, SpecError
from .model import Ball, InitialData, ProblemSpec, require_initial, require_valid
from .ode import dopri54

GAMMA_TOL = 0.02  # |rate of u' - 1| below this counts as the logarithmic (divergent) case


@dataclass(frozen=True)
class SolverConfig:
    rtol: float = 1e-9
    atol: float = 1e-12
    r_max: float = 1e3
    threshold: float = 1e8
    r_start: float | None = None
    max_step: float = 0.1  # in ln r
    pole_fraction: float = 1e-4
    pole_floor: float = 1e-9  # a pole closer than this (relative to r) stops the run below threshold
    max_steps: int = 2_000_000

    def __post_init__(self):
        for name in ("rtol", "atol", "r_max", "threshold", "max_step", "pole_fraction", "pole_floor"):
            if not getattr(self, name) > 0:
                raise SpecError(f"solver setting {name} must be > 0")


@dataclass(frozen=True)
class RadialState:
    r: float
    u: float
    v: float
    du: float
    dv: float


@dataclass(frozen=True)
class BlowupReport:
    R_est: float
    u_blows: bool
    v_blows: bool
    extrapolation_order: int = 1
    v_rate: float = math.nan  # β in v ~ (R - r)^-β
    du_rate: float = math.nan  # γ in u' ~ (R - r)^-γ
    fit_points: int = 0

    def to_dict(self) -> dict:
        return {"R_est": self.R_est, "u_blows": self.u_blows, "v_blows": self.v_blows}


@dataclass
class RadialSolution:
    """Dense radial output stored as logarithms (values may exceed float range)."""

    r: np.ndarray
    log_u: np.ndarray
    log_v: np.ndarray
    log_du: np.ndarray
    log_dv: np.ndarray
    blowup: BlowupReport | None = None
    residual_norm: float = math.nan
    spec: ProblemSpec | None = None
    info: dict = field(default_factory=dict)

    @classmethod
    def from_values(cls, r, u, v, du, dv, **kw) -> "RadialSolution":
        # quadrature round-off can leave tiny negative derivatives at r = 0
        with np.errstate(divide="ignore"):
            logs = [np.log(np.maximum(np.asarray(x, float), 0.0)) for x in (u, v, du, dv)]
        return cls(np.asarray(r, float), *logs, **kw)

    def __len__(self) -> int:
        return len(self.r)

    def _exp(self, x):
        with np.errstate(over="ignore"):
            return np.exp(x)

    @property
    def u(self):
        return self._exp(self.log_u)

    @property
    def v(self):
        return self._exp(self.log_v)

    @property
    def du(self):
        return self._exp(self.log_du)

    @property
    def dv(self):
        return self._exp(self.log_dv)

    @property
    def t(self):
        with np.errstate(divide="ignore"):
            return np.log(self.r)

    def state(self, i: int) -> RadialState:
        return RadialState(float(self.r[i]), float(self.u[i]), float(self.v[i]),
                           float(self.du[i]), float(self.dv[i]))

    @property
    def grid(self) -> list[RadialState]:
        return [self.state(i) for i in range(len(self))]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "u", "v", "du", "dv"])
            for row in zip(self.r, self.u, self.v, self.du, self.dv):
                w.writerow([repr(float(x)) for x in row])

    def write_sidecar(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.blowup.to_dict() if self.blowup else None, fh, indent=2, sort_keys=True)


# -- start-up ---------------------------------------------------------------


def _du_series(spec: ProblemSpec, v0: float, r: float) -> float:
    """u'(r) ≈ r^{1-N} ∫_0^r τ^{N-1} g(τ, v0) dτ."""
    g_r, g_t = spec.g_parts()
    return float(g_t(v0)) * g_r.power_integral(r, q=spec.N - 1) / r ** (spec.N - 1)


def series_start(spec: ProblemSpec, init: InitialData, r_start: float) -> RadialState:
    """Leading-order state at a small radius.

    u' is taken from the gradient sandwich, which pinches as r -> 0;
    v' follows by inserting that u' into the integral for v'. For power
    data this gives

        u' = g_coef v0^p r^(a+1) / (N+a)
        v' = f_coef (g_coef v0^p / (N+a))^s r^((a+1)s+b+1) / (N+b+(a+1)s).
    """
    if not r_start > 0:
        raise SpecError(f"r_start must be > 0, got {r_start}")
    require_initial(init)
    N, u0, v0 = spec.N, init.u0, init.v0
    g_r, g_t = spec.g_parts()
    f_r, h = spec.f_parts()
    if g_r.is_power and h.is_power and f_r.is_power:
        a, b, s = g_r.exponent, f_r.exponent, h.exponent
        k = g_r.coefficient * float(g_t(v0)) / (N + a)
        du = k * r_start ** (a + 1)
        kv = f_r.coefficient * h.coefficient * k**s
        ev = (a + 1) * s + b + 1
        dv = kv * r_start**ev / (N + b + (a + 1) * s)
        u = u0 + du * r_start / (a + 2)
        v = v0 + dv * r_start / (ev + 1)
        return RadialState(r_start, u, v, du, dv)
    # log-spaced Simpson rule; the integrands vanish like powers of r at 0
    t = np.linspace(math.log(r_start) - 30.0, math.log(r_start), 601)
    x = np.exp(t)
    du = np.array([_du_series(spec, v0, xi) for xi in x])
    flux = integrate.cumulative_simpson(x**N * f_r(x) * h(du), x=t, initial=0.0)
    dv = flux / x ** (N - 1)
    u = u0 + float(integrate.simpson(du * x, x=t))
    v = v0 + float(integrate.simpson(dv * x, x=t))
    du, dv = float(du[-1]), float(dv[-1])
    return RadialState(r_start, u, v, du, dv)


# -- right-hand side --------------------------------------------------------


def _ratio_function(spec: ProblemSpec):
    """(t, y) -> (X, Y, Z, W) for y = (ln u, ln u', ln v, ln v')."""
    g_r, g_t = spec.g_parts()
    f_r, h = spec.f_parts()
    exp = math.exp
    if all(d.is_power for d in (g_r, g_t, f_r, h)):
        a1, b1 = g_r.exponent + 1.0, f_r.exponent + 1.0
        p, s = g_t.exponent, h.exponent
        lg, lf = math.log(g_r.coefficient * g_t.coefficient), math.log(f_r.coefficient * h.coefficient)

        def ratios(t, y):
            U, P, V, Q = y
            return (exp(t + P - U), exp(t + Q - V),
                    exp(a1 * t + p * V - P + lg), exp(b1 * t + s * P - Q + lf))
    else:

        def ratios(t, y):
            U, P, V, Q = y
            lz = t + g_r.log_value(t) + g_t.log_value(V) - P
            lw = t + f_r.log_value(t) + h.log_value(P) - Q
            return (exp(t + P - U), exp(t + Q - V),
                    exp(lz) if lz > -745 else 0.0, exp(lw) if lw > -745 else 0.0)

    return ratios


def _log_rhs(spec: ProblemSpec):
    ratios = _ratio_function(spec)
    nm1 = spec.N - 1.0
    bad = np.full(4, np.inf)

    def fun(t, y):
        try:
            X, Y, Z, W = ratios(t, y)
        except OverflowError:
            return bad
        return np.array([X, Z - nm1, Y, W - nm1])

    return fun, ratios


def _pole_denominators(spec, ratios, t, y):
    X, Y, Z, W = ratios(t, y)
    nm1 = spec.N - 1.0
    return X, Y, Z - nm1 - X, W - nm1 - Y


# -- integration ------------------------------------------------------------


def integrate_radial(spec: ProblemSpec, init: InitialData, config: SolverConfig | None = None
                     ) -> RadialSolution:
    """Integrate outward from the series start.

    Stops at the ball radius, at ``config.r_max`` (entire space), or at a
    confirmed blow-up, in which case ``blowup`` is filled in. A blow-up is
    confirmed when a component passes the threshold with its pole closer
    than ``pole_fraction * r``, or when the pole is closer than
    ``pole_floor * r`` whatever the size of the solution.
    """
    require_valid(spec)
    require_initial(init)
    cfg = config or SolverConfig()
    r_end = spec.R if spec.is_ball else cfg.r_max
    r0 = cfg.r_start if cfg.r_start is not None else 1e-6 * max(1.0, spec.R or 1.0)
    if not r0 < r_end:
        raise SpecError(f"start radius {r0} is not below the end radius {r_end}")

    st = series_start(spec, init, r0)
    y0 = np.log([st.u, st.du, st.v, st.dv])
    if not np.all(np.isfinite(y0)):
        raise NumericalFailure("degenerate series start (a derivative vanishes at r_start)")
    fun, ratios = _log_rhs(spec)
    log_thr = math.log(cfg.threshold)
    pole_den = 1.0 / cfg.pole_fraction
    prev = [y0]

    def stop(t, y):
        if np.any(y < prev[0] - 1e-12 * (1.0 + np.abs(prev[0]))):
            raise MonotonicityError(f"monotonicity lost at r={math.exp(t):.6g}")
        prev[0] = y
        try:
            _, _, du_den, dv_den = _pole_denominators(spec, ratios, t, y)
        except OverflowError:
            return True
        if max(du_den, dv_den) * cfg.pole_floor >= 1.0:
            return True  # slow poles reach the resolution of ln r before the threshold
        return (y[2] >= log_thr and dv_den >= pole_den) or (y[0] >= log_thr and du_den >= pole_den)

    def cap(t, y):
        # keep >= 20 steps per e-fold of the pole distance so the tail fit has data
        try:
            X, Y, du_den, dv_den = _pole_denominators(spec, ratios, t, y)
        except OverflowError:
            return 1e-3
        c = math.inf
        if Y > 1.0 and dv_den > 0.0:
            c = 0.05 / dv_den
        if X > 1.0 and du_den > 0.0:
            c = min(c, 0.05 / du_den)
        return c

    res = dopri54(fun, math.log(r0), y0, math.log(r_end), rtol=cfg.rtol, atol=cfg.atol,
                  max_step=cfg.max_step, step_cap=cap, callback=stop, max_steps=cfg.max_steps)
    r = np.exp(res.t)
    if not res.stopped:
        r[-1] = r_end
    sol = RadialSolution(r, res.y[:, 0], res.y[:, 2], res.y[:, 1], res.y[:, 3], spec=spec,
                         info={"naccept": res.naccept, "nreject": res.nreject, "nfev": res.nfev})
    if res.stopped:
        sol.blowup = detect_blowup(sol, cfg.threshold)
    if len(sol) >= 5:
        sol.residual_norm = residual(sol, spec)
    return sol


# -- blow-up ----------------------------------------------------------------


def _line_fit(x, y):
    A = np.vstack([np.ones_like(x), x]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return coef


def detect_blowup(sol: RadialSolution, threshold: float = 1e8, min_points: int = 10) -> BlowupReport:
    """Estimate the blow-up radius and which components blow up.

    The pole distance δ = v/v' of v ~ (R - r)^-β is linear in r,
    δ = (R - r)/β; a least-squares line through the last decade of pole
    distance gives R as its root. The rate γ of u' ~ (R - r)^-γ comes
    from the slope of ln u' against ln(R - r) over the same window, and u
    blows up iff ∫ u' diverges, i.e. γ >= 1 (the logarithmic case γ = 1
    is decided within ``GAMMA_TOL``) or u itself crossed the threshold.
    """
    r = np.asarray(sol.r, float)
    ok = np.isfinite(sol.log_v) & np.isfinite(sol.log_dv) & (r > 0)
    r, lv, ldv, ldu, lu = r[ok], sol.log_v[ok], sol.log_dv[ok], sol.log_du[ok], sol.log_u[ok]
    if len(r) < min_points:
        raise BlowupFitError(f"only {len(r)} usable points, need {min_points}")
    delta = np.exp(lv - ldv)
    r_end = r[-1]

    c0, c1 = _line_fit(r[-3:], delta[-3:])
    R_est = -c0 / c1 if c1 < 0 else math.nan
    idx = None
    for _ in range(3):
        if not (math.isfinite(R_est) and R_est > r[0]):
            raise BlowupFitError("tail shows no finite pole (v/v' is not decreasing to zero)")
        d_end = max(R_est - r_end, 1e-300)
        idx = np.nonzero((R_est - r) <= 10.0 * d_end)[0]
        if len(idx) < min_points:
            raise BlowupFitError(f"{len(idx)} points in the tail window, need {min_points}")
        c0, c1 = _line_fit(r[idx], delta[idx])
        R_est = -c0 / c1 if c1 < 0 else math.nan
    if not math.isfinite(R_est):
        raise BlowupFitError("tail shows no finite pole")
    beta = -1.0 / c1
    R_est = max(R_est, r_end)

    dist = R_est - r[idx]
    use = dist > 0
    if use.sum() >= 3 and np.all(np.isfinite(ldu[idx][use])):
        slope = _line_fit(np.log(dist[use]), ldu[idx][use])[1]
        gamma = -slope
    else:
        gamma = math.nan
    log_thr = math.log(threshold)
    u_blows = bool(lu[-1] >= log_thr or (math.isfinite(gamma) and gamma >= 1.0 - GAMMA_TOL))
    return BlowupReport(R_est=float(R_est), u_blows=u_blows, v_blows=True, extrapolation_order=1,
                        v_rate=float(beta), du_rate=float(gamma), fit_points=int(len(idx)))


# -- Picard oracle ----------------------------------------------------------


def _cumulative(y, x, head: int = 20):
    """Cumulative integral from x[0] = 0 of data behaving like a power of x near 0.

    The first ``head`` intervals use the power law through their end
    points, exact for x^k; Simpson's parabolas take over once x spans
    enough nodes for the power to look polynomial.
    """
    n = len(y)
    m = min(head, n - 3)
    out = np.zeros_like(y)
    for i in range(m):
        y0, y1, x0, x1 = y[i], y[i + 1], x[i], x[i + 1]
        if y0 > 0 and y1 > 0 and x0 > 0 and y0 != y1:
            k = math.log(y1 / y0) / math.log(x1 / x0)
            piece = (x1 * y1 - x0 * y0) / (k + 1.0) if abs(k + 1.0) > 1e-12 \
                else y0 * x0 * math.log(x1 / x0)
        elif y0 == 0 and y1 > 0 and i + 2 < n and y[i + 2] > 0 and x0 == 0:
            # y ~ c x^k on [0, x1], k from the next interval
            k = math.log(y[i + 2] / y1) / math.log(x[i + 2] / x1)
            piece = x1 * y1 / (k + 1.0) if k > -1.0 else 0.5 * x1 * y1
        else:
            piece = 0.5 * (y0 + y1) * (x1 - x0)
        out[i + 1] = out[i] + piece
    out[m:] = out[m] + integrate.cumulative_simpson(y[m:], x=x[m:], initial=0.0)
    return out


def picard_solve(spec: ProblemSpec, init: InitialData, r_max: float, iters: int,
                 n: int = 4001) -> tuple[RadialSolution, list[float]]:
    """Fixed-point iteration of the integral form of the radial system

        u(r) = u0 + ∫_0^r τ^{1-N} ∫_0^τ σ^{N-1} g(σ, v(σ)) dσ dτ

    (and its v counterpart) on a uniform grid of ``n`` points, starting
    from the constants (u0, v0). Returns the final iterate and the
    sup-norm change of every sweep.
    """
    require_valid(spec)
    require_initial(init)
    if not r_max > 0:
        raise SpecError("r_max must be > 0")
    N = spec.N
    r = np.linspace(0.0, r_max, n)
    w = r ** (N - 1)
    inv_w = np.zeros_like(r)
    inv_w[1:] = 1.0 / w[1:]
    u = np.full(n, init.u0)
    v = np.full(n, init.v0)
    du = np.zeros(n)
    dv = np.zeros(n)
    changes: list[float] = []
    growth = 0
    for _ in range(iters):
        with np.errstate(over="ignore", invalid="ignore"):
            # both fluxes integrate nonnegative data; clip Simpson round-off below zero
            du_new = np.maximum(_cumulative(w * spec.g(r, v), r), 0.0) * inv_w
            u_new = init.u0 + _cumulative(du_new, r)
            dv_new = np.maximum(_cumulative(w * spec.f(r, du_new), r), 0.0) * inv_w
            v_new = init.v0 + _cumulative(dv_new, r)
        change = float(max(np.max(np.abs(u_new - u)), np.max(np.abs(v_new - v)),
                           np.max(np.abs(du_new - du)), np.max(np.abs(dv_new - dv))))
        if not math.isfinite(change):
            raise PicardDivergence("Picard iterate overflowed")
        growth = growth + 1 if changes and change > changes[-1] else 0
        changes.append(change)
        if growth >= 3:
            raise PicardDivergence(f"sweep change grew for 3 consecutive sweeps (last {change:.3g})")
        u, v, du, dv = u_new, v_new, du_new, dv_new
    sol = RadialSolution.from_values(r, u, v, du, dv, spec=spec,
                                     info={"sweep_change": changes[-1] if changes else math.nan})
    return sol, changes


# -- rescaling --------------------------------------------------------------


def rescale_spec(spec: ProblemSpec, lam: float) -> ProblemSpec:
    """Spec solved by u(r) = ũ(r/λ) when ũ solves ``spec``."""
    dom = Ball(spec.R * lam) if spec.is_ball else spec.domain
    if spec.mode == "power":
        return replace(spec, domain=dom, g_coef=spec.g_coef * lam ** (-2.0 - spec.a),
                       f_coef=spec.f_coef * lam ** (spec.s - 2.0 - spec.b))
    changes = {"domain": dom, "f_coef": spec.f_coef * lam ** (-2.0 - spec.b)}
    if spec.h is not None:
        changes["h"] = spec.h.scaled(lam, 1.0)
    else:
        changes["f_coef"] *= lam**spec.s
    if spec.g_general is not None:
        g_r, g_t = spec.g_general
        changes["g_general"] = (g_r.scaled(1.0 / lam, lam**-2.0), g_t)
    else:
        changes["g_coef"] = spec.g_coef * lam ** (-2.0 - spec.a)
    return replace(spec, **changes)


def rescale_solution(sol: RadialSolution, lam: float, spec: ProblemSpec
                     ) -> tuple[RadialSolution, ProblemSpec]:
    if not lam > 0:
        raise SpecError(f"scale factor must be > 0, got {lam}")
    new_spec = rescale_spec(spec, lam)
    shift = math.log(lam)
    blow = sol.blowup
    if blow is not None:
        blow = replace(blow, R_est=blow.R_est * lam)
    out = RadialSolution(sol.r * lam, sol.log_u.copy(), sol.log_v.copy(), sol.log_du - shift,
                         sol.log_dv - shift, blowup=blow, spec=new_spec, info=dict(sol.info))
    if len(out) >= 5:
        out.residual_norm = residual(out, new_spec)
    return out, new_spec


# -- residual ---------------------------------------------------------------


def _d5(x, y):
    """First derivative at interior nodes 2..n-3 from 5-point Lagrange stencils."""
    n = len(x)
    idx = np.arange(2, n - 2)
    offs = (-2, -1, 0, 1, 2)
    X = np.stack([x[idx + o] for o in offs])
    Y = np.stack([y[idx + o] for o in offs])
    xc = X[2]
    w = np.zeros_like(X)
    for j in range(5):
        if j == 2:
            w[j] = sum(1.0 / (xc - X[k]) for k in range(5) if k != 2)
            continue
        num = np.ones_like(xc)
        den = np.ones_like(xc)
        for k in range(5):
            if k != j:
                den *= X[j] - X[k]
            if k not in (j, 2):
                num *= xc - X[k]
        w[j] = num / den
    return idx, np.sum(w * Y, axis=0)


def _usable(sol: RadialSolution):
    keep = (sol.r > 0) & np.isfinite(sol.log_u) & np.isfinite(sol.log_v) \
        & np.isfinite(sol.log_du) & np.isfinite(sol.log_dv)
    return np.nonzero(keep)[0]


def residual_components(sol: RadialSolution, spec: ProblemSpec) -> dict[str, np.ndarray]:
    """Pointwise relative residuals of the radial equations at interior nodes.

    ``u_eq``: |(r^{N-1}u')' - r^{N-1}g(r,v)| / r^{N-1}g(r,v), evaluated in
    logarithmic form; ``v_eq`` likewise. ``u_kin``/``v_kin`` compare the
    differentiated u, v with the stored u', v' through the scale-free
    ratios r u'/u, r v'/v.
    """
    keep = _usable(sol)
    if len(keep) < 5:
        raise SpecError("residual needs at least 5 grid points with r > 0")
    r = sol.r[keep]
    t = np.log(r)
    U, P, V, Q = sol.log_u[keep], sol.log_du[keep], sol.log_v[keep], sol.log_dv[keep]
    N = spec.N
    g_r, g_t = spec.g_parts()
    f_r, h = spec.f_parts()
    idx, dU = _d5(t, U)
    _, dV = _d5(t, V)
    lnFu = (N - 1) * t + P
    lnFv = (N - 1) * t + Q
    _, dFu = _d5(t, lnFu)
    _, dFv = _d5(t, lnFv)
    ti = t[idx]
    ln_gu = N * ti + g_r.log_values(ti) + g_t.log_values(V[idx])
    ln_fv = N * ti + f_r.log_values(ti) + h.log_values(P[idx])
    with np.errstate(over="ignore", invalid="ignore"):
        ru = np.abs(np.exp(lnFu[idx] - ln_gu) * dFu - 1.0)
        rv = np.abs(np.exp(lnFv[idx] - ln_fv) * dFv - 1.0)
        X = np.exp(ti + P[idx] - U[idx])
        Y = np.exp(ti + Q[idx] - V[idx])
    return {"r": r[idx], "u_eq": ru, "v_eq": rv,
            "u_kin": np.abs(dU - X) / (1.0 + X), "v_kin": np.abs(dV - Y) / (1.0 + Y)}


def residual(sol: RadialSolution, spec: ProblemSpec) -> float:
    comps = residual_components(sol, spec)
    return float(max(np.max(comps[k]) for k in ("u_eq", "v_eq", "u_kin", "v_kin")))


# -- sandwich bounds --------------------------------------------------------


def sandwich_margins(sol: RadialSolution, spec: ProblemSpec, init: InitialData) -> dict[str, float]:
    """Largest relative violation of each radial sandwich bound (0 = holds).

    Second derivatives are finite differences of ln u', ln v' on the grid.
    ``u2_*``:  (1+a)/(N+a) r^a v^p <= u'' <= r^a v^p, and the v'' analogue.
    ``du_*``:  g v0^p r^(a+1)/(N+a) <= u' <= g r^(a+1) v^p/(N+a).
    ``dv_upper``: v' <= f r^(b+1) h(u')/(N+b).
    ``dv_lower``: v' >= r^{1-N} ∫ τ^{N-1+b} h(lower bound of u') dτ.
    """
    if spec.mode not in ("power", "general_h"):
        raise SpecError("sandwich bounds need power-law radial weights")
    keep = _usable(sol)
    r = sol.r[keep]
    t = np.log(r)
    P, V, Q = sol.log_du[keep], sol.log_v[keep], sol.log_dv[keep]
    N, a, b = spec.N, spec.a, spec.b
    g_r, g_t = spec.g_parts()
    f_r, h = spec.f_parts()
    lnZ = t + g_r.log_values(t) + g_t.log_values(V) - P
    lnW = t + f_r.log_values(t) + h.log_values(P) - Q
    idx, dP = _d5(t, P)
    _, dQ = _d5(t, Q)
    # u''/(r^a g_t(v)) = (d ln u'/dt) / Z
    ru = dP / np.exp(lnZ[idx])
    rv = dQ / np.exp(lnW[idx])
    lo_u, lo_v = (1 + a) / (N + a), (1 + b) / (N + b)
    out = {
        "u2_lower": float(np.max(np.maximum(0.0, lo_u - ru) / lo_u)),
        "u2_upper": float(np.max(np.maximum(0.0, ru - 1.0))),
        "v2_lower": float(np.max(np.maximum(0.0, lo_v - rv) / lo_v)),
        "v2_upper": float(np.max(np.maximum(0.0, rv - 1.0))),
    }
    # u' >= lower bound, u' <= upper bound  <=>  Z >= N + a
    ln_du_lo = g_r.log_values(t) + t + float(g_t.log_value(math.log(init.v0))) - math.log(N + a)
    out["du_lower"] = float(np.max(np.maximum(0.0, -np.expm1(P - ln_du_lo))))
    out["du_upper"] = float(np.max(np.maximum(0.0, (N + a) * np.exp(-lnZ) - 1.0)))
    out["dv_upper"] = float(np.max(np.maximum(0.0, (N + b) * np.exp(-lnW) - 1.0)))
    if h.is_power:
        s = h.exponent
        k = g_r.coefficient * float(g_t(init.v0)) / (N + a)
        ev = (a + 1) * s + b + 1
        ln_dv_lo = (math.log(f_r.coefficient * h.coefficient) + s * math.log(k) + ev * t
                    - math.log(N + b + (a + 1) * s))
        out["dv_lower"] = float(np.max(np.maximum(0.0, -np.expm1(Q - ln_dv_lo))))
    return out
