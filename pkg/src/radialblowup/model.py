"""Problem descriptors for the radial system

    Δu = g(|x|, v),   Δv = f(|x|, |∇u|)

posed on a ball B_R or on all of R^N.

In power mode ``g = g_coef |x|^a v^p`` and ``f = f_coef |x|^b |∇u|^s``.
``h`` replaces ``t^s`` by a general increasing nonlinearity and
``g_general`` replaces ``|x|^a v^p`` by a separable product
``g_r(|x|) g_t(v)``.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field
from typing import Any, Union

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from .errors import SpecError

POWER = "power-law"
TABULATED = "tabulated-monotone"


@dataclass(frozen=True)
class NonlinearityDesc:
    """A nonnegative nondecreasing scalar map φ on [0, ∞).

    ``power-law``: φ(t) = coefficient * t**exponent.
    ``tabulated-monotone``: monotone cubic (PCHIP) interpolation of
    ``samples``; beyond the last sample the map continues as a power law
    with ``tail_exponent`` (constant when it is None), below the first
    sample it is held constant.
    """

    kind: str = POWER
    coefficient: float = 1.0
    exponent: float = 1.0
    samples: tuple = ()
    tail_exponent: float | None = None

    @classmethod
    def power(cls, coefficient: float = 1.0, exponent: float = 1.0) -> "NonlinearityDesc":
        return cls(kind=POWER, coefficient=float(coefficient), exponent=float(exponent))

    @classmethod
    def tabulated(cls, args, values, tail_exponent: float | None = None) -> "NonlinearityDesc":
        samples = tuple((float(x), float(y)) for x, y in zip(args, values))
        tail = None if tail_exponent is None else float(tail_exponent)
        return cls(kind=TABULATED, samples=samples, tail_exponent=tail)

    @classmethod
    def sampled_from(cls, fun, args, tail_exponent: float | None = None) -> "NonlinearityDesc":
        args = np.asarray(args, dtype=float)
        return cls.tabulated(args, [fun(x) for x in args], tail_exponent)

    @property
    def is_power(self) -> bool:
        return self.kind == POWER

    def violations(self) -> list[tuple[str, str]]:
        out = []
        if self.kind == POWER:
            if not (math.isfinite(self.coefficient) and self.coefficient > 0):
                out.append(("coefficient", f"power-law coefficient must be > 0, got {self.coefficient}"))
            if not (math.isfinite(self.exponent) and self.exponent >= 0):
                out.append(("exponent_range", f"power-law exponent must be >= 0, got {self.exponent}"))
        elif self.kind == TABULATED:
            if len(self.samples) < 2:
                return [("samples", "tabulated nonlinearity needs at least 2 samples")]
            x = np.array([s[0] for s in self.samples])
            y = np.array([s[1] for s in self.samples])
            if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
                out.append(("samples", "non-finite sample"))
            if x[0] < 0:
                out.append(("samples", "sample arguments must be >= 0"))
            if np.any(np.diff(x) <= 0):
                out.append(("samples_order", "sample arguments must be strictly increasing"))
            if np.any(np.diff(y) < 0):
                out.append(("monotonicity", "sample values must be nondecreasing"))
            if np.any(y < 0):
                out.append(("sign", "sample values must be >= 0"))
            if self.tail_exponent is not None and not self.tail_exponent >= 0:
                out.append(("exponent_range", "tail exponent must be >= 0"))
        else:
            out.append(("kind", f"unknown nonlinearity kind {self.kind!r}"))
        return out

    # -- evaluation ---------------------------------------------------------

    @functools.cached_property
    def _table(self):
        x = np.array([s[0] for s in self.samples])
        y = np.array([s[1] for s in self.samples])
        return x, y, PchipInterpolator(x, y, extrapolate=False)

    @property
    def _tail(self) -> float:
        return 0.0 if self.tail_exponent is None else self.tail_exponent

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == POWER:
            if self.exponent == 0.0:
                return np.full_like(t, self.coefficient)[()]
            return (self.coefficient * t**self.exponent)[()]
        x, y, interp = self._table
        tc = np.clip(t, x[0], x[-1])
        out = np.asarray(interp(tc), dtype=float)
        hi = t > x[-1]
        if np.any(hi):
            out = np.where(hi, y[-1] * (np.where(hi, t, x[-1]) / x[-1]) ** self._tail, out)
        return np.maximum(out, 0.0)[()]

    def log_value(self, log_t: float) -> float:
        """ln φ(e^log_t); stays finite where φ itself would overflow."""
        if self.kind == POWER:
            if self.exponent == 0.0:
                return math.log(self.coefficient)
            return math.log(self.coefficient) + self.exponent * log_t
        x, y, _ = self._table
        if log_t > math.log(x[-1]):
            if y[-1] <= 0.0:
                return -math.inf
            return math.log(y[-1]) + self._tail * (log_t - math.log(x[-1]))
        val = float(self(math.exp(log_t)))
        return math.log(val) if val > 0 else -math.inf

    def log_values(self, log_t) -> np.ndarray:
        log_t = np.asarray(log_t, dtype=float)
        if self.kind == POWER:
            if self.exponent == 0.0:
                return np.full_like(log_t, math.log(self.coefficient))
            return math.log(self.coefficient) + self.exponent * log_t
        return np.array([self.log_value(x) for x in log_t.ravel()]).reshape(log_t.shape)

    def scaled(self, arg_scale: float, value_scale: float) -> "NonlinearityDesc":
        """The map t -> value_scale * φ(arg_scale * t)."""
        if self.kind == POWER:
            return NonlinearityDesc.power(self.coefficient * value_scale * arg_scale**self.exponent,
                                          self.exponent)
        return NonlinearityDesc.tabulated([x / arg_scale for x, _ in self.samples],
                                          [y * value_scale for _, y in self.samples],
                                          self.tail_exponent)

    @property
    def growth_exponent(self) -> float:
        """Asymptotic power-law order of φ at infinity."""
        return self.exponent if self.kind == POWER else self._tail

    def power_integral(self, x: float, q: float = 0.0, m: float = 1.0) -> float:
        """∫_0^x t**q * φ(t)**m dt  (q > -1 required)."""
        if x <= 0.0:
            return 0.0
        if self.kind == POWER:
            e = q + m * self.exponent
            return self.coefficient**m * x ** (e + 1.0) / (e + 1.0)
        xs, ys, _ = self._table
        t_last = xs[-1]
        if x <= t_last:
            cum = _table_cumulative(self, q, m)
            j = int(np.searchsorted(xs, x, side="right")) - 1
            if j < 0:
                return _table_quad(self, 0.0, x, q, m)
            if x == xs[j]:
                return float(cum[j])
            return float(cum[j]) + _table_quad(self, float(xs[j]), x, q, m)
        total = float(_table_cumulative(self, q, m)[-1])
        e = q + m * self._tail
        scale = ys[-1] ** m * t_last ** (-m * self._tail)
        if abs(e + 1.0) < 1e-14:
            return total + scale * math.log(x / t_last)
        return total + scale * (x ** (e + 1.0) - t_last ** (e + 1.0)) / (e + 1.0)

    def to_dict(self) -> dict:
        if self.kind == POWER:
            return {"kind": POWER, "coefficient": self.coefficient, "exponent": self.exponent}
        return {"kind": TABULATED, "samples": [list(s) for s in self.samples],
                "tail_exponent": self.tail_exponent}


def _table_quad(desc: NonlinearityDesc, lo: float, hi: float, q: float, m: float) -> float:
    xs = desc._table[0]
    fun = lambda t: float(desc(t)) ** m
    knots = [k for k in xs if lo < k < hi]
    if q < 0.0 and lo == 0.0:
        # algebraic endpoint weight t**q handled by QAWS; split at the knots after the first panel
        first = knots[0] if knots else hi
        val, _ = integrate.quad(fun, 0.0, first, weight="alg", wvar=(q, 0.0), limit=200,
                                epsabs=0.0, epsrel=1e-12)
        if first < hi:
            val += _table_quad(desc, first, hi, q, m)
        return val
    g = lambda t: t**q * fun(t)
    edges = [lo, *knots, hi]
    return float(sum(integrate.quad(g, u, w, limit=200, epsabs=0.0, epsrel=1e-12)[0]
                     for u, w in zip(edges[:-1], edges[1:])))


@functools.lru_cache(maxsize=256)
def _table_cumulative(desc: NonlinearityDesc, q: float, m: float) -> np.ndarray:
    """∫_0^{x_j} t**q φ(t)**m dt at every sample argument x_j."""
    xs = desc._table[0]
    cum = np.empty(len(xs))
    cum[0] = _table_quad(desc, 0.0, float(xs[0]), q, m) if xs[0] > 0 else 0.0
    for j in range(1, len(xs)):
        cum[j] = cum[j - 1] + _table_quad(desc, float(xs[j - 1]), float(xs[j]), q, m)
    return cum


@dataclass(frozen=True)
class Ball:
    R: float


@dataclass(frozen=True)
class EntireSpace:
    pass


Domain = Union[Ball, EntireSpace]


@dataclass(frozen=True)
class InitialData:
    u0: float = 1.0
    v0: float = 1.0


@dataclass(frozen=True)
class ProblemSpec:
    N: int = 3
    a: float = 0.0
    b: float = 0.0
    p: float | None = 1.0
    s: float | None = 1.0
    h: NonlinearityDesc | None = None
    g_general: tuple | None = None
    domain: Domain = field(default_factory=EntireSpace)
    g_coef: float = 1.0
    f_coef: float = 1.0

    @property
    def mode(self) -> str:
        if self.g_general is not None:
            return "general"
        if self.h is not None:
            return "general_h"
        return "power"

    @property
    def is_ball(self) -> bool:
        return isinstance(self.domain, Ball)

    @property
    def R(self) -> float | None:
        return self.domain.R if isinstance(self.domain, Ball) else None

    @property
    def ps(self) -> float:
        if self.p is None or self.s is None:
            raise SpecError("p*s is only defined in power mode")
        return self.p * self.s

    def g_parts(self) -> tuple[NonlinearityDesc, NonlinearityDesc]:
        """(radial weight, v-nonlinearity) with g(r, t) = g_r(r) * g_t(t)."""
        if self.g_general is not None:
            return self.g_general[0], self.g_general[1]
        return NonlinearityDesc.power(self.g_coef, self.a), NonlinearityDesc.power(1.0, self.p)

    def f_parts(self) -> tuple[NonlinearityDesc, NonlinearityDesc]:
        """(radial weight, gradient nonlinearity) with f(r, t) = f_r(r) * h(t)."""
        weight = NonlinearityDesc.power(self.f_coef, self.b)
        if self.h is not None:
            return weight, self.h
        return weight, NonlinearityDesc.power(1.0, self.s)

    def g(self, r, t):
        g_r, g_t = self.g_parts()
        return g_r(r) * g_t(t)

    def f(self, r, t):
        f_r, h = self.f_parts()
        return f_r(r) * h(t)

    def replace(self, **changes) -> "ProblemSpec":
        import dataclasses
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple = ()
    warnings: tuple = ()
    eligible: tuple = ()

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(code for code, _ in self.violations)

    def eligible_for(self, name: str) -> bool:
        return dict(self.eligible).get(name, False)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [{"code": c, "message": m} for c, m in self.violations],
            "warnings": [{"code": c, "message": m} for c, m in self.warnings],
            "eligible": dict(self.eligible),
        }


def _finite(x) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)


def divergence_condition_lhs(N, a, b, p, s) -> tuple[float, float]:
    """Both sides of the negative-divergence hypothesis of the entire-space rates."""
    lhs = p * (s - 2.0) * (s + a * s + b + 2.0) / (1.0 - p * s)
    return lhs, 2.0 * (N + a - 1.0)


def validate_problem(spec: ProblemSpec) -> ValidationReport:
    """Check the standing hypotheses; never raises."""
    bad: list[tuple[str, str]] = []
    warn: list[tuple[str, str]] = []

    if not isinstance(spec.N, (int, np.integer)) or isinstance(spec.N, bool):
        bad.append(("dimension", f"N must be an integer, got {spec.N!r}"))
    elif spec.N < 2:
        bad.append(("dimension", f"dimension N={spec.N} < 2"))
    for name in ("a", "b"):
        val = getattr(spec, name)
        if not _finite(val):
            bad.append(("weight_sign", f"{name} must be a finite real"))
        elif val < 0:
            bad.append(("weight_sign", f"weight exponent {name}={val} < 0"))
    for name in ("g_coef", "f_coef"):
        val = getattr(spec, name)
        if not (_finite(val) and val > 0):
            bad.append(("coefficient", f"{name} must be > 0"))

    mode = spec.mode
    if mode == "power":
        if spec.p is None or spec.s is None:
            bad.append(("mode", "power mode needs both p and s"))
    elif mode == "general_h":
        if spec.p is None:
            bad.append(("mode", "general-h mode needs p"))
        if spec.s is not None:
            bad.append(("mode", "give either s or h, not both"))
    else:
        if spec.s is not None and spec.h is not None:
            bad.append(("mode", "give either s or h, not both"))
        if spec.s is None and spec.h is None:
            bad.append(("mode", "general mode needs s or h for the gradient term"))
        if spec.p is not None:
            bad.append(("mode", "p is ignored when g_general is given; set p=None"))
        if not (isinstance(spec.g_general, tuple) and len(spec.g_general) == 2):
            bad.append(("mode", "g_general must be a (radial, value) pair"))
        else:
            for d in spec.g_general:
                bad.extend(d.violations())

    if spec.p is not None:
        if not _finite(spec.p) or spec.p <= 0:
            bad.append(("exponent_range", f"p must be > 0, got {spec.p}"))
    if spec.s is not None:
        if not _finite(spec.s) or spec.s < 1:
            bad.append(("exponent_range", f"s must be >= 1, got {spec.s}"))
        elif spec.s == 1:
            warn.append(("s_equals_one", "s = 1 admitted (entire-space hypothesis is s >= 1)"))
    if spec.h is not None:
        bad.extend(spec.h.violations())

    if isinstance(spec.domain, Ball):
        if not (_finite(spec.domain.R) and spec.domain.R > 0):
            bad.append(("radius", f"ball radius must be > 0, got {spec.domain.R}"))
    elif not isinstance(spec.domain, EntireSpace):
        bad.append(("domain", f"unknown domain {spec.domain!r}"))

    eligible: dict[str, bool] = {}
    ok = not bad
    power = ok and mode == "power"
    eligible["ball_regimes"] = ok and spec.is_ball and mode in ("power", "general_h")
    eligible["v_blowup_conditions"] = ok and spec.is_ball
    eligible["entire_existence"] = power and not spec.is_ball
    hyp = power and not spec.is_ball and spec.p < 1 and spec.ps < 1
    eligible["entire_asymptotics"] = hyp
    if hyp:
        lhs, rhs = divergence_condition_lhs(spec.N, spec.a, spec.b, spec.p, spec.s)
        eligible["divergence_condition"] = lhs <= rhs
        if lhs == rhs:
            warn.append(("divergence_equality", "divergence condition holds with equality"))
    else:
        eligible["divergence_condition"] = False
    if power and spec.ps == 1:
        warn.append(("borderline_ps", "p*s = 1: global existence without power-law rates"))

    return ValidationReport(ok=ok, violations=tuple(bad), warnings=tuple(warn),
                            eligible=tuple(sorted(eligible.items())))


def require_valid(spec: ProblemSpec) -> ValidationReport:
    report = validate_problem(spec)
    if not report.ok:
        msg = "; ".join(m for _, m in report.violations)
        raise SpecError(f"invalid problem: {msg}", report.violations)
    return report


def require_initial(init: InitialData, floor: float = 1e-12) -> None:
    for name in ("u0", "v0"):
        val = getattr(init, name)
        if not _finite(val) or val <= 0:
            raise SpecError(f"{name} must be > 0, got {val}", [("initial_data", name)])
        if val < floor:
            raise SpecError(f"{name}={val} below {floor}: degenerate initial datum",
                            [("initial_data", name)])


# -- JSON documents -----------------------------------------------------------

_KEYS = {"N", "a", "b", "p", "s", "domain", "u0", "v0"}


def problem_from_dict(doc: dict[str, Any]) -> tuple[ProblemSpec, InitialData]:
    if not isinstance(doc, dict):
        raise SpecError("problem document must be a JSON object")
    unknown = sorted(set(doc) - _KEYS)
    if unknown:
        raise SpecError(f"unknown field(s): {', '.join(unknown)}", [("unknown_field", k) for k in unknown])
    dom = doc.get("domain", "entire")
    if dom == "entire":
        domain: Domain = EntireSpace()
    elif isinstance(dom, dict) and set(dom) == {"ball"}:
        domain = Ball(float(dom["ball"]))
    else:
        raise SpecError('domain must be "entire" or {"ball": R}', [("domain", str(dom))])
    try:
        N = doc.get("N", 3)
        if isinstance(N, float) and N.is_integer():
            N = int(N)
        spec = ProblemSpec(N=N, a=float(doc.get("a", 0.0)), b=float(doc.get("b", 0.0)),
                           p=float(doc.get("p", 1.0)), s=float(doc.get("s", 1.0)), domain=domain)
        init = InitialData(float(doc.get("u0", 1.0)), float(doc.get("v0", 1.0)))
    except (TypeError, ValueError) as exc:
        raise SpecError(f"malformed field: {exc}") from exc
    return spec, init


def load_problem(path) -> tuple[ProblemSpec, InitialData]:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path}: not valid JSON ({exc})") from exc
    return problem_from_dict(doc)


def problem_to_dict(spec: ProblemSpec, init: InitialData | None = None) -> dict[str, Any]:
    if spec.mode != "power":
        raise SpecError("only power-mode problems have a JSON document form")
    doc: dict[str, Any] = {"N": spec.N, "a": spec.a, "b": spec.b, "p": spec.p, "s": spec.s,
                           "domain": {"ball": spec.R} if spec.is_ball else "entire"}
    if init is not None:
        doc.update(u0=init.u0, v0=init.v0)
    return doc
