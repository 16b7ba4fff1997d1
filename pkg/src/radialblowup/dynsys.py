"""Autonomous form of the radial system on R^N.

With t = ln r and

    X = r u'/u,  Y = r v'/v,  Z = r^(a+1) v^p / u',  W = r^(b+1) u'^s / v'

the power-law system becomes

    X_t = X (Z - (N-2) - X)
    Y_t = Y (W - (N-2) - Y)
    Z_t = Z (N + a + pY - Z)
    W_t = W (sZ + N - sN + s + b - W)

The last three equations are closed, cooperative for nonnegative states,
and have exactly two equilibria with Z >= N+a, W >= N+b: ξ1 at the origin
behaviour of a radial solution and ξ2 (for ps < 1) at its behaviour at
infinity.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy import optimize

from .errors import IneligibleError, NumericalFailure, SpecError
from .model import ProblemSpec, divergence_condition_lhs
from .ode import dopri54

XI1, XI2 = "xi1", "xi2"
CONVERGED_XI1, CONVERGED_XI2 = "converged-to-xi1", "converged-to-xi2"
CYCLE, UNDECIDED = "cycle-suspected", "undecided"

EQ_TOL = 1e-4
RECUR_TOL = 1e-3
MIN_SPAN = 30.0


@dataclass(frozen=True)
class DynParams:
    N: int = 3
    a: float = 0.0
    b: float = 0.0
    p: float = 0.5
    s: float = 1.0

    @classmethod
    def from_spec(cls, spec: ProblemSpec) -> "DynParams":
        if spec.mode != "power":
            raise IneligibleError("the autonomous system needs power-law nonlinearities")
        return cls(spec.N, spec.a, spec.b, spec.p, spec.s)

    @property
    def ps(self) -> float:
        return self.p * self.s

    def validate(self) -> None:
        bad = []
        if not (isinstance(self.N, (int, np.integer)) and self.N >= 2):
            bad.append(("dimension", f"N must be an integer >= 2, got {self.N}"))
        if not (self.a >= 0 and self.b >= 0):
            bad.append(("weight_sign", "a, b must be >= 0"))
        if not (self.p > 0 and self.s >= 1):
            bad.append(("exponent_range", "need p > 0 and s >= 1"))
        if bad:
            raise SpecError("; ".join(m for _, m in bad), bad)

    def require_subcritical(self) -> None:
        self.validate()
        if not self.ps < 1:
            raise IneligibleError(f"ps = {self.ps:.6g} >= 1: the interior equilibrium does not exist")


@dataclass(frozen=True)
class DynState:
    X: float
    Y: float
    Z: float
    W: float

    @property
    def xi(self) -> np.ndarray:
        return np.array([self.Y, self.Z, self.W])


@dataclass
class DynTrajectory:
    t: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    W: np.ndarray
    X: np.ndarray | None = None
    params: DynParams | None = None

    def __len__(self) -> int:
        return len(self.t)

    @property
    def xi(self) -> np.ndarray:
        """States as an (n, 3) array of (Y, Z, W)."""
        return np.column_stack([self.Y, self.Z, self.W])

    def state(self, i: int) -> DynState:
        X = math.nan if self.X is None else float(self.X[i])
        return DynState(X, float(self.Y[i]), float(self.Z[i]), float(self.W[i]))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "Y", "Z", "W"])
            for row in zip(self.t, self.Y, self.Z, self.W):
                w.writerow([repr(float(x)) for x in row])


@dataclass(frozen=True)
class Equilibrium:
    point: tuple
    label: str

    def to_dict(self) -> dict:
        return {"label": self.label, "Y": self.point[0], "Z": self.point[1], "W": self.point[2]}


@dataclass(frozen=True)
class StabilityReport:
    jacobian: np.ndarray
    alpha: float
    beta: float
    gamma: float
    constant_term: float  # (1 - ps) γ
    routh_margin: float
    stable: bool
    eigenvalues: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def decay_rate(self) -> float:
        """Slowest linear decay rate min |Re λ| towards ξ2."""
        return float(np.min(-self.eigenvalues.real))

    def to_dict(self) -> dict:
        return {
            "jacobian": self.jacobian.tolist(),
            "alpha": self.alpha, "beta": self.beta, "gamma": self.gamma,
            "constant_term": self.constant_term, "routh_margin": self.routh_margin,
            "stable": self.stable,
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
        }


@dataclass(frozen=True)
class HirschReport:
    cooperative: bool
    min_offdiagonal: float
    div_max: float
    div_negative: bool
    divergence_condition: bool
    lhs: float
    rhs: float
    corners: tuple = ()
    warnings: tuple = ()

    def to_dict(self) -> dict:
        return {"cooperative": self.cooperative, "min_offdiagonal": self.min_offdiagonal,
                "div_max": self.div_max, "div_negative": self.div_negative,
                "divergence_condition": self.divergence_condition, "lhs": self.lhs,
                "rhs": self.rhs, "warnings": list(self.warnings)}


# -- the field ----------------------------------------------------------------


def vector_field(xi, params: DynParams) -> np.ndarray:
    """H(Y, Z, W); ``xi`` may be a single state or an (n, 3) array."""
    xi = np.asarray(xi, dtype=float)
    Y, Z, W = xi[..., 0], xi[..., 1], xi[..., 2]
    N, a, b, p, s = params.N, params.a, params.b, params.p, params.s
    return np.stack([Y * (W - (N - 2) - Y),
                     Z * (N + a + p * Y - Z),
                     W * (s * Z + N - s * N + s + b - W)], axis=-1)


def divergence(xi, params: DynParams):
    """div H, affine in (Y, Z, W)."""
    xi = np.asarray(xi, dtype=float)
    Y, Z, W = xi[..., 0], xi[..., 1], xi[..., 2]
    N, a, b, p, s = params.N, params.a, params.b, params.p, params.s
    return -W + (s - 2) * Z + (p - 2) * Y + 2 + a + N * (1 - s) + s + b


def jacobian(params: DynParams, xi=None) -> np.ndarray:
    """Jacobian of H at ``xi`` (at ξ2 when omitted)."""
    if xi is None:
        xi = equilibria(params)[1].point
    Y, Z, W = (float(x) for x in xi)
    N, a, b, p, s = params.N, params.a, params.b, params.p, params.s
    return np.array([
        [W - (N - 2) - 2 * Y, 0.0, Y],
        [p * Z, N + a + p * Y - 2 * Z, 0.0],
        [0.0, s * W, s * Z + N - s * N + s + b - 2 * W],
    ])


def linearization_matrix(xi, params: DynParams) -> np.ndarray:
    """The structured matrix [[-Y,0,Y],[pZ,-Z,0],[0,sW,-W]] (Jacobian at ξ2)."""
    Y, Z, W = (float(x) for x in xi)
    return np.array([[-Y, 0.0, Y], [params.p * Z, -Z, 0.0], [0.0, params.s * W, -W]])


def equilibria(params: DynParams) -> tuple[Equilibrium, Equilibrium]:
    params.require_subcritical()
    N, a, b, p, s = params.N, params.a, params.b, params.p, params.s
    k = (b + s * (1 + a + 2 * p)) / (1 - p * s)
    xi1 = Equilibrium((0.0, float(N + a), float(N + s * (a + 1) + b)), XI1)
    xi2 = Equilibrium((2.0 + k, N + a + p * (2.0 + k), N + k), XI2)
    return xi1, xi2


def box_bounds(params: DynParams) -> tuple[np.ndarray, np.ndarray]:
    """Corners (ξ1, ξ2) of the invariant box of radial trajectories."""
    xi1, xi2 = equilibria(params)
    return np.array(xi1.point), np.array(xi2.point)


def char_poly(M, ps: float) -> tuple[float, float, float]:
    """(α, β, (1-ps)γ) for a matrix of the structured form."""
    M = np.asarray(M, dtype=float)
    Y, Z, W = -M[0, 0], -M[1, 1], -M[2, 2]
    return Y + Z + W, Y * Z + Z * W + Y * W, (1.0 - ps) * Y * Z * W


def charpoly_by_interpolation(M, nodes=None) -> tuple[float, float, float]:
    """Coefficients of det(λI - M) - λ^3 from three evaluations of the determinant.

    Default nodes are ρ(-1, 0, 1) with ρ the largest diagonal entry in
    modulus, which keeps the Vandermonde solve well scaled.
    """
    M = np.asarray(M, dtype=float)
    if nodes is None:
        rho = max(1.0, float(np.max(np.abs(np.diag(M)))))
        nodes = (-rho, 0.0, rho)
    lam = np.asarray(nodes, dtype=float)
    rhs = np.array([np.linalg.det(x * np.eye(3) - M) - x**3 for x in lam])
    V = np.vstack([lam**2, lam, np.ones_like(lam)]).T
    return tuple(float(c) for c in np.linalg.solve(V, rhs))


def is_asymptotically_stable(params: DynParams) -> StabilityReport:
    """Routh-Hurwitz test at ξ2 with an eigenvalue cross-check."""
    xi2 = equilibria(params)[1].point
    M = linearization_matrix(xi2, params)
    alpha, beta, const = char_poly(M, params.ps)
    gamma = xi2[0] * xi2[1] * xi2[2]
    margin = alpha * beta - const
    eig = np.linalg.eigvals(M)
    rh = alpha > 0 and const > 0 and margin > 0
    stable = bool(np.all(eig.real < 0))
    if rh != stable:
        raise NumericalFailure(f"Routh-Hurwitz ({rh}) and eigenvalues ({stable}) disagree")
    return StabilityReport(M, alpha, beta, gamma, const, margin, stable, eig)


def check_hirsch_conditions(params: DynParams, samples: int = 5) -> HirschReport:
    """Cooperativity and sign of div H on the box [[ξ1, ξ2]], plus the divergence hypothesis.

    div H is affine, so its maximum over the box sits at a corner.
    """
    lo, hi = box_bounds(params)
    corners = [np.where(np.array(m, bool), hi, lo) for m in product((0, 1), repeat=3)]
    divs = [float(divergence(c, params)) for c in corners]
    grid = np.stack(np.meshgrid(*[np.linspace(l, h, samples) for l, h in zip(lo, hi)],
                                indexing="ij"), axis=-1).reshape(-1, 3)
    off = min(float(np.min([jacobian(params, x)[i, j] for x in grid]))
              for i, j in ((0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)))
    lhs, rhs = divergence_condition_lhs(params.N, params.a, params.b, params.p, params.s)
    warnings = []
    if lhs == rhs:
        warnings.append("divergence condition holds with equality")
    div_max = max(divs)
    if (lhs <= rhs) and not div_max < 0:
        warnings.append("divergence condition holds but div H >= 0 at a corner of the box")
    return HirschReport(cooperative=off >= 0, min_offdiagonal=off, div_max=div_max,
                        div_negative=div_max < 0, divergence_condition=lhs <= rhs,
                        lhs=lhs, rhs=rhs, corners=tuple(zip(map(tuple, corners), divs)),
                        warnings=tuple(warnings))


def origin_limit_W(params: DynParams) -> float:
    """Root ℓ > N-1 of ℓ (1 - (N-1)/ℓ) = s(N+a) - s(N-1) + b + 1 (limit of W as r -> 0)."""
    params.validate()
    N, a, b, s = params.N, params.a, params.b, params.s
    rhs = s * (N + a) - s * (N - 1) + b + 1
    return optimize.brentq(lambda l: l - (N - 1) - rhs, N - 1, N - 1 + 10 * (rhs + 1), xtol=1e-14)


# -- trajectories ---------------------------------------------------------------


def to_dynamical(sol, spec: ProblemSpec | None = None) -> DynTrajectory:
    """Pointwise (X, Y, Z, W) of a radial solution, parametrised by t = ln r."""
    spec = spec or sol.spec
    if spec is None:
        raise SpecError("to_dynamical needs the ProblemSpec of the solution")
    keep = np.asarray(sol.r) > 0
    r = np.asarray(sol.r)[keep]
    U, P, V, Q = (np.asarray(x)[keep] for x in (sol.log_u, sol.log_du, sol.log_v, sol.log_dv))
    for name, arr in (("u", U), ("u'", P), ("v", V), ("v'", Q)):
        if not np.all(np.isfinite(arr)):
            raise NumericalFailure(f"{name} vanishes or overflows on the grid; ratios undefined")
    t = np.log(r)
    g_r, g_t = spec.g_parts()
    f_r, h = spec.f_parts()
    X = np.exp(t + P - U)
    Y = np.exp(t + Q - V)
    Z = np.exp(t + g_r.log_values(t) + g_t.log_values(V) - P)
    W = np.exp(t + f_r.log_values(t) + h.log_values(P) - Q)
    params = DynParams.from_spec(spec) if spec.mode == "power" else None
    return DynTrajectory(t, Y, Z, W, X, params)


def flow(params: DynParams, xi0, t_span, t_eval=None, rtol: float = 1e-10,
         atol: float = 1e-12, max_step: float = 0.25) -> DynTrajectory:
    """Integrate ξ_t = H(ξ) from ``xi0``."""
    params.validate()
    xi0 = np.asarray(xi0, dtype=float)
    if xi0.shape != (3,) or np.any(xi0 < 0):
        raise SpecError("initial state must be three nonnegative numbers")
    t0, t1 = float(t_span[0]), float(t_span[1])
    res = dopri54(lambda t, y: vector_field(y, params), t0, xi0, t1, rtol=rtol, atol=atol,
                  max_step=max_step, t_eval=t_eval)
    y = np.maximum(res.y, 0.0)  # the faces {Y=0}, ... are invariant; clip round-off
    t = res.t
    if t_eval is not None:
        t, y = res.at_marks()
    return DynTrajectory(np.asarray(t), y[:, 0], y[:, 1], y[:, 2], None, params)


def box_violation(traj: DynTrajectory, params: DynParams | None = None) -> float:
    """Largest excursion of the trajectory outside the box [ξ1, ξ2]."""
    params = params or traj.params
    lo, hi = box_bounds(params)
    xi = traj.xi
    return float(max(np.max(lo - xi), np.max(xi - hi), 0.0))


def omega_limit(traj: DynTrajectory, params: DynParams | None = None, tol: float = EQ_TOL,
                recur_tol: float = RECUR_TOL, min_span: float = MIN_SPAN) -> str:
    """Classify the tail of a trajectory.

    Converged: the final state is within ``tol`` (sup norm) of an
    equilibrium. Cycle suspected: the
    final state returns within ``recur_tol`` of an earlier tail state after
    an excursion of at least ten times that distance.
    """
    span = float(traj.t[-1] - traj.t[0])
    if span < min_span:
        raise SpecError(f"trajectory spans {span:.3g} in t, need >= {min_span}")
    params = params or traj.params
    xi = traj.xi
    end = xi[-1]
    if params is not None and params.ps < 1:
        for eq in equilibria(params):
            target = np.array(eq.point)
            if np.max(np.abs(end - target)) < tol:
                return CONVERGED_XI1 if eq.label == XI1 else CONVERGED_XI2
    # recurrence in the second half of the trajectory
    tail = xi[traj.t >= traj.t[0] + 0.5 * span]
    if len(tail) >= 3:
        d_end = np.max(np.abs(tail - tail[-1]), axis=1)
        close = np.nonzero(d_end[:-1] < recur_tol)[0]
        for i in close:
            if np.max(d_end[i:]) > 10 * recur_tol:
                return CYCLE
    return UNDECIDED


def distance_to(traj: DynTrajectory, point) -> np.ndarray:
    return np.max(np.abs(traj.xi - np.asarray(point, dtype=float)), axis=1)
