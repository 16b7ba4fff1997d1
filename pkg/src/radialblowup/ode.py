"""Dormand-Prince 5(4) integrator with PI step-size control.

Small and dependency-free on purpose: the radial and phase-space systems
have 3-4 components, so the per-step bookkeeping of a general-purpose
solver dominates, and the callers need hooks that ``solve_ivp`` does not
offer (a state-dependent step cap and a stop test after every accepted
step).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import StiffnessError

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_AM = np.zeros((7, 7))
for _i, _row in enumerate(_A):
    _AM[_i, : len(_row)] = _row
# difference between the 5th and the embedded 4th order weights
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

SAFETY = 0.9
FAC_MIN, FAC_MAX = 0.2, 5.0
# PI gains (Gustafsson), scaled by the error order 5
K_I, K_P = 0.7 / 5, 0.4 / 5


@dataclass
class OdeResult:
    t: np.ndarray
    y: np.ndarray
    stopped: bool = False
    nfev: int = 0
    naccept: int = 0
    nreject: int = 0
    marks: list = field(default_factory=list)

    def at_marks(self):
        idx = np.array(self.marks, dtype=int)
        return self.t[idx], self.y[idx]


def _initial_step(fun, t0, y0, f0, direction, rtol, atol, max_step):
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, max_step)
    f1 = fun(t0 + direction * h0, y0 + direction * h0 * f0)
    if not np.all(np.isfinite(f1)):
        return h0 * 1e-3
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, max_step)


def dopri54(fun, t0, y0, t_end, *, rtol=1e-9, atol=1e-12, max_step=math.inf,
            first_step=None, step_cap=None, callback=None, t_eval=None,
            max_steps=2_000_000) -> OdeResult:
    """Integrate ``y' = fun(t, y)`` from ``t0`` to ``t_end``.

    ``step_cap(t, y)`` may bound the next step from the current state.
    ``callback(t, y)`` runs after every accepted step; a truthy return stops
    the integration. Steps are shortened to land exactly on ``t_eval``
    points; their indices in the output are listed in ``marks``.
    Non-finite stage values count as a rejected step. Raises
    :class:`StiffnessError` when the step size underflows.
    """
    y = np.array(y0, dtype=float)
    t = float(t0)
    direction = 1.0 if t_end >= t0 else -1.0
    landing = sorted(t_eval, reverse=direction < 0) if t_eval is not None else []
    landing = [x for x in landing if direction * (x - t) >= 0]

    ts, ys, marks = [t], [y.copy()], []
    if landing and landing[0] == t:
        marks.append(0)
        landing.pop(0)
    k = np.empty((7, y.size))
    k[0] = fun(t, y)
    nfev = 1
    if first_step is None:
        h = _initial_step(fun, t, y, k[0], direction, rtol, atol, max_step)
        nfev += 1
    else:
        h = first_step
    err_prev = 1e-4
    naccept = nreject = 0
    stopped = False

    while direction * (t_end - t) > 0:
        if naccept + nreject >= max_steps:
            raise StiffnessError(f"step budget of {max_steps} exhausted at t={t:.6g}")
        cap = max_step
        if step_cap is not None:
            cap = min(cap, step_cap(t, y))
        h = min(h, cap)
        min_step = 16 * np.spacing(max(abs(t), 1.0))
        if h < min_step:
            raise StiffnessError(f"step size underflow at t={t:.12g} (h={h:.3g})")
        land = False
        h_try = h
        if direction * (t + direction * h - t_end) > 0:
            h = abs(t_end - t)
        if landing and direction * (t + direction * h - landing[0]) >= 0:
            h = abs(landing[0] - t)
            land = True
        hs = direction * h

        for i in range(1, 7):
            yi = y + hs * (_AM[i, :i] @ k[:i])
            k[i] = fun(t + _C[i] * hs, yi)
        nfev += 6
        y_new = yi  # stage 7 argument is the 5th-order solution (FSAL)
        err_vec = hs * (_E @ k)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))

        if not (math.isfinite(err) and np.all(np.isfinite(y_new)) and np.all(np.isfinite(k[6]))):
            h *= 0.25
            nreject += 1
            continue
        if err <= 1.0:
            t = t + hs
            if direction * (t - t_end) > 0 or abs(t - t_end) <= 4 * np.spacing(max(abs(t_end), 1.0)):
                t = t_end
            if land:
                t = landing.pop(0)
            y = y_new
            k[0] = k[6]
            ts.append(t)
            ys.append(y.copy())
            if land:
                marks.append(len(ts) - 1)
            naccept += 1
            err = max(err, 1e-10)
            fac = SAFETY * err ** (-K_I) * err_prev ** K_P
            err_prev = err
            fac = min(FAC_MAX, max(FAC_MIN, fac))
            clipped = h < h_try
            h *= fac
            if clipped and fac >= 1.0:
                h = max(h, h_try)
            if callback is not None and callback(t, y):
                stopped = True
                break
        else:
            nreject += 1
            h *= max(FAC_MIN, SAFETY * err ** (-1 / 5))

    return OdeResult(t=np.array(ts), y=np.array(ys), stopped=stopped, nfev=nfev,
                     naccept=naccept, nreject=nreject, marks=marks)
