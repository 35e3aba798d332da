"""Dormand-Prince 5(4) integration of a flow on S^3 with continuous angle lifts.

The state is the complex pair (z1, z2).  Python complex scalars are used in
the inner loop; for a 2-dimensional system that is much faster than numpy.

Besides the usual adaptive stepping this integrator

* renormalizes to |z| = 1 on every accepted step,
* accumulates continuous lifts of arg z1 and arg z2 from per-step phase
  increments, rejecting steps whose increment exceeds pi/2,
* stops when a lift has advanced by a prescribed amount, locating the
  crossing on the Hermite interpolant and polishing it with an exact sub-step.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from scipy.optimize import brentq

# Dormand-Prince tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# b - bhat (error weights), bhat the embedded 4th-order solution
E1 = 71 / 57600
E3 = -71 / 16695
E4 = 71 / 1920
E5 = -17253 / 339200
E6 = 22 / 525
E7 = -1 / 40

MAX_LIFT_STEP = math.pi / 2
FROZEN_RADIUS = 1e-300


class IntegrationError(RuntimeError):
    """Step-size collapse or horizon exhausted before the requested event."""


@dataclass
class FlowResult:
    ts: list = field(default_factory=list)
    z1: list = field(default_factory=list)
    z2: list = field(default_factory=list)
    lift1: list = field(default_factory=list)
    lift2: list = field(default_factory=list)
    event_hit: bool = False
    steps: int = 0
    rejected: int = 0
    max_renorm: float = 0.0

    @property
    def final(self):
        return self.ts[-1], self.z1[-1], self.z2[-1], self.lift1[-1], self.lift2[-1]


def _phase_lift(z):
    return cmath.phase(z) if abs(z) > FROZEN_RADIUS else 0.0


def _dopri_step(f, z1, z2, k1, h, sgn):
    hs = h * sgn
    a1, a2 = k1
    b1, b2 = f(z1 + hs * A21 * a1, z2 + hs * A21 * a2)
    c1, c2 = f(z1 + hs * (A31 * a1 + A32 * b1), z2 + hs * (A31 * a2 + A32 * b2))
    d1, d2 = f(
        z1 + hs * (A41 * a1 + A42 * b1 + A43 * c1),
        z2 + hs * (A41 * a2 + A42 * b2 + A43 * c2),
    )
    e1, e2 = f(
        z1 + hs * (A51 * a1 + A52 * b1 + A53 * c1 + A54 * d1),
        z2 + hs * (A51 * a2 + A52 * b2 + A53 * c2 + A54 * d2),
    )
    g1, g2 = f(
        z1 + hs * (A61 * a1 + A62 * b1 + A63 * c1 + A64 * d1 + A65 * e1),
        z2 + hs * (A61 * a2 + A62 * b2 + A63 * c2 + A64 * d2 + A65 * e2),
    )
    n1 = z1 + hs * (B1 * a1 + B3 * c1 + B4 * d1 + B5 * e1 + B6 * g1)
    n2 = z2 + hs * (B1 * a2 + B3 * c2 + B4 * d2 + B5 * e2 + B6 * g2)
    k7 = f(n1, n2)
    err1 = hs * (E1 * a1 + E3 * c1 + E4 * d1 + E5 * e1 + E6 * g1 + E7 * k7[0])
    err2 = hs * (E1 * a2 + E3 * c2 + E4 * d2 + E5 * e2 + E6 * g2 + E7 * k7[1])
    return n1, n2, k7, err1, err2


def _hermite(y0, y1, f0, f1, h, s):
    # cubic Hermite on [0, h] at fraction s
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


def _renorm(z1, z2):
    r = math.sqrt(abs(z1) ** 2 + abs(z2) ** 2)
    return z1 / r, z2 / r, abs(r - 1.0)


def integrate(
    f: Callable,
    z1: complex,
    z2: complex,
    *,
    rtol: float = 1e-10,
    atol: Optional[float] = None,
    direction: int = 1,
    t_max: float = math.inf,
    max_steps: int = 2_000_000,
    event_lift: Optional[int] = None,
    event_advance: float = 0.0,
    lifts0=None,
    record: bool = True,
    h0: Optional[float] = None,
) -> FlowResult:
    """Integrate dz/dt = f(z) (times ``direction``) from t = 0.

    ``event_lift`` (1 or 2) together with ``event_advance`` stops the run
    exactly when that lift has changed by ``event_advance`` from its start.
    Without an event the run stops at ``t_max``.
    """
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    if atol is None:
        atol = 1e-3 * rtol
    z1, z2 = complex(z1), complex(z2)
    z1, z2, dev = _renorm(z1, z2)
    if lifts0 is None:
        L1, L2 = _phase_lift(z1), _phase_lift(z2)
    else:
        L1, L2 = float(lifts0[0]), float(lifts0[1])
    target = None
    if event_lift is not None:
        if event_lift not in (1, 2):
            raise ValueError("event_lift must be 1 or 2")
        if event_advance == 0.0:
            raise ValueError("event_advance must be nonzero")
        target = (L1 if event_lift == 1 else L2) + event_advance
    elif not math.isfinite(t_max):
        raise ValueError("need either t_max or an event")

    out = FlowResult(max_renorm=dev)
    t = 0.0

    def push(t, a, b, l1, l2):
        if record or not out.ts:
            out.ts.append(t)
            out.z1.append(a)
            out.z2.append(b)
            out.lift1.append(l1)
            out.lift2.append(l2)
        else:
            out.ts[0], out.z1[0], out.z2[0], out.lift1[0], out.lift2[0] = t, a, b, l1, l2

    push(t, z1, z2, L1, L2)
    k1 = f(z1, z2)
    speed = math.sqrt(abs(k1[0]) ** 2 + abs(k1[1]) ** 2)
    if h0 is None:
        h = 0.01 / max(speed, 1e-8) * (rtol / 1e-10) ** 0.2
    else:
        h = h0
    h = min(h, t_max) if math.isfinite(t_max) else h
    h_min = 1e-14

    while True:
        if out.steps >= max_steps:
            raise IntegrationError(f"max_steps={max_steps} exhausted at t={t:.6g}, z=({z1:.6g}, {z2:.6g})")
        if t >= t_max:
            if target is not None:
                raise IntegrationError(f"t_max={t_max} reached before the lift event")
            break
        if t + h > t_max:
            h = t_max - t
        n1, n2, k7, e1, e2 = _dopri_step(f, z1, z2, k1, h, direction)
        s1 = atol + rtol * max(abs(z1), abs(n1))
        s2 = atol + rtol * max(abs(z2), abs(n2))
        err = max(abs(e1) / s1, abs(e2) / s2)
        dl1 = cmath.phase(n1 / z1) if abs(z1) > FROZEN_RADIUS and abs(n1) > FROZEN_RADIUS else 0.0
        dl2 = cmath.phase(n2 / z2) if abs(z2) > FROZEN_RADIUS and abs(n2) > FROZEN_RADIUS else 0.0
        if not (err <= 1.0) or abs(dl1) > MAX_LIFT_STEP or abs(dl2) > MAX_LIFT_STEP:
            out.rejected += 1
            if err != err:  # nan
                fac = 0.1
            elif err > 1.0:
                fac = max(0.1, 0.9 * err ** -0.2)
            else:
                fac = 0.5
            h *= fac
            if h < h_min:
                raise IntegrationError(f"step size collapse at t={t:.6g}, z=({z1:.6g}, {z2:.6g})")
            continue

        nl1, nl2 = L1 + dl1, L2 + dl2
        if target is not None:
            cur = L1 if event_lift == 1 else L2
            new = nl1 if event_lift == 1 else nl2
            if (new - target) * (cur - target) <= 0.0 and new != cur:
                s = _locate(f, z1, z2, k1, n1, n2, k7, h, direction, event_lift, cur, target)
                m1, m2, _, _, _ = _dopri_step(f, z1, z2, k1, s, direction)
                ml1 = L1 + (cmath.phase(m1 / z1) if abs(z1) > FROZEN_RADIUS else 0.0)
                ml2 = L2 + (cmath.phase(m2 / z2) if abs(z2) > FROZEN_RADIUS else 0.0)
                m1, m2, dev = _renorm(m1, m2)
                out.max_renorm = max(out.max_renorm, dev)
                out.steps += 1
                push(t + s, m1, m2, ml1, ml2)
                out.event_hit = True
                return out

        n1, n2, dev = _renorm(n1, n2)
        out.max_renorm = max(out.max_renorm, dev)
        t += h
        z1, z2, L1, L2 = n1, n2, nl1, nl2
        k1 = f(z1, z2)  # renormalized point, so no FSAL reuse
        out.steps += 1
        push(t, z1, z2, L1, L2)
        fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        h *= fac
    return out


def _locate(f, z1, z2, k1, n1, n2, k7, h, direction, which, cur, target):
    """Sub-step length s in (0, h] at which the chosen lift equals target."""
    zs = z1 if which == 1 else z2
    ze = n1 if which == 1 else n2
    fs = k1[which - 1] * direction
    fe = k7[which - 1] * direction

    def lift_at(s):
        z = _hermite(zs, ze, fs, fe, h, s / h)
        return cur + cmath.phase(z / zs) - target

    g0, g1 = lift_at(0.0), lift_at(h)
    if g0 == 0.0:
        s = 0.0
    elif g0 * g1 > 0:
        s = h  # interpolant misses by rounding; polish below
    else:
        s = brentq(lift_at, 0.0, h, xtol=1e-15 * max(h, 1.0), rtol=1e-15, maxiter=200)

    # polish with exact sub-steps (secant on the true lift)
    def exact(s):
        if s == 0.0:
            return cur - target
        m = _dopri_step(f, z1, z2, k1, s, direction)[which - 1]
        return cur + cmath.phase(m / zs) - target

    s_prev, g_prev = s, exact(s)
    if g_prev == 0.0:
        return s
    rate = (g1 - g0) / h if h > 0 else 1.0
    s_new = min(max(s - g_prev / rate, 0.0), h)
    for _ in range(6):
        g_new = exact(s_new)
        if g_new == 0.0 or abs(g_new) < 1e-15 or s_new == s_prev:
            return s_new
        slope = (g_new - g_prev) / (s_new - s_prev)
        if slope == 0.0:
            return s_new
        s_prev, g_prev = s_new, g_new
        s_new = min(max(s_new - g_new / slope, 0.0), h)
    return s_new
