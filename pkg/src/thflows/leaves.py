"""Leaf tracing, first integrals, asymptotics and the Leau-Fatou flower."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .forms import PointS3, coords_of
from .models import FoliationSpec, SpecError, flow_function
from .ode import IntegrationError, integrate

TWO_PI = 2 * math.pi


class TransversalityError(IntegrationError):
    """The traced leaf left the region where the disc is a surface of section."""


@dataclass(frozen=True)
class LeafTrace:
    """ODE trajectory with continuous lifts of theta1, theta2.

    Arrays are stored column-wise; ``samples`` gives the row view.
    """

    spec: FoliationSpec
    ode_tol: float
    t: np.ndarray
    z1: np.ndarray
    z2: np.ndarray
    theta1_lift: np.ndarray
    theta2_lift: np.ndarray
    max_renorm: float = 0.0
    direction: int = 1

    def __len__(self):
        return len(self.t)

    @property
    def samples(self):
        return [
            (float(t), PointS3(a, b), float(l1), float(l2))
            for t, a, b, l1, l2 in zip(self.t, self.z1, self.z2, self.theta1_lift, self.theta2_lift)
        ]

    @property
    def r1(self):
        return np.abs(self.z1)

    @property
    def r2(self):
        return np.abs(self.z2)

    def point(self, k) -> PointS3:
        return PointS3(self.z1[k], self.z2[k])


ODE_TOL_RANGE = (1e-12, 1e-6)


def _check_tol(ode_tol):
    lo, hi = ODE_TOL_RANGE
    if not (lo <= ode_tol <= hi):
        raise ValueError(f"ode_tol must lie in [{lo:g}, {hi:g}], got {ode_tol}")


def trace_leaf(
    spec: FoliationSpec,
    p0,
    t_max: Optional[float] = None,
    ode_tol: float = 1e-10,
    *,
    until_lift: Optional[tuple] = None,
    direction: int = 1,
    max_steps: int = 2_000_000,
) -> LeafTrace:
    """Trace the leaf through p0 along the kernel field Y.

    Stops at ``t_max`` or, if ``until_lift=(j, delta)`` is given, when the
    theta_j lift has advanced by delta.  Seeds on a Hopf circle are fine:
    the vanishing coordinate stays exactly zero and its lift stays frozen.
    """
    _check_tol(ode_tol)
    if t_max is None and until_lift is None:
        raise ValueError("give t_max or until_lift")
    z1, z2 = coords_of(p0)
    kw = {}
    if until_lift is not None:
        kw = {"event_lift": int(until_lift[0]), "event_advance": float(until_lift[1])}
    res = integrate(
        flow_function(spec), complex(z1), complex(z2),
        rtol=ode_tol, direction=direction,
        t_max=math.inf if t_max is None else float(t_max),
        max_steps=max_steps, **kw,
    )
    if until_lift is not None and not res.event_hit:
        raise IntegrationError("requested lift advance not reached")
    return LeafTrace(
        spec, ode_tol,
        np.asarray(res.ts) * direction,
        np.asarray(res.z1), np.asarray(res.z2),
        np.asarray(res.lift1), np.asarray(res.lift2),
        res.max_renorm, direction,
    )


# ---------------------------------------------------------------------------
# first integrals


@dataclass(frozen=True)
class LeafConstants:
    """(l0, theta0) for the parametric family, (c1, c2) for the discrete one.

    u + iv = (1-a)/a is recomputed from ``a``.  Angle-dependent constants use
    the lifts passed to :func:`leaf_constants` (principal angles by default);
    ``c2`` is additionally reported mod 2 pi as ``c2_mod``.
    """

    family: str
    a: complex = 0j
    l0: float = math.nan
    theta0: float = math.nan
    c1: float = math.nan
    c2: float = math.nan

    @property
    def u(self):
        return ((1 - self.a) / self.a).real

    @property
    def v(self):
        return ((1 - self.a) / self.a).imag

    @property
    def c2_mod(self):
        return self.c2 % TWO_PI

    def vector(self):
        if self.family == "parametric":
            return np.array([self.l0, self.theta0])
        return np.array([self.c1, self.c2])


def _parametric_constants(a, z1, z2, th1, th2):
    w = (1 - a) / a
    u, v = w.real, w.imag
    r1 = np.abs(z1)
    r2 = np.abs(z2)
    l0 = np.log(r2) - u * np.log(r1) + v * th1
    theta0 = th2 - u * th1 - v * np.log(r1)
    return l0, theta0


def _discrete_constants(n, lam, z1, z2, th2):
    q = z1 / z2**n
    r2 = np.abs(z2)
    return np.log(r2) - q.real / lam, th2 - q.imag / lam


def _lambda_zero_a(n):
    return n / (n + 1)


def leaf_constants(spec: FoliationSpec, p, lifts=None) -> LeafConstants:
    """First integrals of the leaf through p.

    For omega_n^lambda (lambda > 0) the complex leaves are
    log z2 - (z1/z2^n)/lambda = const, which at lambda = 1 is
    c1 = log r2 - x, c2 = theta2 - y.  At lambda = 0 the form is a multiple
    of omega^{n/(n+1)}, and the parametric constants are returned.
    """
    z1, z2 = coords_of(p)
    z1, z2 = complex(z1), complex(z2)
    th1, th2 = (cmath.phase(z1), cmath.phase(z2)) if lifts is None else lifts
    if spec.is_parametric or spec.lam == 0.0:
        a = spec.a if spec.is_parametric else complex(_lambda_zero_a(spec.n))
        r1 = abs(z1)
        if not (0.0 < r1 < 1.0):
            raise SpecError("leaf constants are undefined on the Hopf circles")
        l0, theta0 = _parametric_constants(a, z1, z2, th1, th2)
        return LeafConstants("parametric", a=a, l0=float(l0), theta0=float(theta0))
    if z2 == 0:
        raise SpecError("leaf constants are undefined on the Hopf circle z2 = 0")
    c1, c2 = _discrete_constants(spec.n, spec.lam, z1, z2, th2)
    return LeafConstants("discrete", c1=float(c1), c2=float(c2) if lifts is not None else float(c2) % TWO_PI)


def trace_constants(trace: LeafTrace) -> np.ndarray:
    """(len, 2) array of leaf constants along a trace, using the lifts."""
    spec = trace.spec
    if spec.is_parametric or spec.lam == 0.0:
        a = spec.a if spec.is_parametric else complex(_lambda_zero_a(spec.n))
        c = _parametric_constants(a, trace.z1, trace.z2, trace.theta1_lift, trace.theta2_lift)
    else:
        c = _discrete_constants(spec.n, spec.lam, trace.z1, trace.z2, trace.theta2_lift)
    return np.stack(c, axis=-1)


def conserved_drift(trace: LeafTrace) -> float:
    """max_k |C(sample_k) - C(sample_0)| over both constants."""
    if len(trace) < 2:
        return 0.0
    c = trace_constants(trace)
    return float(np.max(np.abs(c - c[0])))


# ---------------------------------------------------------------------------
# asymptotics and slopes

U_ZERO, U_POS, U_NEG = "U_ZERO", "U_POS", "U_NEG"
CASE_TOL = 1e-12


@dataclass(frozen=True)
class AsymptoticCase:
    case: str
    u: float
    v: float
    real_a: bool = False


def asymptotic_case(a: complex) -> AsymptoticCase:
    """Sign of u = Re((1-a)/a), read off from |a - 1/2| against 1/2."""
    spec = FoliationSpec.parametric(a)
    w = (1 - spec.a) / spec.a
    if spec.a.imag == 0.0:
        return AsymptoticCase(U_POS, w.real, 0.0, real_a=True)
    d = abs(spec.a - 0.5) - 0.5
    if abs(d) <= CASE_TOL:
        case = U_ZERO
    elif d < 0:
        case = U_POS
    else:
        case = U_NEG
    return AsymptoticCase(case, w.real, w.imag)


def slope_check(a: float, trace: LeafTrace):
    """(torus_drift, slope) for a real-a trace.

    The slope is the least-squares coefficient of theta1 regressed on
    theta2, i.e. d theta1 / d theta2, which equals a/(1-a).
    """
    if not trace.spec.is_parametric or trace.spec.a.imag != 0.0:
        raise SpecError("slope_check needs a parametric spec with real a")
    if abs(trace.spec.a.real - float(a)) > 1e-15:
        raise SpecError("trace was computed for a different a")
    span = abs(trace.theta1_lift[-1] - trace.theta1_lift[0])
    if span < TWO_PI * (1 - 1e-12):
        raise ValueError("trace too short: theta1 must advance by at least 2 pi")
    r1 = trace.r1
    drift = float(np.max(np.abs(r1 - r1[0])))
    x = trace.theta2_lift - trace.theta2_lift.mean()
    y = trace.theta1_lift - trace.theta1_lift.mean()
    slope = float(np.dot(x, y) / np.dot(x, x))
    return drift, slope


# ---------------------------------------------------------------------------
# the discrete family on the disc transversal


def solve_r2(n: int, x: float, y: float, tol: float = 1e-15) -> float:
    """Positive root of (x^2 + y^2) r^{2n} + r^2 = 1.

    The left side is increasing and convex on (0, 1], so Newton started at
    r = 1 decreases monotonically to the root; a bisection bracket guards it.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if tol < 1e-15:
        raise ValueError("tol must be >= 1e-15")
    s = float(x) ** 2 + float(y) ** 2
    if s == 0.0:
        return 1.0
    lo, hi = 0.0, 1.0
    r = 1.0
    for _ in range(400):
        r2n = r ** (2 * n)
        F = s * r2n + r * r - 1.0
        if abs(F) < tol:
            return r
        if F > 0:
            hi = r
        else:
            lo = r
        dF = 2 * n * s * r2n / r + 2 * r
        step = r - F / dF
        if not (lo < step < hi):
            step = 0.5 * (lo + hi)
        if step == r or hi - lo <= 2e-16 * hi:
            return step
        r = step
    return r


def solve_r2_array(n: int, x, y, iters: int = 200) -> np.ndarray:
    """Vectorized solve_r2 (same Newton iteration from r = 1)."""
    s = np.asarray(x, dtype=float) ** 2 + np.asarray(y, dtype=float) ** 2
    r = np.ones_like(s)
    for _ in range(iters):
        r2n = r ** (2 * n)
        F = s * r2n + r * r - 1.0
        dF = 2 * n * s * r2n / r + 2 * r
        new = r - F / dF
        if np.all(np.abs(new - r) <= 2e-16 * r):
            r = new
            break
        r = new
    return r


def straighten(n: int, z: complex, lam: float = 1.0) -> complex:
    """sigma(z) = x - log r2(x, y) + i y."""
    z = complex(z)
    return complex(z.real - math.log(solve_r2(n, z.real, z.imag)), z.imag)


def transversality_factor(n: int, z1, z2):
    """n|z1|^2|z2|^2 + |z2|^4 + |z2|^2 Re(z1 conj(z2)^n); positive on a surface of section."""
    a1, a2 = abs(z1) ** 2, abs(z2) ** 2
    return n * a1 * a2 + a2 * a2 + a2 * (z1 * np.conj(z2) ** n).real


def d_theta1(spec: FoliationSpec, z1, z2):
    """Rate of theta1 along Y (positive where {theta1 = const} is transverse)."""
    Y1, _ = flow_function(spec)(complex(z1), complex(z2))
    return (Y1 / z1).imag


ESCAPE_RADIUS = 0.5


def return_map(n: int, z: complex, ode_tol: float = 1e-10, lam: float = 1.0, check: bool = True) -> complex:
    """First return to the disc {theta1 = 0} of the leaf of omega_n through it.

    The disc point with transverse coordinate z is (sqrt(1-|z|^2), z).
    Raises TransversalityError if theta1 stops increasing on the way or the
    orbit leaves |z2| < ESCAPE_RADIUS.
    """
    z = complex(z)
    if not (abs(z) < ESCAPE_RADIUS):
        raise TransversalityError(f"|z| = {abs(z):.3g} outside the section disc")
    _check_tol(ode_tol)
    if z == 0:
        return 0j
    spec = FoliationSpec.discrete(n, lam)
    res = integrate(
        flow_function(spec), math.sqrt(1 - abs(z) ** 2), z,
        rtol=ode_tol, event_lift=1, event_advance=TWO_PI,
        lifts0=(0.0, cmath.phase(z)), record=check, max_steps=200_000,
    )
    if check:
        l1 = np.asarray(res.lift1)
        r2 = np.abs(np.asarray(res.z2))
        if np.any(np.diff(l1) <= 0) or np.max(r2) >= ESCAPE_RADIUS:
            raise TransversalityError("leaf left the transversality region; reduce |z|")
    return complex(res.z2[-1])


ATTRACTING, REPELLING, UNCLASSIFIED = "attracting", "repelling", "unclassified"


@dataclass
class PetalReport:
    n: int
    count: int
    seeds: list
    classifications: list
    radii: list = field(default_factory=list)

    def to_dict(self):
        return {
            "n": self.n,
            "count": self.count,
            "seeds": [[s.real, s.imag] for s in self.seeds],
            "classifications": self.classifications,
        }


def _classify(radii, n, escaped):
    if escaped:
        return REPELLING
    sub = radii[::n]
    tail = np.asarray(sub[len(sub) // 2:])
    if len(tail) < 2:
        return UNCLASSIFIED
    d = np.diff(tail)
    if np.all(d < 0):
        return ATTRACTING
    if np.all(d > 0):
        return REPELLING
    return UNCLASSIFIED


def _circular_runs(flags):
    """Number of maximal circular runs of True."""
    m = len(flags)
    if all(flags):
        return 1
    return sum(1 for k in range(m) if flags[k] and not flags[k - 1])


NEIGHBOURHOOD_FACTOR = 1.5


def classify_seed(n, z, n_iter, ode_tol, lam=1.0, escape=None):
    """Iterate the return map from z; orbits leaving |z| < escape count as repelling.

    The default neighbourhood is NEIGHBOURHOOD_FACTOR times the seed radius:
    petals are local objects, and an orbit that swings far out and later
    comes back (as happens for n = 1) is not in the local attracting petal.
    """
    if escape is None:
        escape = min(NEIGHBOURHOOD_FACTOR * abs(z), ESCAPE_RADIUS)
    radii = [abs(z)]
    escaped = False
    for _ in range(n_iter):
        try:
            z = return_map(n, z, ode_tol, lam)
        except TransversalityError:
            escaped = True
            break
        radii.append(abs(z))
        if abs(z) >= escape:
            escaped = True
            break
    return _classify(radii, n, escaped), radii


def petal_seeds(n_seeds, radius, n=1):
    """Seeds on a circle, offset by half a spacing so none lies on a sector boundary."""
    return [radius * cmath.exp(1j * TWO_PI * (k + 0.5) / n_seeds) for k in range(n_seeds)]


def count_petals(
    n: int,
    n_seeds: Optional[int] = None,
    n_iter: Optional[int] = None,
    ode_tol: float = 1e-9,
    radius: float = 0.05,
    detailed: bool = False,
    mapper=map,
):
    """Count maximal angular runs of attracting seeds for the return map of omega_n.

    Radii are compared at iterates that are multiples of n (the n-th
    iterate is tangent to the identity), over the last half of the orbit.
    """
    if n_seeds is None:
        n_seeds = 8 * n
    if n_seeds < 8 * n or n_seeds % 8:
        raise ValueError("n_seeds must be a multiple of 8 and at least 8n")
    if n_iter is None:
        n_iter = 6 * n
    seeds = petal_seeds(n_seeds, radius, n)
    results = list(mapper(_seed_job, [(n, s, n_iter, ode_tol) for s in seeds]))
    classes = [c for c, _ in results]
    bad = sum(c == UNCLASSIFIED for c in classes)
    if bad > 0.1 * n_seeds:
        raise RuntimeError(f"{bad} of {n_seeds} seeds unclassifiable; reduce the radius")
    count = _circular_runs([c == ATTRACTING for c in classes])
    report = PetalReport(n, count, seeds, classes, [r for _, r in results])
    return report if detailed else count


def _seed_job(args):
    n, z, n_iter, ode_tol = args
    return classify_seed(n, z, n_iter, ode_tol)


def petal_curves(n: int, c1: float, n_samples: int = 400):
    """Planar polylines of cos(n theta2) = r2^n (log r2 - c1) / sqrt(1 - r2^2).

    Each branch is a list of points (r2 cos theta2, r2 sin theta2) on the
    disc; the family is closed under rotation by 2 pi / n by construction.
    """
    if n_samples < 100:
        raise ValueError("n_samples must be >= 100")
    r = np.linspace(0.0, 1.0, n_samples + 2)[1:-1]
    g = r**n * (np.log(r) - c1) / np.sqrt(1 - r * r)
    ok = np.abs(g) <= 1.0
    curves = []
    # contiguous admissible r-intervals
    edges = np.flatnonzero(np.diff(np.concatenate([[0], ok.astype(int), [0]])))
    for start, stop in zip(edges[::2], edges[1::2]):
        rr = r[start:stop]
        base = np.arccos(np.clip(g[start:stop], -1, 1)) / n
        for k in range(n):
            for sgn in (1, -1):
                th = sgn * base + TWO_PI * k / n
                curves.append(np.stack([rr * np.cos(th), rr * np.sin(th)], axis=-1))
    return curves


def petal_curve_residual(n, c1, curve):
    x, y = curve[:, 0], curve[:, 1]
    r = np.hypot(x, y)
    th = np.arctan2(y, x)
    return np.max(np.abs(np.cos(n * th) - r**n * (np.log(r) - c1) / np.sqrt(1 - r * r)))
