"""Bott invariant, logarithmic monodromy and parameter recovery."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .forms import (
    DZ1,
    DZ2,
    DZB1,
    DZB2,
    HOPF_CHART_ORIENTATION,
    FormField,
    FormValue,
    coords_of,
    hopf_chart_vectors,
    hopf_coords,
    numeric_d,
    sphere_frame,
)
from .models import (
    FoliationSpec,
    SpecError,
    d_omega_value,
    flow_function,
    in_script_P,
    omega_value,
)
from .ode import IntegrationError, integrate

FOUR_PI2 = 4 * math.pi**2

# ---------------------------------------------------------------------------
# Bott invariant


def bott_closed_form(spec: FoliationSpec, normalization: str = "standard") -> complex:
    """-4 pi^2 / (a(1-a)) or -4 pi^2 (n+1)^2 / n.

    ``normalization="two_pi_i"`` divides by (2 pi i)^2, which turns the value
    for omega^a into 1 / (a(1-a)).
    """
    if spec.is_parametric:
        a = spec.a
        value = -FOUR_PI2 / (a * (1 - a))
    else:
        n = spec.n
        value = complex(-FOUR_PI2 * (n + 1) ** 2 / n)
    return _normalize(value, normalization)


def _normalize(value, normalization):
    if normalization == "standard":
        return complex(value)
    if normalization == "two_pi_i":
        return complex(value) / (2j * math.pi) ** 2
    raise ValueError(f"unknown normalization {normalization!r}")


def _require_parametric(spec):
    if not spec.is_parametric:
        raise SpecError("the closed-form alpha exists only for the parametric family")


def analytic_alpha_value(spec: FoliationSpec, z1, z2) -> FormValue:
    """alpha^a = ((1/a) conj(z1) dz1 + (1/(1-a)) conj(z2) dz2) / |z|^2."""
    _require_parametric(spec)
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    a = spec.a
    rho = np.abs(z1) ** 2 + np.abs(z2) ** 2
    return (DZ1 * (z1.conj() / a) + DZ2 * (z2.conj() / (1 - a))) / rho


def analytic_d_alpha_value(spec: FoliationSpec, z1, z2) -> FormValue:
    _require_parametric(spec)
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    a = spec.a
    rho = np.abs(z1) ** 2 + np.abs(z2) ** 2
    d_rho = DZ1 * z1.conj() + DZB1 * z1 + DZ2 * z2.conj() + DZB2 * z2
    inner = DZ1 * (z1.conj() / a) + DZ2 * (z2.conj() / (1 - a))
    ones = np.ones_like(rho)
    d_inner = DZB1.wedge(DZ1) * (ones / a) + DZB2.wedge(DZ2) * (ones / (1 - a))
    return d_rho.wedge(inner) * (-1.0 / rho**2) + d_inner / rho


def analytic_alpha(spec: FoliationSpec, p) -> FormValue:
    return analytic_alpha_value(spec, *coords_of(p))


def analytic_alpha_field(spec: FoliationSpec) -> FormField:
    _require_parametric(spec)
    return FormField(
        lambda z1, z2: analytic_alpha_value(spec, z1, z2),
        1,
        lambda z1, z2: analytic_d_alpha_value(spec, z1, z2),
    )


class AlphaSolveError(RuntimeError):
    pass


def generic_alpha_value(spec: FoliationSpec, z1, z2, return_v=False):
    """alpha = -V -| d omega, V the minimal-norm real solution of omega(V) = 1 on T S^3.

    The frame i z, j z, k z is defined on all of C^2 minus 0, so this is a
    smooth ambient 1-form whose restriction to S^3 satisfies d omega = alpha ^ omega.
    """
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    frame = sphere_frame(z1, z2)
    w = omega_value(spec, z1, z2)
    vals = np.stack([w(e) for e in frame], axis=-1)  # (..., 3)
    A = np.stack([vals.real, vals.imag], axis=-2)  # (..., 2, 3)
    G = A @ np.swapaxes(A, -1, -2)  # (..., 2, 2)
    det = G[..., 0, 0] * G[..., 1, 1] - G[..., 0, 1] * G[..., 1, 0]
    if np.any(~np.isfinite(det)) or np.any(np.abs(det) < 1e-300):
        raise AlphaSolveError("omega degenerates on T S^3; the input form is corrupted")
    # (A A^T)^{-1} [1, 0]^T
    y0 = G[..., 1, 1] / det
    y1 = -G[..., 1, 0] / det
    c = A[..., 0, :] * y0[..., None] + A[..., 1, :] * y1[..., None]  # (..., 3)
    V = tuple(sum(c[..., k] * frame[k][j] for k in range(3)) for j in range(2))
    alpha = -d_omega_value(spec, z1, z2).contract(V)
    if return_v:
        return alpha, V
    return alpha


def generic_alpha(spec: FoliationSpec, p) -> FormValue:
    return generic_alpha_value(spec, *coords_of(p))


def generic_alpha_field(spec: FoliationSpec) -> FormField:
    return FormField(lambda z1, z2: generic_alpha_value(spec, z1, z2), 1)


def restricted_identity_residual(spec: FoliationSpec, alpha: FormValue, z1, z2):
    """max over frame pairs of |(d omega - alpha ^ omega)(e_j, e_k)|."""
    diff = d_omega_value(spec, z1, z2) - alpha.wedge(omega_value(spec, z1, z2))
    e = sphere_frame(z1, z2)
    vals = [np.abs(diff(e[j], e[k])) for j, k in ((0, 1), (0, 2), (1, 2))]
    return np.max(np.stack(vals, axis=-1), axis=-1)


@dataclass(frozen=True)
class BottResult:
    value: complex
    method: str
    grid: tuple
    error_estimate: float
    normalization: str = "standard"

    def to_dict(self):
        return {
            "value": [self.value.real, self.value.imag],
            "error_estimate": self.error_estimate,
            "method": self.method,
            "grid": list(self.grid),
            "normalization": self.normalization,
        }


DEFAULT_GRID = (48, 64, 64)
GENERIC_GRID = (64, 96, 96)
MIN_GRID = 8
_CHUNK_POINTS = 40_000


def _integrand(spec, source, eta, t1, t2, step):
    """(alpha ^ d alpha)(d_eta, d_theta1, d_theta2) on a broadcast grid."""
    z1, z2 = hopf_coords(eta, t1, t2)
    if source == "analytic":
        alpha = analytic_alpha_value(spec, z1, z2)
        dalpha = analytic_d_alpha_value(spec, z1, z2)
    else:
        field_ = generic_alpha_field(spec)
        alpha = field_(z1, z2)
        dalpha = numeric_d(field_, (z1, z2), step)
    three = alpha.wedge(dalpha)
    return three(*hopf_chart_vectors(eta, t1, t2))


def _quadrature(spec, grid, source, step):
    n_eta, n1, n2 = grid
    x, w = np.polynomial.legendre.leggauss(n_eta)
    etas = (x + 1) * (math.pi / 4)
    weights = w * (math.pi / 4)
    t1 = np.arange(n1) * (2 * math.pi / n1)
    t2 = np.arange(n2) * (2 * math.pi / n2)
    T1, T2 = np.meshgrid(t1, t2, indexing="ij")
    rows = max(1, _CHUNK_POINTS // (n1 * n2))
    total = 0j
    for start in range(0, n_eta, rows):
        sl = slice(start, start + rows)
        E = etas[sl][:, None, None]
        vals = _integrand(spec, source, E, T1[None], T2[None], step)
        if not np.all(np.isfinite(vals)):
            raise FloatingPointError("non-finite quadrature integrand")
        # fixed reduction order: angles first, then eta rows in sequence
        row_sums = vals.sum(axis=(1, 2))
        for wt, rs in zip(weights[sl], row_sums):
            total += wt * rs
    cell = (2 * math.pi / n1) * (2 * math.pi / n2)
    return complex(HOPF_CHART_ORIENTATION * total * cell)


def bott_quadrature(
    spec: FoliationSpec,
    grid=None,
    alpha_source: str = "analytic",
    step: float = 1e-5,
    normalization: str = "standard",
) -> BottResult:
    """Integrate alpha ^ d alpha over S^3 in the Hopf chart.

    Gauss-Legendre in eta, periodic trapezoid in both angles.  The error
    estimate compares against the half-size grid and adds a rounding floor
    (and, for the generic source, the finite-difference error of numeric_d).
    """
    if alpha_source not in ("analytic", "generic"):
        raise ValueError(f"alpha_source must be 'analytic' or 'generic', got {alpha_source!r}")
    if alpha_source == "analytic":
        _require_parametric(spec)
    if grid is None:
        grid = DEFAULT_GRID if alpha_source == "analytic" else GENERIC_GRID
    grid = tuple(int(g) for g in grid)
    if len(grid) != 3 or min(grid) < MIN_GRID:
        raise ValueError(f"grid sizes must all be >= {MIN_GRID}, got {grid}")
    value = _quadrature(spec, grid, alpha_source, step)
    coarse_grid = tuple(max(MIN_GRID, g // 2) for g in grid)
    if coarse_grid == grid:
        coarse_grid = tuple(g - 2 for g in grid) if min(grid) > MIN_GRID + 1 else grid
    coarse = _quadrature(spec, coarse_grid, alpha_source, step)
    err = abs(value - coarse) + 1e-13 * abs(value)
    if alpha_source == "generic":
        err += 1e-8 * abs(value) * (step / 1e-5) ** 2
    method = "quadrature_analytic_alpha" if alpha_source == "analytic" else "quadrature_generic_alpha"
    return BottResult(_normalize(value, normalization), method, grid, float(abs(_normalize(err, normalization))), normalization)


def bott_closed_result(spec: FoliationSpec, normalization="standard") -> BottResult:
    return BottResult(bott_closed_form(spec, normalization), "closed_form", (0, 0, 0), 0.0, normalization)


@dataclass
class HomotopyScan:
    lambdas: list
    values: list
    errors: list

    @property
    def max_jump(self):
        return max((abs(b - a) for a, b in zip(self.values, self.values[1:])), default=0.0)


def bott_homotopy_scan(n: int, lambdas, grid=GENERIC_GRID, step=1e-5, detailed=False):
    """Generic-alpha Bott values along omega_n^lambda."""
    lambdas = [float(l) for l in lambdas]
    if lambdas != sorted(lambdas) or lambdas[0] != 0.0 or lambdas[-1] != 1.0:
        raise ValueError("lambdas must be sorted and include 0 and 1")
    results = [bott_quadrature(FoliationSpec.discrete(n, lam), grid, "generic", step) for lam in lambdas]
    scan = HomotopyScan(lambdas, [r.value for r in results], [r.error_estimate for r in results])
    return scan if detailed else scan.values


# ---------------------------------------------------------------------------
# logarithmic monodromy

LEAF1, LEAF2 = "HopfCircle1", "HopfCircle2"


@dataclass(frozen=True)
class MonodromyResult:
    log_monodromy: complex
    leaf: str
    z0: float
    method: str
    samples: tuple = ()
    direction: int = 1

    def to_dict(self):
        return {
            "value": [self.log_monodromy.real, self.log_monodromy.imag],
            "leaf": self.leaf,
            "z0": self.z0,
            "method": self.method,
        }


def _check_leaf(spec, leaf):
    if leaf not in (LEAF1, LEAF2):
        raise ValueError(f"leaf must be {LEAF1!r} or {LEAF2!r}, got {leaf!r}")
    if leaf == LEAF2 and not spec.is_parametric:
        raise SpecError("{0} x S^1 is not a closed leaf of the discrete family")


def monodromy_closed_form(spec: FoliationSpec, leaf: str = LEAF1) -> complex:
    _check_leaf(spec, leaf)
    if not spec.is_parametric:
        return 2j * math.pi / spec.n
    a = spec.a
    return 2j * math.pi * ((1 - a) / a if leaf == LEAF1 else a / (1 - a))


def _one_return(f, leaf, w0, rtol, direction):
    """log(w1/w0) for one transversal seed, with the continuous branch."""
    r = abs(w0)
    if leaf == LEAF1:
        z1, z2, along = math.sqrt(1 - r * r), w0, 1
    else:
        z1, z2, along = w0, math.sqrt(1 - r * r), 2
    res = integrate(
        f, z1, z2,
        rtol=rtol, direction=direction,
        event_lift=along, event_advance=2 * math.pi * direction,
        lifts0=(cmath.phase(z1), cmath.phase(z2)),
        record=False, max_steps=200_000,
    )
    _, e1, e2, l1, l2 = res.final
    if leaf == LEAF1:
        w1, winding = e2, l2 - cmath.phase(w0)
    else:
        w1, winding = e1, l1 - cmath.phase(w0)
    return complex(math.log(abs(w1) / r), winding)


def _seed_average(f, leaf, z0, rtol, direction, n_seeds=4):
    vals = []
    for k in range(n_seeds):
        w0 = z0 * cmath.exp(2j * math.pi * k / n_seeds)
        vals.append(_one_return(f, leaf, w0, rtol, direction))
    return sum(vals) / n_seeds


def _contracting_direction(f, leaf, z0, rtol):
    probe = min(z0, 1e-4) * 1e-2
    m = _one_return(f, leaf, complex(probe), rtol, 1)
    return 1 if m.real <= 0 else -1


def monodromy_numeric(
    spec: FoliationSpec,
    leaf: str = LEAF1,
    z0: float = 1e-2,
    ode_tol: float = 1e-12,
    extrapolate: bool = True,
    n_seeds: int = 4,
) -> MonodromyResult:
    """Measure log phi'_{2 pi}(0) from return maps on the disc transversal.

    Seeds sit at radius z0 and equally spaced arguments; averaging over them
    cancels every term of the return-map expansion with nonzero angular
    frequency mod n_seeds, leaving an O(z0^2) error.  With ``extrapolate``
    a second radius z0/2 removes that term (Richardson, exponent 2).
    If the return map expands, the backward flow is measured and negated.
    """
    _check_leaf(spec, leaf)
    if not (1e-4 <= z0 <= 1e-1):
        raise ValueError(f"z0 must lie in [1e-4, 1e-1], got {z0}")
    if n_seeds < 4 or n_seeds % 4:
        raise ValueError("n_seeds must be a positive multiple of 4")
    f = flow_function(spec)
    direction = _contracting_direction(f, leaf, z0, ode_tol)
    try:
        m1 = direction * _seed_average(f, leaf, z0, ode_tol, direction, n_seeds)
        if extrapolate:
            m2 = direction * _seed_average(f, leaf, z0 / 2, ode_tol, direction, n_seeds)
            value = (4 * m2 - m1) / 3
            samples = (m1, m2)
        else:
            value, samples = m1, (m1,)
    except IntegrationError as exc:
        raise IntegrationError(f"{exc} (no return to the transversal of {leaf})") from None
    return MonodromyResult(complex(value), leaf, float(z0), "numeric", samples, direction)


def monodromy_closed_result(spec, leaf=LEAF1):
    return MonodromyResult(monodromy_closed_form(spec, leaf), leaf, 0.0, "closed_form")


# ---------------------------------------------------------------------------
# recovering the modulus


@dataclass(frozen=True)
class Recovery:
    parametric: Optional[tuple] = None
    discrete_n: Optional[int] = None

    @property
    def empty(self):
        return self.parametric is None and self.discrete_n is None

    def to_dict(self):
        return {
            "parametric": None if self.parametric is None else [[a.real, a.imag] for a in self.parametric],
            "discrete_n": self.discrete_n,
        }


DISCRETE_MATCH_RTOL = 1e-9


def _discrete_candidate(bott: complex):
    # -4 pi^2 (n+1)^2 / n = t  <=>  n^2 + (2 + t/(4 pi^2)) n + 1 = 0 with t/(4pi^2) = -(n+1)^2/n
    if abs(bott.imag) > DISCRETE_MATCH_RTOL * abs(bott) or bott.real >= 0:
        return None
    c = -bott.real / FOUR_PI2  # (n+1)^2/n = n + 2 + 1/n >= 4
    if c < 4 * (1 - DISCRETE_MATCH_RTOL):
        return None
    disc = max(c * c - 4 * c, 0.0)
    n_est = ((c - 2) + math.sqrt(disc)) / 2
    for n in {max(1, math.floor(n_est)), max(1, math.ceil(n_est))}:
        target = -FOUR_PI2 * (n + 1) ** 2 / n
        if abs(bott - target) <= DISCRETE_MATCH_RTOL * abs(target):
            return n
    return None


def recover_parameter(bott: complex) -> Recovery:
    """Invert a -> -4 pi^2 / (a(1-a)), and flag a matching discrete n."""
    bott = complex(bott)
    if bott == 0 or not cmath.isfinite(bott):
        return Recovery()
    s = -FOUR_PI2 / bott
    pair = None
    if not (abs(s.imag) <= 1e-15 * max(1.0, abs(s)) and s.real <= 0):
        root = cmath.sqrt(0.25 - s)
        a1, a2 = 0.5 + root, 0.5 - root
        if abs(a1.imag) <= 1e-15 * max(1.0, abs(a1)):
            a1, a2 = complex(a1.real, 0.0), complex(a2.real, 0.0)
        if in_script_P(a1) and in_script_P(a2):
            pair = (a1, a2)
    return Recovery(pair, _discrete_candidate(bott))
