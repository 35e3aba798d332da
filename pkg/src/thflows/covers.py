"""The branched cover p_n(z1, z2) = (n z1, z2^n) and the deformed sphere Sigma_n."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .forms import PointS3, as_complex_pair
from .models import FoliationSpec, omega_value

ROUND, SIGMA = "RoundSphere", "SigmaN"
SURFACE_TOL = 1e-12


class SurfaceError(ValueError):
    pass


def sigma_defining(n, z1, z2):
    return n * n * np.abs(z1) ** 2 + np.abs(z2) ** (2 * n)


@dataclass(frozen=True)
class CoverPoint:
    z1: complex
    z2: complex
    surface: str
    n: int = 1

    def __post_init__(self):
        if self.surface not in (ROUND, SIGMA):
            raise SurfaceError(f"unknown surface {self.surface!r}")
        res = self.residual()
        if res > SURFACE_TOL:
            raise SurfaceError(f"point is off {self.surface} by {res:.3g}")

    def residual(self) -> float:
        if self.surface == ROUND:
            return abs(abs(self.z1) ** 2 + abs(self.z2) ** 2 - 1.0)
        return abs(float(sigma_defining(self.n, self.z1, self.z2)) - 1.0)

    @property
    def coords(self):
        return self.z1, self.z2


def branched_cover(n: int, p: CoverPoint) -> PointS3:
    if p.surface != SIGMA or p.n != n:
        raise SurfaceError(f"branched_cover expects a point of Sigma_{n}")
    return PointS3(n * p.z1, p.z2**n)


def cover_map(n, z1, z2):
    return n * np.asarray(z1), np.asarray(z2) ** n


@dataclass
class ZetaSolve:
    zeta: float
    residual: float
    history: list = field(default_factory=list)
    iterations: int = 0


def _zeta_F(n, z1, z2, zeta):
    w = z1 + zeta * z2**n
    e = math.exp(2 * n * zeta)
    A = n * n * abs(w) ** 2 + abs(z2) ** (2 * n)
    F = e * A - 1.0
    dA = 2 * n * n * (w * (z2**n).conjugate()).real
    dF = e * (2 * n * A + dA)
    return F, dF


def solve_zeta(n: int, p, tol: float = 1e-15, max_iter: int = 100, detailed: bool = False):
    """Real root of n^2 e^{2n zeta} |z1 + zeta z2^n|^2 + e^{2n zeta} |z2|^{2n} = 1.

    Newton inside a sign-change bracket (initially [-2, 2], doubled until it
    brackets); steps leaving the bracket fall back to bisection.
    """
    if tol < 1e-15:
        raise ValueError("tol must be >= 1e-15")
    if isinstance(p, PointS3):
        z1, z2 = p.z1, p.z2
    else:
        z1, z2 = complex(p[0]), complex(p[1])
    lo, hi = -2.0, 2.0
    for _ in range(60):
        if _zeta_F(n, z1, z2, lo)[0] < 0 < _zeta_F(n, z1, z2, hi)[0]:
            break
        lo, hi = 2 * lo, 2 * hi
    else:
        raise ArithmeticError("could not bracket zeta")
    x = 0.0
    history = []
    it = 0
    for it in range(1, max_iter + 1):
        F, dF = _zeta_F(n, z1, z2, x)
        history.append(abs(F))
        if abs(F) < tol:
            break
        if F > 0:
            hi = x
        else:
            lo = x
        step = x - F / dF
        if not (lo < step < hi):
            step = 0.5 * (lo + hi)
        if step == x:
            break
        x = step
    res = abs(_zeta_F(n, z1, z2, x)[0])
    out = ZetaSolve(x, res, history, it)
    return out if detailed else x


def psi_flow(n, zeta, z1, z2):
    """Complex flow of (n z1 + z2^n) d/dz1 + z2 d/dz2 at real time zeta."""
    e = np.exp(n * zeta)
    return e * (z1 + zeta * z2**n), np.exp(zeta) * z2


def phi_n(n: int, p: PointS3, tol: float = 1e-15) -> CoverPoint:
    zeta = solve_zeta(n, p, tol)
    w1, w2 = psi_flow(n, zeta, p.z1, p.z2)
    return CoverPoint(complex(w1), complex(w2), SIGMA, n)


def sigma_tangent(n, z1, z2, v):
    """Project an ambient vector onto T Sigma_n (against the real gradient)."""
    v1, v2 = v
    g1 = 2 * n * n * z1
    g2 = 2 * n * np.abs(z2) ** (2 * n - 2) * z2
    dot = (v1 * np.conj(g1) + v2 * np.conj(g2)).real
    gg = np.abs(g1) ** 2 + np.abs(g2) ** 2
    c = dot / gg
    return v1 - c * g1, v2 - c * g2


class TangencyError(ValueError):
    pass


def pullback_residual(n: int, p: CoverPoint, u, check: float = 1e-10) -> float:
    """|omega_1(dp_n u) - n z2^{n-1} omega_n(u)| for u tangent to Sigma_n at p.

    More vectors may be passed as a list; the maximum is returned.
    """
    if p.surface != SIGMA or p.n != n:
        raise SurfaceError(f"pullback_residual expects a point of Sigma_{n}")
    vectors = u if isinstance(u, list) else [u]
    z1, z2 = p.z1, p.z2
    g1 = 2 * n * n * z1
    g2 = 2 * n * abs(z2) ** (2 * n - 2) * z2
    gn = math.sqrt(abs(g1) ** 2 + abs(g2) ** 2)
    W1, W2 = n * z1, z2**n
    w1 = omega_value(FoliationSpec.discrete(1), W1, W2)
    wn = omega_value(FoliationSpec.discrete(n), z1, z2)
    worst = 0.0
    for vec in vectors:
        v1, v2 = as_complex_pair(vec)
        v1, v2 = complex(v1), complex(v2)
        normal = (v1 * g1.conjugate() + v2 * g2.conjugate()).real / gn
        if abs(normal) > check * max(1.0, math.hypot(abs(v1), abs(v2))):
            raise TangencyError(f"vector is not tangent to Sigma_{n} (normal part {normal:.3g})")
        dp = (n * v1, n * z2 ** (n - 1) * v2)
        lhs = complex(w1(dp))
        rhs = n * z2 ** (n - 1) * complex(wn((v1, v2)))
        worst = max(worst, abs(lhs - rhs))
    return worst


def preimages(n: int, p: PointS3):
    """The n points of Sigma_n over a round-sphere point with z2 != 0."""
    W1, W2 = p.z1, p.z2
    r = abs(W2) ** (1.0 / n)
    th = cmath.phase(W2)
    return [CoverPoint(W1 / n, r * cmath.exp(1j * (th + 2 * math.pi * k) / n), SIGMA, n) for k in range(n)]


def covered_leaf_constants(n: int, trace, tol: float = 1e-15) -> np.ndarray:
    """Push a round-sphere trace of omega_n through p_n o Phi_n and return
    the omega_1 leaf constants (c1, c2) of the image samples.

    The arg lift of the image Z2 = (e^zeta z2)^n is n times the sample's
    theta2 lift, so c2 is compared without 2 pi ambiguity.
    """
    out = []
    for z1, z2, l2 in zip(trace.z1, trace.z2, trace.theta2_lift):
        zeta = solve_zeta(n, (z1, z2), tol)
        w1, w2 = psi_flow(n, zeta, z1, z2)
        W1, W2 = n * w1, w2**n
        q = W1 / W2
        c1 = math.log(abs(W2)) - q.real
        c2 = n * l2 - q.imag
        out.append((c1, c2))
    return np.asarray(out)


def random_sigma_point(n, rng) -> CoverPoint:
    """A point of Sigma_n obtained by scaling a random direction (bisection in the radius)."""
    g = rng.standard_normal(4)
    d1, d2 = complex(g[0], g[1]), complex(g[2], g[3])
    lo, hi = 0.0, 1.0
    while sigma_defining(n, hi * d1, hi * d2) < 1:
        hi *= 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if sigma_defining(n, mid * d1, mid * d2) < 1:
            lo = mid
        else:
            hi = mid
    return CoverPoint(hi * d1, hi * d2, SIGMA, n)
