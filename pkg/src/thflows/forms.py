"""Pointwise complex exterior algebra on C^2 = R^4 and the unit sphere S^3.

Real coordinates are ordered (x1, y1, x2, y2).  A k-form is stored by its
complex coefficients over the lexicographic basis dx_I, I ranging over the
increasing k-subsets of {0, 1, 2, 3}.  Coefficient arrays may carry leading
batch axes, so one FormValue can hold a form at many points at once.

Ambient vectors are handed around as complex pairs (v1, v2), meaning the real
vector (Re v1, Im v1, Re v2, Im v2).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

BASIS = {k: tuple(itertools.combinations(range(4), k)) for k in range(5)}
_INDEX = {k: {I: j for j, I in enumerate(BASIS[k])} for k in range(5)}


def _perm_sign(seq):
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def _wedge_table(k, l):
    table = []
    for i, I in enumerate(BASIS[k]):
        for j, J in enumerate(BASIS[l]):
            if set(I) & set(J):
                continue
            merged = I + J
            table.append((i, j, _INDEX[k + l][tuple(sorted(merged))], _perm_sign(merged)))
    return table


_WEDGE = {(k, l): _wedge_table(k, l) for k in range(5) for l in range(5) if k + l <= 4}


class FormValue:
    """A complex k-form at one point (or a batch of points)."""

    __slots__ = ("degree", "coefficients")

    def __init__(self, degree: int, coefficients):
        if degree not in BASIS:
            raise ValueError(f"degree must be in 0..4, got {degree}")
        c = np.asarray(coefficients, dtype=complex)
        if c.shape[-1:] != (len(BASIS[degree]),):
            raise ValueError(
                f"degree-{degree} form needs {len(BASIS[degree])} coefficients, got shape {c.shape}"
            )
        self.degree = degree
        self.coefficients = c

    @classmethod
    def zero(cls, degree, batch_shape=()):
        return cls(degree, np.zeros(tuple(batch_shape) + (len(BASIS[degree]),), dtype=complex))

    @property
    def batch_shape(self):
        return self.coefficients.shape[:-1]

    def __repr__(self):
        return f"FormValue(degree={self.degree}, coefficients={self.coefficients!r})"

    def _check(self, other):
        if not isinstance(other, FormValue) or other.degree != self.degree:
            raise ValueError("forms must have the same degree")

    def __add__(self, other):
        self._check(other)
        return FormValue(self.degree, self.coefficients + other.coefficients)

    def __sub__(self, other):
        self._check(other)
        return FormValue(self.degree, self.coefficients - other.coefficients)

    def __neg__(self):
        return FormValue(self.degree, -self.coefficients)

    def __mul__(self, scalar):
        # scalar may be a batch of function values
        s = np.asarray(scalar)
        return FormValue(self.degree, s[..., None] * self.coefficients)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / np.asarray(scalar))

    def conj(self):
        return FormValue(self.degree, self.coefficients.conj())

    @property
    def real(self):
        return FormValue(self.degree, self.coefficients.real)

    @property
    def imag(self):
        return FormValue(self.degree, self.coefficients.imag)

    def wedge(self, other: "FormValue") -> "FormValue":
        k, l = self.degree, other.degree
        if k + l > 4:
            raise ValueError(f"wedge of degrees {k} and {l} exceeds dimension 4")
        a, b = self.coefficients, other.coefficients
        shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
        out = np.zeros(shape + (len(BASIS[k + l]),), dtype=complex)
        for i, j, o, sign in _WEDGE[(k, l)]:
            out[..., o] += sign * a[..., i] * b[..., j]
        return FormValue(k + l, out)

    __xor__ = wedge

    def contract(self, vector) -> "FormValue":
        """Interior product with an ambient vector (complex pair or real 4-array)."""
        if self.degree == 0:
            raise ValueError("cannot contract a 0-form")
        v = as_real_vector(vector)
        k = self.degree
        shape = np.broadcast_shapes(self.batch_shape, v.shape[:-1])
        out = np.zeros(shape + (len(BASIS[k - 1]),), dtype=complex)
        for i, I in enumerate(BASIS[k]):
            for pos, axis in enumerate(I):
                rest = I[:pos] + I[pos + 1:]
                out[..., _INDEX[k - 1][rest]] += (-1) ** pos * self.coefficients[..., i] * v[..., axis]
        return FormValue(k - 1, out)

    def __call__(self, *vectors) -> np.ndarray:
        return evaluate(self, vectors)

    def norm(self) -> np.ndarray:
        """Euclidean norm of the coefficient array (per batch point)."""
        return np.sqrt(np.sum(np.abs(self.coefficients) ** 2, axis=-1))

    def to_json(self) -> dict:
        if self.batch_shape:
            raise ValueError("only single-point forms serialize")
        return {
            "degree": self.degree,
            "coefficients": [[float(c.real), float(c.imag)] for c in self.coefficients],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FormValue":
        return cls(int(data["degree"]), [complex(re, im) for re, im in data["coefficients"]])


def _basis_form(axis_values):
    return FormValue(1, np.array(axis_values, dtype=complex))


DX1, DY1, DX2, DY2 = (_basis_form(np.eye(4)[j]) for j in range(4))
DZ1 = _basis_form([1, 1j, 0, 0])
DZB1 = _basis_form([1, -1j, 0, 0])
DZ2 = _basis_form([0, 0, 1, 1j])
DZB2 = _basis_form([0, 0, 1, -1j])
VOLUME_R4 = FormValue(4, [1.0])


def as_real_vector(v) -> np.ndarray:
    """Complex pair (v1, v2) or real (..., 4) array -> real (..., 4) array."""
    if isinstance(v, TangentVector):
        return v.components
    if isinstance(v, tuple) and len(v) == 2:
        v1, v2 = np.asarray(v[0], dtype=complex), np.asarray(v[1], dtype=complex)
        return np.stack([v1.real, v1.imag, v2.real, v2.imag], axis=-1)
    arr = np.asarray(v, dtype=float)
    if arr.shape[-1:] != (4,):
        raise ValueError(f"expected a real 4-vector, got shape {arr.shape}")
    return arr


def as_complex_pair(v):
    r = as_real_vector(v)
    return r[..., 0] + 1j * r[..., 1], r[..., 2] + 1j * r[..., 3]


def evaluate(form: FormValue, vectors: Sequence) -> np.ndarray:
    """Evaluate a k-form on k vectors: sum over I of c_I * det(v[:, I])."""
    k = form.degree
    if len(vectors) != k:
        raise ValueError(f"degree-{k} form needs {k} vectors, got {len(vectors)}")
    if k == 0:
        return form.coefficients[..., 0]
    V = np.stack([as_real_vector(v) for v in vectors], axis=-2)  # (..., k, 4)
    total = 0
    # exactly singular minors are legitimate (value 0); LAPACK's LU warns on them
    with np.errstate(divide="ignore", invalid="ignore"):
        for i, I in enumerate(BASIS[k]):
            minor = V[..., :, list(I)]
            total = total + form.coefficients[..., i] * np.linalg.det(minor)
    return total


def eval_wedge(forms: Sequence[FormValue], vectors: Sequence) -> complex:
    """Evaluate the wedge of several forms (same base point) on vectors."""
    if not forms:
        raise ValueError("need at least one form")
    total = sum(f.degree for f in forms)
    if total != len(vectors):
        raise ValueError(f"total degree {total} does not match {len(vectors)} vectors")
    acc = forms[0]
    for f in forms[1:]:
        acc = acc.wedge(f)
    return evaluate(acc, vectors)


# ---------------------------------------------------------------------------
# points, charts, tangent vectors

NORM_TOL = 1e-14


@dataclass(frozen=True)
class PointS3:
    z1: complex
    z2: complex

    def __post_init__(self):
        r = math.sqrt(abs(self.z1) ** 2 + abs(self.z2) ** 2)
        if r == 0.0:
            raise ValueError("the origin does not project to S^3")
        if abs(r - 1.0) > NORM_TOL:
            object.__setattr__(self, "z1", complex(self.z1) / r)
            object.__setattr__(self, "z2", complex(self.z2) / r)
        else:
            object.__setattr__(self, "z1", complex(self.z1))
            object.__setattr__(self, "z2", complex(self.z2))

    @property
    def coords(self):
        return self.z1, self.z2

    @property
    def real(self) -> np.ndarray:
        return np.array([self.z1.real, self.z1.imag, self.z2.real, self.z2.imag])

    @property
    def hopf(self):
        """(r1, theta1, r2, theta2) with principal-value angles."""
        return abs(self.z1), math.atan2(self.z1.imag, self.z1.real), abs(self.z2), math.atan2(
            self.z2.imag, self.z2.real
        )


def hopf_point(eta: float, theta1: float, theta2: float) -> PointS3:
    if not (0.0 <= eta <= math.pi / 2):
        raise ValueError(f"eta must lie in [0, pi/2], got {eta}")
    return PointS3(
        complex(math.cos(eta) * math.cos(theta1), math.cos(eta) * math.sin(theta1)),
        complex(math.sin(eta) * math.cos(theta2), math.sin(eta) * math.sin(theta2)),
    )


def hopf_coords(eta, theta1, theta2):
    """Vectorized chart (cos eta e^{i theta1}, sin eta e^{i theta2})."""
    eta = np.asarray(eta, dtype=float)
    return np.cos(eta) * np.exp(1j * np.asarray(theta1)), np.sin(eta) * np.exp(1j * np.asarray(theta2))


def hopf_chart_vectors(eta, theta1, theta2):
    """Coordinate vectors d/d eta, d/d theta1, d/d theta2 of the Hopf chart, as complex pairs."""
    e1, e2 = np.exp(1j * np.asarray(theta1)), np.exp(1j * np.asarray(theta2))
    c, s = np.cos(eta), np.sin(eta)
    zero = np.zeros(np.broadcast_shapes(np.shape(c), np.shape(e1), np.shape(e2)), dtype=complex)
    d_eta = (-s * e1 + zero, c * e2 + zero)
    d_t1 = (1j * c * e1 + zero, zero)
    d_t2 = (zero, 1j * s * e2 + zero)
    return d_eta, d_t1, d_t2


# (d_eta, d_theta1, d_theta2) is negatively oriented for the boundary orientation of S^3
HOPF_CHART_ORIENTATION = -1.0


def coords_of(p):
    """Accept a PointS3 or a (z1, z2) pair of scalars/arrays."""
    if isinstance(p, PointS3):
        return p.z1, p.z2
    z1, z2 = p
    return np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex)


def sphere_frame(z1, z2):
    """Global frame of T S^3 (quaternionic i, j, k times the base point).

    Orthogonal to (z1, z2), each of length |(z1, z2)|, positively oriented
    with respect to the outward normal.
    """
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    return (1j * z1, 1j * z2), (-z2.conj(), z1.conj()), (-1j * z2.conj(), 1j * z1.conj())


def random_points(n: int, rng) -> tuple:
    """n uniformly distributed points of S^3 as arrays (z1, z2)."""
    g = rng.standard_normal((n, 4))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g[:, 0] + 1j * g[:, 1], g[:, 2] + 1j * g[:, 3]


@dataclass(frozen=True)
class TangentVector:
    components: np.ndarray
    base: PointS3

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float)
        if c.shape != (4,):
            raise ValueError("tangent vector needs 4 real components")
        object.__setattr__(self, "components", c)

    def radial_part(self) -> float:
        return float(self.components @ self.base.real)

    def is_tangent(self, tol=1e-12) -> bool:
        return abs(self.radial_part()) <= tol


def tangent_projection(p: PointS3, v) -> TangentVector:
    comps = as_real_vector(v)
    x = p.real
    return TangentVector(comps - (comps @ x) * x, p)


def volume_form_s3(z1, z2) -> FormValue:
    """The 3-form N -| (dx1 dy1 dx2 dy2), N the radial unit field."""
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    r = np.sqrt(np.abs(z1) ** 2 + np.abs(z2) ** 2)
    return (VOLUME_R4 * np.ones(np.broadcast_shapes(z1.shape, z2.shape))).contract(
        (z1 / r, z2 / r)
    )


# ---------------------------------------------------------------------------
# fields of forms and the numerical exterior derivative

DEFAULT_STEP = 1e-5


@dataclass(frozen=True)
class FormField:
    """A form-valued function on C^2 minus the origin.

    ``evaluator(z1, z2)`` must accept broadcastable complex arrays and
    return a FormValue batched over them.
    """

    evaluator: Callable[..., FormValue]
    degree: int
    analytic_d: Optional[Callable[..., FormValue]] = None

    def __call__(self, z1, z2) -> FormValue:
        return self.evaluator(z1, z2)

    def at(self, p) -> FormValue:
        return self.evaluator(*coords_of(p))


_SHIFTS = [(1, 0), (1j, 0), (0, 1), (0, 1j)]


def numeric_d(field: FormField, p, step: float = DEFAULT_STEP) -> FormValue:
    """Central-difference exterior derivative in the ambient R^4 chart."""
    if not (0.0 < step <= 1e-2):
        raise ValueError(f"step must lie in (0, 1e-2], got {step}")
    z1, z2 = coords_of(p)
    d = None
    for axis, (s1, s2) in enumerate(_SHIFTS):
        plus = field(z1 + step * s1, z2 + step * s2)
        minus = field(z1 - step * s1, z2 - step * s2)
        partial = FormValue(plus.degree, (plus.coefficients - minus.coefficients) / (2 * step))
        term = _basis_form(np.eye(4)[axis]).wedge(partial)
        d = term if d is None else d + term
    return d


def numeric_d_field(field: FormField, step: float = DEFAULT_STEP) -> FormField:
    return FormField(lambda z1, z2: numeric_d(field, (z1, z2), step), field.degree + 1)
