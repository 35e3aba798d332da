"""The parametric family omega^a and the discrete family omega_n^lambda.

Everything here is ambient: formulas are evaluated on C^2 minus the origin
and restricted to T S^3 only where a statement is about the sphere.  All
evaluators accept broadcastable complex arrays (z1, z2).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .forms import (
    DZ1,
    DZ2,
    DZB1,
    FormField,
    FormValue,
    PointS3,
    TangentVector,
    coords_of,
    sphere_frame,
)

REAL_TOL = 1e-12


class SpecError(ValueError):
    """Invalid foliation parameters."""


def in_script_P(a: complex) -> bool:
    """a in (C minus R) union (0, 1)."""
    a = complex(a)
    if a.imag != 0.0:
        return True
    return 0.0 < a.real < 1.0


def poincare_domain(alpha: complex, beta: complex) -> bool:
    """Convex hull of {alpha, beta} avoids 0."""
    alpha, beta = complex(alpha), complex(beta)
    if alpha == 0 or beta == 0:
        return False
    q = alpha / beta
    return not (q.imag == 0.0 and q.real < 0.0)


def is_contact_circle(a: complex) -> bool:
    a = complex(a)
    if not in_script_P(a):
        raise SpecError(f"a = {a} is not in the parameter set P")
    return 0.0 < a.real < 1.0


@dataclass(frozen=True)
class FoliationSpec:
    """Tagged description of one foliation.

    Use :meth:`parametric` or :meth:`discrete`.  ``perturbation`` adds
    eps * conj(z1) dz2 to the form; it exists only to build non-integrable
    negative controls (see :func:`perturbed`).
    """

    family: str
    a: complex = 0.5
    n: int = 1
    lam: float = 1.0
    perturbation: float = 0.0

    def __post_init__(self):
        if self.family == "parametric":
            a = complex(self.a)
            if not in_script_P(a):
                raise SpecError(f"a = {a} is not in P = (C minus R) union (0,1)")
            object.__setattr__(self, "a", a)
        elif self.family == "discrete":
            if int(self.n) != self.n or self.n < 1:
                raise SpecError(f"n must be a positive integer, got {self.n}")
            if not (0.0 <= float(self.lam) <= 1.0):
                raise SpecError(f"lambda must lie in [0, 1], got {self.lam}")
            object.__setattr__(self, "n", int(self.n))
            object.__setattr__(self, "lam", float(self.lam))
        else:
            raise SpecError(f"unknown family {self.family!r}")

    @classmethod
    def parametric(cls, a) -> "FoliationSpec":
        return cls("parametric", a=a)

    @classmethod
    def discrete(cls, n: int, lam: float = 1.0) -> "FoliationSpec":
        return cls("discrete", n=n, lam=lam)

    @property
    def is_parametric(self):
        return self.family == "parametric"

    @property
    def is_perturbed(self):
        return self.perturbation != 0.0

    # first-order data of omega = A(z) dz1 + B(z) dz2
    def _coefficients(self, z1, z2):
        if self.is_parametric:
            a = self.a
            return -(1 - a) * z2, a * z1
        n, lam = self.n, self.lam
        return -z2 + 0 * z1, n * z1 + lam * z2**n

    def to_dict(self) -> dict:
        if self.is_perturbed:
            raise SpecError("perturbed test forms are not serializable")
        if self.is_parametric:
            return {"family": "parametric", "a": [self.a.real, self.a.imag]}
        return {"family": "discrete", "n": self.n, "lambda": self.lam}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "FoliationSpec":
        if not isinstance(data, dict) or "family" not in data:
            raise SpecError("spec must be an object with a 'family' key")
        fam = data["family"]
        if fam == "parametric":
            extra = set(data) - {"family", "a"}
            a = data.get("a")
            if isinstance(a, (list, tuple)) and len(a) == 2:
                a = complex(float(a[0]), float(a[1]))
            elif isinstance(a, (int, float)):
                a = complex(a)
            else:
                raise SpecError("parametric spec needs 'a' as [re, im]")
            spec = cls.parametric(a)
        elif fam == "discrete":
            extra = set(data) - {"family", "n", "lambda"}
            if "n" not in data:
                raise SpecError("discrete spec needs 'n'")
            n = data["n"]
            if not isinstance(n, int) or isinstance(n, bool):
                raise SpecError(f"n must be an integer, got {n!r}")
            spec = cls.discrete(n, float(data.get("lambda", 1.0)))
        else:
            raise SpecError(f"unknown family {fam!r}")
        if extra:
            raise SpecError(f"unknown spec keys: {sorted(extra)}")
        return spec

    @classmethod
    def from_json(cls, text: str) -> "FoliationSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"spec is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    def __str__(self):
        if self.is_parametric:
            s = f"Parametric(a={self.a.real:g}{self.a.imag:+g}i)"
        else:
            s = f"Discrete(n={self.n}, lambda={self.lam:g})"
        return s + (f"+{self.perturbation:g}*conj(z1)dz2" if self.is_perturbed else "")


def perturbed(spec: FoliationSpec, eps: float = 0.1) -> FoliationSpec:
    """Test hook: omega + eps * conj(z1) dz2, which is not formally integrable."""
    return FoliationSpec(spec.family, spec.a, spec.n, spec.lam, perturbation=float(eps))


# ---------------------------------------------------------------------------
# forms

def omega_value(spec: FoliationSpec, z1, z2) -> FormValue:
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    A, B = spec._coefficients(z1, z2)
    form = DZ1 * A + DZ2 * B
    if spec.is_perturbed:
        form = form + DZ2 * (spec.perturbation * z1.conj())
    return form


def d_omega_value(spec: FoliationSpec, z1, z2) -> FormValue:
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    ones = np.ones(np.broadcast_shapes(z1.shape, z2.shape))
    factor = 1.0 if spec.is_parametric else float(spec.n + 1)
    d = DZ1.wedge(DZ2) * (factor * ones)
    if spec.is_perturbed:
        d = d + DZB1.wedge(DZ2) * (spec.perturbation * ones)
    return d


def omega_field(spec: FoliationSpec) -> FormField:
    return FormField(
        lambda z1, z2: omega_value(spec, z1, z2),
        1,
        lambda z1, z2: d_omega_value(spec, z1, z2),
    )


def omega(spec: FoliationSpec, p) -> FormValue:
    """omega at a PointS3 or any ambient point."""
    return omega_value(spec, *coords_of(p))


# ---------------------------------------------------------------------------
# the kernel line field

def holomorphic_field(spec: FoliationSpec, z1, z2):
    """Holomorphic vector field X with omega(X) = 0, as a complex pair."""
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    if spec.is_parametric:
        return spec.a * z1, (1 - spec.a) * z2
    return spec.n * z1 + spec.lam * z2**spec.n, z2 + 0 * z1


def transversality(spec: FoliationSpec, z1, z2):
    """h = X(|z1|^2 + |z2|^2) = X1 conj(z1) + X2 conj(z2)."""
    X1, X2 = holomorphic_field(spec, z1, z2)
    return X1 * np.conj(z1) + X2 * np.conj(z2)


def _generic_kernel(spec, z1, z2):
    # real kernel of (Re omega, Im omega) on T S^3, via a cross product in the frame
    frame = sphere_frame(z1, z2)
    w = omega_value(spec, z1, z2)
    vals = np.stack([w(e) for e in frame], axis=-1)
    c = np.cross(vals.real, vals.imag)
    return tuple(sum(c[..., k] * frame[k][j] for k in range(3)) for j in range(2))


def kernel_vector(spec: FoliationSpec, z1, z2):
    """Y = 2 Re(i conj(h) X), returned as the complex pair i conj(h) X.

    For perturbed test forms the kernel is computed numerically from the
    frame of T S^3 instead (the holomorphic field no longer applies).
    """
    if spec.is_perturbed:
        return _generic_kernel(spec, z1, z2)
    X1, X2 = holomorphic_field(spec, z1, z2)
    c = 1j * np.conj(transversality(spec, z1, z2))
    return c * X1, c * X2


def kernel_field(spec: FoliationSpec, p: PointS3) -> TangentVector:
    Y1, Y2 = kernel_vector(spec, p.z1, p.z2)
    Y1, Y2 = complex(Y1), complex(Y2)
    return TangentVector(np.array([Y1.real, Y1.imag, Y2.real, Y2.imag]), p)


@dataclass(frozen=True)
class KernelMultiplier:
    h: complex
    residual: float
    flagged: bool = False

    @property
    def f(self):
        return self.h.real

    @property
    def g(self):
        return self.h.imag


MULTIPLIER_FLAG = 1e-6


def _frame_values(form: FormValue, z1, z2):
    return np.stack([form(e) for e in sphere_frame(z1, z2)], axis=-1)


def kernel_multiplier_batch(spec: FoliationSpec, z1, z2):
    """Vectorized least-squares h with Y -| d omega = h omega on T S^3.

    Returns (h, residual) arrays; the residual is relative to |omega| on the frame.
    """
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    Y = kernel_vector(spec, z1, z2)
    beta = d_omega_value(spec, z1, z2).contract(Y)
    b = _frame_values(beta, z1, z2)
    w = _frame_values(omega_value(spec, z1, z2), z1, z2)
    ww = np.sum(np.abs(w) ** 2, axis=-1)
    h = np.sum(np.conj(w) * b, axis=-1) / ww
    res = np.sqrt(np.sum(np.abs(b - h[..., None] * w) ** 2, axis=-1) / ww)
    return h, res


def kernel_multiplier(spec: FoliationSpec, p) -> KernelMultiplier:
    z1, z2 = coords_of(p)
    h, res = kernel_multiplier_batch(spec, z1, z2)
    res = float(res)
    return KernelMultiplier(complex(h), res, flagged=res > MULTIPLIER_FLAG)


# ---------------------------------------------------------------------------
# residuals

def integrability_residual(spec: FoliationSpec, p) -> np.ndarray:
    """|omega ^ d omega| as an ambient 3-form (coefficient norm)."""
    z1, z2 = coords_of(p)
    return omega_value(spec, z1, z2).wedge(d_omega_value(spec, z1, z2)).norm()


def c4_residuals(spec: FoliationSpec, p):
    """Norms of w1^dw1 - w2^dw2 and w1^dw2 + w2^dw1 (w = w1 + i w2)."""
    z1, z2 = coords_of(p)
    w = omega_value(spec, z1, z2)
    dw = d_omega_value(spec, z1, z2)
    w1, w2, dw1, dw2 = w.real, w.imag, dw.real, dw.imag
    r1 = (w1.wedge(dw1) - w2.wedge(dw2)).norm()
    r2 = (w1.wedge(dw2) + w2.wedge(dw1)).norm()
    return r1, r2


def cartan_residual(spec: FoliationSpec, p) -> np.ndarray:
    """|Im(omega ^ d conj(omega))| evaluated on the oriented unit frame of T S^3."""
    z1, z2 = coords_of(p)
    w = omega_value(spec, z1, z2)
    three = w.wedge(d_omega_value(spec, z1, z2).conj()).imag
    return np.abs(three(*sphere_frame(z1, z2)))


def omega_on_kernel(spec: FoliationSpec, p) -> np.ndarray:
    z1, z2 = coords_of(p)
    return np.abs(omega_value(spec, z1, z2)(kernel_vector(spec, z1, z2)))


def flow_function(spec: FoliationSpec):
    """Scalar right-hand side (z1, z2) -> Y for the ODE integrator."""
    if spec.is_perturbed:
        def f(z1, z2):
            Y1, Y2 = _generic_kernel(spec, np.asarray(z1), np.asarray(z2))
            return complex(Y1), complex(Y2)
        return f
    if spec.is_parametric:
        a = spec.a
        b = 1 - a

        def f(z1, z2):
            X1, X2 = a * z1, b * z2
            c = 1j * (X1 * z1.conjugate() + X2 * z2.conjugate()).conjugate()
            return c * X1, c * X2
        return f
    n, lam = spec.n, spec.lam

    def f(z1, z2):
        X1 = n * z1 + lam * z2**n
        c = 1j * (X1 * z1.conjugate() + z2 * z2.conjugate()).conjugate()
        return c * X1, c * z2
    return f
