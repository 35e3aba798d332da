import cmath
import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thflows.forms import (
    BASIS,
    DX1,
    DX2,
    DY1,
    DY2,
    DZ1,
    DZ2,
    DZB1,
    DZB2,
    HOPF_CHART_ORIENTATION,
    FormField,
    FormValue,
    PointS3,
    TangentVector,
    eval_wedge,
    hopf_chart_vectors,
    hopf_coords,
    hopf_point,
    numeric_d,
    random_points,
    sphere_frame,
    tangent_projection,
    volume_form_s3,
)

E = np.eye(4)  # d/dx1, d/dy1, d/dx2, d/dy2


def random_form(rng, k, batch=()):
    c = rng.standard_normal(batch + (len(BASIS[k]),)) + 1j * rng.standard_normal(batch + (len(BASIS[k]),))
    return FormValue(k, c)


# --- points and charts ------------------------------------------------------

def test_hopf_point_examples():
    p = hopf_point(0, 0, 0)
    assert (p.z1, p.z2) == (1, 0)
    p = hopf_point(math.pi / 2, 0, math.pi / 2)
    assert abs(p.z1) < 1e-16 and abs(p.z2 - 1j) < 1e-16
    p = hopf_point(math.pi / 4, math.pi / 3, -math.pi / 6)
    assert abs(p.z1 - math.cos(math.pi / 4) * cmath.exp(1j * math.pi / 3)) < 1e-15
    assert abs(p.z2 - math.sin(math.pi / 4) * cmath.exp(-1j * math.pi / 6)) < 1e-15


def test_hopf_point_rejects_bad_eta():
    with pytest.raises(ValueError):
        hopf_point(2.0, 0, 0)


def test_point_invariant_on_chart_samples(rng):
    eta = rng.uniform(0, math.pi / 2, 10_000)
    t1, t2 = rng.uniform(-10, 10, (2, 10_000))
    z1, z2 = hopf_coords(eta, t1, t2)
    assert np.max(np.abs(np.abs(z1) ** 2 + np.abs(z2) ** 2 - 1)) < 1e-14
    for k in range(0, 10_000, 997):
        p = hopf_point(eta[k], t1[k], t2[k])
        assert abs(abs(p.z1) ** 2 + abs(p.z2) ** 2 - 1) < 1e-14


def test_point_normalizes():
    p = PointS3(3, 4j)
    assert abs(abs(p.z1) ** 2 + abs(p.z2) ** 2 - 1) < 1e-15
    assert abs(p.z1 - 0.6) < 1e-15
    with pytest.raises(ValueError):
        PointS3(0, 0)


def test_hopf_chart_surjective_inverse(rng):
    z1, z2 = random_points(200, rng)
    eta = np.arctan2(np.abs(z2), np.abs(z1))
    w1, w2 = hopf_coords(eta, np.angle(z1), np.angle(z2))
    assert np.max(np.abs(w1 - z1)) < 1e-14 and np.max(np.abs(w2 - z2)) < 1e-14


# --- evaluation --------------------------------------------------------------

def test_eval_wedge_examples():
    assert eval_wedge([DZ1], [E[0]]) == 1
    assert eval_wedge([DZ1, DZ2], [E[0], E[2]]) == 1
    assert eval_wedge([DZ1, DZ2], [E[2], E[0]]) == -1
    assert abs(eval_wedge([DZ1, DZB1], [E[0], E[1]]) - (-2j)) < 1e-15


def test_dz_dzbar_identity():
    diff = DZ1.wedge(DZB1) - DX1.wedge(DY1) * (-2j)
    assert np.max(np.abs(diff.coefficients)) == 0


def test_eval_wedge_degree_mismatch():
    with pytest.raises(ValueError):
        eval_wedge([DZ1, DZ2], [E[0]])


def test_wedge_of_one_forms_is_determinant(rng):
    for _ in range(50):
        w, h = random_form(rng, 1), random_form(rng, 1)
        u, v = rng.standard_normal(4), rng.standard_normal(4)
        lhs = eval_wedge([w, h], [u, v])
        rhs = w(u) * h(v) - w(v) * h(u)
        assert abs(lhs - rhs) < 1e-13 * (1 + abs(rhs))


@pytest.mark.parametrize("k,l", [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 1)])
def test_graded_antisymmetry(rng, k, l):
    for _ in range(20):
        w, h = random_form(rng, k), random_form(rng, l)
        diff = w.wedge(h).coefficients - (-1) ** (k * l) * h.wedge(w).coefficients
        assert np.max(np.abs(diff)) < 1e-14


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=12, max_size=12))
def test_eval_alternating(vals):
    vecs = np.array(vals).reshape(3, 4)
    form = DZ1.wedge(DZB2).wedge(DY1)
    base = form(*vecs)
    swapped = form(vecs[1], vecs[0], vecs[2])
    assert abs(base + swapped) <= 1e-9 * (1 + abs(base))
    assert abs(form(vecs[0], vecs[0], vecs[2])) < 1e-9


def test_contraction_matches_evaluation(rng):
    w = random_form(rng, 3)
    u, v, x = rng.standard_normal((3, 4))
    assert abs(w.contract(u)(v, x) - w(u, v, x)) < 1e-12


def test_wedge_over_degree_raises():
    with pytest.raises(ValueError):
        DZ1.wedge(DZ1.wedge(DZ2).wedge(DZB1)).wedge(DZB2)


def test_form_json_roundtrip():
    w = DZ1 * (0.25 - 1e-17j) + DZB2 * 3.0
    data = json.loads(json.dumps(w.to_json()))
    assert data["degree"] == 1
    back = FormValue.from_json(data)
    assert np.array_equal(back.coefficients, w.coefficients)


def test_form_rejects_bad_shape():
    with pytest.raises(ValueError):
        FormValue(2, [1, 2, 3])


# --- exterior derivative -----------------------------------------------------

def z1_dz2():
    return FormField(lambda z1, z2: DZ2 * np.asarray(z1, dtype=complex), 1)


def test_numeric_d_linear_field(rng):
    z1, z2 = random_points(5, rng)
    d = numeric_d(z1_dz2(), (z1, z2), 1e-4)
    target = DZ1.wedge(DZ2).coefficients
    assert np.max(np.abs(d.coefficients - target)) < 1e-8


def test_numeric_d_constant_field():
    f = FormField(lambda z1, z2: DZ1 * (2 + 0 * np.asarray(z1)) + DY2 * (0 * np.asarray(z2) - 1), 1)
    d = numeric_d(f, PointS3(0.6, 0.8j))
    assert np.max(np.abs(d.coefficients)) < 1e-12


def test_numeric_d_step_range():
    with pytest.raises(ValueError):
        numeric_d(z1_dz2(), PointS3(1, 0), 0.1)
    with pytest.raises(ValueError):
        numeric_d(z1_dz2(), PointS3(1, 0), 0.0)


def _smooth_field():
    def ev(z1, z2):
        z1 = np.asarray(z1, dtype=complex)
        z2 = np.asarray(z2, dtype=complex)
        return DZ1 * np.exp(z2 * z1.conj()) + DZB2 * np.sin(z1) + DX2 * (z1 * z2).real
    return FormField(ev, 1)


def test_d_squared_vanishes(rng):
    f = _smooth_field()
    step = 1e-3
    df = FormField(lambda z1, z2: numeric_d(f, (z1, z2), step), 2)
    z1, z2 = random_points(100, rng)
    dd = numeric_d(df, (z1, z2), step)
    assert np.max(dd.norm()) < 1e-8


def test_numeric_d_second_order(rng):
    # d of the smooth field against a finer-step reference: error scales like step^2
    f = _smooth_field()
    p = (0.3 + 0.4j, 0.5 - 0.7j)
    ref = numeric_d(f, p, 1e-5).coefficients
    e1 = np.max(np.abs(numeric_d(f, p, 4e-3).coefficients - ref))
    e2 = np.max(np.abs(numeric_d(f, p, 2e-3).coefficients - ref))
    assert 3.0 < e1 / e2 < 5.0


# --- tangent vectors ---------------------------------------------------------

def test_tangent_projection_examples():
    p = PointS3(1, 0)
    assert np.allclose(tangent_projection(p, E[0]).components, 0)
    assert np.allclose(tangent_projection(p, E[1]).components, E[1])


def test_tangent_projection_random(rng):
    for _ in range(100):
        z1, z2 = random_points(1, rng)
        p = PointS3(z1[0], z2[0])
        v = tangent_projection(p, rng.standard_normal(4))
        assert abs(v.components @ p.real) < 1e-14
        assert v.is_tangent()


def test_tangent_vector_shape():
    with pytest.raises(ValueError):
        TangentVector(np.zeros(3), PointS3(1, 0))


def test_frame_orthonormal_and_oriented(rng):
    z1, z2 = random_points(50, rng)
    frame = sphere_frame(z1, z2)
    vecs = [np.stack([e[0].real, e[0].imag, e[1].real, e[1].imag], -1) for e in frame]
    pos = np.stack([z1.real, z1.imag, z2.real, z2.imag], -1)
    gram = np.einsum("kni,lni->nkl", np.array(vecs), np.array(vecs))
    assert np.allclose(gram, np.eye(3))
    assert np.allclose(np.einsum("kni,ni->nk", np.array(vecs), pos), 0)
    dets = np.linalg.det(np.stack([pos] + vecs, axis=-2))
    assert np.all(dets > 0.999)


def test_frame_at_pole():
    e1, e2, e3 = sphere_frame(1.0 + 0j, 0j)
    assert (e1[0], e1[1]) == (1j, 0)  # d/dy1
    assert (e2[0], e2[1]) == (0, 1)  # d/dx2
    assert (e3[0], e3[1]) == (0, 1j)  # d/dy2


def test_hopf_chart_orientation_and_volume():
    # the volume form on the chart vectors is -cos(eta) sin(eta)
    eta, t1, t2 = 0.4, 0.3, -1.2
    vol = volume_form_s3(*hopf_coords(eta, t1, t2))
    val = vol(*hopf_chart_vectors(eta, t1, t2))
    assert abs(val - HOPF_CHART_ORIENTATION * math.cos(eta) * math.sin(eta)) < 1e-15
    # total volume 2 pi^2
    x, w = np.polynomial.legendre.leggauss(16)
    etas = (x + 1) * math.pi / 4
    total = HOPF_CHART_ORIENTATION * sum(
        wi * math.pi / 4 * volume_form_s3(*hopf_coords(e, 0.0, 0.0))(*hopf_chart_vectors(e, 0.0, 0.0))
        for e, wi in zip(etas, w)
    ) * (2 * math.pi) ** 2
    assert abs(total - 2 * math.pi**2) < 1e-12
