import cmath
import math

import numpy as np
import pytest

from thflows.forms import numeric_d, random_points
from thflows.invariants import (
    LEAF1,
    LEAF2,
    AlphaSolveError,
    analytic_alpha_field,
    analytic_alpha_value,
    analytic_d_alpha_value,
    bott_closed_form,
    bott_homotopy_scan,
    bott_quadrature,
    generic_alpha_field,
    generic_alpha_value,
    monodromy_closed_form,
    monodromy_numeric,
    recover_parameter,
    restricted_identity_residual,
)
from thflows.models import FoliationSpec, SpecError

PI2 = math.pi**2


def test_closed_form_examples():
    assert abs(bott_closed_form(FoliationSpec.parametric(0.5)) + 16 * PI2) < 1e-12
    assert abs(bott_closed_form(FoliationSpec.discrete(1)) + 16 * PI2) < 1e-12
    assert abs(bott_closed_form(FoliationSpec.discrete(2, 0.3)) + 18 * PI2) < 1e-12
    a = 0.5 + 0.2j
    assert abs(bott_closed_form(FoliationSpec.parametric(a)) - (-4 * PI2 / (a * (1 - a)))) < 1e-12


def test_two_pi_i_normalization():
    spec = FoliationSpec.parametric(0.3)
    std = bott_closed_form(spec)
    alt = bott_closed_form(spec, "two_pi_i")
    assert abs(alt - std / (-4 * PI2)) < 1e-15
    assert abs(alt - 1 / (0.3 * 0.7)) < 1e-12
    with pytest.raises(ValueError):
        bott_closed_form(spec, "other")


@pytest.mark.parametrize("a", [0.3, 0.5 + 0.2j, 2 + 1j])
def test_analytic_alpha_identity(a, rng):
    spec = FoliationSpec.parametric(a)
    z1, z2 = random_points(1000, rng)
    alpha = analytic_alpha_value(spec, z1, z2)
    assert np.max(restricted_identity_residual(spec, alpha, z1, z2)) < 1e-12
    d_num = numeric_d(type(analytic_alpha_field(spec))(analytic_alpha_field(spec).evaluator, 1), (z1[:20], z2[:20]), 1e-4)
    d_an = analytic_d_alpha_value(spec, z1[:20], z2[:20])
    assert np.max(np.abs(d_num.coefficients - d_an.coefficients)) < 1e-6


def test_analytic_alpha_needs_parametric():
    with pytest.raises(SpecError):
        bott_quadrature(FoliationSpec.discrete(2))


@pytest.mark.parametrize("spec", [FoliationSpec.parametric(0.3), FoliationSpec.discrete(2, 0.5)], ids=str)
def test_generic_alpha_identity(spec, rng):
    z1, z2 = random_points(1000, rng)
    alpha, V = generic_alpha_value(spec, z1, z2, return_v=True)
    assert np.max(restricted_identity_residual(spec, alpha, z1, z2)) < 1e-12
    from thflows.models import omega_value
    assert np.max(np.abs(omega_value(spec, z1, z2)(V) - 1)) < 1e-12


def test_generic_alpha_degenerate():
    with pytest.raises(AlphaSolveError), np.errstate(invalid="ignore"):
        generic_alpha_value(FoliationSpec.parametric(0.3), np.nan, 0.0)


def test_quadrature_small_grid_converges():
    spec = FoliationSpec.parametric(0.3)
    exact = bott_closed_form(spec)
    r = bott_quadrature(spec, (16, 24, 24))
    assert abs(r.value - exact) < 1e-8 * abs(exact)
    assert r.error_estimate < 1e-6 * abs(exact)
    assert r.to_dict()["method"] == "quadrature_analytic_alpha"


def test_quadrature_grid_validation():
    with pytest.raises(ValueError):
        bott_quadrature(FoliationSpec.parametric(0.3), (4, 24, 24))
    with pytest.raises(ValueError):
        bott_quadrature(FoliationSpec.parametric(0.3), alpha_source="bogus")


def test_generic_small_grid():
    spec = FoliationSpec.discrete(1)
    r = bott_quadrature(spec, (24, 32, 32), "generic")
    exact = bott_closed_form(spec)
    assert abs(r.value - exact) < 1e-4 * abs(exact)


def test_homotopy_scan_validation():
    with pytest.raises(ValueError):
        bott_homotopy_scan(2, [0.5, 1.0])
    with pytest.raises(ValueError):
        bott_homotopy_scan(2, [0.0, 0.7, 0.3, 1.0])


def test_monodromy_closed_forms():
    a = 0.3
    spec = FoliationSpec.parametric(a)
    assert abs(monodromy_closed_form(spec, LEAF1) - 2j * math.pi * 0.7 / 0.3) < 1e-14
    assert abs(monodromy_closed_form(spec, LEAF2) - 2j * math.pi * 0.3 / 0.7) < 1e-14
    assert abs(monodromy_closed_form(FoliationSpec.discrete(3)) - 2j * math.pi / 3) < 1e-14
    with pytest.raises(SpecError):
        monodromy_closed_form(FoliationSpec.discrete(3), LEAF2)
    with pytest.raises(ValueError):
        monodromy_closed_form(spec, "elsewhere")


@pytest.mark.parametrize("spec,leaf", [
    (FoliationSpec.parametric(0.5 + 0.5j), LEAF1),
    (FoliationSpec.parametric(2 + 1j), LEAF2),
    (FoliationSpec.discrete(2), LEAF1),
])
def test_monodromy_numeric(spec, leaf):
    res = monodromy_numeric(spec, leaf)
    assert abs(res.log_monodromy - monodromy_closed_form(spec, leaf)) < 1e-4


def test_monodromy_richardson_improves():
    spec = FoliationSpec.discrete(1)
    exact = monodromy_closed_form(spec)
    raw = monodromy_numeric(spec, z0=2e-2, extrapolate=False).log_monodromy
    rich = monodromy_numeric(spec, z0=2e-2).log_monodromy
    assert abs(rich - exact) < abs(raw - exact)


def test_monodromy_argument_checks():
    spec = FoliationSpec.parametric(0.5)
    with pytest.raises(ValueError):
        monodromy_numeric(spec, z0=0.5)
    with pytest.raises(ValueError):
        monodromy_numeric(spec, n_seeds=3)


def test_recover_examples():
    rec = recover_parameter(-16 * PI2)
    assert rec.discrete_n == 1
    a1, a2 = rec.parametric
    assert abs(a1 - 0.5) < 1e-7 and abs(a2 - 0.5) < 1e-7
    rec = recover_parameter(-18 * PI2)
    assert rec.discrete_n == 2
    assert abs(rec.parametric[0] * (1 - rec.parametric[0]) - 2 / 9) < 1e-12
    assert recover_parameter(0).empty
    assert recover_parameter(complex("inf")).empty


def test_recover_outside_P():
    # a(1-a) = -1 gives real roots outside (0, 1)
    rec = recover_parameter(4 * PI2)
    assert rec.parametric is None and rec.discrete_n is None


def test_recover_roundtrip(rng):
    for _ in range(200):
        a = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        if abs(a.imag) < 1e-3:
            continue
        rec = recover_parameter(bott_closed_form(FoliationSpec.parametric(a)))
        assert min(abs(x - a) for x in rec.parametric) < 1e-10 * max(1, abs(a))
        a1, a2 = rec.parametric
        assert abs(a1 + a2 - 1) < 1e-12


def test_grid_doubling_within_estimate():
    spec = FoliationSpec.parametric(0.5 + 0.2j)
    coarse = bott_quadrature(spec, (10, 12, 12))
    fine = bott_quadrature(spec, (20, 24, 24))
    assert abs(fine.value - coarse.value) < 4 * coarse.error_estimate


def test_quadrature_geometric_convergence():
    # the analytic integrand is a trigonometric polynomial: exact on every grid
    spec = FoliationSpec.parametric(2 + 1j)
    exact = bott_closed_form(spec)
    for g in (8, 12, 16):
        assert abs(bott_quadrature(spec, (g, g, g)).value - exact) < 1e-13 * abs(exact)
    # the generic pipeline converges geometrically down to the finite-difference floor
    spec = FoliationSpec.discrete(2)
    exact = bott_closed_form(spec)
    errs = [abs(bott_quadrature(spec, (g, g, g), "generic").value - exact) for g in (8, 16, 24)]
    assert errs[1] < 1e-2 * errs[0] and errs[2] < 1e-2 * errs[1]
