"""
Leaves, first integrals and Leau-Fatou petals
=============================================

Trace leaves on S^3, watch the first integrals stay put, and count the
attracting petals of the return map of omega_n on the disc {theta1 = 0}.
"""

import math

from thflows.forms import hopf_point
from thflows.leaves import asymptotic_case, conserved_drift, count_petals, slope_check, trace_leaf
from thflows.models import FoliationSpec

p0 = hopf_point(0.7, 0.3, -0.2)

# rational a: leaves are closed curves of slope a/(1-a) on the Hopf tori
for a in (1 / 3, 1 / 2, 2 / 3):
    tr = trace_leaf(FoliationSpec.parametric(a), p0, until_lift=(1, 4 * math.pi))
    drift, slope = slope_check(a, tr)
    print(f"a = {a:.4f}: r1 drift {drift:.1e}, d theta1 / d theta2 = {slope:.10f}")

# complex a: the sign of u = Re((1-a)/a) decides how leaves approach the Hopf circles
for a in ((1 + 1j) / 2, 0.5 + 0.2j, 2 + 1j):
    case = asymptotic_case(a)
    spec = FoliationSpec.parametric(a)
    lift, direction = (2, 1) if case.case == "U_ZERO" else ((1, -1) if case.u < 0 else (1, 1))
    tr = trace_leaf(spec, p0, until_lift=(lift, direction * 4 * math.pi), direction=direction)
    print(f"a = {a}: {case.case}, first-integral drift {conserved_drift(tr):.1e}")

# omega_n: every leaf spirals to the circle z2 = 0 at both ends
tr = trace_leaf(FoliationSpec.discrete(2), p0, t_max=300)
print(f"omega_2 after t = 300: r2 = {tr.r2[-1]:.4f}, theta1 lift = {tr.theta1_lift[-1]:.1f}")

for n in (1, 2, 3):
    rep = count_petals(n, detailed=True)
    tags = "".join(c[0] for c in rep.classifications)
    print(f"n = {n}: {rep.count} attracting petals  (seed classes {tags})")
