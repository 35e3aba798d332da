"""
The branched cover relating omega_n to omega_1
==============================================

p_n(z1, z2) = (n z1, z2^n) pulls omega_1 back to n z2^(n-1) omega_n.
Phi_n pushes the round sphere onto Sigma_n = p_n^{-1}(S^3) along complex
leaves, so p_n o Phi_n carries leaves of omega_n to leaves of omega_1.
The script also writes petal_curves.svg into the working directory.
"""

import math

import numpy as np

from thflows import svg
from thflows.covers import covered_leaf_constants, phi_n, pullback_residual, random_sigma_point, sigma_tangent, solve_zeta
from thflows.forms import PointS3, hopf_point
from thflows.leaves import petal_curves, trace_leaf
from thflows.models import FoliationSpec

rng = np.random.default_rng(1)
for n in (2, 3):
    worst = 0.0
    for _ in range(100):
        p = random_sigma_point(n, rng)
        v = sigma_tangent(n, p.z1, p.z2, tuple(complex(*rng.standard_normal(2)) for _ in range(2)))
        worst = max(worst, pullback_residual(n, p, v))
    print(f"n = {n}: pullback identity residual {worst:.1e}")

p = PointS3(0.6, 0.8j)
print("zeta at (0.6, 0.8i), n = 2:", solve_zeta(2, p), " Phi_2 image:", phi_n(2, p).coords)

tr = trace_leaf(FoliationSpec.discrete(3), hopf_point(0.7, 0.3, -0.2), until_lift=(1, 4 * math.pi))
c = covered_leaf_constants(3, tr)
print("omega_1 leaf constants along the image of an omega_3 leaf vary by", np.max(np.abs(c - c[0])))

series = [curve for c1 in (-1.0, 0.0, 1.0) for curve in petal_curves(3, c1)]
with open("petal_curves.svg", "w") as fh:
    fh.write(svg.render([{"series": series, "title": "petal curves, n = 3", "xlabel": "Re z2", "ylabel": "Im z2",
                          "xlim": (-1, 1), "ylim": (-1, 1), "equal": True}], {"demo": "06_branched_cover"}))
print("wrote petal_curves.svg")
