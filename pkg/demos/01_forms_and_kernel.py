"""
Forms on S^3 and the kernel line field
======================================

Evaluate omega^a on the sphere, check that it is integrable, and follow
the real line field Y on which both Re omega and Im omega vanish.
"""

import numpy as np

from thflows.forms import hopf_point, random_points
from thflows.models import (
    FoliationSpec,
    integrability_residual,
    kernel_multiplier_batch,
    kernel_vector,
    omega,
    omega_on_kernel,
    perturbed,
)

# a point in Hopf coordinates (eta, theta1, theta2)
p = hopf_point(0.4, 0.1, -0.3)
spec = FoliationSpec.parametric(0.5 + 0.2j)
print("omega at p:", np.round(omega(spec, p).coefficients, 4))

# integrability: omega ^ d omega vanishes identically on C^2
rng = np.random.default_rng(0)
z1, z2 = random_points(2000, rng)
print("max |omega ^ d omega|       :", np.max(integrability_residual(spec, (z1, z2))))

# while a small non-holomorphic perturbation breaks it
print("same, perturbed by conj(z1)dz2:", np.max(integrability_residual(perturbed(spec), (z1, z2))))

# Y is tangent to S^3 and annihilated by omega
Y1, Y2 = kernel_vector(spec, z1, z2)
print("max |<Y, z>| (tangency)     :", np.max(np.abs((Y1 * z1.conj() + Y2 * z2.conj()).real)))
print("max |omega(Y)|              :", np.max(omega_on_kernel(spec, (z1, z2))))

# the Lie derivative of omega along Y is h * omega; for 0 < Re a < 1 Im h never vanishes
h, res = kernel_multiplier_batch(spec, z1, z2)
print("multiplier residual         :", np.max(res))
print("Im h range                  :", h.imag.min(), h.imag.max())
