"""Transversely holomorphic flows on the 3-sphere, made computable.

Modules: forms (exterior algebra on C^2), models (the two families and
their residuals), invariants (Bott invariant, monodromy, recovery), leaves
(leaf tracing and petals), seifert (integer invariants), covers (the
branched cover p_n) and cli.
"""

__version__ = "0.1.0"

from .forms import FormField, FormValue, PointS3, TangentVector, eval_wedge, hopf_point, numeric_d, tangent_projection
from .models import FoliationSpec, KernelMultiplier, SpecError

__all__ = [
    "FormField",
    "FormValue",
    "PointS3",
    "TangentVector",
    "eval_wedge",
    "hopf_point",
    "numeric_d",
    "tangent_projection",
    "FoliationSpec",
    "KernelMultiplier",
    "SpecError",
]
