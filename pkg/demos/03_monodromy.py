"""
Holonomy of the Hopf circles
============================

Both Hopf circles are closed leaves of omega^a.  The return map of a
small disc transversal has derivative exp(log-monodromy) at the origin,
estimated here from seeds at two radii and extrapolated.
"""

from thflows.invariants import LEAF1, LEAF2, monodromy_closed_form, monodromy_numeric
from thflows.models import FoliationSpec

cases = [(FoliationSpec.parametric(a), leaf) for a in (1 / 3, (1 + 1j) / 2) for leaf in (LEAF1, LEAF2)]
cases += [(FoliationSpec.discrete(n), LEAF1) for n in (1, 2, 3)]

for spec, leaf in cases:
    res = monodromy_numeric(spec, leaf)
    exact = monodromy_closed_form(spec, leaf)
    way = "forward" if res.direction > 0 else "backward"
    print(f"{str(spec):28s} {leaf}: {res.log_monodromy:.8f}  exact {exact:.8f}  ({way} flow)")
