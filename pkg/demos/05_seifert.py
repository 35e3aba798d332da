"""
Seifert invariants for rational a
=================================

For a = p1/(p1+p2) every leaf is closed and S^3 is Seifert fibred with
two exceptional fibres.  Dividing by a cyclic group gives orbifolds
S^2(k1, k2) as quotients of lens spaces.
"""

from fractions import Fraction

from thflows.seifert import descend_lens, from_rational_a, resonance_check

for a in ("1/2", "2/3", "3/5", "5/13"):
    s = from_rational_a(a)
    print(f"a = {a:5s} -> (p1, p2) = ({s.p1}, {s.p2}), b = {s.b}, "
          f"(q1, q2) = ({s.q1}, {s.q2}), Euler number {s.euler_number()}")

for k in ((1, 1), (2, 4), (1, 3), (3, 5)):
    d = descend_lens(*k)
    print(f"S^2{k}: m = {d.m}, regular fibre 2pi*{d.regular_fiber_len}, multiplicities {d.multiplicities}")

for a in (Fraction(2, 3), Fraction(1, 4), Fraction(1, 2)):
    print(f"resonance at a = {a}: {resonance_check(a)}")
