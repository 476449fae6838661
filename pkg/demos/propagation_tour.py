"""Propagation coefficients on P^1 with marked points 0, 1, inf.

Expands t_0^{-k} in the coordinate at 1, compares with the closed form and
prints the partial-fraction constants K that appear in the tripod identity.
"""
from mirrorcurve.propagation import (K_coefficient, check_propagation_identities,
                                     closed_form_coefficient, expand_inverse_power, identities_pass)

for k in (1, 2, 3):
    ser = expand_inverse_power("0", "1", k, 6)
    closed = [closed_form_coefficient(("0", "1"), k, l) for l in range(7)]
    print("t_0^-%d in t_1:" % k, [str(c) for c in ser.coeffs], "closed form agrees:", closed == ser.coeffs)

print("K(0, 1; k1, k2) for k1, k2 <= 3:")
for k1 in range(1, 4):
    print("  ", [str(K_coefficient("0", "1", k1, k2)) for k2 in range(1, 4)])

rep = check_propagation_identities(None, 6)
for name, r in sorted(rep.items()):
    print("%-14s %5d checked, %d failed" % (name, r["checked"], len(r["failures"])))
print("all identities hold:", identities_pass(rep))
