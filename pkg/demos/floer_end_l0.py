"""The Floer complex End(L0) of the theta graph and its transferred A-infinity structure."""
from mirrorcurve.floer import build_cf_end_L0, cohomology_basis, end_L0_ainfinity, local_mu2
from mirrorcurve.graph import theta_graph
from mirrorcurve.hpl import verify_ainfinity

g = theta_graph()
cx = build_cf_end_L0(g, 2)
co = cohomology_basis(cx)
print("generators:", len(cx.gens), " h0 =", co["h0"], " h1 =", co["h1"], " genus =", g.genus())

# HPL transfer of the pulled-back cup product, checked up to arity 4
c, _, mu_L, _ = end_L0_ainfinity(g, 2, n_max=4)
print("contraction sound:", c.sound())
print("A-infinity relations to arity 4:", verify_ainfinity(mu_L, 4)["pass"])

# local degree-zero products at v0 match multiplication of t^{-k}
for a, b in ((("P", "e1", "v0", -1), ("P", "e2", "v0", -1)), (("P", "e1", "v0", -2), ("P", "e1", "v0", -1))):
    prod = local_mu2(g, "v0", a, b)
    print(a, "*", b, "=", {z: str(x) for z, x in prod.items()})
