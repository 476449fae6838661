"""Theta functions of a rotated pair and the A-side/B-side Schottky cocycle comparison."""
from fractions import Fraction as F

from mirrorcurve.floer import VBObject
from mirrorcurve.graph import k4_graph, theta_graph
from mirrorcurve.theta_canonical import (IntersectionPoint, PointObject, WRONG_CONVENTION,
                                         compare_canonical, gluing_defect, theta_by_averaging,
                                         theta_by_hpl)

g = theta_graph()
L0 = VBObject(g)
L1 = VBObject(g, {e.name: 1 for e in g.edges})
x = IntersectionPoint.node("v0")

hpl, _ = theta_by_hpl(L0, L1, x, 1, 2)
for v in g.vertices:
    avg = theta_by_averaging(L0, L1, x, 1, v, 2)
    print("theta at %s: HPL and averaging agree mod T^2: %s" % (v, hpl[v].defect(avg) is None))
hi, _ = theta_by_hpl(L0, L1, x, 1, F(11, 4))
print("gluing defects:", {e.name: gluing_defect(L0, L1, hi, e.name, 2) for e in g.edges})

for g in (theta_graph(), k4_graph()):
    v0 = g.vertices[0]
    pt = PointObject(g, g.incident[v0][0], F(1, 2))
    rep = compare_canonical(g, pt, 2)
    print("%d-vertex graph, B = 1/2:" % len(g.vertices), "shipped convention passes:", rep["pass"],
          " wrong convention passes:", compare_canonical(g, pt, 2, convention=WRONG_CONVENTION)["pass"])
    for row in rep["loops"]:
        print("   loop %-24s %s" % ("-".join(row["loop"]), row["bside"]))
