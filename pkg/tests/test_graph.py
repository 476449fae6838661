from fractions import Fraction as F
import json

import pytest
from hypothesis import given, strategies as st

from mirrorcurve.graph import (CapExceeded, Edge, IncompatibleEndpoints, MobiusMap, NotReduced,
                               ReducedPath, TrivalentGraph, back_transport, chart_change,
                               cycle_basis, enumerate_reduced_paths, k4_graph, path_transport,
                               schottky_generator, theta_graph, validate_graph)
from mirrorcurve.novikov import NovikovElement, T

SAMPLES = [F(-1), F(2), F(1, 3), F(5, 7)]


def brute_paths(g, start, max_len, budget):
    """Walks built edge by edge over all edges, filtered by incidence, reducedness and weight."""
    names = [e.name for e in g.edges]
    out = set()
    frontier = [((), start)]
    for _ in range(max_len + 1):
        nxt = []
        for seq, v in frontier:
            if F(1, 4) * sum(g.area(e) for e in seq) <= budget:
                out.add(seq)
            for e in names:
                if (seq and seq[-1] == e) or v not in g.edge(e).ends:
                    continue
                nxt.append((seq + (e,), g.edge(e).other(v)))
        frontier = nxt
    return out


def test_validate_examples(theta, k4):
    assert validate_graph(theta) == {"valid": True, "genus": 2, "violations": []}
    assert validate_graph(k4)["genus"] == 3 and validate_graph(k4)["valid"]
    bad = TrivalentGraph(["a", "b"], [Edge("x", ("a", "a"), 1), Edge("y", ("a", "b"), 1),
                                      Edge("z", ("b", "b"), 1)])
    rep = validate_graph(bad)
    assert not rep["valid"]
    assert any(p.startswith("loop at vertex a") for p in rep["violations"])


def test_validate_other_violations():
    g = TrivalentGraph(["a", "b", "c"], [Edge("x", ("a", "b"), 0), Edge("y", ("a", "b"), 1)])
    probs = validate_graph(g)["violations"]
    assert any("non-positive area" in p for p in probs)
    assert any("degree 2" in p for p in probs)
    assert any("not connected" in p for p in probs)


def test_spec_json_round_trip(theta):
    g = TrivalentGraph.from_json(json.dumps(theta.to_json()))
    assert g.to_json() == theta.to_json()
    assert g.charts["v0"] == {"e1": "0", "e2": "1", "e3": "inf"}


def test_default_charts_take_the_right_values():
    # t_0 = z, t_1 = (z-1)/z, t_inf = 1/(1-z): zero at own point, 1 and inf at the others
    points = {"0": F(0), "1": F(1), "inf": None}
    for lab in ("0", "1", "inf"):
        t = MobiusMap.chart(lab)
        vals = {}
        for p, z in points.items():
            vals[p] = t(z) if z is not None else t(__import__("mirrorcurve.graph").graph.INF)
        assert vals[lab] == 0
        rest = [vals[p] for p in points if p != lab]
        assert F(1) in rest and any(r is not None and not isinstance(r, F) for r in rest)


def test_generator_with_identity_charts():
    g = TrivalentGraph(["v", "w"], [Edge("a", ("v", "w"), F(3, 2)), Edge("b", ("v", "w"), 1),
                                    Edge("c", ("v", "w"), 1)],
                       {"v": {"a": "0", "b": "1", "c": "inf"}, "w": {"a": "0", "b": "1", "c": "inf"}})
    m = schottky_generator(g, "a", "v")
    assert m.projectively_equal(MobiusMap(0, T(F(3, 2)), 1, 0).novikov())


def test_generator_conjugated_by_evaluation():
    g = TrivalentGraph(["v", "w"], [Edge("a", ("v", "w"), 2), Edge("b", ("v", "w"), 1),
                                    Edge("c", ("v", "w"), 1)],
                       {"v": {"a": "1", "b": "0", "c": "inf"}, "w": {"a": "0", "b": "1", "c": "inf"}})
    gen = schottky_generator(g, "a", "v")
    for x in SAMPLES:
        y = gen(NovikovElement.constant(x), prec=8)
        lhs = g.chart("a", "w")(y, prec=8) * g.chart("a", "v")(x)
        assert (lhs - T(2)).truncate(6).is_zero()


@pytest.mark.parametrize("graph", [theta_graph(), k4_graph([1, 2, F(1, 2), 3, 1, F(3, 4)])])
def test_generators_are_mutually_inverse(graph):
    for e in graph.edges:
        u, w = e.ends
        assert (schottky_generator(graph, e.name, w) @ schottky_generator(graph, e.name, u)).is_identity()


def test_empty_path_is_chart_change(theta):
    P = ReducedPath(theta, "v0")
    assert path_transport(theta, P, "e1", "e2").projectively_equal(
        chart_change(theta, "v0", "e1", "e2").novikov())


def test_length_one_transport_by_evaluation(theta):
    P = ReducedPath(theta, "v0", ["e1"])
    gamma = path_transport(theta, P, "e2", "e3")
    for z1 in SAMPLES:
        t = theta.chart("e3", "v1")(z1)
        x = back_transport(theta, P)(NovikovElement.constant(z1), prec=10)
        expect = theta.chart("e2", "v0")(x, prec=10)
        assert (gamma(NovikovElement.constant(t), prec=10) - expect).truncate(8).is_zero()


def test_transport_errors(theta):
    P = ReducedPath(theta, "v0", ["e1"])
    with pytest.raises(NotReduced):
        path_transport(theta, P, "e2", "e1")
    with pytest.raises(NotReduced):
        ReducedPath(theta, "v0", ["e1", "e1"])
    with pytest.raises(IncompatibleEndpoints):
        path_transport(theta, P, "e2", "nope")


@given(st.lists(st.sampled_from(["e1", "e2", "e3"]), min_size=1, max_size=5),
       st.lists(st.sampled_from(["e1", "e2", "e3"]), min_size=1, max_size=5))
def test_transport_is_functorial(a, b):
    g = theta_graph()
    if any(x == y for x, y in zip(a, a[1:])) or any(x == y for x, y in zip(b, b[1:])):
        return
    P = ReducedPath(g, "v0", a)
    if a[-1] == b[0]:
        return
    Q = ReducedPath(g, P.end, b)
    PQ = ReducedPath(g, "v0", a + b)
    mid = next(e for e in g.incident[P.end] if e not in (a[-1],))
    last = next(e for e in g.incident[Q.end] if e != b[-1])
    lhs = path_transport(g, PQ, "e1", last)
    rhs = path_transport(g, P, "e1", mid) @ path_transport(g, Q, mid, last)
    assert lhs.projectively_equal(rhs)


def test_enumeration_small_budget(theta):
    assert [p.edges for p in enumerate_reduced_paths(theta, "v0", F(1, 8))] == [()]


def test_enumeration_against_brute_force(theta):
    # budget = A: all reduced paths of length <= 4; 1 + 3 + 6 + 12 + 24 of them
    paths = [p.edges for p in enumerate_reduced_paths(theta, "v0", 1, cap=100)]
    assert len(paths) == 46
    assert set(paths) == brute_paths(theta, "v0", 5, 1)
    assert [len(p) for p in paths] == sorted(len(p) for p in paths)


def test_enumeration_uneven_areas_against_brute_force():
    g = k4_graph([1, 2, F(1, 2), 3, 1, F(3, 4)])
    got = [p.edges for p in enumerate_reduced_paths(g, "v2", F(3, 2))]
    assert len(got) == len(set(got))
    assert set(got) == brute_paths(g, "v2", 12, F(3, 2))
    closed = {p.edges for p in enumerate_reduced_paths(g, "v2", F(3, 2), end="v2")}
    assert closed == {p for p in got if ReducedPath(g, "v2", p).end == "v2"}


def test_closed_path_count(theta):
    assert sum(1 for _ in enumerate_reduced_paths(theta, "v0", F(11, 8), end="v0")) == 31


def test_cap_exceeded(theta):
    with pytest.raises(CapExceeded):
        list(enumerate_reduced_paths(theta, "v0", 2, cap=3))


def test_cycle_basis(theta, k4):
    loops = cycle_basis(theta, "v0")
    assert [P.edges for P in loops] == [("e2", "e1"), ("e3", "e1")]
    assert len(cycle_basis(k4, "v0")) == 3
    for g in (theta, k4):
        for P in cycle_basis(g, "v0"):
            assert P.start == P.end == "v0"
