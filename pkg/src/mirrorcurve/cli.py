"""Command-line front end.

Every subcommand writes a JSON report (``<out>/<subcommand>.json``, or
standard output when ``--out`` is not given) and a short human-readable
summary.  Exit status: 0 when every check passes, 1 on a failed check,
2 on a malformed or invalid input.

Reports carry a ``config`` block with the parameters actually used, so
``stability --report FILE`` can rerun the same computation with ``kmax``,
caps and budgets doubled and compare the ``values`` block.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from math import ceil
import json
import os
import sys
import time

from .floer import (VBObject, build_cf_end_L0, check_local_ring_map, cohomology_basis,
                    default_kmax, local_mu2)
from .graph import GraphError, TrivalentGraph, k4_graph, theta_graph, validate_graph
from .novikov import NovikovElement, as_fraction, frac_str
from .propagation import check_propagation_identities, identities_pass, prop_table_csv
from .theta_canonical import (SHIPPED_CONVENTION, WRONG_CONVENTION, IntersectionPoint,
                              PointObject, compare_canonical, default_group_budget,
                              default_theta_budget, gluing_defect, theta_by_averaging,
                              theta_by_hpl)

BUILTIN_GRAPHS = {"theta": theta_graph, "k4": k4_graph}
_ELAPSED = {}
DEFAULT_CAP = 64


class SpecError(Exception):
    """Bad input: exit status 2."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


def threads():
    try:
        return max(1, int(os.environ.get("MIRRORCURVE_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    """Map in worker processes when MIRRORCURVE_THREADS > 1; order is kept."""
    items = list(items)
    n = min(threads(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _fs(x):
    return None if x is None else frac_str(x)


# -- inputs ------------------------------------------------------------------------

def load_graph(spec):
    if spec in BUILTIN_GRAPHS and not os.path.exists(spec):
        g = BUILTIN_GRAPHS[spec]()
    else:
        try:
            g = TrivalentGraph.load(spec)
        except OSError as exc:
            raise SpecError("cannot read graph spec %s: %s" % (spec, exc))
        except (GraphError, json.JSONDecodeError) as exc:
            raise SpecError(str(exc))
    report = validate_graph(g)
    if not report["valid"]:
        raise SpecError("invalid graph", report["violations"])
    return g, report


def _rational(x, name):
    try:
        return as_fraction(x)
    except (TypeError, ValueError, ZeroDivisionError):
        raise SpecError("%s must be a rational p/q, got %r" % (name, x))


def _objects(g, cfg):
    """``(L, L', x)`` from an objects file, or the default pair at a node."""
    path = cfg.get("objects")
    data = {}
    if path:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecError("cannot read objects %s: %s" % (path, exc))
    try:
        L = VBObject.from_json(g, data["L"]) if "L" in data else VBObject(g)
        if "Lp" in data:
            Lp = VBObject.from_json(g, data["Lp"])
        else:
            r = int(cfg.get("rotation") or 1)
            Lp = VBObject(g, {e.name: r for e in g.edges})
        pt = data.get("point", {})
        v = pt.get("vertex", cfg.get("node") or g.vertices[0])
        if v not in g.incident:
            raise SpecError("unknown vertex %s" % v)
        if pt.get("edge"):
            rot = {tuple(k.split("/")): int(x) for k, x in pt["rot"].items()}
            area = {tuple(k.split("/")): as_fraction(x) for k, x in pt["area"].items()}
            x = IntersectionPoint(v, pt["edge"], rot, area)
        else:
            x = IntersectionPoint.node(v)
    except (KeyError, ValueError, TypeError) as exc:
        raise SpecError("malformed objects: %s" % exc)
    return L, Lp, x


# -- subcommands ----------------------------------------------------------------------
#
# Each returns (report, ok).  report["values"] holds what the stability
# audit compares.

def cmd_validate(g, rep, cfg):
    return {"values": rep}, True


def cmd_prop_table(g, rep, cfg):
    kmax = cfg["kmax"] or 8
    cfg["kmax"] = kmax
    rows = {}
    for line in prop_table_csv(g, kmax).splitlines()[1:]:
        v, e_in, e_out, k, l, val = line.split(",")
        rows["%s/%s/%s/%s/%s" % (v, e_in, e_out, k, l)] = val
    return {"values": {"coefficients": rows}, "csv": prop_table_csv(g, kmax)}, True


def cmd_check_identities(g, rep, cfg):
    kb = cfg["k_bound"]
    r = check_propagation_identities(g, kb)
    ok = identities_pass(r)
    counts = {name: {"checked": x["checked"], "failed": len(x["failures"])} for name, x in r.items()}
    return {"values": {"pass": ok}, "identities": counts,
            "failures": {name: x["failures"][:20] for name, x in r.items() if x["failures"]}}, ok


def cmd_floer_cohomology(g, rep, cfg):
    prec = cfg["precision"]
    kmax = cfg["kmax"] or default_kmax(g, prec)
    cfg["kmax"] = kmax
    cx = build_cf_end_L0(g, prec, kmax)
    co = cohomology_basis(cx)
    d2 = cx.d_squared_defect()
    d2_ok = d2 is None or d2 >= prec
    ok = d2_ok and cx.grading_ok() and co["h0"] == 1 and co["h1"] == g.genus()
    values = {"h0": co["h0"], "h1": co["h1"], "d_squared_zero": d2_ok}
    return {"values": values, "h0": co["h0"], "h1": co["h1"], "genus": g.genus(),
            "generators": len(cx.gens), "d_squared_defect": _fs(d2)}, ok


def _parse_local(g, v, s):
    if s == "p":
        return ("p", v)
    e, k = s.split(":")
    return ("P", e, v, -int(k))


def cmd_local_product(g, rep, cfg):
    prec = cfg["precision"]
    kmax = cfg["kmax"] or default_kmax(g, prec)
    cfg["kmax"] = kmax
    verts = [cfg["vertex"]] if cfg.get("vertex") else list(g.vertices)
    out = {"vertices": {}}
    ok = True
    if cfg.get("a") and cfg.get("b"):
        v = verts[0]
        try:
            a, b = _parse_local(g, v, cfg["a"]), _parse_local(g, v, cfg["b"])
            prod = local_mu2(g, v, a, b)
        except (ValueError, KeyError) as exc:
            raise SpecError(str(exc))
        out["product"] = [{"generator": list(z), "coefficient": c.to_json()}
                          for z, c in sorted(prod.items(), key=lambda t: str(t[0]))]
    for v in verts:
        r = check_local_ring_map(g, v, cfg["k_bound"], prec, kmax)
        out["vertices"][v] = {k: {"checked": x["checked"], "failures": x["failures"][:20]}
                              for k, x in r.items()}
        ok = ok and all(not x["failures"] for x in r.values())
    out["values"] = {"pass": ok, "product": out.get("product")}
    return out, ok


def _averaging_job(args):
    L, Lp, x, v, prec, budget, kmax, cap = args
    return v, theta_by_averaging(L, Lp, x, 1, v, prec, budget=budget, kmax=kmax, cap=cap)


def cmd_theta(g, rep, cfg):
    prec = cfg["precision"]
    L, Lp, x = _objects(g, cfg)
    try:
        budget = cfg["budget"] if cfg["budget"] is not None else default_theta_budget(g, L, Lp, x, prec)
    except ValueError as exc:
        raise SpecError(str(exc))
    kmax = cfg["kmax"] or int(ceil(4 * prec / g.min_area())) + 4
    cap = cfg["cap"] or DEFAULT_CAP
    cfg.update(budget=budget, kmax=kmax, cap=cap)
    hpl, _ = theta_by_hpl(L, Lp, x, 1, prec)
    avg = dict(_pmap(_averaging_job, [(L, Lp, x, v, prec, budget, kmax, cap) for v in g.vertices]))
    # gluing is checked on a run with room for the t^{+-r} shifts
    hi = prec + max(Fraction(3, 4) * e.area * abs(Lp.rotations[e.name] - L.rotations[e.name])
                    for e in g.edges)
    hpl_hi, _ = theta_by_hpl(L, Lp, x, 1, hi)
    glue = {e.name: _fs(gluing_defect(L, Lp, hpl_hi, e.name, prec)) for e in g.edges}
    cross = {v: _fs(hpl[v].defect(avg[v])) for v in g.vertices}
    ok = all(d is None for d in cross.values()) and all(d is None for d in glue.values())
    values = {"hpl": {v: hpl[v].to_json() for v in g.vertices},
              "averaging": {v: avg[v].to_json() for v in g.vertices}}
    return {"values": values, "cross_route_defect": cross, "gluing_defect": glue}, ok


def cmd_canonical_compare(g, rep, cfg):
    prec = cfg["precision"]
    v0 = cfg.get("vertex") or g.vertices[0]
    if v0 not in g.incident:
        raise SpecError("unknown vertex %s" % v0)
    e0 = cfg.get("edge") or g.incident[v0][0]
    if e0 not in g.incident[v0]:
        raise SpecError("edge %s is not at %s" % (e0, v0))
    B = cfg["B"] if cfg["B"] is not None else g.area(e0) / 2
    try:
        pt = PointObject(g, e0, B, NovikovElement.constant(cfg["holonomy"]), v0)
    except ValueError as exc:
        raise SpecError(str(exc))
    budget = cfg["budget"] if cfg["budget"] is not None else default_group_budget(g, prec)
    cap = cfg["cap"] or DEFAULT_CAP
    cfg.update(vertex=v0, edge=e0, B=B, budget=budget, cap=cap)
    conv = WRONG_CONVENTION if cfg.get("convention") == "wrong" else SHIPPED_CONVENTION
    r = compare_canonical(g, pt, prec, budget, conv, cfg["t0"], cap)
    values = {"loops": [{"loop": x["loop"], "aside": x["aside"], "bside": x["bside"]}
                        for x in r["loops"]]}
    r["values"] = values
    return r, r["pass"]


COMMANDS = {
    "validate": cmd_validate,
    "prop-table": cmd_prop_table,
    "check-identities": cmd_check_identities,
    "floer-cohomology": cmd_floer_cohomology,
    "local-product": cmd_local_product,
    "theta": cmd_theta,
    "canonical-compare": cmd_canonical_compare,
}

# parameters the stability audit doubles, per subcommand
DOUBLED = {
    "prop-table": ("kmax",),
    "floer-cohomology": ("kmax",),
    "local-product": ("kmax",),
    "theta": ("kmax", "cap", "budget"),
    "canonical-compare": ("cap", "budget"),
}


def _jsonable_config(cfg):
    out = {}
    for k, v in cfg.items():
        out[k] = frac_str(v) if isinstance(v, Fraction) else v
    return out


def _config_from_json(data):
    cfg = dict(data)
    for k in ("precision", "budget", "B", "holonomy", "t0"):
        if cfg.get(k) is not None:
            cfg[k] = as_fraction(cfg[k])
    return cfg


def run_config(cfg):
    """Run one subcommand; returns ``(report, exit_code)``."""
    cfg = dict(cfg)
    cmd = cfg["command"]
    if cfg.get("precision") is None or cfg["precision"] <= 0:
        raise SpecError("precision must be positive")
    for k in ("kmax", "cap"):
        if cfg.get(k) is not None and cfg[k] <= 0:
            raise SpecError("--%s must be positive" % k)
    g, rep = load_graph(cfg["graph"])
    start = time.time()
    report, ok = COMMANDS[cmd](g, rep, cfg)
    report = dict(report)
    report["command"] = cmd
    report["config"] = _jsonable_config(cfg)
    report["pass"] = bool(ok)
    # kept out of the JSON so reports stay deterministic
    _ELAPSED[cmd] = time.time() - start
    return report, 0 if ok else 1


def _first_difference(a, b, path="values", allow_extra=False):
    if isinstance(a, dict) and isinstance(b, dict):
        for k in a:
            if k not in b:
                return "%s/%s" % (path, k)
            d = _first_difference(a[k], b[k], "%s/%s" % (path, k), allow_extra)
            if d:
                return d
        if not allow_extra:
            for k in b:
                if k not in a:
                    return "%s/%s" % (path, k)
        return None
    if isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            return path
        for i, (x, y) in enumerate(zip(a, b)):
            d = _first_difference(x, y, "%s/%d" % (path, i), allow_extra)
            if d:
                return d
        return None
    return None if a == b else path


def stability_audit(report):
    """Rerun a report's computation with kmax, caps and budgets doubled."""
    cfg = _config_from_json(report["config"])
    cmd = cfg["command"]
    doubled = {}
    for k in DOUBLED.get(cmd, ()):
        if cfg.get(k) is not None:
            cfg[k] = 2 * cfg[k]
            doubled[k] = _jsonable_config({k: cfg[k]})[k]
    rerun, _ = run_config(cfg)
    diff = _first_difference(report["values"], rerun["values"],
                             allow_extra=(cmd == "prop-table"))
    return {"command": "stability", "audited": cmd, "doubled": doubled, "stable": diff is None, "first_difference": diff,
            "original_config": report["config"], "rerun_config": rerun["config"]}


# -- summaries ---------------------------------------------------------------------

def summary(report):
    cmd = report["command"]
    head = "%s: %s" % (cmd, "PASS" if report["pass"] else "FAIL")
    if cmd in _ELAPSED:
        head += " (%.1f s)" % _ELAPSED[cmd]
    lines = [head]
    if cmd == "validate":
        lines.append("genus %d" % report["values"]["genus"])
    elif cmd == "check-identities":
        for name, c in sorted(report["identities"].items()):
            lines.append("  %-14s %6d checked, %d failed" % (name, c["checked"], c["failed"]))
    elif cmd == "floer-cohomology":
        lines.append("  h0 = %d, h1 = %d (genus %d), d^2 defect %s" % (
            report["h0"], report["h1"], report["genus"], report["d_squared_defect"] or "none"))
    elif cmd == "theta":
        lines.append("  cross-route defects %s" % report["cross_route_defect"])
        lines.append("  gluing defects %s" % report["gluing_defect"])
    elif cmd == "canonical-compare":
        for row in report["loops"]:
            lines.append("  loop %s: defect %s" % ("-".join(row["loop"]), row["defect"] or "none"))
    elif cmd == "stability":
        lines.append("  %s rerun with %s doubled; first difference %s" % (
            report["audited"], ", ".join(sorted(report["doubled"])) or "nothing",
            report["first_difference"] or "none"))
    return "\n".join(lines)


def _emit(report, name, out):
    text = json.dumps(report, indent=1, sort_keys=True)
    if out:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, name + ".json"), "w") as fh:
            fh.write(text + "\n")
        if "csv" in report:
            with open(os.path.join(out, name + ".csv"), "w") as fh:
                fh.write(report["csv"])
        print(summary(report))
    else:
        print(text)
        print(summary(report), file=sys.stderr)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", default="theta",
                        help="graph spec JSON, or a builtin name (theta, k4)")
    common.add_argument("--precision", default="2", help="truncation T^Lambda, as p/q")
    common.add_argument("--kmax", type=int)
    common.add_argument("--cap", type=int, help="maximal path length")
    common.add_argument("--budget", help="path weight budget, as p/q")
    common.add_argument("--out", help="directory for the JSON report")
    p = argparse.ArgumentParser(prog="mirrorcurve", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common])
    sub.add_parser("prop-table", parents=[common])
    s = sub.add_parser("check-identities", parents=[common])
    s.add_argument("--k-bound", type=int, default=8)
    sub.add_parser("floer-cohomology", parents=[common])
    s = sub.add_parser("local-product", parents=[common])
    s.add_argument("--vertex")
    s.add_argument("--k-bound", type=int, default=5)
    s.add_argument("--a", help="'p' or 'e:k' for the rescaled p_{e/v,-k}")
    s.add_argument("--b")
    s = sub.add_parser("theta", parents=[common])
    s.add_argument("--objects", help="JSON with L, Lp and point")
    s.add_argument("--rotation", type=int, default=1, help="r_e of L' when no objects file")
    s.add_argument("--node", help="vertex of the node point when no objects file")
    s = sub.add_parser("canonical-compare", parents=[common])
    s.add_argument("--vertex")
    s.add_argument("--edge")
    s.add_argument("--B", dest="B")
    s.add_argument("--holonomy", default="1")
    s.add_argument("--t0", default="-1")
    s.add_argument("--convention", choices=["shipped", "wrong"], default="shipped")
    s = sub.add_parser("stability", parents=[common])
    s.add_argument("--report", required=True, help="a report written by an earlier run")
    return p


def config_from_args(ns):
    cfg = {k: v for k, v in vars(ns).items() if k != "out"}
    cfg["precision"] = _rational(ns.precision, "--precision")
    cfg["budget"] = None if ns.budget is None else _rational(ns.budget, "--budget")
    for k in ("B", "holonomy", "t0"):
        if cfg.get(k) is not None:
            cfg[k] = _rational(cfg[k], "--" + k)
    return cfg


def main(argv=None):
    ns = build_parser().parse_args(argv)
    try:
        if ns.command == "stability":
            try:
                with open(ns.report) as fh:
                    prior = json.load(fh)
                prior["config"], prior["values"]
            except (OSError, json.JSONDecodeError, KeyError) as exc:
                raise SpecError("cannot use report %s: %s" % (ns.report, exc))
            rep = stability_audit(prior)
            rep["pass"] = rep["stable"]
            _emit(rep, "stability", ns.out)
            if not rep["stable"]:
                print("unstable at %s" % rep["first_difference"], file=sys.stderr)
            return 0 if rep["stable"] else 1
        report, code = run_config(config_from_args(ns))
    except SpecError as exc:
        print("error: %s" % exc, file=sys.stderr)
        for v in exc.violations:
            print("  %s" % v, file=sys.stderr)
        return 2
    _emit(report, ns.command, ns.out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
