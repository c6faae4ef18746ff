"""Command-line front end: ``hsikit <command> [manifold] [options]``.

Reports are JSON on stdout (sorted keys); logs go to stderr.  Exit codes:
0 success, 2 invalid input, 3 search gave up (Unknown) or no convergence.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from functools import lru_cache

from . import fieldtheory as ft
from . import hsicalc, linkdiag, manifolds, repvar
from .errors import HsikitError, NoConvergence

log = logging.getLogger("hsikit")

EXIT_OK, EXIT_INVALID, EXIT_UNKNOWN = 0, 2, 3

MANIFOLD_COMMANDS = ("h1", "euler", "hsi", "rank-bounds", "casson", "repvar", "plumbing-check",
                     "intersections", "cerf-check")


class _Exit(Exception):
    def __init__(self, code: int, report: dict | None = None, message: str = ""):
        super().__init__(message)
        self.code, self.report, self.message = code, report, message


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _parse_edges(text: str) -> tuple:
    edges = []
    for part in filter(None, text.split(",")):
        u, v = part.split("-")
        edges.append((int(u), int(v)))
    return tuple(edges)


def manifold_from_args(args):
    """ManifoldDesc and class bits from flags, or (None, None) if none given."""
    bits = list(args.class_c) if args.class_c is not None else None
    if args.lens:
        p = args.lens[0]
        q = args.lens[1] if len(args.lens) > 1 else 1
        return manifolds.Lens(p, q), bits
    if args.brieskorn:
        return manifolds.Brieskorn(tuple(args.brieskorn)), bits
    if args.s2xs1:
        return manifolds.S2xS1(), bits
    if args.plumbing:
        return manifolds.PlumbingTree(tuple(args.plumbing), _parse_edges(args.edges or "")), bits
    if args.torus_surgery:
        return manifolds.SurgeryOnTorusKnot(*args.torus_surgery), bits
    if args.json:
        obj = _load_json(args.json)
        m = obj.get("manifold", obj)
        if bits is None and "class_c" in m:
            bits = list(m["class_c"])
        return manifolds.from_json(m), bits
    return None, None


def _need_manifold(args):
    desc, bits = manifold_from_args(args)
    if desc is None:
        raise _Exit(EXIT_INVALID, message="a manifold is required (--lens, --brieskorn, ...)")
    return desc, bits


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("HSIKIT_SEED")
    return int(env) if env else 17


# -- commands ---------------------------------------------------------------

def cmd_h1(args):
    desc, _ = _need_manifold(args)
    torsion, betti = manifolds.h1(desc)
    return {"manifold": desc.label(), "torsion": torsion, "betti": betti,
            "h1_order": manifolds.h1_order(desc), "provenance": ["smith normal form"]}


def cmd_euler(args):
    desc, bits = _need_manifold(args)
    chk = hsicalc.euler_check(desc, bits)
    return {"manifold": desc.label(), "chi_abs": chk.chi_abs, "h1_order": chk.h1_order,
            "agrees": chk.agrees, "source": chk.source, "provenance": [hsicalc.EULER_LAW]}


def cmd_hsi(args):
    desc, bits = _need_manifold(args)
    return hsicalc.hsi(desc, bits).to_json()


def cmd_rank_bounds(args):
    desc, _ = manifold_from_args(args)
    if desc is not None:
        if not isinstance(desc, manifolds.Brieskorn):
            raise _Exit(EXIT_INVALID, message="rank bounds from a manifold need --brieskorn")
        out = hsicalc.brieskorn_bounds(desc.a).to_json()
        out["manifold"] = desc.label()
        out["chi_abs"] = manifolds.h1_order(desc)
        return out
    if args.triad is None:
        raise _Exit(EXIT_INVALID, message="give --brieskorn or --triad RANK_BETA RANK_GAMMA CHI")
    lo, hi = hsicalc.triad_rank_bounds(*args.triad)
    return {"rank_alpha": [lo, hi], "provenance": [hsicalc.TRIAD]}


def cmd_casson(args):
    desc, _ = _need_manifold(args)
    if not isinstance(desc, manifolds.Brieskorn):
        raise _Exit(EXIT_INVALID, message="casson needs --brieskorn")
    orbits = repvar.enumerate_brieskorn(desc.a)
    return {"manifold": desc.label(), "lambda": repvar.casson_brieskorn(desc.a),
            "irreducibles": len(orbits), "provenance": ["representation count"]}


def cmd_repvar(args):
    desc, bits = _need_manifold(args)
    twisted = bits is not None and any(bits)
    if isinstance(desc, manifolds.Lens):
        c = (0, 1) if twisted else (0, 0)
        prob = repvar.lens_problem(desc.p, desc.q, c)
        exact = repvar.enumerate_lens(desc.p, desc.q, c)
        exact_json = {"components": len(exact),
                      "kinds": {"central": sum(e.kind == "central" for e in exact),
                                "abelian": sum(e.kind == "abelian" for e in exact),
                                "irreducible": 0}}
    elif twisted:
        raise _Exit(EXIT_INVALID, message="twisted varieties are supported for lens spaces, "
                                          "or through 'intersections' with a chain")
    else:
        prob = repvar.TwistedRepProblem.untwisted(manifolds.pi1(desc))
        exact_json = None
        if isinstance(desc, manifolds.Brieskorn):
            n_irr = len(repvar.enumerate_brieskorn(desc.a))
            exact_json = {"components": n_irr + 1,
                          "kinds": {"central": 1, "abelian": 0, "irreducible": n_irr}}
    t0 = time.perf_counter()
    orbits = repvar.solve_numeric(prob, args.restarts, args.tol, _seed(args))
    log.info("solver finished in %.2f s", time.perf_counter() - t0)
    out = {"manifold": desc.label(), "orbits": [o.to_json() for o in orbits],
           "kinds": repvar.kind_histogram(orbits), "provenance": ["numerical solver"]}
    if exact_json is not None:
        out["exact"] = exact_json
        out["agrees"] = (exact_json["components"] == len(orbits)
                         and exact_json["kinds"] == out["kinds"])
    return out


def _diagram_from_args(args):
    if args.knot:
        if args.knot not in linkdiag.STANDARD:
            raise _Exit(EXIT_INVALID, message=f"unknown knot {args.knot!r}; "
                                              f"choose from {sorted(linkdiag.STANDARD)}")
        return linkdiag.STANDARD[args.knot]
    if args.pd:
        obj = _load_json(args.pd)
        return linkdiag.PDDiagram.from_json(obj.get("pd", obj) if isinstance(obj, dict) else obj)
    raise _Exit(EXIT_INVALID, message="qa-check needs --knot or --pd")


def cmd_qa_check(args):
    D = _diagram_from_args(args)
    det = linkdiag.safe_determinant(D)
    cert = linkdiag.certify_quasi_alternating(D)
    if isinstance(cert, linkdiag.Unknown):
        raise _Exit(EXIT_UNKNOWN, {"det": det, "status": "unknown", "reason": cert.reason,
                                   "provenance": [hsicalc.QA]})
    res = hsicalc.hsi(manifolds.DoubleBranchedCover(D))
    return {"det": det, "status": "quasi-alternating", "certificate": cert.to_json(),
            "verified": linkdiag.verify_certificate(cert), "double_cover_rank": res.rank,
            "double_cover_minimal": res.minimal, "provenance": [hsicalc.QA]}


def cmd_plumbing_check(args):
    desc, _ = _need_manifold(args)
    cert = hsicalc.certify_minimal(desc)
    if isinstance(cert, linkdiag.Unknown):
        raise _Exit(EXIT_UNKNOWN, {"manifold": desc.label(), "status": "unknown",
                                   "reason": cert.reason, "provenance": []})
    out = {"manifold": desc.label(), "status": "minimal", "rank": manifolds.h1_order(desc),
           "certificate": cert.to_json(), "verified": cert.verify(),
           "provenance": sorted(cert.rules())}
    if isinstance(desc, manifolds.PlumbingTree):
        out["det"] = abs(manifolds.plumbing_det(desc))
    return out


def _chain_from_args(args, which: str = "chain"):
    path = getattr(args, which, None)
    if path:
        return ft.CobordismChain.from_json(_load_json(path))
    desc, bits = manifold_from_args(args)
    if isinstance(desc, manifolds.Lens):
        c = tuple(bits) if bits else (0, 0)
        if len(c) != 2:
            raise _Exit(EXIT_INVALID, message="a lens chain takes two class bits (c0 c1)")
        return ft.lens_chain(desc.p, desc.q, c)
    if isinstance(desc, manifolds.S2xS1):
        return ft.s2xs1_chain(int(any(bits or ())))
    raise _Exit(EXIT_INVALID, message="give --chain FILE, --lens p q or --s2xs1")


def cmd_intersections(args):
    chain = _chain_from_args(args)
    prob = ft.generalized_intersections(chain)
    orbits = repvar.solve_numeric(prob, args.restarts, args.tol, _seed(args))
    return {"chain": chain.to_json(), "orbits": len(orbits),
            "kinds": repvar.kind_histogram(orbits), "provenance": ["generalized intersections"]}


def cmd_compose_check(args):
    if not (args.chain1 and args.chain2):
        raise _Exit(EXIT_INVALID, message="compose-check needs --chain1 and --chain2")
    c1 = ft.CobordismChain.from_json(_load_json(args.chain1))
    c2 = ft.CobordismChain.from_json(_load_json(args.chain2))
    out = ft.compose_check(c1, c2, args.samples, _seed(args), args.membership_tol)
    out["provenance"] = ["composition"]
    return out


MOVE_KINDS = {
    "diffeo": lambda d: ft.Diffeo(d["position"], tuple(tuple(t) for t in d["twists"])),
    "trivial_cylinder": lambda d: ft.TrivialCylinder(d["position"], d.get("insert", True)),
    "birth_death": lambda d: ft.BirthDeath(d["position"], d.get("pair", 0),
                                           d.get("insert", True)),
    "critical_switch": lambda d: ft.CriticalSwitch(d["position"]),
    "class_slide": lambda d: ft.ClassSlide(d["position"], tuple(d["u"])),
}

# applicable to every stabilized lens chain
STANDARD_MOVES = [
    {"kind": "diffeo", "position": 2, "twists": [["b", 0, 1], ["a", 1, 2]]},
    {"kind": "trivial_cylinder", "position": 3},
    {"kind": "birth_death", "position": 4, "pair": 0},
    {"kind": "critical_switch", "position": 0},
    {"kind": "class_slide", "position": 2, "u": [1, 0, 1, 0]},
]


def move_from_json(d: dict):
    if d.get("kind") not in MOVE_KINDS:
        raise _Exit(EXIT_INVALID, message=f"unknown Cerf move {d.get('kind')!r}")
    return MOVE_KINDS[d["kind"]](d)


def cmd_cerf_check(args):
    if args.chain:
        chain = ft.CobordismChain.from_json(_load_json(args.chain))
        if not args.moves:
            raise _Exit(EXIT_INVALID, message="--chain needs --moves FILE")
        moves = _load_json(args.moves)
    else:
        desc, bits = _need_manifold(args)
        if not isinstance(desc, manifolds.Lens):
            raise _Exit(EXIT_INVALID, message="cerf-check prepares chains for lens spaces only")
        chain = ft.stabilized_lens_chain(desc.p, desc.q, tuple(bits) if bits else (0, 0))
        moves = _load_json(args.moves) if args.moves else STANDARD_MOVES
    seed = _seed(args)
    base = ft.orbit_summary(chain, args.restarts, args.tol, seed)
    results = []
    for d in moves:
        new = ft.apply_cerf_move(chain, move_from_json(d))
        summary = ft.orbit_summary(new, args.restarts, args.tol, seed)
        results.append({"move": d, "length": len(new), **summary,
                        "invariant": summary == base})
    return {"base": base, "moves": results, "invariant": all(r["invariant"] for r in results),
            "provenance": ["cerf moves"]}


COMMANDS = {
    "h1": cmd_h1,
    "euler": cmd_euler,
    "hsi": cmd_hsi,
    "rank-bounds": cmd_rank_bounds,
    "casson": cmd_casson,
    "repvar": cmd_repvar,
    "qa-check": cmd_qa_check,
    "plumbing-check": cmd_plumbing_check,
    "compose-check": cmd_compose_check,
    "cerf-check": cmd_cerf_check,
    "intersections": cmd_intersections,
}


def _add_manifold_flags(p):
    g = p.add_argument_group("manifold")
    g.add_argument("--lens", type=int, nargs="+", metavar="P_Q", help="lens space L(p, q)")
    g.add_argument("--brieskorn", type=int, nargs=3, metavar="A", help="Brieskorn sphere")
    g.add_argument("--s2xs1", action="store_true", help="S^2 x S^1")
    g.add_argument("--plumbing", type=int, nargs="+", metavar="W", help="plumbing weights")
    g.add_argument("--edges", help="plumbing edges as '0-1,1-2'")
    g.add_argument("--torus-surgery", type=int, nargs=3, metavar=("R", "S", "N"),
                   help="n-surgery on the (r, s) torus knot")
    g.add_argument("--json", metavar="FILE", help="manifold description file")
    g.add_argument("--class", dest="class_c", type=int, nargs="+", metavar="BIT",
                   help="class c as Z/2 bits")


@lru_cache(maxsize=1)
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hsikit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--restarts", type=int, default=500)
        p.add_argument("--seed", type=int, default=None, help="default 17 or $HSIKIT_SEED")
        if name in MANIFOLD_COMMANDS:
            _add_manifold_flags(p)
        if name == "rank-bounds":
            p.add_argument("--triad", type=int, nargs=3,
                           metavar=("RANK_BETA", "RANK_GAMMA", "CHI_ALPHA"))
        if name == "qa-check":
            p.add_argument("--knot", help=f"one of {sorted(linkdiag.STANDARD)}")
            p.add_argument("--pd", metavar="FILE", help="PD code file")
        if name in ("intersections", "cerf-check"):
            p.add_argument("--chain", metavar="FILE", help="cobordism chain file")
        if name == "cerf-check":
            p.add_argument("--moves", metavar="FILE", help="list of Cerf moves")
        if name == "compose-check":
            p.add_argument("--chain1", metavar="FILE")
            p.add_argument("--chain2", metavar="FILE")
            p.add_argument("--samples", type=int, default=1000)
            p.add_argument("--membership-tol", type=float, default=1e-8)
    return parser


def _emit(report: dict, out) -> None:
    out.write(json.dumps(report, sort_keys=True) + "\n")


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    if args.tol <= 0 or args.restarts < 1:
        log.error("need --tol > 0 and --restarts >= 1")
        return EXIT_INVALID
    try:
        report = COMMANDS[args.command](args)
    except _Exit as e:
        if e.message:
            log.error(e.message)
        if e.report is not None:
            _emit(e.report, out)
        return e.code
    except NoConvergence as e:
        log.error("no convergence: %s", e)
        return EXIT_UNKNOWN
    except (HsikitError, ValueError, KeyError, OSError) as e:
        log.error("%s: %s", type(e).__name__, e)
        return EXIT_INVALID
    _emit(report, out)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
