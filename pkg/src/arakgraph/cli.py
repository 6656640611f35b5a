"""Command line interface: ``arakgraph COMMAND FILE ...``.

Exit status: 0 on success, 1 on usage or parse errors, 2 when the input
is semantically invalid (bad graph, fiber or point), 3 when an identity
check fails.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import admissible as A
from . import degeneration as D
from . import metrized as M
from . import pairing as PR
from .document import Document, ParseError, Report, fiber_to_dict, load, parse_point
from .graph import GraphError, betti_number, green_pseudoinverse, weighted_tree_count
from .metrized import AtVertex, InvalidPoint
from .randomgraphs import random_polarized_graph

EXIT_OK, EXIT_USAGE, EXIT_SEMANTIC, EXIT_IDENTITY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- commands -------------------------------------------------------------


def cmd_invariants(doc: Document) -> Report:
    P = doc.polarized
    g = P.graph
    rep = Report()
    rep.add("h", P.h, "genus of the polarization")
    rep.add("delta", g.volume, "volume of the graph")
    rep.add("epsilon", A.epsilon(P), "Zhang's epsilon-invariant")
    rep.add("tau", A.tau(P), "tau-invariant")
    rep.add("eta", M.eta(g), "eta-invariant of this model")
    rep.add("c", A.c_constant(P), "c(Gamma,K)")
    rep.add("betti", betti_number(g), "first Betti number")
    rep.add("treeConstant", weighted_tree_count(g), "sum over spanning trees of prod 1/length")
    for e in g.edges:
        rep.add(f"F.{e.id}", M.foster_coefficient(g, e.id), "Foster coefficient")
    return rep


def cmd_green(doc: Document, x: str, y: str) -> Report:
    P = doc.polarized
    px, py = parse_point(doc, x), parse_point(doc, y)
    rep = Report()
    rep.add("g_mu", A.green_admissible(P, px, py), "admissible Green's function")
    rep.add("r", M.resistance(P.graph, px, py), "effective resistance")
    if isinstance(px, AtVertex) and isinstance(py, AtVertex):
        rep.add("gbar", green_pseudoinverse(P.graph, px.vertex, py.vertex), "Laplacian pseudo-inverse")
    return rep


def cmd_resistance(doc: Document, x: str, y: str) -> Report:
    px, py = parse_point(doc, x), parse_point(doc, y)
    rep = Report()
    rep.add("r", M.resistance(doc.graph, px, py), "effective resistance")
    return rep


def _need_fiber(doc: Document) -> D.NodalFiberSpec:
    if doc.fiber is None:
        raise D.FiberError("this command needs a fiber document (integer multiplicities, no polarization)")
    return doc.fiber


def cmd_asymptotics(doc: Document, p: str | None = None, q: str | None = None) -> Report:
    fiber = _need_fiber(doc)
    rep = Report()
    ar = D.delta_asymptotics(fiber)
    rep.add("deltaSlope", ar.deltaSlope, "delta_F ~ -(delta+eps) log|t|")
    rep.add("volume", ar.volume, "delta: sum of multiplicities")
    rep.add("epsilon", ar.epsilon, "Zhang's epsilon-invariant")
    rep.add("betti", ar.bettiNumber, "first Betti number")
    rep.add("treeConstant", ar.treeConstant, "sum over spanning trees of prod 1/length")
    rep.add("note", ar.note)
    if q is not None and p is None:
        raise UsageError("--q needs --p")
    if p is not None:
        slopes = D.arakelov_asymptotics(fiber, p, q)
        rep.add("metricSlope", slopes.metricSlope, "log||dz(P)||_Ar ~ -g_mu(x,x) log|t|")
        if slopes.greenSlope is not None:
            rep.add("greenSlope", slopes.greenSlope, "g_Ar(P,Q) ~ g_mu(x,y) log|t|")
        lear = D.lear_coefficients(fiber, p, q)
        rep.extend(lear.items(), D.LearReport.TAGS, prefix="lear.")
    return rep


def _bundle(doc: Document, token: str) -> PR.AdmissibleBundle:
    P = doc.polarized
    parts = []
    for t in token.split("+"):
        t = t.strip()
        if t == "omega":
            parts.append(PR.omega_a(P))
            continue
        pt = parse_point(doc, t)
        if not isinstance(pt, AtVertex):
            raise InvalidPoint(f"{t!r}: points of bundles must specialize to vertices")
        parts.append(PR.admissible_of_point(P, pt.vertex))
    return PR.tensor(*parts)


def cmd_pairing(doc: Document, a: str, b: str) -> Report:
    P = doc.polarized
    ba, bb = _bundle(doc, a), _bundle(doc, b)
    rep = Report()
    rep.add("pairing", PR.intersection(P, ba.base, bb.base), f"<{ba.label},{bb.label}> coefficient of [0]")
    rep.add("degA", PR.curvature(P, ba.base).total_mass(), "total curvature of the first bundle")
    rep.add("degB", PR.curvature(P, bb.base).total_mass(), "total curvature of the second bundle")
    return rep


def cmd_check(doc: Document | None, n: int | None = None, seed: int | None = None) -> tuple[Report, bool]:
    rep = Report()
    checked = failed = 0
    first_failure = ""
    if doc is not None:
        targets = [doc.polarized]
        rng = random.Random(0 if seed is None else seed)
    else:
        rng = random.Random(seed)
        targets = (random_polarized_graph(rng) for _ in range(n))
    for P in targets:
        for res in A.verify_identities(P, rng=rng):
            checked += 1
            if not res.ok:
                failed += 1
                first_failure = first_failure or f"{res.name}: residual {res.residual}"
    if doc is not None and doc.fiber is not None and doc.sections:
        for res in lear_ledger_checks(doc.fiber):
            checked += 1
            if not res.ok:
                failed += 1
                first_failure = first_failure or f"{res.name}: residual {res.residual}"
    rep.add("graphs", 1 if doc is not None else n)
    rep.add("identities", checked)
    rep.add("violations", failed)
    if first_failure:
        rep.add("firstViolation", first_failure)
    return rep, failed == 0


def lear_ledger_checks(fiber: D.NodalFiberSpec) -> list[A.IdentityResult]:
    """Consistency relations among the Lear coefficients, for each section pair."""
    PG = D.polarized_graph_of(fiber)
    names = sorted(fiber.sections)
    out = []
    for p in names:
        lr = D.lear_coefficients(fiber, p)
        out.append(A.IdentityResult(f"4h^2 POmega [{p}]", 4 * PG.h**2 * lr.POmega - (lr.deltaPBsq + lr.kappaB)))
        for q in names:
            if q == p:
                continue
            lq = D.lear_coefficients(fiber, p, q)
            out.append(A.IdentityResult(f"deltaB [{p},{q}]", lq.deltaB - (2 * lq.PQ + lq.POmega + lq.QOmega)))
    return out


# -- entry point ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--decimal", type=int, metavar="DIGITS", default=argparse.SUPPRESS,
                        help="also print decimal approximations")
    common.add_argument("--format", choices=("text", "machine"), default=argparse.SUPPRESS)

    parser = _Parser(prog="arakgraph", description="Exact invariants of polarized metrized graphs.",
                     parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("invariants", parents=[common], help="scalar invariants of a graph or fiber")
    p.add_argument("file")
    for name, text in (("green", "admissible Green's function"), ("resistance", "effective resistance")):
        p = sub.add_parser(name, parents=[common], help=f"{text} between two points")
        p.add_argument("file")
        p.add_argument("x", help="vertex id, section name or edge:ID@p/q")
        p.add_argument("y")
    p = sub.add_parser("asymptotics", parents=[common], help="leading asymptotic coefficients of a fiber")
    p.add_argument("file")
    p.add_argument("--p", metavar="NAME")
    p.add_argument("--q", metavar="NAME")
    p = sub.add_parser("pairing", parents=[common], help="admissible pairing of two bundles")
    p.add_argument("file")
    p.add_argument("a", help="'omega', a vertex or section, or a '+'-joined combination")
    p.add_argument("b")
    p = sub.add_parser("desingularize", parents=[common], help="print the desingularized fiber document")
    p.add_argument("file")
    p = sub.add_parser("check", parents=[common], help="run the identity suite")
    p.add_argument("file", nargs="?")
    p.add_argument("--random", type=int, metavar="N")
    p.add_argument("--seed", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = getattr(args, "format", "text")
    decimal = getattr(args, "decimal", None)
    try:
        if args.command == "check":
            if (args.file is None) == (args.random is None):
                raise UsageError("check needs either FILE or --random N --seed S")
            if args.random is not None and args.seed is None:
                raise UsageError("--random needs --seed")
            doc = load(args.file) if args.file else None
            rep, ok = cmd_check(doc, args.random, args.seed)
            sys.stdout.write(rep.render(fmt, decimal))
            return EXIT_OK if ok else EXIT_IDENTITY
        doc = load(args.file)
        if args.command == "invariants":
            rep = cmd_invariants(doc)
        elif args.command == "green":
            rep = cmd_green(doc, args.x, args.y)
        elif args.command == "resistance":
            rep = cmd_resistance(doc, args.x, args.y)
        elif args.command == "asymptotics":
            rep = cmd_asymptotics(doc, args.p, args.q)
        elif args.command == "pairing":
            rep = cmd_pairing(doc, args.a, args.b)
        else:
            smooth = D.desingularize(_need_fiber(doc))
            sys.stdout.write(json.dumps(fiber_to_dict(smooth), indent=2) + "\n")
            return EXIT_OK
        sys.stdout.write(rep.render(fmt, decimal))
        return EXIT_OK
    except (ParseError, UsageError, OSError) as exc:
        print(f"arakgraph: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except A.IdentityViolation as exc:
        print(f"arakgraph: {exc}", file=sys.stderr)
        return EXIT_IDENTITY
    except (GraphError, InvalidPoint, KeyError) as exc:
        print(f"arakgraph: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())
