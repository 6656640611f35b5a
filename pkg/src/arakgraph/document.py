"""Graph documents (JSON) and exact-rational reports.

A document looks like::

    {
      "vertices": [{"id": "a", "genus": 1}, {"id": "b", "genus": 1}],
      "edges": [{"id": "n", "from": "a", "to": "b", "length": 1}],
      "sections": {"P": "a", "Q": "b"}
    }

Lengths are integers, ``"p/q"`` strings or decimal literals (read exactly,
never through binary floating point). With a ``"polarization"`` map the
document is a polarized metrized graph with that divisor ``K``. Otherwise
missing genera default to 0 and ``K(x) = v(x) - 2 + 2 q(x)``; when every
length is an integer the document is a degenerating fiber and
semistability is enforced.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

from . import admissible as A
from .degeneration import NodalFiberSpec, polarized_graph_of
from .graph import Edge, GraphError, NonPositiveLength, WeightedMultigraph
from .metrized import InvalidPoint, Point, make_point


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class UnknownPoint(InvalidPoint):
    pass


def parse_rational(value: Any, what: str = "value") -> Fraction:
    if isinstance(value, bool) or value is None:
        raise ParseError(f"{what}: expected a rational, got {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"{what}: cannot read {value!r} as a rational") from None
    raise ParseError(f"{what}: expected an integer or 'p/q' string, got {value!r}")


def format_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_decimal(x: Fraction, digits: int) -> str:
    """``x`` rounded (half to even) to ``digits`` places, computed exactly."""
    scaled = round(Fraction(x) * 10**digits)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    if digits == 0:
        return f"{sign}{scaled}"
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


@dataclass
class Document:
    """A parsed document: always a polarized graph, sometimes also a fiber."""

    polarized: A.PolarizedMetrizedGraph
    fiber: NodalFiberSpec | None = None
    sections: dict = field(default_factory=dict)

    @property
    def graph(self) -> WeightedMultigraph:
        return self.polarized.graph


def _decimal_exact(text: str) -> Fraction:
    return Fraction(text)


def loads(text: str) -> Document:
    try:
        raw = json.loads(text, parse_float=_decimal_exact)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return from_dict(raw)


def load(path: str) -> Document:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def _require(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{where}: missing key {key!r}")
    return obj[key]


def from_dict(raw: Any) -> Document:
    if not isinstance(raw, dict):
        raise ParseError("document must be an object")
    verts = _require(raw, "vertices", "document")
    edges = raw.get("edges", [])
    if not isinstance(verts, list) or not isinstance(edges, list):
        raise ParseError("'vertices' and 'edges' must be lists")
    ids, genera = [], {}
    for k, v in enumerate(verts):
        vid = _require(v, "id", f"vertices[{k}]") if isinstance(v, dict) else v
        if not isinstance(vid, (str, int)) or isinstance(vid, bool):
            raise ParseError(f"vertices[{k}]: id must be a string or integer")
        ids.append(vid)
        if isinstance(v, dict) and "genus" in v:
            q = v["genus"]
            if not isinstance(q, int) or isinstance(q, bool) or q < 0:
                raise ParseError(f"vertices[{k}]: genus must be a non-negative integer")
            genera[vid] = q
    parsed_edges = []
    for k, e in enumerate(edges):
        where = f"edges[{k}]"
        eid = e.get("id", f"e{k}") if isinstance(e, dict) else None
        tail = _require(e, "from", where)
        head = _require(e, "to", where)
        length = parse_rational(_require(e, "length", where), f"{where}.length")
        if length <= 0:
            raise NonPositiveLength(f"{where}: length {format_rational(length)} is not positive")
        parsed_edges.append(Edge(eid, tail, head, length))
    sections = raw.get("sections", {}) or {}
    if not isinstance(sections, dict):
        raise ParseError("'sections' must be an object")
    for name, target in sections.items():
        if target not in ids:
            raise UnknownPoint(f"section {name!r} specializes to unknown vertex {target!r}")

    graph = WeightedMultigraph(tuple(ids), tuple(parsed_edges))
    if "polarization" in raw:
        pol = raw["polarization"]
        if not isinstance(pol, dict):
            raise ParseError("'polarization' must be an object")
        K = {}
        for v, k in pol.items():
            if not isinstance(k, int) or isinstance(k, bool):
                raise ParseError(f"polarization[{v!r}] must be an integer")
            K[_vertex_key(v, ids)] = k
        return Document(A.PolarizedMetrizedGraph.from_divisor(graph, K), None, dict(sections))
    if all(e.length.denominator == 1 for e in parsed_edges):
        fiber = NodalFiberSpec(
            tuple((v, genera.get(v, 0)) for v in ids),
            tuple((e.id, e.tail, e.head, int(e.length)) for e in parsed_edges),
            dict(sections),
        )
        return Document(polarized_graph_of(fiber), fiber, dict(sections))
    return Document(A.PolarizedMetrizedGraph.canonical(graph, genera), None, dict(sections))


def _vertex_key(key: str, ids: list):
    """JSON object keys are strings; map them back onto integer vertex ids."""
    if key in ids:
        return key
    for v in ids:
        if str(v) == key:
            return v
    raise UnknownPoint(f"unknown vertex {key!r}")


def fiber_to_dict(fiber: NodalFiberSpec) -> dict:
    return {
        "vertices": [{"id": c, "genus": q} for c, q in fiber.components],
        "edges": [{"id": n, "from": a, "to": b, "length": m} for n, a, b, m in fiber.nodes],
        "sections": dict(fiber.sections),
    }


def document_to_dict(doc: Document) -> dict:
    if doc.fiber is not None:
        return fiber_to_dict(doc.fiber)
    g = doc.graph
    return {
        "vertices": [{"id": v} for v in g.vertices],
        "edges": [
            {"id": e.id, "from": e.tail, "to": e.head, "length": format_rational(e.length)}
            for e in g.edges
        ],
        "sections": dict(doc.sections),
        "polarization": {str(v): k for v, k in doc.polarized.K.items()},
    }


def parse_point(doc: Document, text: str) -> Point:
    """A vertex id, a section name, or ``edge:ID@p/q``."""
    g = doc.graph
    if text.startswith("edge:"):
        body = text[len("edge:"):]
        if "@" not in body:
            raise ParseError(f"point {text!r}: expected edge:ID@p/q")
        eid, pos = body.rsplit("@", 1)
        key = next((e.id for e in g.edges if str(e.id) == eid), None)
        if key is None:
            raise UnknownPoint(f"unknown edge {eid!r}")
        return make_point(g, key, parse_rational(pos, f"point {text!r}"))
    for v in g.vertices:
        if str(v) == text:
            return make_point(g, v)
    if text in doc.sections:
        return make_point(g, doc.sections[text])
    raise UnknownPoint(f"unknown point {text!r}")


# -- reports --------------------------------------------------------------


@dataclass
class Entry:
    key: str
    value: Any
    tag: str = ""


@dataclass
class Report:
    entries: list[Entry] = field(default_factory=list)

    def add(self, key: str, value, tag: str = "") -> None:
        self.entries.append(Entry(key, value, tag))

    def extend(self, items: Iterable[tuple[str, Any]], tags: dict | None = None, prefix: str = "") -> None:
        for k, v in items:
            self.add(prefix + k, v, (tags or {}).get(k, ""))

    def as_dict(self) -> dict:
        return {e.key: e.value for e in self.entries}

    def render(self, fmt: str = "text", decimal: int | None = None) -> str:
        rows = []
        for e in self.entries:
            approx = ""
            if decimal is not None and isinstance(e.value, Fraction):
                approx = format_decimal(e.value, decimal)
            rows.append((e, _render_value(e.value), approx))
        if fmt == "machine":
            lines = [f"{e.key} = {exact}" + (f" ~ {approx}" if approx else "") for e, exact, approx in rows]
            return "\n".join(lines) + "\n"
        kw = max((len(e.key) for e, _, _ in rows), default=0)
        vw = max((len(x) for _, x, _ in rows if len(x) <= 24), default=0)
        lines = []
        for e, exact, approx in rows:
            row = f"{e.key:<{kw}}  {exact:<{vw}}"
            if approx:
                row += f"  (approx {approx})"
            if e.tag:
                row += f"  [{e.tag}]"
            lines.append(row.rstrip())
        return "\n".join(lines) + "\n"


def _render_value(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, Fraction)):
        return format_rational(v)
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return str(v)


def parse_machine_report(text: str) -> dict:
    """Read ``key = value [~ approx]`` lines back into exact values."""
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, _, rest = line.partition(" = ")
        value = rest.split(" ~ ")[0].strip()
        if value == "inf":
            out[key] = math.inf
            continue
        try:
            out[key] = Fraction(value)
        except ValueError:
            out[key] = value
    return out


__all__ = [
    "Document",
    "Entry",
    "GraphError",
    "ParseError",
    "Report",
    "UnknownPoint",
    "document_to_dict",
    "fiber_to_dict",
    "format_decimal",
    "format_rational",
    "from_dict",
    "load",
    "loads",
    "parse_machine_report",
    "parse_point",
    "parse_rational",
]
