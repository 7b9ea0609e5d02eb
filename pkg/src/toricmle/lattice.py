"""Reflexive lattice polygons and their toric surfaces.

A reflexive polygon has the origin as its only interior lattice point and
every edge at lattice distance one from it.  The normal fan of such a polygon
describes a canonical (Du Val) toric Del Pezzo surface; a vertex whose two
inward edge normals span a sublattice of index ``m > 1`` gives a singular
point of type ``A_{m-1}``.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from math import gcd
from typing import NamedTuple

from .errors import GeometryError, MalformedInputError, UnsupportedModelError

__all__ = [
    "LatticePoint",
    "LatticePolygon",
    "Cone2D",
    "SingularityProfile",
    "ValidationReport",
    "CatalogEntry",
    "validate_reflexive",
    "boundary_lattice_points",
    "interior_lattice_points",
    "lattice_points",
    "normal_fan",
    "singularity_profile",
    "polytope_to_matrix",
    "normalized_area",
    "catalog",
    "lookup",
    "catalog_to_json",
    "catalog_from_json",
    "CATALOG_FORMAT_VERSION",
]

CATALOG_FORMAT_VERSION = 1


class LatticePoint(NamedTuple):
    x: int
    y: int


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class LatticePolygon:
    """Convex lattice polygon given by its vertices in counterclockwise order."""

    vertices: tuple
    label: str = ""

    def __post_init__(self):
        verts = tuple(LatticePoint(int(x), int(y)) for x, y in self.vertices)
        if len(verts) < 3:
            raise MalformedInputError(
                f"polygon {self.label!r} needs at least 3 vertices, got {len(verts)}")
        object.__setattr__(self, "vertices", verts)

    @classmethod
    def from_points(cls, points, label=""):
        """Convex hull of arbitrary lattice points, vertices counterclockwise."""
        pts = sorted({(int(x), int(y)) for x, y in points})
        if len(pts) < 3:
            raise MalformedInputError("need at least 3 distinct points")
        lower, upper = [], []
        for p in pts:
            while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
                lower.pop()
            lower.append(p)
        for p in reversed(pts):
            while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
                upper.pop()
            upper.append(p)
        hull = lower[:-1] + upper[:-1]
        if len(hull) < 3:
            raise MalformedInputError("points are collinear")
        return cls(tuple(hull), label)

    def edges(self):
        n = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def transform(self, M, shift=(0, 0)):
        """Image under ``v -> M v + shift`` for an integer 2x2 matrix ``M``.

        Orientation is restored if ``det M < 0``.
        """
        (a, b), (c, d) = M
        verts = [(a * x + b * y + shift[0], c * x + d * y + shift[1]) for x, y in self.vertices]
        if a * d - b * c < 0:
            verts = verts[::-1]
        return LatticePolygon(tuple(verts), self.label)


@dataclass(frozen=True)
class Cone2D:
    """Two-dimensional cone spanned by two primitive integer rays."""

    ray1: tuple
    ray2: tuple

    def __post_init__(self):
        for r in (self.ray1, self.ray2):
            if gcd(*r) != 1:
                raise GeometryError(f"ray {r} is not primitive")
        if self.determinant == 0:
            raise GeometryError(f"degenerate cone: rays {self.ray1} and {self.ray2} are parallel")

    @property
    def determinant(self):
        return self.ray1[0] * self.ray2[1] - self.ray1[1] * self.ray2[0]

    @property
    def index(self):
        """Index of the sublattice spanned by the two rays."""
        return abs(self.determinant)


@dataclass(frozen=True)
class SingularityProfile:
    """Multiset of ``A_k`` singular points, stored as sorted ``k`` values (largest first)."""

    entries: tuple = ()

    def __post_init__(self):
        entries = tuple(sorted((int(k) for k in self.entries), reverse=True))
        if any(k < 1 for k in entries):
            raise ValueError("A_k requires k >= 1")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def parse(cls, names):
        return cls(tuple(int(str(n).upper().lstrip("A").lstrip("_")) for n in names))

    @property
    def names(self):
        return [f"A{k}" for k in self.entries]

    def counter(self):
        return Counter(self.entries)

    def __str__(self):
        if not self.entries:
            return "smooth"
        parts = []
        for k, n in sorted(self.counter().items(), reverse=True):
            parts.append(f"{n}A{k}" if n > 1 else f"A{k}")
        return "+".join(parts)


@dataclass
class ValidationReport:
    ok: bool
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def _edge_line(p, q):
    """Primitive ``(a, b, c)`` with ``a x + b y = c`` on edge pq and ``a x + b y >= c`` inside.

    Assumes counterclockwise orientation, so the interior is to the left.
    """
    dx, dy = q[0] - p[0], q[1] - p[1]
    a, b = -dy, dx
    g = gcd(a, b)
    a, b = a // g, b // g
    return a, b, a * p[0] + b * p[1]


def _contains(poly, pt, strict=False):
    for p, q in poly.edges():
        c = _cross(p, q, pt)
        if c < 0 or (strict and c == 0):
            return False
    return True


def _bounding_box(poly):
    xs = [v.x for v in poly.vertices]
    ys = [v.y for v in poly.vertices]
    return min(xs), max(xs), min(ys), max(ys)


def interior_lattice_points(poly):
    x0, x1, y0, y1 = _bounding_box(poly)
    return [LatticePoint(x, y) for x in range(x0, x1 + 1) for y in range(y0, y1 + 1)
            if _contains(poly, (x, y), strict=True)]


def validate_reflexive(poly):
    """Check convexity, orientation and reflexivity of ``poly``.

    Returns a :class:`ValidationReport`; ``report.violations`` names every
    failing vertex, edge or interior point.
    """
    if len(poly.vertices) < 3:
        raise MalformedInputError("polygon needs at least 3 vertices")
    verts = poly.vertices
    n = len(verts)
    problems = []
    if len(set(verts)) != n:
        problems.append("repeated vertex")
    for i in range(n):
        turn = _cross(verts[i - 1], verts[i], verts[(i + 1) % n])
        if turn == 0:
            problems.append(f"vertex {tuple(verts[i])} is collinear with its neighbours")
        elif turn < 0:
            problems.append(f"vertex {tuple(verts[i])} breaks counterclockwise convexity")
    if problems:
        return ValidationReport(False, problems)

    for p, q in poly.edges():
        a, b, c = _edge_line(p, q)
        # origin inside means a*0 + b*0 >= c, i.e. c <= 0; lattice distance is |c|
        if c != -1:
            problems.append(
                f"edge {tuple(p)}-{tuple(q)} lies at lattice distance {abs(c)} from the origin"
                + ("" if c < 0 else " on the wrong side"))
    interior = interior_lattice_points(poly)
    if interior != [LatticePoint(0, 0)]:
        problems.append(f"interior lattice points are {[tuple(p) for p in interior]}, not just the origin")
    return ValidationReport(not problems, problems)


def _require_reflexive(poly):
    report = validate_reflexive(poly)
    if not report.ok:
        raise MalformedInputError(f"polygon {poly.label!r} is not reflexive: {report.violations}")


def boundary_lattice_points(poly):
    """All lattice points on the boundary, counterclockwise from the lexicographically smallest."""
    _require_reflexive(poly)
    pts = []
    for p, q in poly.edges():
        dx, dy = q[0] - p[0], q[1] - p[1]
        g = gcd(dx, dy)
        sx, sy = dx // g, dy // g
        pts.extend(LatticePoint(p[0] + k * sx, p[1] + k * sy) for k in range(g))
    start = pts.index(min(pts))
    return pts[start:] + pts[:start]


def lattice_points(poly):
    """Boundary points (counterclockwise, lexicographic start) followed by interior points."""
    return boundary_lattice_points(poly) + interior_lattice_points(poly)


def normal_fan(poly):
    """One :class:`Cone2D` per vertex, spanned by the inward normals of the two incident edges."""
    _require_reflexive(poly)
    normals = [_edge_line(p, q)[:2] for p, q in poly.edges()]
    # edge i joins vertex i and vertex i+1, so vertex i sits between edges i-1 and i
    return [Cone2D(normals[i - 1], normals[i]) for i in range(len(normals))]


def singularity_profile(poly):
    return SingularityProfile(tuple(c.index - 1 for c in normal_fan(poly) if c.index > 1))


def normalized_area(poly):
    """Twice the Euclidean area (shoelace)."""
    v = poly.vertices
    return abs(sum(v[i - 1].x * v[i].y - v[i].x * v[i - 1].y for i in range(len(v))))


def polytope_to_matrix(poly, label=None):
    """Lift a reflexive polygon to the 3-row model matrix of its lattice points.

    Column ``j`` is ``(x_j', y_j', h - x_j' - y_j')`` where ``(x', y')`` are the
    lattice points translated into the first quadrant and ``h`` is the largest
    coordinate sum, so all columns sum to ``h``.  A translate of a reflexive
    polygon is accepted and recentred on its single interior lattice point
    first; the lifted matrix does not depend on the translation.
    """
    from .model import ToricModel

    interior = interior_lattice_points(poly)
    if len(interior) == 1 and interior[0] != (0, 0):
        poly = poly.transform([[1, 0], [0, 1]], shift=(-interior[0].x, -interior[0].y))
    pts = lattice_points(poly)
    xmin = min(p.x for p in pts)
    ymin = min(p.y for p in pts)
    shifted = [(p.x - xmin, p.y - ymin) for p in pts]
    h = max(x + y for x, y in shifted)
    matrix = [[x for x, _ in shifted], [y for _, y in shifted], [h - x - y for x, y in shifted]]
    return ToricModel(matrix, label=label if label is not None else poly.label)


# ---------------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class CatalogEntry:
    """A reflexive polygon together with its statistical model data.

    ``model_label`` and ``ideal`` are filled for the polygons that carry an
    ML degree in the reference table; ``column_order`` maps the
    ``polytope_to_matrix`` columns onto model coordinates (``p_{i+1}`` is
    lattice point ``column_order[i]``); ``ideal_columns`` renames the
    reference ideal's coordinates into model coordinates where they differ.
    """

    label: str
    polygon: LatticePolygon
    model_label: str | None = None
    aliases: tuple = ()
    ideal: tuple = ()
    ml_degree: int | None = None
    column_order: tuple | None = None
    ideal_columns: tuple | None = None
    note: str = ""

    @property
    def degree(self):
        return len(boundary_lattice_points(self.polygon))

    @property
    def singularities(self):
        return singularity_profile(self.polygon)

    def ideal_binomials(self):
        """Reference ideal generators, expressed in model coordinates."""
        from .model import parse_binomial

        m = len(lattice_points(self.polygon))
        gens = [parse_binomial(text, m) for text in self.ideal]
        if self.ideal_columns is not None:
            gens = [g.permuted(self.ideal_columns) for g in gens]
        return gens

    def model(self):
        """The toric model in the coordinate order of the reference ideal."""
        base = polytope_to_matrix(self.polygon, label=self.model_label or self.label)
        if self.column_order is None:
            return base
        cols = [[row[j] for j in self.column_order] for row in base.matrix]
        return type(base)(cols, label=base.label)


# (polygon label, counterclockwise vertices, model label, aliases, reference ideal,
#  known ML degree, column order, ideal coordinates, note)
#
# ``column order`` picks the polytope_to_matrix columns that form the model's
# coordinates p1, p2, ...; for the cubic and quartics it reproduces the
# displayed matrices of the closed-form derivations.  ``ideal coordinates``
# maps the reference ideal's p_{i+1} to a model coordinate when the two
# orders differ (None means identical).  Both were found by matching kernel
# lattices and are re-derived by the test suite.
_CATALOG_DATA = [
    ("3", [(1, 0), (0, 1), (-1, -1)], "S3", ("S_3",),
     ("p1*p2*p3 - p4^3",), 3, (1, 2, 0, 3), None, ""),
    ("4a", [(1, 1), (-1, 1), (0, -1)], "S4_A3", ("S4''", "S_4''"),
     ("p2*p4 - p3^2", "p1*p3 - p5^2"), 4, (1, 2, 3, 0, 4), None,
     "quartic with A3+2A1; the ML-degree table lists it as S4'' while the "
     "closed-form derivation names the same surface S4'''"),
    ("4b", [(1, 0), (0, 1), (-1, 0), (0, -1)], "S4", ("S_4",),
     ("p1*p4 - p5^2", "p2*p3 - p1*p4"), 4, (2, 3, 1, 0, 4), None, ""),
    ("4c", [(1, 0), (0, 1), (-1, 1), (0, -1)], "S4_A2", ("S4'", "S_4'"),
     ("p2*p4 - p3*p5", "p1*p3 - p5^2"), 4, (2, 3, 0, 1, 4), (3, 2, 1, 0, 4),
     "quartic with A2+2A1; the ML-degree table lists it as S4' in its own coordinates, "
     "the closed-form derivation names it S4'' with ideal p1*p3 - p2*p5, p2*p4 - p5^2"),
    ("5a", [(1, 0), (-1, 1), (-1, -1), (0, -1)], "S5'", ("S_5'", "S5p"),
     ("p3*p5 - p4*p6", "p2*p5 - p6^2", "p2*p4 - p3*p6", "p1*p4 - p2*p6", "p2^2 - p1*p3"),
     5, (3, 4, 0, 1, 2, 5), None, ""),
    ("5b", [(1, 0), (0, 1), (-1, 0), (-1, -1), (0, -1)], "S5", ("S_5",),
     ("p3*p5 - p4*p6", "p2*p5 - p6^2", "p2*p4 - p3*p6", "p1*p4 - p6^2", "p1*p3 - p2*p6"),
     3, (2, 1, 0, 4, 3, 5), None, ""),
    ("6a", [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)], "S6", ("S_6",),
     ("p4*p6 - p5*p7", "p3*p6 - p7^2", "p2*p6 - p1*p7", "p3*p5 - p4*p7", "p2*p5 - p7^2",
      "p1*p5 - p6*p7", "p2*p4 - p3*p7", "p1*p4 - p7^2", "p1*p3 - p2*p7"),
     6, (0, 1, 2, 3, 4, 5, 6), None, ""),
    ("6b", [(1, 0), (0, 1), (-1, 1), (-1, -1), (0, -1)], "S6'", ("S_6'", "S6p"),
     ("p5*p6 - p1*p7", "p4*p6 - p2*p7", "p3*p5 - p4*p7", "p2*p5 - p7^2", "p2*p4 - p3*p7",
      "p1*p4 - p7^2", "p1*p3 - p2*p7", "p2^2 - p3*p6", "p1*p2 - p6*p7"),
     6, (1, 5, 4, 3, 2, 0, 6), None, ""),
    ("6c", [(1, 1), (-1, 1), (-1, -1), (0, -1)], "S6''", ("S_6''", "S6pp"),
     ("p6^2 - p5*p7", "p4*p6 - p3*p7", "p3*p6 - p2*p7", "p4*p5 - p2*p7", "p3*p5 - p2*p6",
      "p2*p4 - p1*p7", "p3^2 - p1*p7", "p2*p3 - p1*p6", "p2^2 - p1*p5"),
     6, (2, 3, 6, 1, 4, 5, 0), None, ""),
    ("6d", [(1, -1), (0, 1), (-2, -1)], "S6'''", ("S_6'''", "S6ppp"),
     ("p6^2 - p5*p7", "p5*p6 - p4*p7", "p3*p6 - p2*p7", "p5^2 - p4*p6", "p3*p5 - p2*p6",
      "p3*p4 - p2*p5", "p3^2 - p1*p6", "p2*p3 - p1*p5", "p2^2 - p1*p4"),
     6, (4, 5, 6, 0, 1, 2, 3), None, ""),
    ("7a", [(1, 0), (1, 1), (-1, 1), (-1, -1), (0, -1)], None, (), (), None, None, None, ""),
    ("7b", [(1, -1), (1, 0), (0, 1), (-2, -1)], None, (), (), None, None, None, ""),
    ("8a", [(1, -1), (1, 1), (-1, 1), (-1, -1)], None, (), (), None, None, None, ""),
    ("8b", [(0, -1), (1, 0), (1, 2), (-2, -1)], None, (), (), None, None, None, ""),
    ("8c", [(2, -1), (0, 1), (-2, -1)], None, (), (), None, None, None, ""),
    ("9", [(2, -1), (-1, 2), (-1, -1)], None, (), (), None, None, None, ""),
]


def _build_catalog():
    out = []
    for label, verts, mlabel, aliases, ideal, mld, order, ideal_cols, note in _CATALOG_DATA:
        out.append(CatalogEntry(label, LatticePolygon(tuple(verts), label), mlabel,
                                tuple(aliases), tuple(ideal), mld, order, ideal_cols, note))
    return tuple(out)


_CATALOG = None


def catalog():
    """All 16 reflexive polygons, ordered by number of boundary points."""
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = _build_catalog()
    return list(_CATALOG)


def lookup(name):
    """Find a catalog entry by polygon label, model label or alias."""
    key = str(name).strip()
    for entry in catalog():
        names = {entry.label, entry.model_label, *entry.aliases} - {None}
        if key in names:
            return entry
    known = ", ".join(sorted({e.model_label for e in catalog() if e.model_label} |
                             {e.label for e in catalog()}))
    raise UnsupportedModelError(f"unknown model {name!r}; known labels: {known}")


def catalog_to_json(entries=None):
    """Serialize the catalog as a versioned JSON-compatible dict."""
    entries = catalog() if entries is None else entries
    rows = []
    for e in entries:
        row = {
            "label": e.label,
            "vertices": [list(v) for v in e.polygon.vertices],
            "degree": e.degree,
            "singularities": e.singularities.names,
            "ideal": list(e.ideal),
        }
        if e.model_label:
            row["model"] = e.model_label
            row["aliases"] = list(e.aliases)
        if e.ml_degree is not None:
            row["ml_degree"] = e.ml_degree
        if e.column_order is not None:
            row["column_order"] = list(e.column_order)
        if e.ideal_columns is not None:
            row["ideal_columns"] = list(e.ideal_columns)
        if e.note:
            row["note"] = e.note
        rows.append(row)
    return {"version": CATALOG_FORMAT_VERSION, "polygons": rows}


def catalog_from_json(doc):
    """Inverse of :func:`catalog_to_json`; accepts a dict or a JSON string."""
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    if doc.get("version") != CATALOG_FORMAT_VERSION:
        raise MalformedInputError(f"unsupported catalog version {doc.get('version')!r}")
    out = []
    for row in doc["polygons"]:
        poly = LatticePolygon(tuple(tuple(v) for v in row["vertices"]), row["label"])
        order = row.get("column_order")
        icols = row.get("ideal_columns")
        out.append(CatalogEntry(row["label"], poly, row.get("model"), tuple(row.get("aliases", ())),
                                tuple(row.get("ideal", ())), row.get("ml_degree"),
                                tuple(order) if order is not None else None,
                                tuple(icols) if icols is not None else None, row.get("note", "")))
    return out
