"""Marked weighted polygons and the group actions on them.

A representative is a convex rational polygon with marked interior points
c_j and signs eps_j. Each mark carries a vertical cut going up (eps=+1) or
down (eps=-1) to the boundary. Flipping a cut changes the representative
by the piecewise shear that is T**u on the right of the mark.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import floor
from typing import Iterable, Sequence

from .rational_geometry import (
    ConvexPolygon,
    DegeneratePolygonError,
    NonConvexImageError,
    PiecewiseShear,
    Point,
    T,
    add,
    cross,
    det,
    fmt_rat,
    hull,
    point,
    primitive,
    rat,
    scale,
    sl2z_length,
    sub,
    t_power,
)


class CornerClass(str, Enum):
    DELZANT = "Delzant"
    HIDDEN = "Hidden"
    FAKE = "Fake"
    INVALID = "Invalid"


class InadmissibleError(ValueError):
    """The requested group element sends the polygon to a non-convex set."""


class ChopInfeasibleError(ValueError):
    pass


class UnchopInfeasibleError(ValueError):
    pass


@dataclass(frozen=True)
class Mark:
    c: Point
    eps: int

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise ValueError("cut sign must be +1 or -1")


@dataclass(frozen=True)
class MarkedWeightedPolygon:
    polygon: ConvexPolygon
    marks: tuple[Mark, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "marks", tuple(sorted(self.marks, key=lambda m: m.c)))

    @classmethod
    def build(cls, vertices: Iterable, marks: Iterable = ()) -> "MarkedWeightedPolygon":
        poly = hull([point(x, y) for x, y in vertices])
        ms = tuple(Mark(point(*c), int(e)) for c, e in marks)
        return cls(poly, ms)

    @property
    def s(self) -> int:
        return len(self.marks)

    @property
    def eps(self) -> tuple[int, ...]:
        return tuple(m.eps for m in self.marks)

    def cut_endpoint(self, j: int) -> Point:
        """Point where the cut of mark j meets the boundary."""
        m = self.marks[j]
        fib = self.polygon.fiber(m.c[0])
        if fib is None:
            raise ValueError("mark lies outside the polygon")
        return (m.c[0], fib[1] if m.eps == 1 else fib[0])

    def on_cuts(self, p: Point) -> bool:
        for m in self.marks:
            if p[0] == m.c[0] and (p[1] - m.c[1]) * m.eps >= 0:
                return True
        return False

    def to_json(self) -> dict:
        return {
            "polygon": self.polygon.to_json(),
            "marks": [{"c": [fmt_rat(m.c[0]), fmt_rat(m.c[1])], "eps": m.eps} for m in self.marks],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MarkedWeightedPolygon":
        return cls.build(data["polygon"], [(m["c"], m["eps"]) for m in data.get("marks", [])])


# ---------------------------------------------------------------- corners


def corner_vectors(poly: ConvexPolygon, q: Point) -> tuple[tuple[int, int], tuple[int, int]]:
    """(u, v) at vertex q: u toward the next vertex, v toward the previous one."""
    prev, nxt = poly.neighbors(q)
    return primitive(sub(nxt, q)), primitive(sub(prev, q))


def classify_corner(mp: MarkedWeightedPolygon, vertex) -> CornerClass:
    q = point(*vertex)
    if q not in mp.polygon.vertices:
        raise ValueError(f"{q} is not a vertex of the polygon")
    u, v = corner_vectors(mp.polygon, q)
    if mp.on_cuts(q):
        d = det(u, T.apply(v))
        if d == 0:
            return CornerClass.FAKE
        if d == 1:
            return CornerClass.HIDDEN
        return CornerClass.INVALID
    return CornerClass.DELZANT if det(u, v) == 1 else CornerClass.INVALID


@dataclass
class ValidityReport:
    valid: bool
    violations: list[str] = field(default_factory=list)
    corners: dict = field(default_factory=dict)

    def fake_or_hidden(self) -> list[Point]:
        return [q for q, c in self.corners.items() if c in (CornerClass.FAKE, CornerClass.HIDDEN)]


def validate(mp: MarkedWeightedPolygon) -> ValidityReport:
    violations: list[str] = []
    xs = [m.c[0] for m in mp.marks]
    if any(a >= b for a, b in zip(xs, xs[1:])):
        violations.append("mark abscissas are not strictly increasing")
    interior_ok = True
    for j, m in enumerate(mp.marks):
        where = mp.polygon.locate(m.c)
        if where != "interior":
            violations.append(f"mark {j} at {_fmt(m.c)} is not interior ({where})")
            interior_ok = False
    if interior_ok:
        for j in range(mp.s):
            e = mp.cut_endpoint(j)
            if e not in mp.polygon.vertices:
                violations.append(f"cut {j} meets the boundary at {_fmt(e)}, which is not a corner")
    corners = {}
    for q in mp.polygon.vertices:
        cls = classify_corner(mp, q)
        corners[q] = cls
        if cls is CornerClass.INVALID:
            violations.append(f"corner {_fmt(q)} fails the corner conditions")
    return ValidityReport(not violations, violations, corners)


def _fmt(p: Point) -> str:
    return f"({fmt_rat(p[0])}, {fmt_rat(p[1])})"


# ---------------------------------------------------------------- group action


@dataclass(frozen=True)
class GroupElement:
    """Cut flips, then T**k about the origin, then a vertical shift."""

    k: int = 0
    shift: Fraction = Fraction(0)
    flips: tuple[int, ...] | None = None

    def flip_vector(self, s: int) -> tuple[int, ...]:
        if self.flips is None:
            return (1,) * s
        if len(self.flips) != s:
            raise ValueError("flip vector length differs from the number of marks")
        return tuple(self.flips)


def flip_shear(mp: MarkedWeightedPolygon, flips: Sequence[int]) -> PiecewiseShear:
    cuts = []
    for m, f in zip(mp.marks, flips):
        u = (m.eps - m.eps * f) // 2
        if u:
            cuts.append((m.c[0], u))
    return PiecewiseShear(tuple(cuts))


def group_point_map(g: GroupElement, mp: MarkedWeightedPolygon):
    """The planar map a group element induces on the given representative."""
    ps = flip_shear(mp, g.flip_vector(mp.s))
    m = t_power(g.k)

    def f(p: Point) -> Point:
        x, y = m.apply(ps.apply(p))
        return (x, y + g.shift)

    return f


def apply_group(g: GroupElement, mp: MarkedWeightedPolygon) -> MarkedWeightedPolygon:
    flips = g.flip_vector(mp.s)
    ps = flip_shear(mp, flips)
    try:
        poly = mp.polygon.map_piecewise(ps)
    except NonConvexImageError as exc:
        raise InadmissibleError(str(exc)) from exc
    poly = poly.transform(t_power(g.k)).translate((Fraction(0), rat(g.shift)))
    f = group_point_map(g, mp)
    marks = tuple(Mark(f(m.c), m.eps * e) for m, e in zip(mp.marks, flips))
    return MarkedWeightedPolygon(poly, marks)


def flip_to(mp: MarkedWeightedPolygon, signs: Sequence[int]) -> MarkedWeightedPolygon:
    """Representative with the requested cut signs, same T-frame."""
    flips = tuple(1 if m.eps == s else -1 for m, s in zip(mp.marks, signs))
    return apply_group(GroupElement(flips=flips), mp)


def canonical_form(mp: MarkedWeightedPolygon) -> tuple:
    """A complete invariant of the orbit.

    All cuts are flipped up. The bottom edge leaving the lowest leftmost
    vertex is sheared to slope in [0, 1), and that vertex is moved to
    height 0. Abscissas are fixed by the whole group, so nothing else is free.
    """
    up = flip_to(mp, (1,) * mp.s)
    v0 = up.polygon.vertices[0]
    v1 = up.polygon.vertices[1]
    p, q = primitive(sub(v1, v0))
    k = -floor(Fraction(q, p))
    m = t_power(k)
    y0 = m.apply(v0)[1]
    g = GroupElement(k=k, shift=-y0, flips=(1,) * up.s)
    canon = apply_group(g, up)
    return (canon.polygon.vertices, tuple((m_.c, m_.eps) for m_ in canon.marks))


def orbit_equal(a: MarkedWeightedPolygon, b: MarkedWeightedPolygon) -> bool:
    if a.s != b.s:
        return False
    return canonical_form(a) == canonical_form(b)


def representatives(mp: MarkedWeightedPolygon):
    """Yield (flips, representative, point map) over every admissible cut-flip choice."""
    for flips in itertools.product((1, -1), repeat=mp.s):
        g = GroupElement(flips=flips)
        try:
            rep = apply_group(g, mp)
        except InadmissibleError:
            continue
        yield flips, rep, group_point_map(g, mp)


# ---------------------------------------------------------------- chops


def _triangle_meets_cuts(tri: ConvexPolygon, mp: MarkedWeightedPolygon) -> bool:
    for m in mp.marks:
        fib = tri.fiber(m.c[0])
        if fib is None:
            continue
        lo, hi = fib
        if m.eps == 1 and hi >= m.c[1]:
            return True
        if m.eps == -1 and lo <= m.c[1]:
            return True
    return False


def _chop_in_rep(rep: MarkedWeightedPolygon, q: Point, lam: Fraction) -> ConvexPolygon:
    if q not in rep.polygon.vertices:
        raise ChopInfeasibleError("point is not a corner in this representative")
    if classify_corner(rep, q) is not CornerClass.DELZANT:
        raise ChopInfeasibleError("corner is not Delzant in this representative")
    prev, nxt = rep.polygon.neighbors(q)
    if not (sl2z_length(q, prev) > lam and sl2z_length(q, nxt) > lam):
        raise ChopInfeasibleError("chop size is not smaller than both adjacent edge lengths")
    u, v = corner_vectors(rep.polygon, q)
    a, b = add(q, scale(lam, u)), add(q, scale(lam, v))
    tri = hull([q, a, b])
    if _triangle_meets_cuts(tri, rep):
        raise ChopInfeasibleError("chop simplex meets a cut")
    others = [p for p in rep.polygon.vertices if p != q]
    return hull(others + [a, b])


def corner_chop(mp: MarkedWeightedPolygon, vertex, lam) -> MarkedWeightedPolygon:
    """Remove the lattice simplex of size lam at a Delzant corner.

    The corner may be Delzant in any cut-flip representative; the result is
    returned in the frame of ``mp``.
    """
    lam = rat(lam)
    if lam <= 0:
        raise ChopInfeasibleError("chop size must be positive")
    q0 = point(*vertex)
    if mp.polygon.locate(q0) != "boundary":
        raise ChopInfeasibleError("chop point is not on the boundary")
    reasons = []
    for flips, rep, f in representatives(mp):
        try:
            poly = _chop_in_rep(rep, f(q0), lam)
        except ChopInfeasibleError as exc:
            reasons.append(f"flips {flips}: {exc}")
            continue
        chopped = MarkedWeightedPolygon(poly, rep.marks)
        try:
            return flip_to(chopped, mp.eps)
        except InadmissibleError as exc:
            reasons.append(f"flips {flips}: {exc}")
    raise ChopInfeasibleError("; ".join(reasons) or "no admissible representative")


def _unchop_in_rep(rep: MarkedWeightedPolygon, a: Point, b: Point, lam: Fraction) -> ConvexPolygon:
    vs = rep.polygon.vertices
    if a not in vs or b not in vs:
        raise UnchopInfeasibleError("segment is not an edge in this representative")
    n = len(vs)
    ia, ib = vs.index(a), vs.index(b)
    if (ia + 1) % n != ib:
        if (ib + 1) % n == ia:
            a, b, ia, ib = b, a, ib, ia
        else:
            raise UnchopInfeasibleError("segment is not an edge in this representative")
    if sl2z_length(a, b) != lam:
        raise UnchopInfeasibleError(f"edge has lattice length {sl2z_length(a, b)}, not {lam}")
    p, nx = vs[ia - 1], vs[(ib + 1) % n]
    d1, d2 = sub(a, p), sub(b, nx)
    den = cross(d1, d2)
    if den == 0:
        raise UnchopInfeasibleError("adjacent edges are parallel")
    # a + s*d1 = b + r*d2
    w = sub(b, a)
    s_ = cross(w, d2) / den
    r_ = cross(w, d1) / den
    if s_ <= 0 or r_ <= 0:
        raise UnchopInfeasibleError("adjacent edges do not meet beyond the edge")
    q = add(a, scale(s_, d1))
    others = [x for x in vs if x not in (a, b)]
    try:
        poly = hull(others + [q])
    except DegeneratePolygonError as exc:
        raise UnchopInfeasibleError(str(exc)) from exc
    if q not in poly.vertices or len(poly) != n - 1:
        raise UnchopInfeasibleError("glued point does not produce a corner")
    glued = MarkedWeightedPolygon(poly, rep.marks)
    if classify_corner(glued, q) is not CornerClass.DELZANT:
        raise UnchopInfeasibleError("glued corner is not Delzant")
    u, v = corner_vectors(poly, q)
    if add(q, scale(lam, u)) != b or add(q, scale(lam, v)) != a:
        raise UnchopInfeasibleError("edge is not the chop edge of size lam at the glued corner")
    if _triangle_meets_cuts(hull([q, a, b]), rep):
        raise UnchopInfeasibleError("glued triangle meets a cut")
    return poly


def corner_unchop(mp: MarkedWeightedPolygon, edge, lam) -> MarkedWeightedPolygon:
    """Glue back the simplex whose chop produced ``edge`` (a pair of endpoints)."""
    lam = rat(lam)
    a0, b0 = point(*edge[0]), point(*edge[1])
    reasons = []
    for flips, rep, f in representatives(mp):
        try:
            poly = _unchop_in_rep(rep, f(a0), f(b0), lam)
        except UnchopInfeasibleError as exc:
            reasons.append(f"flips {flips}: {exc}")
            continue
        glued = MarkedWeightedPolygon(poly, rep.marks)
        try:
            return flip_to(glued, mp.eps)
        except InadmissibleError as exc:
            reasons.append(f"flips {flips}: {exc}")
    raise UnchopInfeasibleError("; ".join(reasons) or "no admissible representative")


# ---------------------------------------------------------------- cut removal


def remove_cut(mp: MarkedWeightedPolygon, j: int, required_sign: int) -> MarkedWeightedPolygon:
    """Forget mark j in the representative where its cut has the given sign."""
    if not 0 <= j < mp.s:
        raise IndexError(f"mark index {j} out of range for {mp.s} marks")
    signs = list(mp.eps)
    signs[j] = required_sign
    rep = flip_to(mp, signs)
    return MarkedWeightedPolygon(rep.polygon, rep.marks[:j] + rep.marks[j + 1:])


# ---------------------------------------------------------------- slope audit


@dataclass
class SlopeAuditEntry:
    vertex: Point
    left_slope: Fraction
    right_slope: Fraction
    expected: Fraction
    passed: bool


def top_boundary(poly: ConvexPolygon) -> list[Point]:
    """Upper chain from left to right."""
    vs = poly.vertices
    n = len(vs)
    i_right = max(range(n), key=lambda i: (vs[i][0], vs[i][1]))
    chain = []
    i = i_right
    while True:
        chain.append(vs[i])
        if vs[i][0] == poly.xmin:
            break
        i = (i + 1) % n
    chain.reverse()
    return chain


def slope_change_audit(mp: MarkedWeightedPolygon, weights: dict | None = None,
                       ff_counts: dict | None = None) -> list[SlopeAuditEntry]:
    weights = {point(*k): v for k, v in (weights or {}).items()}
    if ff_counts is None:
        # focus-focus values below the top boundary are the upward marks
        ff_counts = {}
        for m in mp.marks:
            if m.eps == 1:
                ff_counts[m.c[0]] = ff_counts.get(m.c[0], 0) + 1
    ff_counts = {rat(k): v for k, v in ff_counts.items()}
    chain = top_boundary(mp.polygon)
    out = []
    for left, q, right in zip(chain, chain[1:], chain[2:]):
        sl = (q[1] - left[1]) / (q[0] - left[0])
        sr = (right[1] - q[1]) / (right[0] - q[0])
        if q in weights:
            a, b = weights[q]
            w = Fraction(-1, abs(a * b))
        else:
            w = Fraction(0)
        expected = w - ff_counts.get(q[0], 0)
        out.append(SlopeAuditEntry(q, sl, sr, expected, sr - sl == expected))
    return out
