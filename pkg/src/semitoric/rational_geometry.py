"""Exact lattice-affine plane geometry over the rationals.

Points are pairs of ``Fraction``. Polygons are strictly convex, stored
counterclockwise from their lexicographically smallest vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Rat = Fraction
Point = tuple[Fraction, Fraction]


class DegeneratePolygonError(ValueError):
    """Raised when a point set does not span a 2-dimensional polygon."""


class NonConvexImageError(ValueError):
    """Raised when a piecewise map sends a polygon to a non-convex set."""


def rat(value) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string into a Fraction.

    Floats are rejected on purpose: polygon data must stay exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot build an exact rational from {value!r}")


def point(x, y) -> Point:
    return (rat(x), rat(y))


def fmt_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def sub(a: Point, b: Point) -> Point:
    return (a[0] - b[0], a[1] - b[1])


def add(a: Point, b: Point) -> Point:
    return (a[0] + b[0], a[1] + b[1])


def scale(k, a: Point) -> Point:
    return (k * a[0], k * a[1])


def cross(a, b) -> Fraction:
    return a[0] * b[1] - a[1] * b[0]


def det(u, v) -> Fraction:
    return cross(u, v)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def primitive(d: Point) -> tuple[int, int]:
    """Primitive integer vector pointing along the rational vector ``d``."""
    if d[0] == 0 and d[1] == 0:
        raise ValueError("zero vector has no direction")
    den = _lcm(Fraction(d[0]).denominator, Fraction(d[1]).denominator)
    a, b = int(d[0] * den), int(d[1] * den)
    g = gcd(a, b)
    return (a // g, b // g)


def sl2z_length(a: Point, b: Point) -> Fraction:
    """Lattice length of the segment [a, b]: the l with b - a = l * primitive."""
    d = sub(b, a)
    if d == (0, 0):
        return Fraction(0)
    p = primitive(d)
    return d[0] / p[0] if p[0] != 0 else d[1] / p[1]


@dataclass(frozen=True)
class LatticeMatrix:
    a: int
    b: int
    c: int
    d: int

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "LatticeMatrix") -> "LatticeMatrix":
        return LatticeMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "LatticeMatrix":
        dt = self.det()
        if dt not in (1, -1):
            raise ValueError("only unimodular lattice matrices are invertible over Z")
        return LatticeMatrix(self.d * dt, -self.b * dt, -self.c * dt, self.a * dt)

    def power(self, k: int) -> "LatticeMatrix":
        base = self if k >= 0 else self.inverse()
        out = IDENTITY
        for _ in range(abs(k)):
            out = out @ base
        return out

    def apply(self, p: Point) -> Point:
        return (self.a * p[0] + self.b * p[1], self.c * p[0] + self.d * p[1])


IDENTITY = LatticeMatrix(1, 0, 0, 1)
# The vertical shear; it fixes the vertical direction.
T = LatticeMatrix(1, 0, 1, 1)


def apply_shear(m: LatticeMatrix, p: Point) -> Point:
    return m.apply(p)


def t_power(k: int) -> LatticeMatrix:
    """T**k in closed form."""
    return LatticeMatrix(1, 0, k, 1)


@dataclass(frozen=True)
class PiecewiseShear:
    """Composition of the maps that are the identity left of x = lam and T**k right of it.

    The factors commute (each only adds k*(x - lam)_+ to y), so the
    composition order is immaterial.
    """

    cuts: tuple[tuple[Fraction, int], ...] = ()

    def __post_init__(self):
        xs = [lam for lam, _ in self.cuts]
        if any(x1 >= x2 for x1, x2 in zip(xs, xs[1:])):
            raise ValueError("cut abscissas must be strictly increasing")

    @classmethod
    def single(cls, lam, k: int) -> "PiecewiseShear":
        return cls(((rat(lam), int(k)),))

    def apply(self, p: Point) -> Point:
        x, y = p
        for lam, k in self.cuts:
            if x > lam:
                y = y + k * (x - lam)
        return (x, y)

    def inverse(self) -> "PiecewiseShear":
        return PiecewiseShear(tuple((lam, -k) for lam, k in self.cuts))


def apply_piecewise(ps: PiecewiseShear, p: Point) -> Point:
    return ps.apply(p)


def _strict_hull(points: Sequence[Point]) -> list[Point]:
    pts = sorted(set(points))
    if len(pts) < 3:
        return pts

    def half(seq):
        out: list[Point] = []
        for p in seq:
            while len(out) >= 2 and cross(sub(out[-1], out[-2]), sub(p, out[-2])) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class ConvexPolygon:
    """Strictly convex rational polygon, counterclockwise from the lex-min vertex."""

    vertices: tuple[Point, ...]

    def __post_init__(self):
        vs = self.vertices
        if len(vs) < 3:
            raise DegeneratePolygonError("a polygon needs at least three vertices")
        n = len(vs)
        for i in range(n):
            turn = cross(sub(vs[(i + 1) % n], vs[i]), sub(vs[(i + 2) % n], vs[(i + 1) % n]))
            if turn <= 0:
                raise ValueError("vertex list is not strictly convex counterclockwise")
        if vs[0] != min(vs):
            raise ValueError("vertex list must start at the lexicographically smallest vertex")

    def __len__(self):
        return len(self.vertices)

    def index(self, v: Point) -> int:
        return self.vertices.index(v)

    def neighbors(self, v: Point) -> tuple[Point, Point]:
        """(previous, next) vertices of v in counterclockwise order."""
        i = self.index(v)
        n = len(self.vertices)
        return self.vertices[i - 1], self.vertices[(i + 1) % n]

    def edges(self) -> list[tuple[Point, Point]]:
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    @property
    def xmin(self) -> Fraction:
        return min(v[0] for v in self.vertices)

    @property
    def xmax(self) -> Fraction:
        return max(v[0] for v in self.vertices)

    def fiber(self, x) -> tuple[Fraction, Fraction] | None:
        """Vertical extent of the polygon over abscissa x, or None if outside."""
        x = rat(x)
        if x < self.xmin or x > self.xmax:
            return None
        ys = []
        for a, b in self.edges():
            if a[0] == b[0]:
                if a[0] == x:
                    ys += [a[1], b[1]]
            elif min(a[0], b[0]) <= x <= max(a[0], b[0]):
                ys.append(a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0]))
        return (min(ys), max(ys))

    def locate(self, p: Point) -> str:
        """'interior', 'boundary' or 'exterior'."""
        signs = [cross(sub(b, a), sub(p, a)) for a, b in self.edges()]
        if any(s < 0 for s in signs):
            return "exterior"
        if any(s == 0 for s in signs):
            return "boundary"
        return "interior"

    def on_boundary(self, p: Point) -> bool:
        return self.locate(p) == "boundary"

    def sl2z_perimeter(self) -> Fraction:
        return sum((sl2z_length(a, b) for a, b in self.edges()), Fraction(0))

    def translate(self, d: Point) -> "ConvexPolygon":
        return hull([add(v, d) for v in self.vertices])

    def transform(self, m: LatticeMatrix) -> "ConvexPolygon":
        return hull([m.apply(v) for v in self.vertices])

    def boundary_with_cuts(self, xs: Iterable[Fraction]) -> list[Point]:
        """Counterclockwise boundary points including intersections with the lines x = c."""
        xs = sorted(set(rat(x) for x in xs))
        out: list[Point] = []
        for a, b in self.edges():
            out.append(a)
            if a[0] == b[0]:
                continue
            lo, hi = sorted((a[0], b[0]))
            inner = [x for x in xs if lo < x < hi]
            if a[0] > b[0]:
                inner.reverse()
            for x in inner:
                out.append((x, a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0])))
        return out

    def map_piecewise(self, ps: PiecewiseShear) -> "ConvexPolygon":
        """Image under a piecewise shear; raises if the image is not convex."""
        pts = [ps.apply(p) for p in self.boundary_with_cuts(lam for lam, _ in ps.cuts)]
        n = len(pts)
        for i in range(n):
            turn = cross(sub(pts[(i + 1) % n], pts[i]), sub(pts[(i + 2) % n], pts[(i + 1) % n]))
            if turn < 0:
                raise NonConvexImageError("piecewise shear produces a non-convex polygon")
        return hull(pts)

    def to_json(self) -> list[list[str]]:
        return [[fmt_rat(x), fmt_rat(y)] for x, y in self.vertices]


def hull(points: Iterable[Point]) -> ConvexPolygon:
    """Strict convex hull; collinear points are dropped."""
    pts = [(rat(p[0]), rat(p[1])) for p in points]
    if not pts:
        raise DegeneratePolygonError("empty point set")
    vs = _strict_hull(pts)
    if len(vs) < 3:
        raise DegeneratePolygonError("points are collinear")
    return ConvexPolygon(tuple(vs))


def polygon_from_json(data: Sequence[Sequence]) -> ConvexPolygon:
    return hull([point(x, y) for x, y in data])
