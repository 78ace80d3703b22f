"""Explicit integrable families on S2 x S2 and on Hirzebruch surfaces W_n.

Every Hamiltonian is written against an ambient point so the same
formula serves plain floats and hyper-dual numbers. Charts map four
Darboux coordinates to the ambient point:

* W_n: chart ``U13``, ``U14``, ``U23`` or ``U24``; coordinates
  (x_p, y_p, x_q, y_q) of the two free slots p < q. The other two slots
  are real and positive and solved from N = 0.
* S2 x S2: chart ``S2:ab`` with one code per sphere, ``N``/``S`` for a
  polar Darboux disc (a, b) and ``C`` for the cylinder (theta, R z).
  ``S2S2`` is the global embedding with six coordinates.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np
from scipy.optimize import brentq

from . import hyperdual as hd
from .hyperdual import sqrt


class ChartDomainError(ValueError):
    pass


class RootBracketError(RuntimeError):
    pass


class ParameterWindowError(ValueError):
    pass


# ---------------------------------------------------------------- complex helpers


def cmul(p, q):
    return (p[0] * q[0] - p[1] * q[1], p[0] * q[1] + p[1] * q[0])


def conj(p):
    return (p[0], -p[1])


def abs2(p):
    return p[0] * p[0] + p[1] * p[1]


# ---------------------------------------------------------------- chart points


W_CHARTS = ("U13", "U14", "U23", "U24")


@dataclass(frozen=True)
class ChartPoint:
    chart: str
    coords: tuple[float, ...]
    representative: tuple[complex, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))
        if self.chart == "S2S2":
            if len(self.coords) != 6:
                raise ChartDomainError("S2S2 points need six coordinates")
            for k in (0, 3):
                r = sum(c * c for c in self.coords[k:k + 3])
                if abs(r - 1.0) > 1e-12:
                    raise ChartDomainError("point is not on the unit sphere")
        elif len(self.coords) != 4:
            raise ChartDomainError(f"chart {self.chart} needs four coordinates")


def _free_slots(chart: str) -> tuple[int, int, int, int]:
    l, m = int(chart[1]) - 1, int(chart[2]) - 1
    p, q = [i for i in range(4) if i not in (l, m)]
    return l, m, p, q


def w_ambient(n: int, alpha, beta, chart: str, x):
    """Representative (u1..u4) as (re, im) pairs for chart coordinates x."""
    if chart not in W_CHARTS:
        raise ChartDomainError(f"unknown chart {chart}")
    l, m, p, q = _free_slots(chart)
    u = [None] * 4
    u[p] = (x[0], x[1])
    u[q] = (x[2], x[3])
    # m is always 3 or 4 (index 2 or 3), l is 1 or 2
    other34 = 5 - m  # index of the free slot among 3,4
    # radicands within rounding of zero are boundary points
    tol = 1e-12 * 2 * (alpha + n * beta)
    r34 = 2 * beta - abs2(u[other34])
    if hd.value(r34) < -tol:
        raise ChartDomainError("negative radicand for the real slot in {3,4}")
    u[m] = (sqrt(r34), 0.0) if hd.value(r34) > 0 else (0.0, 0.0)
    other12 = 1 - l
    r12 = 2 * (alpha + n * beta) - abs2(u[other12]) - n * abs2(u[2])
    if hd.value(r12) < -tol:
        raise ChartDomainError("negative radicand for the real slot in {1,2}")
    u[l] = (sqrt(r12), 0.0) if hd.value(r12) > 0 else (0.0, 0.0)
    return u


def hirzebruch_lift(n: int, alpha, beta, chart: str, coords) -> ChartPoint:
    u = w_ambient(n, alpha, beta, chart, [float(c) for c in coords])
    rep = tuple(complex(hd.value(a), hd.value(b)) for a, b in u)
    return ChartPoint(chart, tuple(coords), rep)


def n_residual(n: int, alpha, beta, rep) -> float:
    a = [abs(z) ** 2 for z in rep]
    return max(abs(a[0] + a[1] + n * a[2] - 2 * (alpha + n * beta)), abs(a[2] + a[3] - 2 * beta))


def sphere_local(code: str, R, x0, x1):
    """Unit-sphere point (x, y, z) from Darboux coordinates for the form R*area."""
    if code in ("N", "S"):
        s = 1.0 if code == "N" else -1.0
        rr = x0 * x0 + x1 * x1
        c2 = 1.0 / R - rr / (4.0 * R * R)
        if hd.value(c2) < 0:
            raise ChartDomainError("outside the polar disc")
        c = sqrt(c2)
        return (x0 * c, s * x1 * c, s * (1.0 - rr / (2.0 * R)))
    if code == "C":
        z = x1 / R
        w = 1.0 - z * z
        if hd.value(w) <= 0:
            raise ChartDomainError("cylinder chart excludes the poles")
        r = sqrt(w)
        return (r * hd.cos(x0), r * hd.sin(x0), z)
    raise ChartDomainError(f"unknown sphere chart {code}")


# ---------------------------------------------------------------- inventory


@dataclass
class FixedPoint:
    label: str
    point: ChartPoint
    J: float
    H: float

    def to_json(self) -> dict:
        return {"label": self.label, "chart": self.point.chart, "coords": list(self.point.coords),
                "J": self.J, "H": self.H}


@dataclass
class CriticalSet:
    """A non-isolated rank-zero set, recorded with sampled gradient residuals."""

    description: str
    samples: list[ChartPoint]
    max_residual: float


@dataclass
class FixedPointInventory:
    points: list[FixedPoint]
    critical_sets: list[CriticalSet] = field(default_factory=list)

    def by_label(self, label: str) -> FixedPoint:
        for p in self.points:
            if p.label == label:
                return p
        raise KeyError(label)

    def to_json(self) -> dict:
        return {
            "points": [p.to_json() for p in self.points],
            "critical_sets": [{"description": c.description, "samples": len(c.samples),
                               "max_residual": c.max_residual} for c in self.critical_sets],
        }


# ---------------------------------------------------------------- families


@dataclass(frozen=True)
class SystemFamily:
    """Base class. Subclasses fix ``id``, the manifold and the Hamiltonians."""

    id: ClassVar[str] = ""
    arity: ClassVar[int] = 1
    manifold: ClassVar[str] = ""
    transition_label: ClassVar[str | None] = None

    def J(self, a):
        raise NotImplementedError

    def H(self, a, par):
        raise NotImplementedError

    def ambient(self, chart: str, x):
        raise NotImplementedError

    def charts(self) -> tuple[str, ...]:
        raise NotImplementedError

    def check_params(self, par) -> tuple[float, ...]:
        par = tuple(float(v) for v in (par if isinstance(par, (tuple, list)) else (par,)))
        if len(par) != self.arity:
            raise ValueError(f"{self.id} takes {self.arity} parameter(s)")
        if any(not 0.0 <= v <= 1.0 for v in par):
            raise ValueError("family parameters live in [0, 1]")
        return par

    # chart-level functions, usable with hyper-dual inputs
    def J_chart(self, chart: str):
        return lambda x: self.J(self.ambient(chart, x))

    def H_chart(self, chart: str, par):
        par = self.check_params(par)
        return lambda x: self.H(self.ambient(chart, x), par)

    def fixed_points(self, par) -> FixedPointInventory:
        raise NotImplementedError

    def closed_form_times(self) -> tuple[float, float] | None:
        return None

    def point_value(self, cp: ChartPoint, par) -> tuple[float, float]:
        return evaluate(self, par, cp)


def evaluate(sys: SystemFamily, par, p: ChartPoint) -> tuple[float, float]:
    par = sys.check_params(par)
    if p.chart == "S2S2":
        if sys.manifold != "S2xS2":
            raise ChartDomainError("global S2 x S2 coordinates on a Hirzebruch surface")
        a = p.coords
    else:
        if p.chart not in sys.charts():
            raise ChartDomainError(f"chart {p.chart} does not belong to {sys.id}")
        a = sys.ambient(p.chart, p.coords)
    return float(hd.value(sys.J(a))), float(hd.value(sys.H(a, par)))


def gradient_residual(sys: SystemFamily, par, p: ChartPoint) -> float:
    g1 = hd.gradient(sys.J_chart(p.chart), p.coords)
    g2 = hd.gradient(sys.H_chart(p.chart, par), p.coords)
    return float(max(np.max(np.abs(g1)), np.max(np.abs(g2))))


def poisson_bracket(sys: SystemFamily, par, p: ChartPoint, exact: bool = False) -> float:
    """{J, H} in the chart's Darboux coordinates (x_p, y_p, x_q, y_q)."""
    fj, fh = sys.J_chart(p.chart), sys.H_chart(p.chart, par)
    if exact:
        gj, gh = hd.gradient(fj, p.coords), hd.gradient(fh, p.coords)
    else:
        gj = hd.fd_gradient(lambda x: hd.value(fj(list(x))), p.coords)
        gh = hd.fd_gradient(lambda x: hd.value(fh(list(x))), p.coords)
    return float(gj[0] * gh[1] - gj[1] * gh[0] + gj[2] * gh[3] - gj[3] * gh[2])


# ---------------------------------------------------------------- S2 x S2


@dataclass(frozen=True)
class S2xS2Family(SystemFamily):
    R1: float = 1.0
    R2: float = 1.0
    manifold: ClassVar[str] = "S2xS2"

    def __post_init__(self):
        if self.R1 <= 0 or self.R2 <= 0:
            raise ParameterWindowError("sphere radii must be positive")

    def charts(self):
        return tuple(f"S2:{a}{b}" for a in "NSC" for b in "NSC")

    def ambient(self, chart: str, x):
        if chart == "S2S2":
            return tuple(x)
        if not chart.startswith("S2:") or len(chart) != 5:
            raise ChartDomainError(f"unknown chart {chart}")
        s1 = sphere_local(chart[3], self.R1, x[0], x[1])
        s2 = sphere_local(chart[4], self.R2, x[2], x[3])
        return (*s1, *s2)

    def J(self, a):
        return self.R1 * a[2] + self.R2 * a[5]

    def pole_points(self, par) -> list[FixedPoint]:
        out = []
        for c1 in "NS":
            for c2 in "NS":
                cp = ChartPoint(f"S2:{c1}{c2}", (0.0, 0.0, 0.0, 0.0))
                j, h = evaluate(self, par, cp)
                out.append(FixedPoint(c1 + c2, cp, j, h))
        return out

    def fixed_points(self, par) -> FixedPointInventory:
        return FixedPointInventory(self.pole_points(par))


@dataclass(frozen=True)
class CoupledAngular(S2xS2Family):
    R1: float = 1.0
    R2: float = 2.0
    id: ClassVar[str] = "CoupledAngular"
    transition_label: ClassVar[str] = "NS"

    def __post_init__(self):
        if not 0 < self.R1 < self.R2:
            raise ParameterWindowError("coupled angular momenta need 0 < R1 < R2")

    def H(self, a, par):
        t = par[0]
        return (1 - t) * a[2] + t * (a[0] * a[3] + a[1] * a[4] + a[2] * a[5])

    def closed_form_times(self):
        r1, r2 = self.R1, self.R2
        s = 2 * math.sqrt(r1 * r2)
        return r2 / (2 * r2 + r1 + s), r2 / (2 * r2 + r1 - s)


@dataclass(frozen=True)
class HP2Param(S2xS2Family):
    R1: float = 1.0
    R2: float = 2.0
    id: ClassVar[str] = "HP2Param"
    arity: ClassVar[int] = 2

    def H(self, a, par):
        s1, s2 = par
        X = a[0] * a[3] + a[1] * a[4]
        zz = a[2] * a[5]
        return ((1 - s1) * (1 - s2) * a[2] + s1 * s2 * a[5]
                + s1 * (1 - s2) * (X + zz) + s2 * (1 - s1) * (X - zz))


@dataclass(frozen=True)
class DegenAppearance(S2xS2Family):
    id: ClassVar[str] = "DegenAppearance"

    def J(self, a):
        return a[2]

    def H(self, a, par):
        t = par[0]
        z1, z2 = a[2], a[5]
        return z2 ** 3 + ((1 + z1) ** 2 + (1 - 2 * t) ** 2) * z2

    def fixed_points(self, par):
        par = self.check_params(par)
        inv = FixedPointInventory(self.pole_points(par))
        if abs(par[0] - 0.5) < 1e-15:
            # the circle z1 = -1, z2 = 0 becomes rank zero
            samples = [ChartPoint("S2:SC", (0.0, 0.0, th, 0.0)) for th in np.linspace(0, 2 * np.pi, 16, endpoint=False)]
            res = max(gradient_residual(self, par, s) for s in samples)
            inv.critical_sets.append(CriticalSet("circle z1=-1, z2=0 (degenerate)", samples, res))
        return inv


@dataclass(frozen=True)
class DegenBecome(S2xS2Family):
    j0: float = -1.0
    id: ClassVar[str] = "DegenBecome"
    transition_label: ClassVar[str] = "SN"

    def J(self, a):
        return a[2]

    def H(self, a, par):
        t = par[0]
        z1, z2 = a[2], a[5]
        return (z2 - 1) ** 2 + ((1 - 2 * t) ** 2 + (z1 - self.j0) ** 2) * z2

    def fixed_points(self, par):
        par = self.check_params(par)
        inv = FixedPointInventory(self.pole_points(par))
        # dH/dz2 = 0 on the polar fibres z1 = +-1 gives whole circles of rank-zero points
        for z1, code in ((1.0, "N"), (-1.0, "S")):
            c = (1 - 2 * par[0]) ** 2 + (z1 - self.j0) ** 2
            z2 = 1 - c / 2
            if -1 < z2 < 1:
                samples = [ChartPoint(f"S2:{code}C", (0.0, 0.0, th, z2 * self.R2))
                           for th in np.linspace(0, 2 * np.pi, 16, endpoint=False)]
                res = max(gradient_residual(self, par, s) for s in samples)
                inv.critical_sets.append(CriticalSet(f"circle z1={z1:+g}, z2={z2:.6g}", samples, res))
        return inv


@dataclass(frozen=True)
class DegenCollapse(S2xS2Family):
    R1: float = 1.0
    R2: float = 2.0
    j0: float = -1.0
    id: ClassVar[str] = "DegenCollapse"

    def H(self, a, par):
        t = par[0]
        X = a[0] * a[3] + a[1] * a[4]
        return (1 - 2 * t) * a[2] + (self.J(a) - self.j0) * X


# ---------------------------------------------------------------- Hirzebruch surfaces


@dataclass(frozen=True)
class HirzebruchFamily(SystemFamily):
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 0.1
    n: ClassVar[int] = 1

    def charts(self):
        return W_CHARTS

    def ambient(self, chart, x):
        return w_ambient(self.n, self.alpha, self.beta, chart, x)

    def lift(self, chart, coords) -> ChartPoint:
        return hirzebruch_lift(self.n, self.alpha, self.beta, chart, coords)

    def labeled(self, par, labels: dict[str, str]) -> list[FixedPoint]:
        out = []
        for lab, chart in labels.items():
            cp = self.lift(chart, (0.0, 0.0, 0.0, 0.0))
            j, h = evaluate(self, par, cp)
            out.append(FixedPoint(lab, cp, j, h))
        return out


@dataclass(frozen=True)
class _W1(HirzebruchFamily):
    n: ClassVar[int] = 1
    manifold: ClassVar[str] = "W1"

    def J(self, a):
        return 0.5 * abs2(a[1])

    @staticmethod
    def R(a):
        return 0.5 * abs2(a[2])

    @staticmethod
    def X(a):
        return cmul(cmul(conj(a[0]), a[2]), conj(a[3]))[0]

    def sphere_scan(self, par, samples: int = 4001) -> list[float]:
        """Critical x3 of H on the fixed sphere J = 0, read along y3 = 0 in U14.

        Off the line y3 = 0 there are no critical points (for H of the form
        A(r) + x3 S(r) with S > 0 the y3-derivative only vanishes there), so
        a sign-change scan of dH/dx3 suffices. Samples are uniform in phi
        with x3 = sqrt(2 beta) sin(phi), which crowds them towards the chart
        edge where the roots sit for small t.
        """
        lim = math.sqrt(2 * self.beta)
        phis = np.linspace(-math.pi / 2, math.pi / 2, samples)[1:-1]
        f = self.H_chart("U14", par)

        def g(phi):
            return hd.partial(f, [0.0, 0.0, lim * math.sin(phi), 0.0], 2)

        vals = [g(x) for x in phis]
        roots = []
        for x0, x1, v0, v1 in zip(phis, phis[1:], vals, vals[1:]):
            if v0 == 0.0:
                roots.append(lim * math.sin(x0))
            elif v0 * v1 < 0:
                roots.append(lim * math.sin(brentq(g, x0, x1, xtol=1e-15, rtol=1e-15)))
        return roots


@dataclass(frozen=True)
class W1MovingAB(_W1):
    alpha: float = 1.0
    beta: float = 2.0
    gamma: float = 9 / 40
    id: ClassVar[str] = "W1MovingAB"
    transition_label: ClassVar[str] = "C"

    def __post_init__(self):
        bound = 1 / (2 * math.sqrt(2 * self.beta))
        if not (self.alpha > 0 and self.beta > 0 and 0 < self.gamma < bound):
            raise ParameterWindowError(f"W1MovingAB needs 0 < gamma < 1/(2 sqrt(2 beta)) = {bound:.6g}")

    def H(self, a, par):
        t = par[0]
        return (1 - 2 * t) * self.R(a) + t * self.gamma * self.X(a)

    def closed_form_times(self):
        k = self.gamma * math.sqrt(2 * self.beta)
        return 1 / (2 * (1 + k)), 1 / (2 * (1 - k))

    def x3_roots(self, t: float) -> tuple[float, float]:
        """x3^-(t) < 0 < x3^+(t) from the quartic surrogate P(X)."""
        a, b, g = self.alpha, self.beta, self.gamma
        s = math.sqrt(a * a + a * b + b * b)
        Xm = 2 * (a + 2 * b - s) / 3
        if t == 0.5:
            r = math.sqrt(Xm)
            return -r, r
        if t == 0:
            return 0.0, math.sqrt(2 * b)

        def quad(X):
            return 3 * X * X - 4 * (a + 2 * b) * X + 4 * b * (a + b)

        def P(X):
            return t * t * g * g * quad(X) ** 2 - (1 - 2 * t) ** 2 * X * (2 * b - X) * (2 * (a + b) - X)

        def f(x):
            X = x * x
            return (1 - 2 * t) * x * math.sqrt(max((2 * b - X) * (2 * (a + b) - X), 0.0)) + t * g * quad(X)

        roots = []
        for lo, hi in ((0.0, Xm), (Xm, 2 * b)):
            if not (P(lo) > 0 > P(hi) or P(lo) < 0 < P(hi)):
                raise RootBracketError(f"P has no sign change on [{lo}, {hi}]: P={P(lo)}, {P(hi)}")
            roots.append(brentq(P, lo, hi, xtol=1e-15, rtol=1e-15))
        xs = []
        for X in roots:
            r = math.sqrt(X)
            xs.append(r if abs(f(r)) < abs(f(-r)) else -r)
        neg = [x for x in xs if x < 0]
        pos = [x for x in xs if x > 0]
        if len(neg) != 1 or len(pos) != 1:
            raise RootBracketError(f"sign selection failed for roots {xs}")
        return neg[0], pos[0]

    def fixed_points(self, par):
        par = self.check_params(par)
        t = par[0]
        pts = self.labeled(par, {"C": "U23", "D": "U24"})
        if t == 0:
            pts += self.labeled(par, {"A": "U14", "B": "U13"})
        else:
            xm, xp = self.x3_roots(t)
            for lab, x in (("A_t", xm), ("B_t", xp)):
                cp = self.lift("U14", (0.0, 0.0, x, 0.0))
                j, h = evaluate(self, par, cp)
                pts.append(FixedPoint(lab, cp, j, h))
        return FixedPointInventory(pts)


@dataclass(frozen=True)
class W1Switch(_W1):
    alpha: float = 1.0
    beta: float = 3.0
    gamma: float = 3 / (8 * math.sqrt(6))
    id: ClassVar[str] = "W1Switch"
    transition_label: ClassVar[str] = "C"

    def __post_init__(self):
        bound = 1 / (2 * self.alpha * math.sqrt(2 * self.beta))
        if not (self.alpha > 0 and self.beta > 0 and 0 < self.gamma < bound):
            raise ParameterWindowError(f"W1Switch needs 0 < gamma < 1/(2 alpha sqrt(2 beta)) = {bound:.6g}")

    def H(self, a, par):
        t = par[0]
        return (1 - 2 * t) * self.R(a) + t * (self.gamma * self.J(a) * self.X(a) + self.beta)

    def closed_form_times(self):
        k = self.alpha * self.gamma * math.sqrt(2 * self.beta)
        return 1 / (2 * (1 + k)), 1 / (2 * (1 - k))

    def fixed_points(self, par, sphere_samples: int = 64):
        par = self.check_params(par)
        inv = FixedPointInventory(self.labeled(par, {"A": "U14", "B": "U13", "C": "U23", "D": "U24"}))
        if par[0] == 0.5:
            rng = np.random.default_rng(0)
            lim = math.sqrt(2 * self.beta)
            samples = []
            for _ in range(sphere_samples):
                r = lim * math.sqrt(rng.uniform(0, 0.98))
                th = rng.uniform(0, 2 * math.pi)
                samples.append(ChartPoint("U14", (0.0, 0.0, r * math.cos(th), r * math.sin(th))))
            res = max(gradient_residual(self, par, s) for s in samples)
            inv.critical_sets.append(CriticalSet("sphere J^-1(0) (collapsed, degenerate)", samples, res))
        return inv


@dataclass(frozen=True)
class W1Hyperbolic(_W1):
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    id: ClassVar[str] = "W1Hyperbolic"
    transition_label: ClassVar[str] = "C"

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ParameterWindowError("alpha, beta must be positive")

    def H(self, a, par):
        t = par[0]
        return ((1 - 2 * t) * self.R(a) + t * self.gamma * self.X(a)
                + 2 * t * abs2(a[0]) * abs2(a[3]))

    def fixed_points(self, par):
        par = self.check_params(par)
        pts = self.labeled(par, {"C": "U23", "D": "U24"})
        b = self.lift("U13", (0.0, 0.0, 0.0, 0.0))
        if gradient_residual(self, par, b) < 1e-10:
            j, h = evaluate(self, par, b)
            pts.append(FixedPoint("B", b, j, h))
        for i, x in enumerate(self.sphere_scan(par)):
            cp = self.lift("U14", (0.0, 0.0, x, 0.0))
            j, h = evaluate(self, par, cp)
            pts.append(FixedPoint(f"E{i}", cp, j, h))
        return FixedPointInventory(pts)


@dataclass(frozen=True)
class _W2(HirzebruchFamily):
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 9 / 20
    n: ClassVar[int] = 2
    manifold: ClassVar[str] = "W2"

    @property
    def nu(self) -> float:
        return self.beta / self.alpha

    @property
    def c(self) -> float:
        return 2 * self.gamma * math.sqrt(self.nu)

    def _check_c(self):
        if not (self.alpha > 0 and self.beta > 0 and 0 < self.c < 1):
            raise ParameterWindowError("W2 transition families need 0 < c = 2 gamma sqrt(beta/alpha) < 1")

    def J(self, a):
        return 0.5 * (abs2(a[1]) + abs2(a[2]))

    @staticmethod
    def R(a):
        return 0.5 * (abs2(a[2]) - abs2(a[3]))

    @staticmethod
    def X(a):
        return cmul(cmul(conj(a[0]), conj(a[1])), cmul(a[2], conj(a[3])))[0]

    def H00(self, a):
        al, be, g = self.alpha, self.beta, self.gamma
        return (al + be) * (g * self.X(a) - (2 * self.J(a) - al - 2 * be) * (self.R(a) + be * be / (al + be))) / (
            al * (al + 2 * be))

    def H11(self, a):
        al, be, g = self.alpha, self.beta, self.gamma
        return be * (g * self.X(a) + (2 * self.J(a) - al - 2 * be) * (self.R(a) + al + be)) / (al * (al + 2 * be))

    def H2(self, a, s1, s2):
        R = self.R(a)
        return ((1 - s1) * (1 - s2) * self.H00(a) + s2 * (1 - s1) * R
                - s1 * (1 - s2) * R + s1 * s2 * self.H11(a))

    def fixed_points(self, par):
        par = self.check_params(par)
        return FixedPointInventory(self.labeled(par, {"A": "U14", "B": "U13", "C": "U23", "D": "U24"}))


@dataclass(frozen=True)
class W2TransB(_W2):
    id: ClassVar[str] = "W2TransB"
    transition_label: ClassVar[str] = "B"

    def __post_init__(self):
        self._check_c()

    def H(self, a, par):
        t = par[0]
        return (1 - t) * self.R(a) + t * self.H11(a)

    def closed_form_times(self):
        nu, c = self.nu, self.c
        return (1 + 2 * nu) / (1 + (3 + c) * nu), (1 + 2 * nu) / (1 + (3 - c) * nu)


@dataclass(frozen=True)
class W2TransC(_W2):
    id: ClassVar[str] = "W2TransC"
    transition_label: ClassVar[str] = "C"

    def __post_init__(self):
        self._check_c()

    def H(self, a, par):
        t = par[0]
        return (1 - t) * self.R(a) + t * self.H00(a)

    def closed_form_times(self):
        nu, c = self.nu, self.c
        return (1 + 2 * nu) / (2 + c + (3 + c) * nu), (1 + 2 * nu) / (2 - c + (3 - c) * nu)


@dataclass(frozen=True)
class W2TwoParam(_W2):
    id: ClassVar[str] = "W2TwoParam"
    arity: ClassVar[int] = 2

    def __post_init__(self):
        nu = self.beta / self.alpha
        lo, hi = 1 / (2 * (1 + 2 * nu) * math.sqrt(nu)), 1 / (2 * math.sqrt(nu))
        if not (self.alpha > 0 and self.beta > 0 and lo < self.gamma < hi):
            raise ParameterWindowError(
                f"W2TwoParam needs 1/(2(1+2nu)sqrt(nu)) < gamma < 1/(2 sqrt(nu)), i.e. ({lo:.6g}, {hi:.6g})")

    def H(self, a, par):
        return self.H2(a, par[0], par[1])


FAMILIES = {cls.id: cls for cls in (CoupledAngular, HP2Param, W1MovingAB, W1Switch, W1Hyperbolic, W2TransB,
                                    W2TransC, W2TwoParam, DegenAppearance, DegenBecome, DegenCollapse)}


def make_system(family_id: str, **params) -> SystemFamily:
    try:
        cls = FAMILIES[family_id]
    except KeyError:
        raise ValueError(f"unknown family {family_id}; known: {', '.join(FAMILIES)}") from None
    return cls(**params)


def fixed_points(sys: SystemFamily, par) -> FixedPointInventory:
    return sys.fixed_points(par)


# ---------------------------------------------------------------- momentum images


def _reduced_samples(sys: SystemFamily, res: int):
    """Deterministic samples of one point per torus orbit, as ambient points."""
    g = (np.arange(res) + 0.5) / res
    phis = 2 * np.pi * g
    if sys.manifold == "S2xS2":
        zs = np.linspace(-1, 1, res)
        for i, z1 in enumerate(zs):
            for j, z2 in enumerate(zs):
                r1, r2 = math.sqrt(max(1 - z1 * z1, 0)), math.sqrt(max(1 - z2 * z2, 0))
                for phi in phis:
                    yield (i * res + j), (r1, 0.0, z1, r2 * math.cos(phi), r2 * math.sin(phi), z2)
        return
    n, al, be = sys.n, sys.alpha, sys.beta
    for i, s in enumerate(np.linspace(0, 2 * be, res)):
        top = 2 * (al + n * be) - n * s
        for j, r in enumerate(np.linspace(0, top, res)):
            u1 = math.sqrt(max(top - r, 0.0))
            u2 = math.sqrt(r)
            u4 = math.sqrt(max(2 * be - s, 0.0))
            for phi in phis:
                u3 = (math.sqrt(s) * math.cos(phi), math.sqrt(s) * math.sin(phi))
                yield (i * res + j), [(u1, 0.0), (u2, 0.0), u3, (u4, 0.0)]


@dataclass
class MomentumImage:
    params: tuple[float, ...]
    J: np.ndarray
    H: np.ndarray
    stratum: np.ndarray
    envelope_J: np.ndarray
    envelope_min: np.ndarray
    envelope_max: np.ndarray
    fixed: list[FixedPoint]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "s1", "s2", "J", "H", "stratum"])
        t = self.params[0] if len(self.params) == 1 else ""
        s1, s2 = (self.params if len(self.params) == 2 else ("", ""))
        for j, h, s in zip(self.J, self.H, self.stratum):
            w.writerow([t, s1, s2, repr(float(j)), repr(float(h)), int(s)])
        return buf.getvalue()


def momentum_image(sys: SystemFamily, par, resolution: int = 24, bins: int | None = None) -> MomentumImage:
    if resolution < 8:
        raise ValueError("resolution must be at least 8 per axis")
    par = sys.check_params(par)
    Js, Hs, St = [], [], []
    for stratum, a in _reduced_samples(sys, resolution):
        Js.append(hd.value(sys.J(a)))
        Hs.append(hd.value(sys.H(a, par)))
        St.append(stratum)
    J, H, S = np.array(Js), np.array(Hs), np.array(St)
    bins = bins or 2 * resolution
    edges = np.linspace(J.min(), J.max(), bins + 1)
    idx = np.clip(np.searchsorted(edges, J, side="right") - 1, 0, bins - 1)
    lo = np.full(bins, np.inf)
    hi = np.full(bins, -np.inf)
    np.minimum.at(lo, idx, H)
    np.maximum.at(hi, idx, H)
    centers = 0.5 * (edges[1:] + edges[:-1])
    try:
        fixed = sys.fixed_points(par).points
    except RootBracketError:
        fixed = []
    return MomentumImage(par, J, H, S, centers, lo, hi, fixed)
