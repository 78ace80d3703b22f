"""Williamson types of rank-zero points and transition times.

The linearisation at a fixed point is A = Omega^{-1}(nu d2J + mu d2H). Its
characteristic polynomial is even, X**4 + b X**2 + c, and the roots of
the reduced polynomial Y**2 + b Y + c decide the type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.ndimage import label as ndlabel
from scipy.optimize import bisect

from . import hyperdual as hd
from .model_systems import (
    ChartPoint,
    SystemFamily,
    W2TwoParam,
    _W1,
    _W2,
    W1Switch,
    gradient_residual,
)

OMEGA = np.array([[0.0, 1.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, -1.0, 0.0]])
OMEGA_INV = -OMEGA

MARGIN = 1e-7
MARGIN_FINE = 1e-9


class NotFixedError(ValueError):
    pass


class BracketError(RuntimeError):
    pass


class Williamson(str, Enum):
    EE = "EllipticElliptic"
    FF = "FocusFocus"
    EH = "EllipticHyperbolic"
    HH = "HyperbolicHyperbolic"
    DEG = "Degenerate"


# ---------------------------------------------------------------- Hessians


@dataclass
class HessianBundle:
    d2J: np.ndarray
    d2H: np.ndarray
    omega: np.ndarray
    chart: str
    d2J_fd: np.ndarray | None = None
    d2H_fd: np.ndarray | None = None

    @property
    def fd_gap(self) -> float:
        if self.d2H_fd is None:
            return float("nan")
        return float(max(np.max(np.abs(self.d2J - self.d2J_fd)), np.max(np.abs(self.d2H - self.d2H_fd))))

    def A(self, nu: float, mu: float) -> np.ndarray:
        return np.linalg.solve(self.omega, nu * self.d2J + mu * self.d2H)


def hessian_bundle(sys: SystemFamily, par, p: ChartPoint, with_fd: bool = True, tol: float = 1e-8) -> HessianBundle:
    """Exact Hessians by hyper-dual evaluation, with a finite-difference cross-check."""
    res = gradient_residual(sys, par, p)
    if res > tol:
        raise NotFixedError(f"point is not a fixed point (gradient residual {res:.3g})")
    fj, fh = sys.J_chart(p.chart), sys.H_chart(p.chart, par)
    d2J = hd.hessian(fj, p.coords)
    d2H = hd.hessian(fh, p.coords)
    hb = HessianBundle(d2J, d2H, OMEGA.copy(), p.chart)
    if with_fd:
        hb.d2J_fd = hd.fd_hessian(lambda x: hd.value(fj(list(x))), p.coords)
        hb.d2H_fd = hd.fd_hessian(lambda x: hd.value(fh(list(x))), p.coords)
    return hb


# ---------------------------------------------------------------- char polys


def charpoly(A: np.ndarray) -> np.ndarray:
    """Coefficients [1, c1, ..., cn] of det(x I - A) by Faddeev-LeVerrier."""
    n = A.shape[0]
    coeffs = [1.0]
    M = np.zeros_like(A)
    I = np.eye(n)
    for k in range(1, n + 1):
        M = A @ M + coeffs[-1] * I
        coeffs.append(-np.trace(A @ M) / k)
    return np.array(coeffs)


@dataclass
class ReducedCharPoly:
    b: float
    c: float
    odd_residual: float
    scale: float

    @property
    def disc(self) -> float:
        return self.b * self.b - 4 * self.c

    def roots(self) -> tuple[complex, complex]:
        d = self.disc
        if d >= 0:
            s = math.sqrt(d)
            q = -0.5 * (self.b + math.copysign(s, self.b))
            if q == 0:
                return 0j, 0j
            r1, r2 = q, self.c / q
            return (complex(min(r1, r2)), complex(max(r1, r2)))
        s = math.sqrt(-d)
        return complex(-self.b / 2, -s / 2), complex(-self.b / 2, s / 2)


def reduced_charpoly(A: np.ndarray) -> ReducedCharPoly:
    cp = charpoly(A)
    nrm = float(np.linalg.norm(A))
    scale = nrm * nrm
    odd = 0.0
    if nrm > 0:
        cn = charpoly(A / nrm)
        odd = float(max(abs(cn[1]), abs(cn[3])))
    return ReducedCharPoly(float(cp[2]), float(cp[4]), odd, scale)


def _verdict_from_poly(rcp: ReducedCharPoly, tol: float) -> tuple[Williamson, dict]:
    scale = rcp.scale
    if scale == 0:
        return Williamson.DEG, {"reason": "zero matrix"}
    d = rcp.disc
    sep = math.sqrt(abs(d))
    r1, r2 = rcp.roots()
    margins = {"separation": sep / scale, "r1": abs(r1) / scale, "r2": abs(r2) / scale}
    if sep <= tol * scale or min(abs(r1), abs(r2)) <= tol * scale:
        return Williamson.DEG, margins
    if d < 0:
        return Williamson.FF, margins
    neg = (r1.real < 0) + (r2.real < 0)
    return {2: Williamson.EE, 1: Williamson.EH, 0: Williamson.HH}[neg], margins


@dataclass
class WilliamsonVerdict:
    type: Williamson
    witness: tuple[float, float] | None
    roots: tuple[complex, complex] | None
    margins: dict = field(default_factory=dict)
    stable: bool = True
    marginal: bool = False
    odd_residual: float = 0.0

    def to_json(self) -> dict:
        return {
            "type": self.type.value,
            "witness_nu_mu": list(self.witness) if self.witness else None,
            "roots": [[z.real, z.imag] for z in self.roots] if self.roots else None,
            "margins": self.margins,
            "stable": self.stable,
            "marginal": self.marginal,
        }


def direction_net(k: int) -> list[tuple[float, float]]:
    return [(math.cos(2 * math.pi * i / k), math.sin(2 * math.pi * i / k)) for i in range(k)]


def special_directions(sys: SystemFamily, label: str | None = None) -> list[tuple[float, float]]:
    """Hand-picked (nu, mu) pairs that separate coincident eigenvalues."""
    out = [(0.0, 1.0), (1.0, 0.0)]
    if isinstance(sys, _W1):
        g = sys.gamma * (sys.alpha if isinstance(sys, W1Switch) else 1.0)
        out.append((1.0, 2.0 / (g * math.sqrt(2 * sys.beta))))
    if isinstance(sys, _W2):
        nu = sys.nu
        out.append((2 * nu / (1 + nu + 2 * nu * nu), 1.0))
    return out


def classify_fixed_point(hb: HessianBundle, specials=(), check_stability: bool = True) -> WilliamsonVerdict:
    dirs = list(specials) + direction_net(64)
    found: WilliamsonVerdict | None = None
    types = set()
    worst_odd = 0.0
    for nu, mu in dirs:
        rcp = reduced_charpoly(hb.A(nu, mu))
        worst_odd = max(worst_odd, rcp.odd_residual)
        v, m = _verdict_from_poly(rcp, MARGIN)
        if v is Williamson.DEG:
            continue
        types.add(v)
        if found is None:
            found = WilliamsonVerdict(v, (nu, mu), rcp.roots(), m)
            if not check_stability:
                break
    if found is None:
        for nu, mu in direction_net(256):
            rcp = reduced_charpoly(hb.A(nu, mu))
            v, m = _verdict_from_poly(rcp, MARGIN)
            if v is not Williamson.DEG:
                found = WilliamsonVerdict(v, (nu, mu), rcp.roots(), m)
                types.add(v)
                break
    if found is None:
        marginal = any(
            _verdict_from_poly(reduced_charpoly(hb.A(nu, mu)), MARGIN_FINE)[0] is not Williamson.DEG
            for nu, mu in list(specials) + direction_net(64)
        )
        rcp = reduced_charpoly(hb.A(0.0, 1.0))
        return WilliamsonVerdict(Williamson.DEG, None, rcp.roots(), {}, True, marginal, worst_odd)
    found.stable = len(types) == 1
    found.odd_residual = worst_odd
    return found


def classify_point(sys: SystemFamily, par, label: str, check_stability: bool = True) -> WilliamsonVerdict:
    fp = sys.fixed_points(par).by_label(label)
    hb = hessian_bundle(sys, par, fp.point, with_fd=False)
    return classify_fixed_point(hb, special_directions(sys, label), check_stability)


# ---------------------------------------------------------------- transition times


@dataclass
class TransitionTimes:
    t_minus: float
    t_plus: float
    closed_form: tuple[float, float] | None
    bisection: tuple[float, float]
    method: str
    gap: float

    def to_json(self) -> dict:
        return {"t_minus": self.t_minus, "t_plus": self.t_plus, "closed_form": self.closed_form,
                "bisection": self.bisection, "method": self.method, "gap": self.gap}


def transition_discriminant(sys: SystemFamily, label: str, t: float) -> float:
    """Discriminant of the reduced polynomial of Omega^{-1} d2H_t at the labelled point."""
    fp = sys.fixed_points((t,)).by_label(label)
    d2H = hd.hessian(sys.H_chart(fp.point.chart, (t,)), fp.point.coords)
    rcp = reduced_charpoly(OMEGA_INV @ d2H)
    return rcp.disc


def _sign_changes(f, grid):
    vals = [f(t) for t in grid]
    out = []
    for a, b, fa, fb in zip(grid, grid[1:], vals, vals[1:]):
        if fa * fb < 0:
            out.append((a, b, fa, fb))
    return out


def transition_times(sys: SystemFamily, grid: int = 201) -> TransitionTimes:
    label = sys.transition_label
    if label is None or sys.arity != 1:
        raise ValueError(f"{sys.id} has no designated transition point")
    f = lambda t: transition_discriminant(sys, label, t)
    ts = list(np.linspace(1e-3, 1 - 1e-3, grid) + 0.37 / grid)
    ts = [t for t in ts if 0 < t < 1]
    changes = _sign_changes(f, ts)
    down = [c for c in changes if c[2] > 0 > c[3]]
    up = [c for c in changes if c[2] < 0 < c[3]]
    if len(down) != 1 or len(up) != 1:
        raise BracketError(f"expected one entry to and one exit from the focus-focus band, got {changes}")
    tm = bisect(f, down[0][0], down[0][1], xtol=1e-13, rtol=1e-15, maxiter=200)
    tp = bisect(f, up[0][0], up[0][1], xtol=1e-13, rtol=1e-15, maxiter=200)
    cf = sys.closed_form_times()
    gap = max(abs(tm - cf[0]), abs(tp - cf[1])) if cf else float("nan")
    return TransitionTimes(tm, tp, cf, (tm, tp), "closed-form+bisection" if cf else "bisection", gap)


def verdict_switch_times(sys: SystemFamily, label: str | None = None, grid: int = 101, tol: float = 1e-10):
    """Bisect on the Williamson verdict itself: returns (t-, t+) switch points.

    Each switch is the midpoint of the last EE and first FF parameter (or
    vice versa) once they are tol apart.
    """
    label = label or sys.transition_label

    def kind(t):
        return classify_point(sys, (t,), label, check_stability=False).type

    ts = [float(t) for t in np.linspace(0, 1, grid)]
    ks = [kind(t) for t in ts]
    switches = []
    for i in range(len(ts) - 1):
        a, b = ks[i], ks[i + 1]
        if {a, b} == {Williamson.EE, Williamson.FF} or (a is Williamson.DEG) != (b is Williamson.DEG):
            switches.append(i)
    out = []
    for i in switches:
        lo, hi = ts[i], ts[i + 1]
        # keep one side fixed to a non-degenerate verdict
        left = ks[i] is not Williamson.DEG
        ref = ks[i] if left else ks[i + 1]
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if (kind(mid) is ref) == left:
                lo = mid
            else:
                hi = mid
        out.append(0.5 * (lo + hi))
    # coalesce switches closer than the degeneracy band
    merged = []
    for t in out:
        if not merged or t - merged[-1] > 1e-5:
            merged.append(t)
    return merged, list(zip(ts, ks))


def eigenvalue_trajectory(sys: SystemFamily, label: str, ts) -> list[np.ndarray]:
    out = []
    for t in ts:
        fp = sys.fixed_points((t,)).by_label(label)
        d2H = hd.hessian(sys.H_chart(fp.point.chart, (t,)), fp.point.coords)
        out.append(np.sort_complex(np.linalg.eigvals(OMEGA_INV @ d2H)))
    return out


# ---------------------------------------------------------------- rank one


class RankOneType(str, Enum):
    ELLIPTIC = "elliptic-transverse"
    HYPERBOLIC = "hyperbolic-transverse"
    DEGENERATE = "degenerate"


def classify_rank_one(sys: SystemFamily, par, j: float, reduced_point) -> RankOneType:
    """Transverse type of a rank-one point, given as a reduced critical point.

    ``reduced_point`` is either a critical point from the reduced-space
    module (with a ``morse`` attribute) or the string ``"fixed-sphere"``
    together with a chart point, for points on a fixed sphere of J.
    """
    from .reduced_spaces import Morse

    if isinstance(reduced_point, tuple) and reduced_point[0] == "fixed-sphere":
        return fixed_sphere_rank_one(sys, par, reduced_point[1])
    m = reduced_point.morse
    if m is Morse.ELLIPTIC:
        return RankOneType.ELLIPTIC
    if m is Morse.HYPERBOLIC:
        return RankOneType.HYPERBOLIC
    return RankOneType.DEGENERATE


def fixed_sphere_rank_one(sys: SystemFamily, par, p: ChartPoint, tol: float = 1e-8) -> RankOneType:
    """Rank-one point on a fixed sphere of J: type of Omega^{-1} d2J on L-perp / L.

    L is spanned by the Hamiltonian vector field of H at p.
    """
    fh, fj = sys.H_chart(p.chart, par), sys.J_chart(p.chart)
    dH = hd.gradient(fh, p.coords)
    XH = OMEGA_INV @ dH
    if np.linalg.norm(XH) < tol:
        raise ValueError("point is rank zero, not rank one")
    d2J = hd.hessian(fj, p.coords)
    # basis of L-perp (symplectic orthogonal) containing L, then the quotient
    v = XH / np.linalg.norm(XH)
    perp = _null_space((OMEGA @ v).reshape(1, 4))  # w with omega(v, w) = 0
    # remove L from L-perp to get a 2-d complement
    comp = [w for w in perp.T]
    Q = np.column_stack([v] + comp)
    q, _ = np.linalg.qr(Q)
    W = q[:, 1:3]
    om = W.T @ OMEGA @ W
    h2 = W.T @ d2J @ W
    if abs(np.linalg.det(om)) < tol:
        return RankOneType.DEGENERATE
    d = np.linalg.det(h2)
    if abs(d) < tol * max(1.0, np.max(np.abs(h2)) ** 2):
        return RankOneType.DEGENERATE
    return RankOneType.ELLIPTIC if d > 0 else RankOneType.HYPERBOLIC


def _null_space(M: np.ndarray) -> np.ndarray:
    _, s, vt = np.linalg.svd(M)
    rank = int(np.sum(s > 1e-12))
    return vt[rank:].T


# ---------------------------------------------------------------- region diagram


@dataclass
class RegionDiagram:
    s: np.ndarray
    B: list[list[Williamson]]
    C: list[list[Williamson]]

    def classes(self) -> np.ndarray:
        """Integer class per cell: 0 EE/EE, 1 FF/EE, 2 EE/FF, 3 FF/FF, -1 otherwise."""
        n = len(self.s)
        out = -np.ones((n, n), dtype=int)
        code = {(Williamson.EE, Williamson.EE): 0, (Williamson.FF, Williamson.EE): 1,
                (Williamson.EE, Williamson.FF): 2, (Williamson.FF, Williamson.FF): 3}
        for i in range(n):
            for j in range(n):
                out[i, j] = code.get((self.B[i][j], self.C[i][j]), -1)
        return out

    def components(self) -> dict[int, int]:
        """Connected pieces per class; diagonal neighbours count, since the
        focus-focus/focus-focus lens is thinner than a grid cell near its tips."""
        cl = self.classes()
        eight = np.ones((3, 3), dtype=int)
        return {k: int(ndlabel(cl == k, structure=eight)[1]) for k in range(4)}

    def to_csv(self) -> str:
        lines = ["s1,s2,B,C"]
        for i, s1 in enumerate(self.s):
            for j, s2 in enumerate(self.s):
                lines.append(f"{float(s1)!r},{float(s2)!r},{self.B[i][j].value},{self.C[i][j].value}")
        return "\n".join(lines) + "\n"


def region_diagram(sys: W2TwoParam, grid: int = 41) -> RegionDiagram:
    s = np.linspace(0, 1, grid)
    B = [[None] * grid for _ in range(grid)]
    C = [[None] * grid for _ in range(grid)]
    specials = special_directions(sys)
    for i, s1 in enumerate(s):
        for j, s2 in enumerate(s):
            par = (float(s1), float(s2))
            inv = sys.fixed_points(par)
            for lab, store in (("B", B), ("C", C)):
                p = inv.by_label(lab).point
                hb = hessian_bundle(sys, par, p, with_fd=False)
                store[i][j] = classify_fixed_point(hb, specials, check_stability=False).type
    return RegionDiagram(s, B, C)
