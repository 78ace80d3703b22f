"""Reduced spaces M_j^red = J^{-1}(j)/S^1 and reduced Hamiltonians.

Every supported system reduces to H^red(rho, theta) = A(rho) + B(rho) cos(theta)
in cylindrical coordinates. For the Hirzebruch families

    A = a rho^2 + c + d g(rho),   B = b rho sqrt(g(rho)),

with g a product of factors (k_i - rho^2). The S2 x S2 case at the
focus-focus level uses the (1 + rho^2)^-2 chart of the second sphere.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq, minimize

from . import hyperdual as hd
from .model_systems import (
    ChartPoint,
    HP2Param,
    SystemFamily,
    W1Hyperbolic,
    W1MovingAB,
    W1Switch,
    W2TransB,
    W2TransC,
    W2TwoParam,
    _W1,
    _W2,
    cmul,
    conj,
)

DELTA = 1e-7
MORSE_TOL = 1e-8


class ReducedDomainError(ValueError):
    """Level j outside the open J-range, or a system without a reduced form."""


class Morse(Enum):
    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"
    DEGENERATE = "degenerate"


def _sqrt(x):
    if isinstance(x, hd.HD):
        return x.sqrt()
    if isinstance(x, np.ndarray):
        return np.sqrt(np.maximum(x, 0.0))
    return math.sqrt(max(x, 0.0))


def _cos(x):
    if isinstance(x, hd.HD):
        return x.cos()
    return np.cos(x) if isinstance(x, np.ndarray) else math.cos(x)


def _sin(x):
    if isinstance(x, hd.HD):
        return x.sin()
    return np.sin(x) if isinstance(x, np.ndarray) else math.sin(x)


def _w2_params(sys: SystemFamily, par) -> tuple[float, float]:
    if isinstance(sys, W2TransB):
        return par[0], 1.0
    if isinstance(sys, W2TransC):
        return 0.0, 1.0 - par[0]
    return par[0], par[1]


@dataclass(frozen=True)
class ReducedSpace:
    """Cylindrical chart (rho, theta) on M_j^red with its lift to the ambient space."""

    sys: SystemFamily
    par: tuple[float, ...]
    j: float
    kind: str  # "W1", "W2" or "S2xS2"
    rho_max: float

    def density(self, rho):
        if self.kind == "S2xS2":
            return 4 * self.sys.R1 * rho / (1 + rho * rho) ** 2
        return rho

    def area_chart(self) -> tuple[float, float]:
        """(u_max, w) for the area coordinate u, in which the form is w du dtheta."""
        if self.kind == "S2xS2":
            return 1.0, 2 * self.sys.R1
        return self.rho_max**2, 0.5

    def rho_of_u(self, u):
        if self.kind == "S2xS2":
            return np.sqrt(u / (1 - u))
        return np.sqrt(u)

    def total_area(self) -> float:
        umax, w = self.area_chart()
        return 2 * math.pi * w * umax

    def ambient(self, rho, theta):
        """Ambient representative; accepts numpy arrays."""
        rho = np.asarray(rho, dtype=float)
        theta = np.asarray(theta, dtype=float)
        zero = np.zeros_like(rho + theta)
        if self.kind == "S2xS2":
            R1, R2 = self.sys.R1, self.sys.R2
            z1 = (1 - rho**2) / (1 + rho**2)
            z2 = (self.j - R1 * z1) / R2
            s1 = np.sqrt(np.maximum(1 - z1**2, 0.0))
            s2 = np.sqrt(np.maximum(1 - z2**2, 0.0))
            return (s1 + zero, zero, z1 + zero, s2 * np.cos(theta), s2 * np.sin(theta), z2 + zero)
        al, be, j = self.sys.alpha, self.sys.beta, self.j
        r = rho**2
        u3 = (rho * np.cos(theta), rho * np.sin(theta))
        if self.kind == "W1":
            u1 = np.sqrt(np.maximum(2 * (al + be - j) - r, 0.0))
            u2 = math.sqrt(2 * j) + zero
        else:
            u1 = np.sqrt(np.maximum(2 * (al + 2 * be - j) - r, 0.0))
            u2 = np.sqrt(np.maximum(2 * j - r, 0.0))
        u4 = np.sqrt(np.maximum(2 * be - r, 0.0))
        return [(u1 + zero, zero), (u2 + zero, zero), u3, (u4 + zero, zero)]

    def lift(self, rho: float, theta: float) -> ChartPoint:
        """Chart point above (rho, theta), built through the system's own chart maps."""
        if self.kind == "S2xS2":
            a = self.ambient(rho, theta)
            return ChartPoint("S2S2", tuple(float(v) for v in a))
        x3, y3 = rho * math.cos(theta), rho * math.sin(theta)
        if self.kind == "W1":
            x2 = math.sqrt(2 * self.j)
        else:
            x2 = math.sqrt(max(2 * self.j - rho * rho, 0.0))
        return self.sys.lift("U14", (x2, 0.0, x3, y3))

    def residual(self, rho, theta) -> float:
        """Residual of the implicit equation of M_j^red, via (X, Y, R, J) of the lift."""
        if self.kind == "S2xS2":
            a = self.ambient(rho, theta)
            return float(np.max(np.abs(self.sys.J(a) - self.j)))
        a = self.ambient(rho, theta)
        be, al = self.sys.beta, self.sys.alpha
        J = self.sys.J(a)
        R = self.sys.R(a)
        if self.kind == "W1":
            z = cmul(cmul(conj(a[0]), a[2]), conj(a[3]))
            rhs = 8 * R * (be - R) * (al + be - J - R)
        else:
            z = cmul(cmul(conj(a[0]), conj(a[1])), cmul(a[2], conj(a[3])))
            rhs = (2 * al + 3 * be - 2 * J - R) * (2 * J - be - R) * (be * be - R * R)
        lhs = z[0] ** 2 + z[1] ** 2
        return float(np.max(np.abs(lhs - rhs)))


@dataclass(frozen=True)
class ReducedHamiltonian:
    space: ReducedSpace
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0
    roots: tuple[float, ...] = ()  # g(rho) = prod(k - rho^2)

    @property
    def j(self) -> float:
        return self.space.j

    @property
    def kind(self) -> str:
        return self.space.kind

    # radial profile in r = rho^2, then in rho
    def _G(self):
        return np.polynomial.Polynomial.fromroots(self.roots) * (-1) ** len(self.roots)

    def g(self, rho):
        out = 1.0
        r = rho * rho
        for k in self.roots:
            out = (k - r) * out
        return out

    def g_prime(self, rho):
        return 2 * rho * self._G().deriv()(rho * rho)

    def g_second(self, rho):
        G = self._G()
        return 2 * G.deriv()(rho * rho) + 4 * rho * rho * G.deriv(2)(rho * rho)

    def h(self, rho):
        g = self.g(rho)
        return (2 * g + rho * self.g_prime(rho)) / (2 * np.sqrt(g))

    def h_prime(self, rho):
        g, g1, g2 = self.g(rho), self.g_prime(rho), self.g_second(rho)
        return (2 * g * (rho * g2 + 2 * g1) - rho * g1**2) / (4 * g**1.5)

    def f(self, rho):
        """2 rho^2 g g'' + 2 rho g g' - rho^2 g'^2 - 4 g^2, through r = rho^2."""
        G = self._G()
        r = np.asarray(rho, dtype=float) ** 2
        G0, G1, G2 = G(r), G.deriv()(r), G.deriv(2)(r)
        return 8 * r * G0 * G1 + 8 * r * r * G0 * G2 - 4 * r * r * G1**2 - 4 * G0**2

    def A(self, rho):
        if self.kind == "S2xS2":
            th = self.space.sys.R2 / self.space.sys.R1
            return (1 - th) * rho * rho / (2 * th * (1 + rho * rho))
        return self.a * rho * rho + self.c + self.d * self.g(rho)

    def B(self, rho):
        if self.kind == "S2xS2":
            th = self.space.sys.R2 / self.space.sys.R1
            r = rho * rho
            return 2 * r * _sqrt(th + (th - 1) * r) / (th * (1 + r) ** 2)
        return self.b * rho * _sqrt(self.g(rho))

    def value(self, rho, theta):
        return self.A(rho) + self.B(rho) * _cos(theta)

    def __call__(self, rho, theta):
        return self.value(rho, theta)

    def _pair(self, x):
        return self.value(x[0], x[1])

    def gradient(self, rho, theta) -> np.ndarray:
        return hd.gradient(self._pair, [rho, theta])

    def hessian(self, rho, theta) -> np.ndarray:
        return hd.hessian(self._pair, [rho, theta])

    def cartesian(self, x):
        """H^red in (x, y) = rho (cos theta, sin theta); smooth at rho = 0."""
        if self.kind == "S2xS2":
            raise ReducedDomainError("rho = 0 is the singular point of this level")
        r = x[0] * x[0] + x[1] * x[1]
        return self.a * r + self.c + self.d * self.g_r(r) + self.b * x[0] * _sqrt(self.g_r(r))

    def g_r(self, r):
        out = 1.0
        for k in self.roots:
            out = (k - r) * out
        return out


def reduced_hamiltonian(sys: SystemFamily, par, j: float) -> ReducedHamiltonian:
    par = sys.check_params(par)
    j = float(j)
    if isinstance(sys, _W1):
        al, be, ga = sys.alpha, sys.beta, sys.gamma
        if not 0 < j < al + be:
            raise ReducedDomainError(f"level j={j} is outside the open J-range (0, {al + be})")
        roots = (2 * be, 2 * (al + be - j))
        space = ReducedSpace(sys, par, j, "W1", math.sqrt(min(roots)))
        t = par[0]
        a = (1 - 2 * t) / 2
        if isinstance(sys, W1MovingAB):
            return ReducedHamiltonian(space, a=a, b=ga * t, roots=roots)
        if isinstance(sys, W1Switch):
            return ReducedHamiltonian(space, a=a, b=t * ga * j, c=t * be, roots=roots)
        if isinstance(sys, W1Hyperbolic):
            return ReducedHamiltonian(space, a=a, b=t * ga, d=2 * t, roots=roots)
    if isinstance(sys, _W2):
        al, be, ga = sys.alpha, sys.beta, sys.gamma
        if not 0 < j < al + 2 * be:
            raise ReducedDomainError(f"level j={j} is outside the open J-range (0, {al + 2 * be})")
        s1, s2 = _w2_params(sys, par)
        den = al * (al + 2 * be)
        lin = 2 * j - al - 2 * be
        a = s2 - s1 + lin * (s1 * s2 * be - (1 - s1) * (1 - s2) * (al + be)) / den
        b = ((1 - s1) * (1 - s2) * (al + be) + s1 * s2 * be) * ga / den
        c = (1 - s1 - s2 + 2 * s1 * s2) * lin * be / (al + 2 * be) + (s1 - s2) * be
        roots = (2 * (al + 2 * be - j), 2 * j, 2 * be)
        space = ReducedSpace(sys, par, j, "W2", math.sqrt(min(roots)))
        return ReducedHamiltonian(space, a=a, b=b, c=c, roots=roots)
    if isinstance(sys, HP2Param):
        if par != (0.5, 0.5) or abs(j - (sys.R1 - sys.R2)) > 1e-12:
            raise ReducedDomainError("closed form available only for s1 = s2 = 1/2 at j = R1 - R2")
        if not sys.R2 > sys.R1:
            raise ReducedDomainError("needs R2 > R1")
        return ReducedHamiltonian(ReducedSpace(sys, par, j, "S2xS2", math.inf))
    raise ReducedDomainError(f"no reduced form for {sys.id}")


def ambient_value(rh: ReducedHamiltonian, rho, theta):
    """H evaluated on the lifted ambient point (vectorized); the independent route."""
    sp = rh.space
    return sp.sys.H(sp.ambient(rho, theta), sp.par)


# ---------------------------------------------------------------- critical points


@dataclass
class ReducedCriticalPoint:
    rho: float
    theta: float
    morse: Morse
    hessian: np.ndarray
    mixed: float
    grad_residual: float
    pole: bool = False

    def to_json(self) -> dict:
        return {"rho": self.rho, "theta": self.theta, "morse": self.morse.value,
                "mixed": self.mixed, "grad_residual": self.grad_residual, "pole": self.pole}


def _morse(hess: np.ndarray, tol: float = MORSE_TOL) -> Morse:
    scale = float(np.max(np.abs(hess)))
    ev = np.linalg.eigvalsh(hess)
    if scale == 0.0 or np.min(np.abs(ev)) < tol * scale:
        return Morse.DEGENERATE
    return Morse.ELLIPTIC if ev[0] * ev[1] > 0 else Morse.HYPERBOLIC


def _rho_window(rh: ReducedHamiltonian, delta: float) -> tuple[float, float]:
    hi = rh.space.rho_max - delta if math.isfinite(rh.space.rho_max) else 1e3
    return delta, hi


def reduced_critical_points(rh: ReducedHamiltonian, grid: int = 4000, delta: float = DELTA,
                            tol: float = MORSE_TOL) -> list[ReducedCriticalPoint]:
    """Critical points on theta in {0, pi}, plus the pole rho = 0 when it is critical."""
    lo, hi = _rho_window(rh, delta)
    out: list[ReducedCriticalPoint] = []
    for theta in (0.0, math.pi):
        def dr(r, theta=theta):
            return float(rh.gradient(r, theta)[0])

        xs = np.linspace(lo, hi, grid)
        vals = [dr(x) for x in xs]
        roots = []
        for x0, x1, v0, v1 in zip(xs, xs[1:], vals, vals[1:]):
            if v0 == 0.0:
                roots.append(float(x0))
            elif v0 * v1 < 0:
                roots.append(brentq(dr, x0, x1, xtol=1e-15, rtol=4 * np.finfo(float).eps))
        if vals[-1] == 0.0:
            roots.append(float(xs[-1]))
        for r in roots:
            H2 = rh.hessian(r, theta)
            g = rh.gradient(r, theta)
            out.append(ReducedCriticalPoint(r, theta, _morse(H2, tol), H2, float(H2[0, 1]),
                                            float(np.max(np.abs(g)))))
    if rh.kind != "S2xS2":
        g0 = hd.gradient(rh.cartesian, [0.0, 0.0])
        if np.max(np.abs(g0)) < 1e-12:
            H2 = hd.hessian(rh.cartesian, [0.0, 0.0])
            out.append(ReducedCriticalPoint(0.0, 0.0, _morse(H2, tol), H2, float(H2[0, 1]),
                                            float(np.max(np.abs(g0))), pole=True))
    return out


def gradient_sweep(rh: ReducedHamiltonian, starts: int = 48, seed: int = 0,
                   delta: float = DELTA, threshold: float = 1e-7) -> list[tuple[float, float]]:
    """Independent search: minimize |grad H|^2 from random starts over the full (rho, theta) chart."""
    lo, hi = _rho_window(rh, delta)
    rng = np.random.default_rng(seed)

    def obj(x):
        g = rh.gradient(x[0], x[1])
        Hs = rh.hessian(x[0], x[1])
        return float(g @ g), 2 * Hs @ g

    found = []
    for _ in range(starts):
        x0 = [rng.uniform(lo, hi), rng.uniform(0, 2 * math.pi)]
        res = minimize(obj, x0, jac=True, method="L-BFGS-B",
                       bounds=[(lo, hi), (None, None)], options={"ftol": 1e-30, "gtol": 1e-14})
        g = rh.gradient(*res.x)
        if np.max(np.abs(g)) < threshold and lo < res.x[0] < hi:
            found.append((float(res.x[0]), float(res.x[1] % (2 * math.pi))))
    return found


def missed_by_radial_search(rh: ReducedHamiltonian, found: list[ReducedCriticalPoint],
                            sweep: list[tuple[float, float]], tol: float = 1e-4) -> list[tuple[float, float]]:
    missed = []
    for r, th in sweep:
        ok = False
        for p in found:
            dth = abs((th - p.theta + math.pi) % (2 * math.pi) - math.pi)
            if abs(r - p.rho) < tol and dth < tol:
                ok = True
                break
        if not ok:
            missed.append((r, th))
    return missed


# ---------------------------------------------------------------- profile certificates


def _pmul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for k, b in enumerate(q):
            out[i + k] += a * b
    return out


def _peval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _pderiv(p):
    return [i * c for i, c in enumerate(p)][1:] or [Fraction(0)]


def w1_f_exact(alpha, beta, j, rho) -> Fraction:
    """f(rho) for W1 in exact rationals, built from g with no reference to P."""
    alpha, beta, j, rho = (Fraction(v) for v in (alpha, beta, j, rho))
    G = _pmul([2 * beta, Fraction(-1)], [2 * (alpha + beta - j), Fraction(-1)])
    r = rho * rho
    G0, G1, G2 = _peval(G, r), _peval(_pderiv(G), r), _peval(_pderiv(_pderiv(G)), r)
    return 8 * r * G0 * G1 + 8 * r * r * G0 * G2 - 4 * r * r * G1**2 - 4 * G0**2


def w1_P_coefficients(alpha, beta, rho) -> tuple[Fraction, Fraction, Fraction]:
    """(A, B, C) with P = A j^2 + B j + C for the W1 profile."""
    alpha, beta, rho = (Fraction(v) for v in (alpha, beta, rho))
    A = -16 * beta**2
    B = 8 * (rho**6 - 3 * beta * rho**4 + 4 * beta**2 * (alpha + beta))
    C = (3 * rho**8 - 8 * (alpha + 2 * beta) * rho**6 + 24 * beta * (alpha + beta) * rho**4
         - 16 * beta**2 * (alpha + beta) ** 2)
    return A, B, C


def w1_discriminant_identity(alpha, beta, samples) -> list[dict]:
    """Check f = 4P in j and disc_j(P) = -64 rho^6 (2 beta - rho^2)^3 exactly at each rho."""
    out = []
    alpha, beta = Fraction(alpha), Fraction(beta)
    for rho in samples:
        rho = Fraction(rho)
        A, B, C = w1_P_coefficients(alpha, beta, rho)
        disc = B * B - 4 * A * C
        target = -64 * rho**6 * (2 * beta - rho**2) ** 3
        js = [Fraction(k, 3) for k in range(-2, 3)]
        f_ok = all(w1_f_exact(alpha, beta, jj, rho) == 4 * (A * jj * jj + B * jj + C) for jj in js)
        out.append({"rho": rho, "disc": disc, "target": target, "disc_ok": disc == target, "f_eq_4P": f_ok})
    return out


@dataclass
class ProfileCertificate:
    family: str
    j: float
    exact: bool
    identity_checks: list[dict] = field(default_factory=list)
    grid_points: int = 0
    max_f: float = -math.inf  # closest approach to zero from below
    argmax_rho: float = math.nan
    violations: list[float] = field(default_factory=list)

    @property
    def identity_holds(self) -> bool:
        return all(c["disc_ok"] and c["f_eq_4P"] for c in self.identity_checks)

    @property
    def negative(self) -> bool:
        return not self.violations and self.max_f < 0

    def to_json(self) -> dict:
        return {"family": self.family, "j": self.j, "exact": self.exact, "grid_points": self.grid_points,
                "max_f": self.max_f, "argmax_rho": self.argmax_rho, "violations": len(self.violations),
                "identity_checks": [{k: (str(v) if isinstance(v, Fraction) else v) for k, v in c.items()}
                                    for c in self.identity_checks]}


def default_identity_samples(beta, count: int = 13) -> list[Fraction]:
    """Rational rho spread over (0, sqrt(2 beta)); 13 covers degree 12 in rho."""
    hi = Fraction(math.isqrt(int(2 * Fraction(beta))) or 1)
    return [hi * Fraction(k, count + 1) for k in range(1, count + 1)]


def profile_negativity_certificate(sys: SystemFamily, par, j: float, grid: int = 10_000,
                                   samples=None) -> ProfileCertificate:
    rh = reduced_hamiltonian(sys, par, j)
    cert = ProfileCertificate(sys.id, float(j), exact=rh.kind == "W1")
    if rh.kind == "W1":
        al = Fraction(sys.alpha).limit_denominator(10**12)
        be = Fraction(sys.beta).limit_denominator(10**12)
        cert.identity_checks = w1_discriminant_identity(al, be, samples or default_identity_samples(be))
    elif rh.kind != "W2":
        raise ReducedDomainError("negativity certificates exist for the Hirzebruch families only")
    rmax = rh.space.rho_max
    xs = np.linspace(0, rmax, grid + 2)[1:-1]
    fs = rh.f(xs)
    cert.grid_points = len(xs)
    k = int(np.argmax(fs))
    cert.max_f, cert.argmax_rho = float(fs[k]), float(xs[k])
    cert.violations = [float(x) for x, v in zip(xs, fs) if v >= 0]
    return cert


# ---------------------------------------------------------------- areas and dumps


def sublevel_area(rh: ReducedHamiltonian, level: float, n: int = 20_000) -> float:
    """Symplectic area of {H^red < level} by midpoint rule in the area coordinate.

    The theta-measure of {A + B cos < level} is exact, so the result is
    nondecreasing in the level by construction.
    """
    umax, w = rh.space.area_chart()
    u = (np.arange(n) + 0.5) / n * umax
    rho = rh.space.rho_of_u(u)
    A, B = np.asarray(rh.A(rho), dtype=float), np.asarray(rh.B(rho), dtype=float)
    meas = np.empty_like(u)
    pos, neg, zer = B > 0, B < 0, B == 0
    meas[pos] = 2 * math.pi - 2 * np.arccos(np.clip((level - A[pos]) / B[pos], -1, 1))
    meas[neg] = 2 * np.arccos(np.clip((level - A[neg]) / B[neg], -1, 1))
    meas[zer] = np.where(A[zer] < level, 2 * math.pi, 0.0)
    return float(w * umax / n * meas.sum())


def profile_csv(rh: ReducedHamiltonian, points: int = 200, delta: float = DELTA) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["rho", "g", "h", "f", "Hred(theta=0)", "Hred(theta=pi)"])
    lo, hi = _rho_window(rh, delta)
    for r in np.linspace(lo, hi, points):
        wr.writerow([repr(float(r)), repr(float(rh.g(r))), repr(float(rh.h(r))), repr(float(rh.f(r))),
                     repr(float(rh.value(r, 0.0))), repr(float(rh.value(r, math.pi)))])
    return buf.getvalue()


def section_curve(rh: ReducedHamiltonian, points: int = 200) -> list[tuple[float, float, float]]:
    """(R, X, Y=0 branch) samples of the section Y = 0 of the reduced space."""
    out = []
    lo, hi = _rho_window(rh, DELTA)
    for r in np.linspace(lo, hi, points):
        for th in (0.0, math.pi):
            a = rh.space.ambient(r, th)
            sysobj = rh.space.sys
            x = (cmul(cmul(conj(a[0]), a[2]), conj(a[3]))[0] if rh.kind == "W1"
                 else cmul(cmul(conj(a[0]), conj(a[1])), cmul(a[2], conj(a[3])))[0])
            out.append((float(sysobj.R(a)), float(x), th))
    return out


__all__ = [
    "Morse", "ReducedDomainError", "ReducedSpace", "ReducedHamiltonian", "ReducedCriticalPoint",
    "ProfileCertificate", "reduced_hamiltonian", "reduced_critical_points", "gradient_sweep",
    "missed_by_radial_search", "profile_negativity_certificate", "w1_discriminant_identity",
    "w1_f_exact", "w1_P_coefficients", "sublevel_area", "profile_csv", "section_curve", "ambient_value",
]
