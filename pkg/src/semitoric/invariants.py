"""Height invariants for the two-focus-focus systems on W2 and S2 x S2.

h_l is the reduced symplectic area of {H^red < y_l} at the level J = x_l
of the l-th focus-focus value, divided by 2 pi. Closed forms reduce this
to one-dimensional integrals; a stratified Monte-Carlo estimate over the
lifted ambient Hamiltonian provides an independent check.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import bisect

from .model_systems import HP2Param, ParameterWindowError, W2TwoParam
from .reduced_spaces import ReducedHamiltonian, ambient_value, reduced_hamiltonian, sublevel_area


class HeightDomainError(ValueError):
    """Parameters outside the range where the height formulas hold."""


class ComparisonRefused(ValueError):
    """Scalings that make the unmarked polygons differ; heights are not compared."""


@dataclass
class OracleResult:
    area: float
    h: float
    stderr: float
    samples: int
    replicates: int


@dataclass
class HeightResult:
    system: str
    params: dict
    h1: float
    h2: float
    fiber_height: float
    integral: float
    quad_error: float
    oracle: OracleResult | None = None
    h2_audit: float | None = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"system": self.system, "params": self.params, "h1": self.h1, "h2": self.h2,
               "fiber_height": self.fiber_height, "integral": self.integral, "quad_error": self.quad_error,
               "h2_audit": self.h2_audit, "notes": self.notes}
        if self.oracle is not None:
            out["oracle"] = {"h1": self.oracle.h, "stderr": self.oracle.stderr, "samples": self.oracle.samples}
        return out


def _sin2_quad(fn, lo: float, hi: float, epsrel: float = 1e-10) -> tuple[float, float]:
    """Integrate fn on [lo, hi] after rho = lo + (hi - lo) sin^2(phi).

    The Jacobian vanishes at both ends, which absorbs the square-root
    behaviour of arccos near 1.
    """
    w = hi - lo

    def g(phi):
        s, c = math.sin(phi), math.cos(phi)
        return fn(lo + w * s * s) * 2 * w * s * c

    val, err = quad(g, 0.0, math.pi / 2, epsabs=0.0, epsrel=epsrel, limit=200)
    return val, err


# ---------------------------------------------------------------- W2


def w2_window(alpha: float, beta: float) -> tuple[float, float]:
    nu = beta / alpha
    return 1 / (2 * (1 + 2 * nu) * math.sqrt(nu)), 1 / (2 * math.sqrt(nu))


def w2_rho_bounds(alpha: float, beta: float, gamma: float) -> tuple[float, float]:
    """(rho-, rho+): f(rho) <= 1 exactly on [rho-, rho+]."""
    rad = (alpha + 2 * beta) ** 2 * (alpha + beta) ** 2 * gamma**2 - alpha**4
    if rad <= 0:
        raise HeightDomainError(
            "rho- is not real: need (alpha+2beta)^2 (alpha+beta)^2 gamma^2 > alpha^4, "
            f"i.e. gamma > {alpha ** 2 / ((alpha + 2 * beta) * (alpha + beta)):.6g}")
    s = math.sqrt(rad) / ((alpha + 2 * beta) * gamma)
    return math.sqrt(alpha + beta - s), math.sqrt(alpha + beta + s)


def w2_f(alpha, beta, gamma, rho):
    return alpha**2 / ((alpha + 2 * beta) * gamma * rho * np.sqrt(2 * (alpha + beta) - rho**2))


def w2_integral(alpha: float, beta: float, gamma: float) -> tuple[float, float]:
    lo, plus = w2_rho_bounds(alpha, beta, gamma)
    # past rho+ the arccos factor vanishes (f > 1), so the range stops there
    hi = min(plus, math.sqrt(2 * beta))

    def fn(r):
        return r * math.acos(min(1.0, w2_f(alpha, beta, gamma, r)))

    return _sin2_quad(fn, lo, hi)


def height_w2(alpha: float, beta: float, gamma: float, oracle_samples: int = 0, seed: int = 0,
              audit: bool = False) -> HeightResult:
    lo, hi = w2_window(alpha, beta)
    if not lo < gamma < hi:
        raise HeightDomainError(f"gamma={gamma} outside the window ({lo:.6g}, {hi:.6g})")
    I, err = w2_integral(alpha, beta, gamma)
    h1 = beta - I / math.pi
    res = HeightResult("W2TwoParam", {"alpha": alpha, "beta": beta, "gamma": gamma}, h1, beta - h1, beta, I,
                       err / math.pi)
    if math.sqrt(2 * beta) > w2_rho_bounds(alpha, beta, gamma)[1]:
        res.notes.append("rho+ < sqrt(2 beta): integral truncated at rho+")
    sys = W2TwoParam(alpha, beta, gamma)
    if oracle_samples:
        rh = reduced_hamiltonian(sys, (0.5, 0.5), beta)
        res.oracle = sublevel_area_oracle(rh, 0.0, oracle_samples, seed=seed)
    if audit:
        rh2 = reduced_hamiltonian(sys, (0.5, 0.5), alpha + beta)
        res.h2_audit = sublevel_area(rh2, 0.0, n=200_000) / (2 * math.pi)
    return res


# ---------------------------------------------------------------- S2 x S2


def s2_rho_max(R1: float, R2: float) -> float:
    th = R2 / R1
    num = 9 - th + 4 * math.sqrt(5)
    if num <= 0:
        raise HeightDomainError("need R2/R1 < 9 + 4 sqrt(5) so that part of the level lies below it")
    return math.sqrt(num / (th - 1))


def s2_F(R1, R2, rho):
    th = R2 / R1
    return (th - 1) * (1 + rho**2) / (4 * np.sqrt(th + (th - 1) * rho**2))


def s2_integral(R1: float, R2: float) -> tuple[float, float]:
    hi = s2_rho_max(R1, R2)

    def fn(r):
        return r / (1 + r * r) ** 2 * math.acos(min(1.0, s2_F(R1, R2, r)))

    return _sin2_quad(fn, 0.0, hi)


def height_s2xs2(R1: float, R2: float, oracle_samples: int = 0, seed: int = 0) -> HeightResult:
    if not (R1 > 0 and R2 > R1):
        raise HeightDomainError("need R2 > R1 > 0")
    I, err = s2_integral(R1, R2)
    h1 = 2 * R1 * (1 - 2 * I / math.pi)
    res = HeightResult("HP2Param", {"R1": R1, "R2": R2}, h1, 2 * R1 - h1, 2 * R1, I, 4 * R1 * err / math.pi)
    if oracle_samples:
        rh = reduced_hamiltonian(HP2Param(R1, R2), (0.5, 0.5), R1 - R2)
        res.oracle = sublevel_area_oracle(rh, 0.0, oracle_samples, seed=seed)
    return res


# ---------------------------------------------------------------- Monte-Carlo oracle


def sublevel_area_oracle(rh: ReducedHamiltonian, level: float, samples: int = 10**7, seed: int = 0,
                         replicates: int = 10, func=None, chunk: int = 1_000_000) -> OracleResult:
    """Jittered-grid estimate of the area of {H < level}, H read off the ambient lift.

    Samples are split into independent replicates; each is a stratified
    grid in (u, theta), u the area coordinate, with one uniform point per
    cell. The spread across replicates gives the standard error.
    """
    func = func or (lambda r, t: ambient_value(rh, r, t))
    umax, w = rh.space.area_chart()
    total = 2 * math.pi * w * umax
    rng = np.random.default_rng(seed)
    per = max(samples // replicates, 1)
    n = max(int(math.isqrt(per)), 1)
    ests = []
    for _ in range(replicates):
        hits = 0
        for start in range(0, n, max(chunk // n, 1)):
            rows = np.arange(start, min(n, start + max(chunk // n, 1)))
            iu = np.repeat(rows, n)
            it = np.tile(np.arange(n), len(rows))
            u = (iu + rng.random(iu.size)) / n * umax
            th = (it + rng.random(it.size)) / n * 2 * math.pi
            vals = np.asarray(func(rh.space.rho_of_u(u), th), dtype=float)
            vals = np.broadcast_to(vals, u.shape)
            hits += int(np.count_nonzero(vals < level))
        ests.append(total * hits / (n * n))
    ests = np.array(ests)
    area = float(ests.mean())
    se = float(ests.std(ddof=1) / math.sqrt(replicates)) if replicates > 1 else math.nan
    return OracleResult(area, area / (2 * math.pi), se / (2 * math.pi), n * n * replicates, replicates)


# ---------------------------------------------------------------- comparison


@dataclass
class Comparison:
    R1: float
    R2: float
    alpha: float
    beta: float
    window: tuple[float, float]
    h1_s2: float
    rows: list[tuple[float, float, float]]  # gamma, h1_w2, quad error
    decreasing: bool
    gamma_star: float | None
    lower_edge_degenerate: bool
    mc: dict = field(default_factory=dict)  # gamma -> oracle stderr

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["gamma", "h1_w2", "h1_s2", "err_quad", "err_mc"])
        for g, h, e in self.rows:
            wr.writerow([repr(g), repr(h), repr(self.h1_s2), repr(e), repr(self.mc[g]) if g in self.mc else ""])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"R1": self.R1, "R2": self.R2, "alpha": self.alpha, "beta": self.beta, "window": self.window,
                "h1_s2": self.h1_s2, "decreasing": self.decreasing, "gamma_star": self.gamma_star,
                "lower_edge_degenerate": self.lower_edge_degenerate,
                "rows": [{"gamma": g, "h1_w2": h, "err": e} for g, h, e in self.rows]}


def matched_scalings(R1: float, R2: float) -> tuple[float, float]:
    return 2 * (R2 - R1), 2 * R1


def gamma_grid(alpha: float, beta: float, points: int = 20) -> list[float]:
    lo, hi = w2_window(alpha, beta)
    return [lo + (hi - lo) * (k + 1) / (points + 1) for k in range(points)]


def match_and_compare(R1: float, R2: float, gammas=None, alpha: float | None = None, beta: float | None = None,
                      points: int = 20, xtol: float = 1e-8, mc_samples: int = 0) -> Comparison:
    if not (R1 > 0 and R2 > R1):
        raise HeightDomainError("need R2 > R1 > 0")
    a0, b0 = matched_scalings(R1, R2)
    if alpha is not None and abs(alpha - a0) > 1e-12 or beta is not None and abs(beta - b0) > 1e-12:
        raise ComparisonRefused(
            f"alpha={alpha}, beta={beta} differ from the matched values ({a0}, {b0}); the unmarked "
            "polygons then differ and the systems cannot be isomorphic, so heights are not compared")
    alpha, beta = a0, b0
    try:
        lo, hi = w2_window(alpha, beta)
    except ZeroDivisionError:
        raise HeightDomainError("degenerate scalings") from None
    gammas = list(gammas) if gammas is not None else gamma_grid(alpha, beta, points)
    s2 = height_s2xs2(R1, R2)
    rows = []
    for g in gammas:
        r = height_w2(alpha, beta, g)
        rows.append((g, r.h1, r.quad_error))
    tol = max(e for _, _, e in rows) * 2
    decreasing = all(h0 - h1 > tol for (_, h0, _), (_, h1, _) in zip(rows, rows[1:]))
    star = None
    diffs = [h - s2.h1 for _, h, _ in rows]
    for (g0, _, _), (g1, _, _), d0, d1 in zip(rows, rows[1:], diffs, diffs[1:]):
        if d0 == 0:
            star = g0
            break
        if d0 * d1 < 0:
            star = bisect(lambda g: height_w2(alpha, beta, g).h1 - s2.h1, g0, g1, xtol=xtol)
            break
    edge = alpha**2 / ((alpha + 2 * beta) * (alpha + beta))
    comp = Comparison(R1, R2, alpha, beta, (lo, hi), s2.h1, rows, decreasing, star, abs(edge - lo) < 1e-12)
    if mc_samples:
        for g in gammas:
            comp.mc[g] = height_w2(alpha, beta, g, oracle_samples=mc_samples).oracle.stderr
    return comp


__all__ = [
    "HeightResult", "OracleResult", "Comparison", "HeightDomainError", "ComparisonRefused",
    "height_w2", "height_s2xs2", "sublevel_area_oracle", "match_and_compare", "matched_scalings",
    "gamma_grid", "w2_window", "w2_rho_bounds", "s2_rho_max", "ParameterWindowError",
]
