"""Polygon-level construction of the W_n transition families.

Starting from the coupled-spins polygons on W_0(alpha', beta), each stage
chops the upper right corner and glues back a simplex at the lower right
edge, which turns the W_n polygons into the W_{n+1} ones. The three regimes
(before, during and after the focus-focus window) are processed together.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .rational_geometry import ConvexPolygon, Point, fmt_rat, hull, rat
from .semitoric_polygon import (
    ChopInfeasibleError,
    Mark,
    MarkedWeightedPolygon,
    UnchopInfeasibleError,
    corner_chop,
    corner_unchop,
    orbit_equal,
    remove_cut,
    validate,
)


class PipelineError(ValueError):
    def __init__(self, stage: int | None, reason: str):
        self.stage, self.reason = stage, reason
        where = f"stage {stage}: " if stage is not None else ""
        super().__init__(where + reason)


REGIMES = ("below", "transition", "above")


def delta_n0(n: int, alpha, beta) -> ConvexPolygon:
    a, b = rat(alpha), rat(beta)
    return hull([(0, 0), (b, b), (a + b, b), (a + n * b, 0)])


def delta_n1(n: int, alpha, beta) -> ConvexPolygon:
    """The literal hull for the t > t+ regime. For n = 0 it is only right when alpha >= beta."""
    a, b = rat(alpha), rat(beta)
    return hull([(0, b), (b, 0), (a + b, b), (a + n * b, 0)])


@dataclass(frozen=True)
class FamilyPolygonTriple:
    n: int
    alpha: Fraction
    beta: Fraction
    y: Fraction
    below: MarkedWeightedPolygon
    transition: MarkedWeightedPolygon
    above: MarkedWeightedPolygon

    def regime(self, name: str) -> MarkedWeightedPolygon:
        return getattr(self, name)

    @property
    def live_regimes(self) -> tuple[str, ...]:
        """Regimes that occur for some t. For n = 0 and alpha = beta, t+ = 1 and the upper one is empty."""
        if self.n == 0 and self.alpha == self.beta:
            return REGIMES[:2]
        return REGIMES

    def orbit_equal(self, other: "FamilyPolygonTriple") -> bool:
        return all(orbit_equal(self.regime(r), other.regime(r)) for r in REGIMES)

    def to_json(self) -> dict:
        return {"n": self.n, "alpha": fmt_rat(self.alpha), "beta": fmt_rat(self.beta), "y": fmt_rat(self.y),
                **{r: self.regime(r).to_json() for r in REGIMES}}


def mark_interval(n: int, alpha, beta) -> tuple[Fraction, Fraction]:
    """Open interval of ordinates y with (beta, y) interior to delta_n0(n, alpha, beta)."""
    a, b = rat(alpha), rat(beta)
    # for n = 0 the right edge crosses x = beta at height beta - alpha
    lo = b - a if n == 0 and a < b else Fraction(0)
    return lo, b


def _check(n, alpha, beta, y):
    if n < 0:
        raise ValueError("n must be nonnegative")
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    lo, hi = mark_interval(n, alpha, beta)
    if not lo < y < hi:
        raise ValueError(f"mark ordinate y={fmt_rat(y)} must lie strictly between {fmt_rat(lo)} and {fmt_rat(hi)}")


def standard_triple(n: int, alpha, beta, y=None) -> FamilyPolygonTriple:
    alpha, beta = rat(alpha), rat(beta)
    y = sum(mark_interval(n, alpha, beta)) / 2 if y is None else rat(y)
    _check(n, alpha, beta, y)
    p0 = delta_n0(n, alpha, beta)
    below = MarkedWeightedPolygon(p0)
    trans = MarkedWeightedPolygon(p0, (Mark((beta, y), 1),))
    # for n = 0 with alpha <= beta the literal hull has the wrong shape, so the
    # last regime comes from flipping the cut down and forgetting it
    if n >= 1 or alpha > beta:
        above = MarkedWeightedPolygon(delta_n1(n, alpha, beta))
    else:
        above = remove_cut(trans, 0, -1)
    return FamilyPolygonTriple(n, alpha, beta, y, below, trans, above)


@dataclass
class PipelineStep:
    stage: int
    regime: str
    op: str  # chop | unchop | derived
    site: list
    lam: Fraction
    before: MarkedWeightedPolygon
    after: MarkedWeightedPolygon
    note: str = ""

    def to_json(self) -> dict:
        return {"stage": self.stage, "regime": self.regime, "op": self.op, "site": self.site,
                "lambda": fmt_rat(self.lam), "polygon_before": self.before.to_json(),
                "polygon_after": self.after.to_json(), "note": self.note}


@dataclass
class TransitionBracket:
    alpha_prime: float
    beta: float
    alpha: float
    t_minus: float
    t_plus: float
    base_minus: float
    base_plus: float

    @property
    def lower_ok(self) -> bool:
        return self.base_minus <= self.t_minus + 1e-15

    @property
    def upper_ok(self) -> bool:
        return self.t_plus <= self.base_plus + 1e-15

    @property
    def straddles_half(self) -> bool:
        return self.t_minus < 0.5 < self.t_plus

    def to_json(self) -> dict:
        return {"alpha_prime": self.alpha_prime, "alpha": self.alpha, "beta": self.beta, "t_minus": self.t_minus,
                "t_plus": self.t_plus, "base_minus": self.base_minus, "base_plus": self.base_plus,
                "lower_ok": self.lower_ok, "upper_ok": self.upper_ok, "straddles_half": self.straddles_half}


def coupled_spins_times(alpha: float, beta: float) -> tuple[float, float]:
    s = 2 * math.sqrt(alpha * beta)
    return beta / (2 * beta + alpha + s), beta / (2 * beta + alpha - s)


@dataclass
class PipelineResult:
    triple: FamilyPolygonTriple
    steps: list[PipelineStep]
    lambdas: tuple[Fraction, ...]
    alpha_prime: Fraction
    bracket: TransitionBracket
    stage_triples: list[FamilyPolygonTriple] = field(default_factory=list)

    def log_lines(self) -> str:
        return "\n".join(json.dumps(s.to_json()) for s in self.steps) + ("\n" if self.steps else "")


def default_schedule(n: int, alpha, beta) -> tuple[Fraction, ...]:
    """Equal sizes placing alpha' = alpha + n*lambda in [beta, 4 beta) when possible.

    alpha' >= beta keeps the mark out of every glued simplex whatever its
    ordinate; alpha' < 4 beta is what puts 1/2 strictly inside (t-, t+) for
    the starting coupled-spins family.
    """
    alpha, beta = rat(alpha), rat(beta)
    if n == 0:
        return ()
    lo = max(Fraction(0), beta - alpha) / n
    hi = beta if alpha >= 4 * beta else min(beta, (4 * beta - alpha) / n)
    return ((lo + hi) / 2,) * n


def upper_right_corner(poly: ConvexPolygon) -> Point:
    top = max(v[1] for v in poly.vertices)
    return max(v for v in poly.vertices if v[1] == top)


def lower_right_edge(poly: ConvexPolygon) -> tuple[Point, Point]:
    bottom = min(v[1] for v in poly.vertices)
    v = max(p for p in poly.vertices if p[1] == bottom)
    return v, poly.neighbors(v)[1]


def _site(p: Point) -> list[str]:
    return [fmt_rat(p[0]), fmt_rat(p[1])]


def _stage(mp: MarkedWeightedPolygon, lam: Fraction, beta: Fraction, stage: int, regime: str,
           steps: list[PipelineStep]) -> MarkedWeightedPolygon:
    q = upper_right_corner(mp.polygon)
    chopped = corner_chop(mp, q, lam)
    if len(chopped.polygon) != len(mp.polygon) + 1:
        raise PipelineError(stage, f"{regime}: chop did not add exactly one vertex")
    steps.append(PipelineStep(stage, regime, "chop", _site(q), lam, mp, chopped))
    a, b = lower_right_edge(chopped.polygon)
    glued = corner_unchop(chopped, (a, b), beta - lam)
    if len(glued.polygon) != len(chopped.polygon) - 1:
        raise PipelineError(stage, f"{regime}: unchop did not remove exactly one vertex")
    steps.append(PipelineStep(stage, regime, "unchop", [_site(a), _site(b)], beta - lam, chopped, glued))
    return glued


def run_pipeline(n_target: int, alpha, beta, lambdas=None, y=None, keep_stages: bool = False) -> PipelineResult:
    alpha, beta = rat(alpha), rat(beta)
    lams = tuple(rat(v) for v in lambdas) if lambdas is not None else default_schedule(n_target, alpha, beta)
    if len(lams) != n_target:
        raise PipelineError(None, f"schedule has {len(lams)} sizes for {n_target} stages")
    for i, lam in enumerate(lams):
        if not 0 < lam < beta:
            raise PipelineError(i, f"size {fmt_rat(lam)} violates 0 < lambda < beta (lattice length of the right edge)")
    a_prime = alpha + sum(lams, Fraction(0))
    # the mark has to be interior both at the start and at the target
    lo = max(mark_interval(n_target, alpha, beta)[0], mark_interval(0, a_prime, beta)[0])
    y = (lo + beta) / 2 if y is None else rat(y)
    _check(n_target, alpha, beta, y)
    if not lo < y:
        raise PipelineError(None, f"mark ordinate {fmt_rat(y)} is not interior to the starting polygon")
    cur = standard_triple(0, a_prime, beta, y)
    steps: list[PipelineStep] = []
    stages = [cur]
    for i, lam in enumerate(lams):
        a_next = a_prime - sum(lams[: i + 1], Fraction(0))
        new = {}
        for regime in ("below", "transition"):
            try:
                new[regime] = _stage(cur.regime(regime), lam, beta, i, regime, steps)
            except (ChopInfeasibleError, UnchopInfeasibleError) as exc:
                raise PipelineError(i, f"{regime}: {exc}") from exc
        derived = remove_cut(new["transition"], 0, -1)
        try:
            direct = _stage(cur.above, lam, beta, i, "above", steps)
        except (ChopInfeasibleError, UnchopInfeasibleError) as exc:
            steps.append(PipelineStep(i, "above", "derived", [], lam, cur.above, derived,
                                      note=f"direct stage infeasible ({exc}); flipped from the transition regime"))
            direct = derived
        if not orbit_equal(direct, derived):
            raise PipelineError(i, "above regime disagrees with the flipped transition polygon")
        rep = validate(new["transition"])
        if not rep.valid or len(rep.fake_or_hidden()) != 1:
            raise PipelineError(i, "transition polygon fails validation: " + "; ".join(rep.violations))
        if new["transition"].s != 1 or new["below"].s != 0 or direct.s != 0:
            raise PipelineError(i, "mark count changed")
        cur = FamilyPolygonTriple(i + 1, a_next, beta, y, new["below"], new["transition"], direct)
        if keep_stages:
            stages.append(cur)
    tm, tp = coupled_spins_times(float(a_prime), float(beta))
    bm, bp = coupled_spins_times(float(alpha), float(beta))
    bracket = TransitionBracket(float(a_prime), float(beta), float(alpha), tm, tp, bm, bp)
    return PipelineResult(cur, steps, lams, a_prime, bracket, stages if keep_stages else [])


def verify_against_standard(res: PipelineResult) -> dict:
    """Orbit comparisons of the pipeline output with the direct construction."""
    t = res.triple
    std = standard_triple(t.n, t.alpha, t.beta, t.y)
    out = {r: orbit_equal(t.regime(r), std.regime(r)) for r in REGIMES}
    out["remove_cut_plus"] = orbit_equal(remove_cut(t.transition, 0, 1), MarkedWeightedPolygon(delta_n0(t.n, t.alpha, t.beta)))
    literal_ok = t.n >= 1 or t.alpha > t.beta
    out["remove_cut_minus"] = orbit_equal(remove_cut(t.transition, 0, -1),
                                          MarkedWeightedPolygon(delta_n1(t.n, t.alpha, t.beta)) if literal_ok
                                          else std.above)
    return out


__all__ = [
    "FamilyPolygonTriple", "PipelineStep", "PipelineResult", "PipelineError", "TransitionBracket",
    "standard_triple", "mark_interval", "run_pipeline", "default_schedule", "delta_n0", "delta_n1", "verify_against_standard",
    "coupled_spins_times", "upper_right_corner", "lower_right_edge", "REGIMES",
]
