"""The acceptance suite as plain functions, shared by the CLI and the tests.

Each criterion returns a CriterionResult; nothing here raises on a failed
check. ``quick`` trims grids and sample counts for smoke runs, and is not
what the stated tolerances are quoted against.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import hirzebruch_pipeline as hp
from . import invariants as inv
from .model_systems import (
    CoupledAngular,
    DegenAppearance,
    DegenBecome,
    DegenCollapse,
    HP2Param,
    RootBracketError,
    W1Hyperbolic,
    W1MovingAB,
    W1Switch,
    W2TransB,
    W2TransC,
    W2TwoParam,
)
from .reduced_spaces import Morse, default_identity_samples, reduced_critical_points, reduced_hamiltonian, w1_discriminant_identity
from .semitoric_polygon import (
    ChopInfeasibleError,
    GroupElement,
    MarkedWeightedPolygon,
    apply_group,
    corner_chop,
    corner_unchop,
    corner_vectors,
    orbit_equal,
)
from .rational_geometry import add, scale, sl2z_length
from .spectral_classification import (
    Williamson,
    classify_fixed_point,
    classify_point,
    hessian_bundle,
    reduced_charpoly,
    region_diagram,
    special_directions,
    transition_times,
    verdict_switch_times,
)


@dataclass
class CriterionResult:
    id: int
    name: str
    passed: bool
    runtime: float
    budget: float
    checks: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        failed = [k for k, v in self.checks.items() if not v]
        extra = f" failed: {', '.join(failed)}" if failed else ""
        return f"[{status}] criterion {self.id} {self.name} ({self.runtime:.2f}s / {self.budget:g}s){extra}"

    def to_json(self) -> dict:
        return {"id": self.id, "name": self.name, "passed": self.passed, "runtime": self.runtime,
                "budget": self.budget, "checks": self.checks, "details": self.details}


def _finish(cid, name, budget, t0, checks, details) -> CriterionResult:
    rt = time.perf_counter() - t0
    checks = dict(checks)
    checks["runtime"] = rt < budget
    return CriterionResult(cid, name, all(checks.values()), rt, budget, checks, details)


def _switches(sys, tol):
    sw, table = verdict_switch_times(sys, sys.transition_label, grid=101, tol=tol)
    kinds = []
    for _, k in table:
        if k is not Williamson.DEG and (not kinds or kinds[-1] is not k):
            kinds.append(k)
    return sw, [k.value for k in kinds]


# ---------------------------------------------------------------- 1


def criterion_1(quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    sys = W1MovingAB(1.0, 2.0, 9 / (20 * math.sqrt(4.0)))
    sw, seq = _switches(sys, 1e-10)
    target = (10 / 29, 10 / 11)
    ok = len(sw) == 2 and all(abs(a - b) < 1e-6 for a, b in zip(sw, target))
    checks = {"two_switches_within_1e-6": ok, "EE_FF_EE": seq == [Williamson.EE.value, Williamson.FF.value, Williamson.EE.value]}
    return _finish(1, "W1 transition times", 5, t0, checks, {"switches": sw, "target": target, "sequence": seq})


# ---------------------------------------------------------------- 2


def criterion_2(quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    sys = W1Switch(1.0, 3.0, 3 / (8 * math.sqrt(6.0)))
    sw, seq = _switches(sys, 1e-10)
    target = (4 / 11, 4 / 5)
    ok = len(sw) == 2 and all(abs(a - b) < 1e-6 for a, b in zip(sw, target))
    inventory = sys.fixed_points((0.5,), sphere_samples=16 if quick else 64)
    sets = inventory.critical_sets
    residual = sets[0].max_residual if sets else math.inf
    specials = special_directions(sys)
    degenerate = bool(sets) and all(
        classify_fixed_point(hessian_bundle(sys, (0.5,), cp, with_fd=False), specials).type is Williamson.DEG
        for cp in sets[0].samples)
    checks = {"switch_times_within_1e-6": ok, "EE_FF_EE": seq == [Williamson.EE.value, Williamson.FF.value, Williamson.EE.value],
              "sphere_critical": residual < 1e-10, "sphere_degenerate": degenerate}
    return _finish(2, "W1-switch degenerate times", 5, t0, checks,
                   {"switches": sw, "target": target, "sequence": seq, "sphere_residual": residual,
                    "sphere_samples": len(sets[0].samples) if sets else 0})


# ---------------------------------------------------------------- 3


def criterion_3(quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    sys = CoupledAngular(1.0, 2.0)
    tt = transition_times(sys)
    p = sys.fixed_points((0.5,)).by_label("NS")
    amb = [float(v) for v in sys.ambient(p.point.chart, p.point.coords)]
    at_point = np.allclose(amb, [0, 0, 1, 0, 0, -1])
    v = classify_point(sys, (0.5,), "NS").type
    checks = {"closed_form_vs_bisection_1e-9": tt.gap < 1e-9, "point_is_(0,0,1,0,0,-1)": bool(at_point),
              "FF_at_half": v is Williamson.FF}
    return _finish(3, "coupled angular momenta", 5, t0, checks,
                   {"closed_form": tt.closed_form, "bisection": tt.bisection, "gap": tt.gap, "verdict": v.value})


# ---------------------------------------------------------------- 4

# Region diagram topology, frozen from the 41x41 run: connected pieces per
# (B, C) class under 8-neighbour connectivity.
REGION_COMPONENTS = {0: 4, 1: 2, 2: 2, 3: 1}


def criterion_4(quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    details = {}
    checks = {}
    for cls in (W2TransB, W2TransC):
        sys = cls(1.0, 1.0, 9 / 20)
        tt = transition_times(sys)
        checks[f"{cls.id}_closed_form_1e-6"] = tt.gap < 1e-6
        details[cls.id] = {"closed_form": tt.closed_form, "bisection": tt.bisection, "gap": tt.gap}
    sys = W2TwoParam(1.0, 1.0, 9 / 20)
    half = {lab: classify_point(sys, (0.5, 0.5), lab).type for lab in "ABCD"}
    checks["half_half_types"] = (half["B"] is Williamson.FF and half["C"] is Williamson.FF
                                 and half["A"] is Williamson.EE and half["D"] is Williamson.EE)
    details["half_half"] = {k: v.value for k, v in half.items()}
    grid = 11 if quick else 41
    rd = region_diagram(sys, grid)
    cl = rd.classes()
    comps = rd.components()
    mid = grid // 2
    checks["four_classes_present"] = all(comps[k] > 0 for k in range(4))
    checks["centre_FF_FF"] = int(cl[mid, mid]) == 3
    if not quick:
        checks["region_topology"] = comps == REGION_COMPONENTS
    details["components"] = comps
    details["unclassified_cells"] = int(np.sum(cl < 0))
    return _finish(4, "W2 transition times and region diagram", 120, t0, checks, details)


# ---------------------------------------------------------------- 5


def _draw_systems():
    return [
        (CoupledAngular(1.0, 2.0), 1), (HP2Param(1.0, 2.0), 2), (W1MovingAB(1.0, 2.0, 9 / 40), 1),
        (W1Switch(1.0, 3.0, 3 / (8 * math.sqrt(6))), 1), (W1Hyperbolic(1.0, 1.0, 1.0), 1),
        (W2TransB(1.0, 1.0, 9 / 20), 1), (W2TransC(1.0, 1.0, 9 / 20), 1), (W2TwoParam(1.0, 1.0, 9 / 20), 2),
        (DegenAppearance(1.0, 1.0), 1), (DegenBecome(1.0, 1.0), 1), (DegenCollapse(1.0, 2.0), 1),
    ]


def criterion_5(quick: bool = False, draws: int | None = None, seed: int = 5) -> CriterionResult:
    t0 = time.perf_counter()
    draws = draws or (200 if quick else 1000)
    rng = np.random.default_rng(seed)
    systems = _draw_systems()
    worst, done, skipped = 0.0, 0, 0
    per_system: dict[str, int] = {}
    while done < draws:
        sys, arity = systems[int(rng.integers(len(systems)))]
        par = tuple(float(v) for v in rng.uniform(0, 1, arity))
        try:
            pts = sys.fixed_points(par).points
        except RootBracketError:
            skipped += 1
            continue
        fp = pts[int(rng.integers(len(pts)))]
        hb = hessian_bundle(sys, par, fp.point, with_fd=False)
        th = rng.uniform(0, 2 * math.pi)
        r = math.exp(rng.uniform(-2, 2))
        rcp = reduced_charpoly(hb.A(r * math.cos(th), r * math.sin(th)))
        worst = max(worst, rcp.odd_residual)
        done += 1
        per_system[sys.id] = per_system.get(sys.id, 0) + 1
    checks = {"odd_coefficients_below_1e-10": worst < 1e-10}
    return _finish(5, "char-poly evenness", 60, t0, checks,
                   {"draws": done, "worst_relative_odd": worst, "skipped": skipped, "per_system": per_system})


# ---------------------------------------------------------------- 6


def cut_flip_pair() -> tuple[MarkedWeightedPolygon, MarkedWeightedPolygon]:
    left = MarkedWeightedPolygon.build([(0, 0), (2, 2), (5, 2), (3, 0)], [((2, 1), 1)])
    right = MarkedWeightedPolygon.build([(0, 2), (2, 0), (3, 0), (5, 2)], [((2, 1), -1)])
    return left, right


def _random_polygon(rnd: random.Random) -> MarkedWeightedPolygon:
    n = rnd.randint(0, 3)
    alpha = Fraction(rnd.randint(1, 12), rnd.randint(1, 4))
    beta = Fraction(rnd.randint(1, 12), rnd.randint(1, 4))
    lo, hi = hp.mark_interval(n, alpha, beta)
    tri = hp.standard_triple(n, alpha, beta, lo + (hi - lo) * Fraction(rnd.randint(1, 7), 8))
    mp = tri.regime(rnd.choice(tri.live_regimes))
    g = GroupElement(k=rnd.randint(-2, 2), shift=Fraction(rnd.randint(-6, 6), rnd.randint(1, 3)),
                     flips=tuple(rnd.choice((1, -1)) for _ in range(mp.s)))
    try:
        return apply_group(g, mp)
    except ValueError:
        return mp


def chop_round_trip(mp: MarkedWeightedPolygon, q, lam) -> bool | None:
    """None if the chop is infeasible, else whether unchop undoes it exactly."""
    try:
        chopped = corner_chop(mp, q, lam)
    except ChopInfeasibleError:
        return None
    prev, nxt = mp.polygon.neighbors(q)
    u, v = corner_vectors(mp.polygon, q)
    a, b = add(q, scale(lam, v)), add(q, scale(lam, u))
    if a not in chopped.polygon.vertices or b not in chopped.polygon.vertices:
        # chop happened in another representative; locate the new edge there
        new = [p for p in chopped.polygon.vertices if p not in mp.polygon.vertices]
        if len(new) != 2:
            return False
        a, b = new if chopped.polygon.neighbors(new[0])[1] == new[1] else new[::-1]
    return corner_unchop(chopped, (a, b), lam) == mp


def criterion_6(quick: bool = False, cases: int | None = None, seed: int = 6) -> CriterionResult:
    t0 = time.perf_counter()
    cases = cases or (200 if quick else 1000)
    left, right = cut_flip_pair()
    g = GroupElement(k=-1, shift=Fraction(2), flips=(-1,))
    flipped = apply_group(g, left)
    checks = {"cut_flip_exact": flipped == right, "cut_flip_orbit_equal": orbit_equal(left, right)}
    d20 = MarkedWeightedPolygon(hp.delta_n0(2, 1, 1))
    d21 = MarkedWeightedPolygon(hp.delta_n1(2, 1, 1))
    checks["delta20_vs_delta21_distinct"] = not orbit_equal(d20, d21)
    rnd = random.Random(seed)
    ok = feasible = attempts = 0
    while feasible < cases and attempts < 50 * cases:
        attempts += 1
        mp = _random_polygon(rnd)
        q = rnd.choice(mp.polygon.vertices)
        prev, nxt = mp.polygon.neighbors(q)
        lmax = min(sl2z_length(q, prev), sl2z_length(q, nxt))
        lam = lmax * Fraction(rnd.randint(1, 15), 16)
        r = chop_round_trip(mp, q, lam)
        if r is None:
            continue
        feasible += 1
        ok += bool(r)
    checks["round_trips"] = feasible == cases and ok == feasible
    return _finish(6, "polygon algebra", 60, t0, checks,
                   {"flipped": flipped.to_json(), "round_trips": ok, "feasible": feasible, "attempts": attempts})


# ---------------------------------------------------------------- 7

PIPELINE_CASES = ((1, 1), (Fraction(1, 3), 2), (3, 1), (Fraction(1, 2), Fraction(5, 2)), (7, 1))


def criterion_7(quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    rows = []
    failures = []
    cases = PIPELINE_CASES[:2] if quick else PIPELINE_CASES
    for alpha, beta in cases:
        for n in range(6):
            try:
                res = hp.run_pipeline(n, alpha, beta)
            except hp.PipelineError as exc:
                failures.append(f"n={n}, alpha={alpha}, beta={beta}: {exc}")
                continue
            v = hp.verify_against_standard(res)
            rows.append({"n": n, "alpha": str(alpha), "beta": str(beta), **v})
            if not all(v.values()):
                failures.append(f"n={n}, alpha={alpha}, beta={beta}: {v}")
    checks = {"all_stages_orbit_equal": not failures}
    return _finish(7, "pipeline", 10, t0, checks, {"runs": rows, "failures": failures})


# ---------------------------------------------------------------- 8


def rank_one_grid(sys, params, js):
    """(params, j, morse types) for every sampled level; non-elliptic entries collected separately."""
    rows, bad = [], []
    for par in params:
        for j in js:
            cps = reduced_critical_points(reduced_hamiltonian(sys, par, j))
            kinds = [c.morse.value for c in cps]
            rows.append((par, j, kinds))
            if any(c.morse is not Morse.ELLIPTIC for c in cps) or not cps:
                bad.append((par, j, kinds))
    return rows, bad


def criterion_8(quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    ts = (0.1, 0.5, 0.9) if quick else (0.1, 0.3, 0.5, 0.7, 0.9)
    s = (0.1, 0.9) if quick else (0.1, 0.5, 0.9)
    w1 = W1MovingAB(1.0, 2.0, 9 / 40)
    _, bad1 = rank_one_grid(w1, [(t,) for t in ts], (0.25, 0.5, 1.0, 1.5, 2.5))
    w2 = W2TwoParam(1.0, 1.0, 9 / 20)
    _, bad2 = rank_one_grid(w2, [(a, b) for a in s for b in s], (0.25, 0.5, 0.9, 1.1, 1.5, 2.5))
    hyp = W1Hyperbolic(1.0, 1.0, 1.0)
    cps = reduced_critical_points(reduced_hamiltonian(hyp, (0.1,), 1.0))
    n_hyp = sum(c.morse is Morse.HYPERBOLIC for c in cps)
    ident = w1_discriminant_identity(Fraction(1), Fraction(2), default_identity_samples(Fraction(2)))
    ident_ok = all(r["disc_ok"] and r["f_eq_4P"] for r in ident)
    checks = {"W1_all_elliptic": not bad1, "W2_all_elliptic": not bad2, "hyperbolic_point_found": n_hyp > 0,
              "W1_discriminant_identity_exact": ident_ok}
    return _finish(8, "rank-one suites", 120, t0, checks,
                   {"W1_non_elliptic": bad1, "W2_non_elliptic": bad2, "hyperbolic_count": n_hyp,
                    "identity_samples": len(ident)})


# ---------------------------------------------------------------- 9


def criterion_9(quick: bool = False, R1: float = 1.0, R2: float = 2.0, gamma: float = 0.35) -> CriterionResult:
    t0 = time.perf_counter()
    samples = 10**6 if quick else 10**7
    alpha, beta = inv.matched_scalings(R1, R2)
    w2 = inv.height_w2(alpha, beta, gamma, oracle_samples=samples, seed=0, audit=True)
    s2 = inv.height_s2xs2(R1, R2, oracle_samples=samples, seed=0)
    cmp = inv.match_and_compare(R1, R2, points=20)
    checks = {
        "conservation_1e-8": abs(w2.h1 + w2.h2_audit - beta) < 1e-8,
        "W2_oracle_1e-4": abs(w2.h1 - w2.oracle.h) < 1e-4,
        "S2xS2_oracle_1e-4": abs(s2.h1 - s2.oracle.h) < 1e-4,
        "h1_strictly_decreasing": cmp.decreasing,
        "crossing_found": cmp.gamma_star is not None,
    }
    curve = [h for _, h, _ in cmp.rows]
    return _finish(9, "heights", 180, t0, checks,
                   {"h1_w2": w2.h1, "h2_audit": w2.h2_audit, "oracle_w2": w2.oracle.h, "oracle_w2_se": w2.oracle.stderr,
                    "h1_s2": s2.h1, "oracle_s2": s2.oracle.h, "oracle_s2_se": s2.oracle.stderr,
                    "h1_w2_range": (min(curve), max(curve)), "gamma_star": cmp.gamma_star})


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9)


def run_all(quick: bool = False, only=None, stop_on_failure: bool = False) -> list[CriterionResult]:
    out = []
    for i, fn in enumerate(CRITERIA, start=1):
        if only and i not in only:
            continue
        r = fn(quick=quick)
        out.append(r)
        if stop_on_failure and not r.passed:
            break
    return out


__all__ = ["CriterionResult", "CRITERIA", "run_all", "cut_flip_pair", "chop_round_trip", "rank_one_grid",
           "REGION_COMPONENTS", "PIPELINE_CASES"] + [f"criterion_{i}" for i in range(1, 10)]
