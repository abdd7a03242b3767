"""Stochastic-order verdicts between systems.

Grid dominance, crossing detection, hazard-ratio monotonicity, the
hypothesis verifiers for the two comparison theorems and the two model
propositions, and a finite-difference probe of the Schur-convexity
inequality their proofs rely on.

Verifiers never claim dominance from hypotheses alone: when every
hypothesis verifies they evaluate both curves and confirm on the grid,
escalating disagreement as InconsistencyError.  The implementation is its
own audit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InconsistencyError, ValidationError
from .generators import classify_log_shape, is_log_concave, is_log_convex
from .gridpolicy import GridPolicy
from .models import (
    check_dpfr,
    check_theorem1_condition2,
    check_theorem2_condition2,
)
from .preorders import Preorder, holds
from .systems import SurvivalCurve, SystemSpec, curve, survival_x2n


class Relation(enum.Enum):
    X_DOMINATES_Y = "x_dominates_y"
    Y_DOMINATES_X = "y_dominates_x"
    CROSSING = "crossing"
    TIES_WITHIN_TOL = "ties_within_tol"


@dataclass(frozen=True)
class DominanceVerdict:
    relation: Relation
    min_gap: float
    max_gap: float
    crossings: tuple[tuple[float, float], ...]
    grid_size: int

    def to_json(self) -> dict:
        return {
            "relation": self.relation.value,
            "min_gap": self.min_gap,
            "max_gap": self.max_gap,
            "crossings": [list(c) for c in self.crossings],
            "grid_size": self.grid_size,
        }


def compare_curves(
    cx: SurvivalCurve,
    cy: SurvivalCurve,
    tol: float = 1e-10,
    crossing_gap: float = 1e-8,
) -> DominanceVerdict:
    """Pointwise verdict on cx vs cy over their (identical) grid.

    A crossing is reported only when the gap changes sign with magnitude
    above ``crossing_gap`` on both sides; smaller wiggles stay ties.
    """
    xs_x, vx = cx.as_arrays()
    xs_y, vy = cy.as_arrays()
    if xs_x.size != xs_y.size or not np.array_equal(xs_x, xs_y):
        raise ValidationError("curves live on different grids")
    gap = vx - vy
    min_gap, max_gap = float(gap.min()), float(gap.max())
    if max_gap <= tol and min_gap >= -tol:
        relation = Relation.TIES_WITHIN_TOL
        crossings = ()
    elif min_gap >= -tol:
        relation = Relation.X_DOMINATES_Y
        crossings = ()
    elif max_gap <= tol:
        relation = Relation.Y_DOMINATES_X
        crossings = ()
    else:
        crossings = _bracket_crossings(xs_x, gap, crossing_gap)
        relation = Relation.CROSSING if crossings else (
            Relation.X_DOMINATES_Y if min_gap >= -crossing_gap else
            Relation.Y_DOMINATES_X if max_gap <= crossing_gap else
            Relation.TIES_WITHIN_TOL
        )
    return DominanceVerdict(relation, min_gap, max_gap, crossings, xs_x.size)


def _bracket_crossings(xs, gap, thresh) -> tuple[tuple[float, float], ...]:
    """Intervals bracketing sign changes whose ends both exceed thresh."""
    sig = np.where(gap > thresh, 1, np.where(gap < -thresh, -1, 0))
    idx = np.nonzero(sig)[0]
    out = []
    for a, b in zip(idx[:-1], idx[1:]):
        if sig[a] != sig[b]:
            out.append((float(xs[a]), float(xs[b])))
    return tuple(out)


def hazard_ratio_monotone(cx: SurvivalCurve, cy: SurvivalCurve, slack: float = 1e-9) -> bool:
    """True iff values(cy)/values(cx) is nondecreasing along the grid."""
    xs_x, vx = cx.as_arrays()
    xs_y, vy = cy.as_arrays()
    if not np.array_equal(xs_x, xs_y):
        raise ValidationError("curves live on different grids")
    if np.any(vx <= 0.0):
        raise ValidationError("ratio undefined: zero denominator values")
    ratio = vy / vx
    return bool(np.all(np.diff(ratio) >= -slack * (1.0 + np.abs(ratio[:-1]))))


@dataclass(frozen=True)
class HypothesisCheck:
    name: str
    holds: bool
    evidence: str

    def to_json(self) -> dict:
        return {"name": self.name, "holds": self.holds, "evidence": self.evidence}


@dataclass(frozen=True)
class ConditionReport:
    """Named hypothesis checks plus the confirmed dominance verdict."""

    result: str
    checks: tuple[HypothesisCheck, ...]
    overall: bool
    dominance: DominanceVerdict | None

    def check(self, name: str) -> HypothesisCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "result": self.result,
            "checks": [c.to_json() for c in self.checks],
            "overall": self.overall,
            "dominance": self.dominance.to_json() if self.dominance else None,
        }


def _structural_checks(sysX: SystemSpec, sysY: SystemSpec) -> list[HypothesisCheck]:
    same_gen = sysX.generator == sysY.generator
    same_model = sysX.model == sysY.model and sysX.n == sysY.n
    return [
        HypothesisCheck("shared_generator", same_gen,
                        f"{sysX.generator.to_json()} vs {sysY.generator.to_json()}"),
        HypothesisCheck("shared_model", same_model,
                        f"{sysX.model.kind}/n={sysX.n} vs {sysY.model.kind}/n={sysY.n}"),
    ]


def _confirm_dominance(name, checks, sysX, sysY, policy, x_min=None) -> ConditionReport:
    overall = all(c.holds for c in checks)
    dominance = None
    if overall:
        xs = policy.curve_grid(sysX.model, sysX.theta, sysY.theta)
        if x_min is not None:
            xs = xs[xs > x_min]
            if xs.size < 2:
                raise ValidationError("dominance grid collapsed above the threshold")
        cx = curve(sysX, xs)
        cy = curve(sysY, xs)
        dominance = compare_curves(cx, cy, policy.dominance_tol, policy.crossing_gap)
        report = ConditionReport(name, tuple(checks), overall, dominance)
        if dominance.relation not in (Relation.X_DOMINATES_Y, Relation.TIES_WITHIN_TOL):
            raise InconsistencyError(
                f"{name}: hypotheses verified but dominance failed "
                f"({dominance.relation.value}, min gap {dominance.min_gap:.3e})",
                report,
            )
        return report
    return ConditionReport(name, tuple(checks), overall, dominance)


def verify_theorem1(
    sysX: SystemSpec,
    sysY: SystemSpec,
    policy: GridPolicy | None = None,
) -> ConditionReport:
    """Log-concave generator + shape condition + p-larger => X dominates.

    All four hypotheses are probed numerically; if they verify, dominance
    is confirmed on the grid (raising InconsistencyError when it fails).
    """
    policy = policy or GridPolicy()
    checks = _structural_checks(sysX, sysY)
    shape = classify_log_shape(sysX.generator)
    checks.append(HypothesisCheck(
        "generator_log_concave", is_log_concave(shape),
        f"shape={shape.shape.value}, curvature in [{shape.min_curvature:.3e}, {shape.max_curvature:.3e}]",
    ))
    positive = all(t > 0.0 for t in sysX.theta + sysY.theta)
    if positive:
        verdict = check_theorem1_condition2(
            sysX.model,
            policy.shape_x_grid(sysX.model),
            policy.a_grid(sysX.theta, sysY.theta),
            policy.shape_tol,
        )
        checks.append(HypothesisCheck(
            "survival_shape", verdict.holds,
            f"{verdict.property}: worst violation {verdict.worst_violation:.3e}",
        ))
        checks.append(HypothesisCheck(
            "p_larger", holds(Preorder.P_LARGER, sysX.theta, sysY.theta, policy.preorder_tol),
            f"{sysX.theta} vs {sysY.theta}",
        ))
    else:
        checks.append(HypothesisCheck("survival_shape", False, "nonpositive theta"))
        checks.append(HypothesisCheck("p_larger", False, "p-larger needs positive thetas"))
    return _confirm_dominance("theorem1", checks, sysX, sysY, policy)


def verify_theorem2(
    sysX: SystemSpec,
    sysY: SystemSpec,
    policy: GridPolicy | None = None,
) -> ConditionReport:
    """Log-convex generator + shape condition + reciprocal majorization."""
    policy = policy or GridPolicy()
    checks = _structural_checks(sysX, sysY)
    shape = classify_log_shape(sysX.generator)
    checks.append(HypothesisCheck(
        "generator_log_convex", is_log_convex(shape),
        f"shape={shape.shape.value}, curvature in [{shape.min_curvature:.3e}, {shape.max_curvature:.3e}]",
    ))
    positive = all(t > 0.0 for t in sysX.theta + sysY.theta)
    if positive:
        verdict = check_theorem2_condition2(
            sysX.model,
            policy.shape_x_grid(sysX.model),
            policy.theta_grid(sysX.theta, sysY.theta),
            policy.shape_tol,
        )
        checks.append(HypothesisCheck(
            "survival_shape", verdict.holds,
            f"{verdict.property}: worst violation {verdict.worst_violation:.3e}",
        ))
        checks.append(HypothesisCheck(
            "reciprocal_majorize",
            holds(Preorder.RECIPROCAL_MAJORIZE, sysX.theta, sysY.theta, policy.preorder_tol),
            f"{sysX.theta} vs {sysY.theta}",
        ))
    else:
        checks.append(HypothesisCheck("survival_shape", False, "nonpositive theta"))
        checks.append(HypothesisCheck("reciprocal_majorize", False,
                                      "reciprocal majorization needs positive thetas"))
    return _confirm_dominance("theorem2", checks, sysX, sysY, policy)


def verify_prop_mphrs(
    sysX: SystemSpec,
    sysY: SystemSpec,
    policy: GridPolicy | None = None,
) -> ConditionReport:
    """Frailty-scale model route: log-concave generator + baseline DPFR +
    p-larger rate-scale vectors."""
    policy = policy or GridPolicy()
    for s in (sysX, sysY):
        if s.model.kind != "mphrs":
            raise ValidationError("both systems must use the mphrs kind")
    if sysX.model != sysY.model:
        raise ValidationError("mismatched fixed mphrs parameters")
    if not (0.0 < sysX.model.alpha <= 1.0):
        raise ValidationError("fixed alpha must lie in (0, 1]")
    checks = _structural_checks(sysX, sysY)
    shape = classify_log_shape(sysX.generator)
    checks.append(HypothesisCheck(
        "generator_log_concave", is_log_concave(shape), f"shape={shape.shape.value}"))
    dpfr = check_dpfr(sysX.model.baseline, policy.shape_x_grid(sysX.model), policy.shape_tol)
    checks.append(HypothesisCheck(
        "baseline_dpfr", dpfr.holds, f"worst violation {dpfr.worst_violation:.3e}"))
    checks.append(HypothesisCheck(
        "p_larger", holds(Preorder.P_LARGER, sysX.theta, sysY.theta, policy.preorder_tol),
        f"{sysX.theta} vs {sysY.theta}"))
    return _confirm_dominance("prop_mphrs", checks, sysX, sysY, policy)


def verify_prop_ls(
    sysX: SystemSpec,
    sysY: SystemSpec,
    policy: GridPolicy | None = None,
) -> ConditionReport:
    """Location-scale model route; dominance is confirmed on x > lambda."""
    policy = policy or GridPolicy()
    for s in (sysX, sysY):
        if s.model.kind != "ls":
            raise ValidationError("both systems must use the ls kind")
    if sysX.model != sysY.model:
        raise ValidationError("mismatched fixed location")
    checks = _structural_checks(sysX, sysY)
    shape = classify_log_shape(sysX.generator)
    checks.append(HypothesisCheck(
        "generator_log_concave", is_log_concave(shape), f"shape={shape.shape.value}"))
    dpfr = check_dpfr(sysX.model.baseline, policy.shape_x_grid(sysX.model), policy.shape_tol)
    checks.append(HypothesisCheck(
        "baseline_dpfr", dpfr.holds, f"worst violation {dpfr.worst_violation:.3e}"))
    checks.append(HypothesisCheck(
        "p_larger", holds(Preorder.P_LARGER, sysX.theta, sysY.theta, policy.preorder_tol),
        f"{sysX.theta} vs {sysY.theta}"))
    return _confirm_dominance("prop_ls", checks, sysX, sysY, policy,
                              x_min=sysX.model.lam)


def schur_condition_probe(
    sys: SystemSpec,
    a_point=None,
    pairs=None,
    step: float = 1e-5,
    xs=None,
    policy: GridPolicy | None = None,
) -> float:
    """Worst value of (a_p - a_q)(dS/da_p - dS/da_q) over pairs and grid.

    S is the fail-safe survival as a function of the componentwise
    log-parameters a; partials are central finite differences with a
    relative step.  Schur-convexity of S in a demands the result be >= 0;
    a symmetric point returns exactly 0.
    """
    if step < 1e-9:
        raise ValidationError("relative step below float resolution")
    th = np.asarray(sys.theta, dtype=float)
    if np.any(th <= 0.0):
        raise ValidationError("log-parameter probe needs positive thetas")
    a = np.log(th) if a_point is None else np.asarray(a_point, dtype=float)
    if a.size != sys.n:
        raise ValidationError("a_point length mismatch")
    if xs is None:
        policy = policy or GridPolicy()
        xs = policy.curve_grid(sys.model, np.exp(a))
    xs = np.asarray(xs, dtype=float)
    if pairs is None:
        pairs = [(p, q) for p in range(sys.n) for q in range(p + 1, sys.n)]

    partials = np.empty((xs.size, sys.n))
    for i in range(sys.n):
        h = step * (1.0 + abs(a[i]))
        hi = a.copy(); hi[i] += h
        lo = a.copy(); lo[i] -= h
        s_hi = survival_x2n(SystemSpec(sys.n, sys.model, tuple(np.exp(hi)), sys.generator), xs)
        s_lo = survival_x2n(SystemSpec(sys.n, sys.model, tuple(np.exp(lo)), sys.generator), xs)
        partials[:, i] = (s_hi - s_lo) / (2.0 * h)

    worst = np.inf
    for p, q in pairs:
        if a[p] == a[q]:
            worst = min(worst, 0.0)
            continue
        prod = (a[p] - a[q]) * (partials[:, p] - partials[:, q])
        worst = min(worst, float(prod.min()))
    return worst
