"""Survival of the smallest and second-smallest order statistics.

For n dependent component lifetimes with marginal survivals u_i(x) tied
by an Archimedean generator, the fail-safe ((n-1)-out-of-n) system
survives past x with probability

    sum_i psi( sum_{j != i} phi(u_j) ) - (n - 1) psi( sum_j phi(u_j) )

and the series system with probability psi(sum_j phi(u_j)).  Curve
evaluation is embarrassingly parallel over grid points; all functions
here are pure.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .generators import GeneratorSpec, SURVIVAL_FLOOR, phi, psi
from .gridpolicy import GridPolicy
from .models import SemiParamModel, sp_quantile, sp_survival

#: Values this close to the [0, 1] bounds are clamped onto them.
CLAMP_TOL = 1e-10


@dataclass(frozen=True)
class SystemSpec:
    """n components: one model, one parameter vector, one generator."""

    n: int
    model: SemiParamModel
    theta: tuple[float, ...]
    generator: GeneratorSpec

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("a system needs at least 2 components")
        theta = tuple(float(t) for t in self.theta)
        if len(theta) != self.n:
            raise ValidationError(f"theta length {len(theta)} != n={self.n}")
        for t in theta:
            if not self.model.theta_in_domain(t):
                raise ValidationError(f"theta {t} outside the {self.model.kind} domain")
        object.__setattr__(self, "theta", theta)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "generator": self.generator.to_json(),
            "model": self.model.to_json(),
            "theta": list(self.theta),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SystemSpec":
        if not isinstance(obj, dict):
            raise ValidationError("system spec must be an object")
        for key in ("n", "generator", "model", "theta"):
            if key not in obj:
                raise ValidationError(f"system spec missing {key!r}")
        return cls(
            n=int(obj["n"]),
            model=SemiParamModel.from_json(obj["model"]),
            theta=tuple(obj["theta"]),
            generator=GeneratorSpec.from_json(obj["generator"]),
        )


@dataclass(frozen=True)
class SurvivalCurve:
    """A lifetime grid with survival values; the unit of dominance checks."""

    xs: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if xs.size != vals.size or xs.size < 2:
            raise ValidationError("curve needs matching xs/values of length >= 2")
        if np.any(xs <= 0.0) or np.any(np.diff(xs) <= 0.0):
            raise ValidationError("xs must be strictly increasing and positive")
        if np.any(vals < -CLAMP_TOL) or np.any(vals > 1.0 + CLAMP_TOL):
            raise ValidationError("survival values leave [0, 1]")
        if np.any(np.diff(vals) > CLAMP_TOL):
            raise ValidationError("survival values are not nonincreasing")
        object.__setattr__(self, "xs", tuple(xs))
        object.__setattr__(self, "values", tuple(vals))

    def as_arrays(self):
        return np.asarray(self.xs), np.asarray(self.values)


def component_survivals(sys: SystemSpec, x) -> np.ndarray:
    """Matrix of marginal survivals, one column per component."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    return np.stack([sp_survival(sys.model, xs, t) for t in sys.theta], axis=1)


def _x2n_from_margs(gen: GeneratorSpec, margs: np.ndarray) -> np.ndarray:
    dead = np.all(margs <= SURVIVAL_FLOOR, axis=1)
    margs = np.clip(margs, SURVIVAL_FLOOR, 1.0)
    s = phi(gen, margs)  # (m, n), capped inside phi
    m, n = s.shape
    # leave-one-out sums by direct summation: immune to cancellation when
    # one underflowed component dominates the row total
    loo = np.empty_like(s)
    for i in range(n):
        loo[:, i] = np.sum(np.delete(s, i, axis=1), axis=1)
    tot = np.sum(s, axis=1)
    vals = psi(gen, loo).sum(axis=1) - (n - 1) * psi(gen, tot)
    vals = np.where((vals > 1.0) & (vals <= 1.0 + CLAMP_TOL), 1.0, vals)
    vals = np.where((vals < 0.0) & (vals >= -CLAMP_TOL), 0.0, vals)
    return np.where(dead, 0.0, vals)


def survival_x2n(sys: SystemSpec, x):
    """Fail-safe system survival at x (second-smallest order statistic)."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or np.any(np.isnan(arr)):
        raise ValidationError("x must be nonnegative")
    vals = _x2n_from_margs(sys.generator, component_survivals(sys, arr))
    return vals if np.ndim(x) else float(vals[0])


def survival_x1n(sys: SystemSpec, x):
    """Series system survival at x: psi of the summed phi-marginals."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or np.any(np.isnan(arr)):
        raise ValidationError("x must be nonnegative")
    raw = component_survivals(sys, arr)
    dead = np.all(raw <= SURVIVAL_FLOOR, axis=1)
    margs = np.clip(raw, SURVIVAL_FLOOR, 1.0)
    vals = psi(sys.generator, np.sum(phi(sys.generator, margs), axis=1))
    vals = np.where(dead, 0.0, vals)
    return vals if np.ndim(x) else float(vals[0])


def default_grid(sys: SystemSpec, points: int = 1000,
                 q_lo: float = 0.001, q_hi: float = 0.999) -> np.ndarray:
    """Log-spaced grid over the mixture bulk of the component lifetimes."""
    los = [sp_quantile(sys.model, q_lo, t) for t in sys.theta]
    his = [sp_quantile(sys.model, q_hi, t) for t in sys.theta]
    lo, hi = min(los), max(his)
    return np.geomspace(max(lo, hi * 1e-9), hi, points)


def curve(sys: SystemSpec, xs=None, policy: GridPolicy | None = None) -> SurvivalCurve:
    """Fail-safe survival curve on xs (default: the mixture bulk grid)."""
    if xs is None:
        points = policy.curve_points if policy is not None else 1000
        xs = default_grid(sys, points)
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or xs.size < 2 or np.any(np.diff(xs) <= 0.0):
        raise ValidationError("xs must be a strictly increasing 1-d grid")
    return SurvivalCurve(xs=tuple(xs), values=tuple(survival_x2n(sys, xs)))


def homogeneous_x2n(gen: GeneratorSpec, u, n: int):
    """Closed form for n identical marginals u: n psi((n-1)phi(u)) - (n-1)psi(n phi(u))."""
    uu = np.clip(np.asarray(u, dtype=float), SURVIVAL_FLOOR, 1.0)
    p = phi(gen, uu)
    vals = n * psi(gen, (n - 1) * p) - (n - 1) * psi(gen, n * p)
    return vals if np.ndim(u) else float(vals)


def lower_bound_plarger(sys: SystemSpec, x):
    """Homogeneous comparison value at the geometric mean of theta.

    The geometric mean is the extreme parameter for which the homogeneous
    vector is p-larger-dominated by theta.  Whether this is a true lower
    bound depends on the system; verifiers always confirm on the grid.
    """
    th = np.asarray(sys.theta)
    if np.any(th <= 0.0):
        raise ValidationError("p-larger bound needs positive thetas")
    gm = float(np.exp(np.mean(np.log(th))))
    arr = np.asarray(x, dtype=float)
    margs = sp_survival(sys.model, arr, gm)
    return homogeneous_x2n(sys.generator, margs, sys.n)


def lower_bound_rm(sys: SystemSpec, x):
    """Homogeneous comparison value at the harmonic mean of theta.

    The harmonic mean is the smallest homogeneous parameter reciprocally
    majorized by theta (and satisfies the arithmetic-mean cap n*theta*
    <= sum theta).
    """
    th = np.asarray(sys.theta)
    if np.any(th <= 0.0):
        raise ValidationError("reciprocal-majorization bound needs positive thetas")
    hm = float(sys.n / np.sum(1.0 / th))
    arr = np.asarray(x, dtype=float)
    margs = sp_survival(sys.model, arr, hm)
    return homogeneous_x2n(sys.generator, margs, sys.n)


def write_curve_csv(path: str, xs, columns: dict) -> None:
    """Write curve columns as CSV with 17 significant digits, atomically."""
    xs = np.asarray(xs, dtype=float)
    names = list(columns)
    cols = [np.asarray(columns[name], dtype=float) for name in names]
    for c in cols:
        if c.size != xs.size:
            raise ValidationError("column length mismatch")
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", *names])
            for i in range(xs.size):
                writer.writerow([f"{xs[i]:.17g}", *(f"{c[i]:.17g}" for c in cols)])
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def load_system(path: str) -> SystemSpec:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read system spec: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed system JSON: {exc}") from exc
    return SystemSpec.from_json(obj)
