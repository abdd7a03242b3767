"""Shared grid and tolerance policy for probes, curves and verdicts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .models import SemiParamModel, default_x_grid, sp_quantile


@dataclass(frozen=True)
class GridPolicy:
    """Ranges, point counts and tolerances used by the verifiers.

    One policy object travels through a verification so every hypothesis
    probe and the dominance confirmation share consistent grids.
    """

    curve_points: int = 1000
    shape_x_points: int = 200
    param_points: int = 100
    q_lo: float = 0.001
    q_hi: float = 0.999
    x_range: tuple[float, float] | None = None
    dominance_tol: float = 1e-10
    crossing_gap: float = 1e-8
    shape_tol: float = 1e-9
    preorder_tol: float = 1e-12

    def __post_init__(self):
        if self.curve_points < 2 or self.shape_x_points < 3 or self.param_points < 3:
            raise ValidationError("grid point counts too small")
        if not (0.0 < self.q_lo < self.q_hi < 1.0):
            raise ValidationError("quantile range must satisfy 0 < q_lo < q_hi < 1")
        if self.x_range is not None:
            lo, hi = self.x_range
            if not (0.0 <= lo < hi):
                raise ValidationError("x_range must be an increasing pair of nonneg reals")

    def curve_grid(self, model: SemiParamModel, *theta_vectors) -> np.ndarray:
        """Log-spaced lifetime grid over the mixture bulk of all components."""
        if self.x_range is not None:
            lo, hi = self.x_range
            return np.geomspace(max(lo, hi * 1e-9), hi, self.curve_points)
        los, his = [], []
        for thetas in theta_vectors:
            for th in thetas:
                los.append(sp_quantile(model, self.q_lo, float(th)))
                his.append(sp_quantile(model, self.q_hi, float(th)))
        lo, hi = min(los), max(his)
        return np.geomspace(max(lo, hi * 1e-9), hi, self.curve_points)

    def shape_x_grid(self, model: SemiParamModel) -> np.ndarray:
        return default_x_grid(model.baseline, self.shape_x_points, self.q_lo, self.q_hi)

    def a_grid(self, *theta_vectors) -> np.ndarray:
        """Log-parameter grid spanning all supplied vectors, padded 10%."""
        allth = np.concatenate([np.asarray(t, dtype=float) for t in theta_vectors])
        if np.any(allth <= 0.0):
            raise ValidationError("log-parameter grid requires positive thetas")
        lo, hi = np.log(allth.min()), np.log(allth.max())
        pad = 0.1 * (hi - lo) if hi > lo else 0.5
        return np.linspace(lo - pad, hi + pad, self.param_points)

    def theta_grid(self, *theta_vectors) -> np.ndarray:
        """Linear parameter grid spanning all supplied vectors, padded 10%."""
        allth = np.concatenate([np.asarray(t, dtype=float) for t in theta_vectors])
        lo, hi = allth.min(), allth.max()
        pad = 0.1 * (hi - lo) if hi > lo else 0.5 * abs(lo) + 0.1
        lo = lo - pad
        hi = hi + pad
        if np.all(allth > 0.0):
            lo = max(lo, 0.05 * allth.min())
        return np.linspace(lo, hi, self.param_points)
