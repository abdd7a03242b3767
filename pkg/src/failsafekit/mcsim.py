"""Monte-Carlo oracle: frailty sampling of Archimedean dependence,
lifetime inversion through the semi-parametric families, and empirical
order-statistic survival.

Sampling uses numpy's Philox counter-based generator, so batches are
reproducible from a 64-bit seed alone (cross-language ports can match
statistically, not bitwise).  Frailty representations: U_i = psi(E_i / V)
with E_i unit exponentials and V the family's positive factor:

    independence  V = 1
    clayton       V ~ Gamma(1/theta, scale=theta)
    gumbel        V ~ positive stable, index 1/theta (Kanter's method)
    frank         V ~ logarithmic series, p = 1 - e^-theta (Kemp's method)
    amh           V ~ Geometric(1-theta) on {1, 2, ...}, theta in [0, 1)

Generators without such a representation (gumbel_barnett,
gumbel_hougaard, amh with theta < 0) raise UnsupportedGeneratorError:
a declared limitation, never a silent approximation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedGeneratorError, ValidationError
from .generators import GeneratorSpec, psi
from .models import sp_survival, support_start
from .systems import SystemSpec

#: Absolute x-resolution of the lifetime inversion.
INVERSION_XTOL = 1e-10


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


@dataclass(frozen=True)
class SampleBatch:
    """count x n dependent uniforms with the seed and generator that made them."""

    uniforms: np.ndarray
    seed: int
    generator: GeneratorSpec


def _sample_positive_stable(alpha: float, count: int, rng) -> np.ndarray:
    """Kanter's construction: Laplace transform exp(-t^alpha), 0 < alpha < 1."""
    w = rng.uniform(0.0, np.pi, size=count)
    e = rng.exponential(size=count)
    return (
        np.sin(alpha * w)
        * (np.sin((1.0 - alpha) * w) / e) ** ((1.0 - alpha) / alpha)
        / np.sin(w) ** (1.0 / alpha)
    )


def _sample_log_series(p: float, count: int, rng) -> np.ndarray:
    """Kemp's sampler for P(V=k) = -p^k / (k log(1-p)), k = 1, 2, ..."""
    r = np.log1p(-p)
    v = rng.random(count)
    u = rng.random(count)
    out = np.ones(count)
    big = v < p
    q = -np.expm1(u[big] * r)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.floor(1.0 + np.log(v[big]) / np.log(q))
    out[big] = np.where(v[big] < q * q, k, np.where(v[big] <= q, 2.0, 1.0))
    return out


def sample_copula(g: GeneratorSpec, n: int, count: int, seed: int) -> SampleBatch:
    """Draw count rows of n dependent uniforms with copula generator g."""
    if n < 1 or count < 1:
        raise ValidationError("n and count must be positive")
    rng = _rng(seed)
    e = rng.exponential(size=(count, n))
    if g.family == "independence":
        u = np.exp(-e)
    elif g.family == "clayton":
        v = rng.gamma(shape=1.0 / g.theta, scale=g.theta, size=count)
        u = psi(g, e / v[:, None])
    elif g.family == "gumbel":
        if g.theta == 1.0:
            u = np.exp(-e)
        else:
            v = _sample_positive_stable(1.0 / g.theta, count, rng)
            u = psi(g, e / v[:, None])
    elif g.family == "frank":
        v = _sample_log_series(-float(np.expm1(-g.theta)), count, rng)
        u = psi(g, e / v[:, None])
    elif g.family == "amh":
        if g.theta < 0.0:
            raise UnsupportedGeneratorError(
                "amh with negative dependence has no positive frailty; "
                "use the analytic survival path instead"
            )
        if g.theta == 0.0:
            u = np.exp(-e)
        else:
            v = 1.0 + np.floor(np.log(rng.random(count)) / np.log(g.theta))
            u = psi(g, e / v[:, None])
    else:
        raise UnsupportedGeneratorError(
            f"{g.family} is not completely monotone: no frailty sampler exists; "
            "use the analytic survival path instead"
        )
    # keep uniforms strictly inside (0, 1) for downstream inversion
    u = np.clip(u, 1e-15, 1.0 - 1e-16)
    return SampleBatch(uniforms=u, seed=int(seed), generator=g)


def _invert_survival(model, u: np.ndarray, theta: float) -> np.ndarray:
    """Monotone bisection: x with sp_survival(model, x, theta) = u."""
    lo = np.full(u.shape, support_start(model, theta))
    hi = lo + 1.0
    for _ in range(200):
        need = sp_survival(model, hi, theta) > u
        if not np.any(need):
            break
        hi = np.where(need, lo + (hi - lo) * 2.0, hi)
        if np.any(hi > 1e300):
            raise ValidationError("inversion bracket failure: survival never reaches target")
    else:
        raise ValidationError("inversion bracket failure: survival never reaches target")
    while np.max(hi - lo) > INVERSION_XTOL:
        mid = 0.5 * (lo + hi)
        above = sp_survival(model, mid, theta) > u
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)


def sample_lifetimes(sys: SystemSpec, count: int, seed: int) -> np.ndarray:
    """count x n lifetimes whose marginal i has survival sp_survival(., theta_i)."""
    batch = sample_copula(sys.generator, sys.n, count, seed)
    out = np.empty_like(batch.uniforms)
    for j, theta in enumerate(sys.theta):
        out[:, j] = _invert_survival(sys.model, batch.uniforms[:, j], theta)
    return out


def second_smallest(lifetimes: np.ndarray) -> np.ndarray:
    """Row-wise second-smallest entry (the fail-safe system lifetime)."""
    arr = np.asarray(lifetimes, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise ValidationError("lifetimes must be a matrix with >= 2 columns")
    return np.partition(arr, 1, axis=1)[:, 1]


def empirical_survival_x2n(lifetimes: np.ndarray, x):
    """Fraction of rows whose second-smallest entry exceeds x."""
    arr = np.asarray(lifetimes, dtype=float)
    if arr.size == 0:
        raise ValidationError("lifetimes matrix is empty")
    second = second_smallest(arr)
    xs = np.asarray(x, dtype=float)
    vals = np.mean(second[:, None] > np.atleast_1d(xs)[None, :], axis=0)
    return vals if np.ndim(x) else float(vals[0])


def write_lifetimes_csv(path: str, lifetimes: np.ndarray) -> None:
    """Optional dump: header x1..xn, full double precision."""
    arr = np.asarray(lifetimes, dtype=float)
    header = ",".join(f"x{j + 1}" for j in range(arr.shape[1]))
    np.savetxt(path, arr, delimiter=",", header=header, comments="", fmt="%.17g")
