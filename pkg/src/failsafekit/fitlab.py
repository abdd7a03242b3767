"""Strength-data pipeline: marginal fits, copula goodness of fit, and
subset recommendation via the p-larger criterion.

Marginal likelihoods reuse the closed-form baseline densities; all
optimizer starts are deterministic, so every fit is reproducible.
Copula estimation defaults to Kendall-tau inversion (mean pairwise tau
above two dimensions) with an optional pairwise pseudo-likelihood
refinement.  Bootstrap replicates derive per-replicate seeds from the
master seed, so goodness-of-fit runs are reproducible as well.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy import optimize, stats
from scipy.integrate import quad

from .errors import InconsistencyError, UnsupportedGeneratorError, ValidationError
from .generators import GeneratorSpec, phi, psi
from .gridpolicy import GridPolicy
from .mcsim import sample_copula
from .models import BaselineSpec, log_pdf
from .ordering import ConditionReport, verify_theorem1
from .preorders import Preorder, classify

FIT_FAMILIES = ("exponential", "gamma", "weibull", "burr")
COPULA_FAMILIES = ("clayton", "gumbel", "frank")

MIN_OBSERVATIONS = 5


class LifetimeDataset:
    """Positive observations per component label, optionally grouped."""

    def __init__(self, observations: dict, groups: tuple[str, ...] | None = None):
        if not observations:
            raise ValidationError("dataset has no components")
        clean = {}
        for label, values in observations.items():
            arr = np.asarray(values, dtype=float)
            if arr.ndim != 1 or arr.size < MIN_OBSERVATIONS:
                raise ValidationError(
                    f"component {label!r} needs at least {MIN_OBSERVATIONS} observations"
                )
            if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
                raise ValidationError(f"component {label!r} has nonpositive or non-finite values")
            clean[str(label)] = arr
        self.observations = clean
        self.groups = groups

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.observations)

    def pooled(self) -> np.ndarray:
        return np.concatenate([self.observations[k] for k in self.labels])

    def matrix(self) -> np.ndarray:
        """count x d wide matrix (components as columns); lengths must agree."""
        sizes = {self.observations[k].size for k in self.labels}
        if len(sizes) != 1:
            raise ValidationError("components have unequal lengths; no wide matrix")
        return np.stack([self.observations[k] for k in self.labels], axis=1)


def load_dataset_csv(path: str) -> LifetimeDataset:
    """Read long format (cable,wire,strength) or wide format (one column
    per wire), auto-detected by header."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ValidationError(f"cannot read dataset: {exc}") from exc
    if len(rows) < 2:
        raise ValidationError("dataset CSV has no data rows")
    header = [h.strip().lower() for h in rows[0]]
    if set(header) == {"cable", "wire", "strength"}:
        ic, iw, iv = header.index("cable"), header.index("wire"), header.index("strength")
        obs: dict[str, list[float]] = {}
        cables = []
        for row in rows[1:]:
            if not row or all(not c.strip() for c in row):
                continue
            try:
                value = float(row[iv])
            except (ValueError, IndexError) as exc:
                raise ValidationError(f"malformed long-format row {row!r}") from exc
            obs.setdefault(row[iw].strip(), []).append(value)
            cables.append(row[ic].strip())
        return LifetimeDataset(obs, groups=tuple(dict.fromkeys(cables)))
    # wide: every column is a component
    obs = {name.strip(): [] for name in rows[0]}
    names = [name.strip() for name in rows[0]]
    for row in rows[1:]:
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(names):
            raise ValidationError(f"wide-format row length mismatch: {row!r}")
        for name, cell in zip(names, row):
            try:
                obs[name].append(float(cell))
            except ValueError as exc:
                raise ValidationError(f"non-numeric cell {cell!r} in wide format") from exc
    return LifetimeDataset(obs)


def _digest(data: np.ndarray) -> str:
    payload = np.sort(np.asarray(data, dtype=float)).tobytes()
    return hashlib.sha256(payload).hexdigest()[:16]


@dataclass(frozen=True)
class FitResult:
    family: str
    params: dict
    loglik: float
    aic: float
    bic: float
    n: int
    converged: bool
    data_digest: str

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "params": self.params,
            "loglik": self.loglik,
            "aic": self.aic,
            "bic": self.bic,
            "n": self.n,
            "converged": self.converged,
        }


def _make_result(family, params, loglik, n, converged, digest) -> FitResult:
    k = len(params)
    ll = float(loglik)
    return FitResult(
        family=family,
        params=params,
        loglik=ll,
        aic=2.0 * k - 2.0 * ll,
        bic=k * float(np.log(n)) - 2.0 * ll,
        n=n,
        converged=converged,
        data_digest=digest,
    )


_LOGLIK_FLOOR = -1e15  # finite penalty keeps the simplex search warning-free


def _loglik(family: str, params: tuple, data: np.ndarray) -> float:
    try:
        b = BaselineSpec(family, params)
    except ValidationError:
        return _LOGLIK_FLOOR
    vals = log_pdf(b, data)
    if not np.all(np.isfinite(vals)):
        return _LOGLIK_FLOOR
    return float(np.sum(vals))


_START_SCALES = (1.0, 0.3, 3.0, 0.5, 2.0)


def _starts(family: str, data: np.ndarray) -> list[tuple]:
    mean = float(np.mean(data))
    var = float(np.var(data))
    logs = np.log(data)
    if family == "gamma":
        shape0 = mean * mean / var if var > 0 else 1.0
        out = []
        for c in _START_SCALES:
            sh = max(shape0 * c, 1e-3)
            out.append((sh, sh / mean))
        return out
    if family == "weibull":
        sd_log = float(np.std(logs))
        shape0 = np.pi / (np.sqrt(6.0) * sd_log) if sd_log > 0 else 1.0
        out = []
        for c in _START_SCALES:
            sh = max(shape0 * c, 1e-2)
            out.append((float(np.exp(np.mean(logs) + 0.5772 / sh)), sh))
        return out
    if family == "burr":
        sd_log = float(np.std(logs))
        c0 = max(np.pi / (np.sqrt(3.0) * sd_log) if sd_log > 0 else 1.0, 1e-2)
        med = float(np.median(data))
        # k matching the median once c is chosen: (1+med^c)^-k = 1/2
        out = []
        for cs in _START_SCALES:
            c = c0 * cs
            lm = c * np.log(med)
            log1p_medc = lm if lm > 50.0 else float(np.log1p(np.exp(lm)))
            k = max(np.log(2.0) / log1p_medc, 1e-3) if log1p_medc > 0 else 1.0
            out.append((c, k))
        return out
    raise ValidationError(family)


def mle_fit(family: str, data) -> FitResult:
    """Maximum-likelihood fit with deterministic moment-based multi-starts."""
    if family not in FIT_FAMILIES:
        raise ValidationError(f"family must be one of {FIT_FAMILIES}")
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 1 or arr.size < MIN_OBSERVATIONS:
        raise ValidationError(f"need at least {MIN_OBSERVATIONS} observations")
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise ValidationError("data must be positive and finite")
    if np.ptp(arr) == 0.0:
        raise ValidationError("degenerate data: all observations equal")
    digest = _digest(arr)
    n = arr.size

    if family == "exponential":
        rate = 1.0 / float(np.mean(arr))
        return _make_result("exponential", {"rate": rate},
                            _loglik("exponential", (rate,), arr), n, True, digest)

    names = {"gamma": ("shape", "rate"), "weibull": ("scale", "shape"),
             "burr": ("c", "k")}[family]

    def neg(logp):
        return -_loglik(family, tuple(np.exp(logp)), arr)

    best = None
    for start in _starts(family, arr):
        res = optimize.minimize(
            neg, np.log(start), method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-10, "maxiter": 4000},
        )
        if best is None or res.fun < best.fun:
            best = res
    if best is None or best.fun >= -_LOGLIK_FLOOR:
        raise ValidationError(f"{family} fit failed to converge from all starts")
    params = dict(zip(names, (float(v) for v in np.exp(best.x))))
    return _make_result(family, params, -best.fun, n, bool(best.success), digest)


@dataclass(frozen=True)
class ModelRanking:
    entries: tuple[FitResult, ...]
    aic_deltas: tuple[float, ...]

    @property
    def best(self) -> FitResult:
        return self.entries[0]

    def to_json(self) -> dict:
        return {
            "ranking": [e.to_json() for e in self.entries],
            "aic_deltas": list(self.aic_deltas),
        }


def rank_models(results) -> ModelRanking:
    """Ascending AIC order (BIC breaks ties), with deltas to the best."""
    entries = list(results)
    if not entries:
        raise ValidationError("nothing to rank")
    digests = {r.data_digest for r in entries}
    if len(digests) != 1:
        raise ValidationError("results come from different datasets")
    entries.sort(key=lambda r: (r.aic, r.bic))
    base = entries[0].aic
    return ModelRanking(tuple(entries), tuple(r.aic - base for r in entries))


def pseudo_observations(matrix) -> np.ndarray:
    """Column-wise average ranks over (count + 1); values in (0, 1)."""
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 2:
        raise ValidationError("need a count x d matrix with count >= 2")
    for j in range(arr.shape[1]):
        if np.ptp(arr[:, j]) == 0.0:
            raise ValidationError(f"column {j} is constant")
    ranks = stats.rankdata(arr, axis=0, method="average")
    return ranks / (arr.shape[0] + 1.0)


def _debye1(theta: float) -> float:
    val, _ = quad(lambda t: t / np.expm1(t) if t > 0 else 1.0, 0.0, theta)
    return val / theta


def frank_tau(theta: float) -> float:
    """Kendall tau of the frank family, via the first Debye function."""
    if theta <= 0.0:
        raise ValidationError("frank theta must be positive")
    return 1.0 + 4.0 * (_debye1(theta) - 1.0) / theta


def _mean_pairwise_tau(pseudo: np.ndarray) -> float:
    d = pseudo.shape[1]
    taus = []
    for i in range(d):
        for j in range(i + 1, d):
            taus.append(stats.kendalltau(pseudo[:, i], pseudo[:, j]).statistic)
    return float(np.mean(taus))


def tau_to_theta(family: str, tau: float) -> float:
    """Invert the tau(theta) relation of one catalog family."""
    if family == "clayton":
        if not 0.0 < tau < 1.0:
            raise ValidationError(f"clayton cannot attain tau={tau:.4f}")
        return 2.0 * tau / (1.0 - tau)
    if family == "gumbel":
        if not 0.0 <= tau < 1.0:
            raise ValidationError(f"gumbel cannot attain tau={tau:.4f}")
        return 1.0 / (1.0 - tau)
    if family == "frank":
        if not 0.0 < tau < 1.0:
            raise ValidationError(f"frank (positive range) cannot attain tau={tau:.4f}")
        return float(optimize.brentq(lambda th: frank_tau(th) - tau, 1e-8, 500.0))
    raise ValidationError(f"copula family must be one of {COPULA_FAMILIES}")


def _bivariate_log_density(family: str, theta: float, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """log c(u, v) = log psi''(phi(u)+phi(v)) - log|psi'(phi(u))| - log|psi'(phi(v))|."""
    g = GeneratorSpec(family, theta)
    s = phi(g, u) + phi(g, v)
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        if family == "clayton":
            log_pp = np.log1p(theta) + (-1.0 / theta - 2.0) * np.log1p(theta * s)
            log_p = lambda t: (-1.0 / theta - 1.0) * np.log1p(theta * t)
        elif family == "gumbel":
            a = 1.0 / theta
            log_pp = (np.log(a) + (a - 2.0) * np.log(s) - s ** a
                      + np.log(a * s ** a + (1.0 - a)))
            log_p = lambda t: np.log(a) + (a - 1.0) * np.log(t) - t ** a
        elif family == "frank":
            c = np.expm1(-theta)
            ce = c * np.exp(-s)
            log_pp = np.log(-c) - s - 2.0 * np.log1p(ce) - np.log(theta)

            def log_p(t):
                cet = c * np.exp(-t)
                return np.log(-cet) - np.log(theta) - np.log1p(cet)
        else:
            raise ValidationError(f"no bivariate density for {family}")
        return log_pp - log_p(phi(g, u)) - log_p(phi(g, v))


def fit_copula(family: str, pseudo, method: str = "tau") -> float:
    """Estimate the dependence parameter from pseudo-observations.

    ``tau``: Kendall-tau inversion (exact at d=2; mean pairwise tau above).
    ``pseudo_likelihood``: pairwise composite likelihood, started at the
    tau estimate.
    """
    arr = np.asarray(pseudo, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise ValidationError("pseudo-observations must be count x d with d >= 2")
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValidationError("pseudo-observations must lie strictly in (0, 1)")
    if family not in COPULA_FAMILIES:
        raise ValidationError(f"copula family must be one of {COPULA_FAMILIES}")
    tau = (stats.kendalltau(arr[:, 0], arr[:, 1]).statistic
           if arr.shape[1] == 2 else _mean_pairwise_tau(arr))
    theta0 = tau_to_theta(family, float(tau))
    if method == "tau":
        return theta0
    if method != "pseudo_likelihood":
        raise ValidationError("method must be 'tau' or 'pseudo_likelihood'")
    d = arr.shape[1]
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    lo = {"clayton": 1e-6, "gumbel": 1.0 + 1e-9, "frank": 1e-6}[family]

    def neg(theta):
        if theta <= lo:
            return np.inf
        total = 0.0
        for i, j in pairs:
            vals = _bivariate_log_density(family, float(theta), arr[:, i], arr[:, j])
            if not np.all(np.isfinite(vals)):
                return np.inf
            total += float(np.sum(vals))
        return -total

    res = optimize.minimize_scalar(
        neg, bounds=(lo, max(theta0 * 10.0, lo + 50.0)), method="bounded",
        options={"xatol": 1e-8},
    )
    return float(res.x)


def empirical_copula(pseudo: np.ndarray) -> np.ndarray:
    """C_n evaluated at the sample's own points."""
    le = np.all(pseudo[:, None, :] <= pseudo[None, :, :], axis=2)
    return le.mean(axis=0)


def _cvm_statistic(family: str, theta: float, pseudo: np.ndarray) -> float:
    g = GeneratorSpec(family, theta)
    cn = empirical_copula(pseudo)
    ct = psi(g, np.sum(phi(g, pseudo), axis=1))
    return float(np.sum((cn - ct) ** 2))


@dataclass(frozen=True)
class GofResult:
    family: str
    theta: float
    statistic: float
    p_value: float
    bootstrap_n: int
    seed: int

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "theta": self.theta,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "bootstrap_n": self.bootstrap_n,
            "seed": self.seed,
        }


def cvm_gof(family: str, pseudo, boot_n: int = 200, seed: int = 0,
            method: str = "tau") -> GofResult:
    """Cramer-von Mises distance to the fitted copula, with a parametric
    bootstrap p-value (theta refitted in every replicate)."""
    if boot_n < 100:
        raise ValidationError("boot_n must be at least 100")
    arr = np.asarray(pseudo, dtype=float)
    theta = fit_copula(family, arr, method)
    stat = _cvm_statistic(family, theta, arr)
    count, d = arr.shape
    child_seeds = np.random.SeedSequence(int(seed)).generate_state(boot_n, dtype=np.uint64)
    exceed = 0
    for b in range(boot_n):
        try:
            sample = sample_copula(GeneratorSpec(family, theta), d, count,
                                   int(child_seeds[b])).uniforms
        except UnsupportedGeneratorError as exc:  # catalog families all sample
            raise ValidationError(str(exc)) from exc
        ps = pseudo_observations(sample)
        try:
            theta_b = fit_copula(family, ps, method)
        except ValidationError:
            # replicate tau outside range: score as extreme misfit
            exceed += 1
            continue
        if _cvm_statistic(family, theta_b, ps) >= stat:
            exceed += 1
    return GofResult(family, float(theta), stat, exceed / boot_n, boot_n, int(seed))


@dataclass(frozen=True)
class SubsetRecommendation:
    """Pairwise comparison outcome over candidate component subsets."""

    maximal: tuple[str, ...]
    dominates: tuple[tuple[str, str], ...]
    ties: tuple[tuple[str, str], ...]
    incomparable: tuple[tuple[str, str], ...]
    inconsistent: tuple[tuple[str, str], ...]
    certificates: dict

    def to_json(self) -> dict:
        return {
            "maximal": list(self.maximal),
            "dominates": [list(p) for p in self.dominates],
            "ties": [list(p) for p in self.ties],
            "incomparable": [list(p) for p in self.incomparable],
            "inconsistent": [list(p) for p in self.inconsistent],
            "certificates": {f"{a}>{b}": r.to_json() for (a, b), r in self.certificates.items()},
        }


def recommend_subset(systems: dict, policy: GridPolicy | None = None) -> SubsetRecommendation:
    """Rank candidate subsets by confirmed dominance certificates.

    Pairs whose parameter vectors relate under the p-larger preorder are
    fed to the comparison verifier; only verified-and-confirmed dominance
    creates an edge.  Incomparable pairs are reported, never forced, and
    hypothesis-passing pairs whose curves refuse to dominate are listed
    as inconsistent.
    """
    if len(systems) < 2:
        raise ValidationError("need at least two candidate subsets")
    labels = list(systems)
    first = systems[labels[0]]
    for lab in labels[1:]:
        s = systems[lab]
        if s.n != first.n or s.model != first.model or s.generator != first.generator:
            raise ValidationError("candidate subsets must share size, model and generator")
    policy = policy or GridPolicy()
    dominates: list[tuple[str, str]] = []
    ties: list[tuple[str, str]] = []
    incomparable: list[tuple[str, str]] = []
    inconsistent: list[tuple[str, str]] = []
    certificates: dict = {}
    from .ordering import Relation

    for i, a in enumerate(labels):
        for b in labels[i + 1:]:
            rep = classify(systems[a].theta, systems[b].theta, policy.preorder_tol)
            fwd = rep.forward[Preorder.P_LARGER]
            rev = rep.reverse[Preorder.P_LARGER]
            if not fwd and not rev:
                incomparable.append((a, b))
                continue
            for src, dst, related in ((a, b, fwd), (b, a, rev)):
                if not related:
                    continue
                try:
                    cert: ConditionReport = verify_theorem1(systems[src], systems[dst], policy)
                except InconsistencyError:
                    inconsistent.append((src, dst))
                    continue
                if not cert.overall:
                    continue
                certificates[(src, dst)] = cert
                if cert.dominance.relation is Relation.X_DOMINATES_Y:
                    dominates.append((src, dst))
                elif (src, dst) not in ties and (dst, src) not in ties:
                    ties.append((src, dst))
    dominated = {dst for _, dst in dominates}
    maximal = tuple(lab for lab in labels if lab not in dominated)
    return SubsetRecommendation(
        maximal=maximal,
        dominates=tuple(dominates),
        ties=tuple(ties),
        incomparable=tuple(incomparable),
        inconsistent=tuple(inconsistent),
        certificates=certificates,
    )


def fixed_shape_weibull_scale(data, shape: float) -> float:
    """Closed-form per-component Weibull scale MLE with a shared shape."""
    arr = np.asarray(data, dtype=float)
    if arr.size == 0 or np.any(arr <= 0.0):
        raise ValidationError("data must be positive")
    if shape <= 0.0:
        raise ValidationError("shape must be positive")
    return float(np.mean(arr ** shape) ** (1.0 / shape))


def load_reference_manifest() -> dict:
    """Bundled expected-value manifest for the cable-strength dataset."""
    with resources.files("failsafekit.data").joinpath("cable_reference.json").open() as fh:
        return json.load(fh)


def compare_to_reference(gofs: dict, ranking: ModelRanking, manifest: dict) -> dict:
    """Check a pipeline run against the bundled manifest tolerances."""
    tol = manifest["tolerances"]
    out = {"aic_order_matches": [r.family for r in ranking.entries] == manifest["marginal_aic_order"],
           "copulas": {}}
    for fam, ref in manifest["copulas"].items():
        got = gofs.get(fam)
        if got is None:
            continue
        out["copulas"][fam] = {
            "theta_within_tol": abs(got.theta - ref["theta"]) <= tol["theta"],
            "p_value_within_tol": abs(got.p_value - ref["p_value"]) <= tol["p_value"],
            "theta": got.theta,
            "p_value": got.p_value,
        }
    best = min(gofs.items(), key=lambda kv: kv[1].statistic)[0] if gofs else None
    out["preferred_copula_matches"] = best == manifest["preferred_copula"]
    return out
