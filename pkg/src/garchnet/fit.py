"""From empirical statistics to a GARCH(1,1) parameter triple.

The network supplies alpha1; beta1 follows from the kurtosis and alpha0 from
the unconditional variance.  :func:`solve_exact` is the slow reference path
that root-finds alpha1 directly from the moment equations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import moments as mc
from .errors import (
    AmbiguousRoot,
    BetaOutOfRange,
    InvalidParams,
    KurtosisTooLow,
    MissingStatistic,
    NegativeRadicand,
    NoRootInRange,
    NonFiniteMoment,
    NonStationaryPair,
)
from .mlp import MlpModel
from .moments import GarchParams
from .params import FeatureSetKind, bounds_for
from .pathsim import EmpiricalStats

ALPHA1_FLOOR = 1e-6


@dataclass
class FitResult:
    params: GarchParams
    alpha1_raw: float
    clamped: bool
    kind: FeatureSetKind
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "alpha0": self.params.alpha0,
            "alpha1": self.params.alpha1,
            "beta1": self.params.beta1,
            "alpha1_raw": self.alpha1_raw,
            "clamped": self.clamped,
            "kind": str(self.kind),
            **self.diagnostics,
        }


def beta1_radicand(alpha1: float, gamma4_emp: float) -> float:
    return 1.0 - 2.0 * alpha1**2 - 6.0 * alpha1**2 / (gamma4_emp - 3.0)


def invert_beta1(alpha1: float, gamma4_emp: float) -> float:
    """beta1 such that the model kurtosis at (alpha1, beta1) equals ``gamma4_emp``."""
    if not gamma4_emp > 3.0:
        raise KurtosisTooLow(f"Gamma_4 = {gamma4_emp!r} <= 3 cannot come from GARCH with alpha1 > 0")
    if not alpha1 > 0:
        raise InvalidParams(f"alpha1 must be > 0 to invert the kurtosis, got {alpha1!r}")
    r = beta1_radicand(alpha1, gamma4_emp)
    if r < 0:
        raise NegativeRadicand(f"alpha1 = {alpha1!r} too large for Gamma_4 = {gamma4_emp!r} (radicand {r!r})")
    beta1 = math.sqrt(r) - alpha1
    if beta1 < 0 or beta1 >= 1.0 - alpha1:
        raise BetaOutOfRange(f"beta1 = {beta1!r} outside [0, 1 - alpha1) for alpha1 = {alpha1!r}")
    return beta1


def invert_alpha0(sigma2_emp: float, alpha1: float, beta1: float) -> float:
    if not sigma2_emp > 0:
        raise InvalidParams(f"second moment must be positive, got {sigma2_emp!r}")
    if not alpha1 + beta1 < 1.0:
        raise NonStationaryPair(f"alpha1 + beta1 = {alpha1 + beta1!r} >= 1")
    return sigma2_emp * (1.0 - alpha1 - beta1)


def _third_statistic(stats: EmpiricalStats, kind: FeatureSetKind) -> float:
    if kind.is_autocov:
        if kind.lag not in stats.autocov_hat:
            raise MissingStatistic(f"stats carry no autocovariance at lag {kind.lag} (have {sorted(stats.autocov_hat)})")
        v = stats.autocov_hat[kind.lag]
    else:
        v = {3: stats.gamma6, 4: stats.gamma8, 5: stats.gamma10}[kind.order]
    if v is None or not math.isfinite(v):
        raise MissingStatistic(f"statistic for kind {kind} is missing or not finite")
    return float(v)


def feature_triple(stats: EmpiricalStats, kind: FeatureSetKind) -> tuple[float, float, float]:
    for name in ("second_moment", "gamma4"):
        v = getattr(stats, name)
        if v is None or not math.isfinite(v):
            raise MissingStatistic(f"{name} is missing or not finite")
    return (stats.second_moment, stats.gamma4, _third_statistic(stats, kind))


def fit(model: MlpModel, stats: EmpiricalStats) -> FitResult:
    kind = model.kind
    if kind is None:
        raise MissingStatistic("model metadata carries no feature-set kind")
    feats = feature_triple(stats, kind)
    raw = float(model.predict(feats)[0])
    a1_max = bounds_for(kind).alpha1_max
    a1 = min(max(raw, ALPHA1_FLOOR), a1_max)
    clamped = a1 != raw
    radicand = beta1_radicand(a1, stats.gamma4) if stats.gamma4 > 3.0 else float("nan")
    b1 = invert_beta1(a1, stats.gamma4)
    a0 = invert_alpha0(stats.second_moment, a1, b1)
    params = GarchParams(a0, a1, b1)
    for m in sorted({2, kind.required_order}):
        if not mc.moment_exists(params, m):
            raise NonFiniteMoment(f"fitted (alpha1, beta1) = ({a1!r}, {b1!r}) has no finite E(x^{2 * m})")
    return FitResult(params, raw, clamped, kind, {"radicand": radicand})


# -- reference solver ----------------------------------------------------------


def _model_statistic(alpha1: float, beta1: float, kind: FeatureSetKind) -> float:
    """Third statistic at (alpha1, beta1); +inf where the moment diverges."""
    try:
        if kind.is_autocov:
            return mc.autocov_hat(alpha1, beta1, kind.lag)
        if kind.order == 3:
            return mc.gamma6_closed(alpha1, beta1)
        return mc.standardized_moment(GarchParams(1.0, alpha1, beta1), kind.order)
    except NonFiniteMoment:
        return math.inf


def alpha1_feasible_max(gamma4_emp: float) -> float:
    """Largest alpha1 for which the kurtosis inversion gives beta1 >= 0."""
    return 1.0 / math.sqrt(3.0 + 6.0 / (gamma4_emp - 3.0))


def _bisect(f, lo: float, hi: float, flo: float, xtol: float) -> float:
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_extremum(f, lo: float, hi: float, sign: float, xtol: float) -> tuple[float, float]:
    """Locate the maximum of ``sign * f`` on [lo, hi] by golden-section search."""
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = sign * f(c), sign * f(d)
    while hi - lo > xtol:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = sign * f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = sign * f(d)
        if not lo < c < d < hi:
            break
    x = 0.5 * (lo + hi)
    return x, f(x)


def solve_alpha1_roots(stats: EmpiricalStats, kind: FeatureSetKind, grid: int = 512, xtol: float = 1e-12) -> list[float]:
    """All alpha1 roots of the third-statistic residual along the kurtosis curve.

    Sign changes between grid points are bisected.  Interior local extrema of
    the sampled residual are refined as well, which catches root pairs that
    fall inside one grid cell and tangential (double) roots.
    """
    g4 = stats.gamma4
    if not g4 > 3.0:
        raise KurtosisTooLow(f"Gamma_4 = {g4!r} <= 3")
    target = _third_statistic(stats, kind)
    hi = min(bounds_for(kind).alpha1_max, alpha1_feasible_max(g4))

    def residual(a1: float) -> float:
        r = beta1_radicand(a1, g4)
        if r < 0:
            return math.inf
        b1 = max(math.sqrt(r) - a1, 0.0)
        return _model_statistic(a1, b1, kind) - target

    xs = hi * np.arange(1, grid + 1) / grid
    fs = [residual(float(a)) for a in xs]
    roots = []
    for i in range(len(xs) - 1):
        f0, f1 = fs[i], fs[i + 1]
        if f0 == 0.0:
            roots.append(float(xs[i]))
        elif (f0 < 0) != (f1 < 0) and not (math.isnan(f0) or math.isnan(f1)):
            roots.append(_bisect(residual, float(xs[i]), float(xs[i + 1]), f0, xtol))
    if fs and fs[-1] == 0.0:
        roots.append(float(xs[-1]))
    touch_tol = 1e-13 * max(1.0, abs(target))
    for i in range(1, len(xs) - 1):
        f_prev, f0, f_next = fs[i - 1], fs[i], fs[i + 1]
        if not all(math.isfinite(v) for v in (f_prev, f0, f_next)):
            continue
        if (f_prev < 0) != (f0 < 0) or (f0 < 0) != (f_next < 0):
            continue  # already bracketed by a sign change
        if f0 > 0 and f_prev > f0 < f_next:
            sign = -1.0  # local minimum above zero
        elif f0 < 0 and f_prev < f0 > f_next:
            sign = 1.0  # local maximum below zero
        else:
            continue
        a, b = float(xs[i - 1]), float(xs[i + 1])
        x_ext, f_ext = _golden_extremum(residual, a, b, sign, xtol)
        if abs(f_ext) <= touch_tol:
            roots.append(x_ext)
        elif (f_ext < 0) != (f0 < 0):
            roots.append(_bisect(residual, a, x_ext, f_prev, xtol))
            roots.append(_bisect(residual, x_ext, b, f_ext, xtol))
    roots.sort()
    # Along the kurtosis curve alpha1 -> 0 drives alpha1 + beta1 -> 1; below the
    # clamp floor the moment denominators hit the singularity guard, so the
    # residual there is numerical noise, not a divergence.
    lo = ALPHA1_FLOOR
    if lo < xs[0]:
        flo = residual(lo)
        if math.isfinite(flo) and fs[0] != 0.0 and (flo < 0) != (fs[0] < 0):
            roots.insert(0, _bisect(residual, lo, float(xs[0]), flo, xtol))
    return roots


def solve_exact_candidates(stats: EmpiricalStats, kind: FeatureSetKind) -> list[GarchParams]:
    """Every parameter triple consistent with the statistics, in increasing alpha1."""
    out = []
    for a1 in solve_alpha1_roots(stats, kind):
        try:
            b1 = invert_beta1(a1, stats.gamma4)
            out.append(GarchParams(invert_alpha0(stats.second_moment, a1, b1), a1, b1))
        except (NegativeRadicand, BetaOutOfRange):
            continue
    return out


def solve_exact(stats: EmpiricalStats, kind: FeatureSetKind) -> GarchParams:
    """Invert (sigma^2, Gamma_4, third statistic) by bracketed bisection in alpha1.

    Raises :class:`AmbiguousRoot` (carrying all candidates) when the
    statistics are matched by more than one parameter triple.
    """
    cands = solve_exact_candidates(stats, kind)
    if not cands:
        raise NoRootInRange(f"no alpha1 in (0, {bounds_for(kind).alpha1_max:.6g}) matches the statistics for kind {kind}")
    if len(cands) > 1:
        roots = [c.alpha1 for c in cands]
        raise AmbiguousRoot(f"{len(cands)} parameter triples match the statistics for kind {kind}: alpha1 in {roots}", cands)
    return cands[0]


def analytic_stats(p: GarchParams, lags=(1, 2, 6, 10)) -> EmpiricalStats:
    """Exact population statistics, shaped like an estimate from a path."""

    def safe(fn):
        try:
            return fn()
        except NonFiniteMoment:
            return float("nan")

    return EmpiricalStats(
        second_moment=mc.second_moment(p),
        gamma4=mc.gamma4_closed(p.alpha1, p.beta1),
        gamma6=safe(lambda: mc.gamma6_closed(p.alpha1, p.beta1)),
        gamma8=safe(lambda: mc.standardized_moment(p, 4)),
        gamma10=safe(lambda: mc.standardized_moment(p, 5)),
        autocov_hat={n: mc.autocov_hat(p.alpha1, p.beta1, n) for n in lags},
        n_obs=0,
    )
