"""Feature-set kinds, their parameter bounds, and seeded parameter sampling."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import RejectionStall
from .moments import GarchParams, mu


@dataclass(frozen=True)
class FeatureSetKind:
    """Which third statistic feeds the network next to E(x^2) and Gamma_4.

    ``order`` is 3, 4 or 5 for the standardized-moment kinds (Gamma_6,
    Gamma_8, Gamma_10); ``lag`` is set for the autocovariance kinds.
    """

    order: int | None = None
    lag: int | None = None

    def __post_init__(self):
        if (self.order is None) == (self.lag is None):
            raise ValueError("exactly one of order / lag must be given")
        if self.order is not None and self.order not in (3, 4, 5):
            raise ValueError(f"moment kinds cover Gamma_6..Gamma_10 (order 3-5), got {self.order}")
        if self.lag is not None and self.lag < 1:
            raise ValueError(f"lag must be >= 1, got {self.lag}")

    @classmethod
    def moments(cls, power: int) -> "FeatureSetKind":
        """``power`` is the moment order: 6, 8 or 10."""
        return cls(order=power // 2)

    @classmethod
    def autocov(cls, lag: int) -> "FeatureSetKind":
        return cls(lag=lag)

    @classmethod
    def parse(cls, text: str) -> "FeatureSetKind":
        m = re.fullmatch(r"\s*(g(6|8|10)|lag(\d+))\s*", text.lower())
        if m is None:
            raise ValueError(f"unknown feature-set kind {text!r} (expected g6, g8, g10 or lagN)")
        if m.group(2):
            return cls.moments(int(m.group(2)))
        return cls.autocov(int(m.group(3)))

    @property
    def is_autocov(self) -> bool:
        return self.lag is not None

    @property
    def required_order(self) -> int:
        """Highest moment order m whose existence the kind needs."""
        return 2 if self.is_autocov else self.order

    def __str__(self) -> str:
        return f"lag{self.lag}" if self.is_autocov else f"g{2 * self.order}"


MOMENTS_G6 = FeatureSetKind.moments(6)
MOMENTS_G8 = FeatureSetKind.moments(8)
MOMENTS_G10 = FeatureSetKind.moments(10)


@dataclass(frozen=True)
class ParamBounds:
    alpha1_max: float
    alpha0_min: float = 1e-6
    alpha0_max: float = 1e-3
    beta1_max: float = 1.0


# alpha1 envelope at beta1 = 0: a_m * alpha1^m < 1
_ALPHA1_MAX = {2: (1 / 3) ** (1 / 2), 3: (1 / 15) ** (1 / 3), 4: (1 / 105) ** (1 / 4), 5: (1 / 945) ** (1 / 5)}


def bounds_for(kind: FeatureSetKind) -> ParamBounds:
    return ParamBounds(alpha1_max=_ALPHA1_MAX[kind.required_order])


def valid_for(kind: FeatureSetKind, alpha1, beta1):
    """Vectorised validity predicate used by the sampler."""
    return (alpha1 + beta1 < 1.0) & (mu(alpha1, beta1, kind.required_order) < 1.0)


def sample_params(
    kind: FeatureSetKind,
    count: int,
    seed: int,
    *,
    alpha0_scale: str = "linear",
    bounds: ParamBounds | None = None,
    min_acceptance: float = 1e-3,
) -> list[GarchParams]:
    """Draw ``count`` parameter triples uniformly from the kind's region.

    alpha0 is uniform on [alpha0_min, alpha0_max] (or log-uniform with
    ``alpha0_scale="log"``); (alpha1, beta1) is uniform on
    [0, alpha1_max] x [0, beta1_max) and rejected unless the kind's highest
    moment exists.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if alpha0_scale not in ("linear", "log"):
        raise ValueError(f"alpha0_scale must be 'linear' or 'log', got {alpha0_scale!r}")
    b = bounds or bounds_for(kind)
    rng = np.random.default_rng(seed)
    batch = max(1024, 2 * count)

    a0s, a1s, b1s = [], [], []
    kept = drawn = 0
    while kept < count:
        if alpha0_scale == "log":
            a0 = np.exp(rng.uniform(np.log(b.alpha0_min), np.log(b.alpha0_max), batch))
        else:
            a0 = rng.uniform(b.alpha0_min, b.alpha0_max, batch)
        a1 = rng.uniform(0.0, b.alpha1_max, batch)
        b1 = rng.uniform(0.0, b.beta1_max, batch)
        ok = valid_for(kind, a1, b1) & (a0 > 0)
        drawn += batch
        kept += int(ok.sum())
        a0s.append(a0[ok])
        a1s.append(a1[ok])
        b1s.append(b1[ok])
        if kept / drawn < min_acceptance:
            raise RejectionStall(f"acceptance rate {kept / drawn:.2e} below {min_acceptance:g} for kind {kind}")

    a0 = np.concatenate(a0s)[:count]
    a1 = np.concatenate(a1s)[:count]
    b1 = np.concatenate(b1s)[:count]
    return [GarchParams(float(x), float(y), float(z)) for x, y, z in zip(a0, a1, b1)]
