"""GARCH-normal(1,1) path simulation and empirical moment estimation.

The variance recursion and the lagged sums are the hot loops; both have a
numba-compiled twin selected through :mod:`garchnet._accel`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import sqrt
from pathlib import Path
from typing import Sequence

import numpy as np

from ._accel import njit, select
from .errors import FormatError, NonStationary, SeriesTooShort
from .moments import GarchParams

#: Recorded in outputs so runs can be reproduced with the same generator.
GENERATOR = "numpy.random.Generator(PCG64).standard_normal"
DEFAULT_BURN_IN = 1000
DEFAULT_LAGS = (1, 2, 6, 10)


def _garch_recursion_py(z, alpha0, alpha1, beta1, sigma2_0):
    n = z.shape[0]
    x = np.empty(n)
    s2 = sigma2_0
    for t in range(n):
        xt = sqrt(s2) * z[t]
        x[t] = xt
        s2 = alpha0 + alpha1 * xt * xt + beta1 * s2
    return x


def _lagged_autocov_py(y, mean, lags):
    n = y.shape[0]
    out = np.empty(lags.shape[0])
    for i in range(lags.shape[0]):
        k = lags[i]
        acc = 0.0
        for t in range(n - k):
            acc += (y[t] - mean) * (y[t + k] - mean)
        out[i] = acc / (n - k)
    return out


def _lagged_autocov_np(y, mean, lags):
    d = y - mean
    n = d.shape[0]
    return np.array([np.dot(d[: n - k], d[k:]) / (n - k) for k in lags])


_garch_recursion_nb = njit(_garch_recursion_py)
_lagged_autocov_nb = njit(_lagged_autocov_py)

garch_recursion = select(_garch_recursion_py, _garch_recursion_nb)
lagged_autocov = select(_lagged_autocov_np, _lagged_autocov_nb)


def simulate(p: GarchParams, t_steps: int, burn_in: int = DEFAULT_BURN_IN, seed: int = 0) -> np.ndarray:
    """Return ``t_steps`` returns after discarding ``burn_in`` warm-up steps.

    The conditional variance starts at the unconditional variance.
    """
    if not p.alpha1 + p.beta1 < 1:
        raise NonStationary(f"alpha1 + beta1 = {p.alpha1 + p.beta1!r} >= 1")
    if t_steps < 1 or burn_in < 0:
        raise ValueError("t_steps must be >= 1 and burn_in >= 0")
    z = np.random.default_rng(seed).standard_normal(t_steps + burn_in)
    sigma2_0 = p.alpha0 / (1.0 - p.alpha1 - p.beta1)
    x = garch_recursion(z, p.alpha0, p.alpha1, p.beta1, sigma2_0)
    return x[burn_in:]


@dataclass
class EmpiricalStats:
    second_moment: float
    gamma4: float
    gamma6: float = float("nan")
    gamma8: float = float("nan")
    gamma10: float = float("nan")
    autocov_hat: dict[int, float] = field(default_factory=dict)
    n_obs: int = 0

    def to_dict(self) -> dict:
        d = {
            "second_moment": self.second_moment,
            "gamma4": self.gamma4,
            "gamma6": self.gamma6,
            "gamma8": self.gamma8,
            "gamma10": self.gamma10,
            "n_obs": self.n_obs,
        }
        for lag in sorted(self.autocov_hat):
            d[f"autocov_hat_{lag}"] = self.autocov_hat[lag]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EmpiricalStats":
        if not isinstance(d, dict):
            raise FormatError("stats must be a JSON object", "$")
        for key in ("second_moment", "gamma4"):
            if key not in d:
                raise FormatError("missing field", key)
        out = {}
        for key in ("second_moment", "gamma4", "gamma6", "gamma8", "gamma10"):
            v = d.get(key, float("nan"))
            try:
                out[key] = float("nan") if v is None else float(v)
            except (TypeError, ValueError) as exc:
                raise FormatError(f"not a number: {v!r}", key) from exc
        lags = {}
        for key, v in d.items():
            if key.startswith("autocov_hat_"):
                try:
                    lags[int(key[len("autocov_hat_") :])] = float(v)
                except (TypeError, ValueError) as exc:
                    raise FormatError(f"bad autocovariance entry {v!r}", key) from exc
        try:
            n_obs = int(d.get("n_obs", 0))
        except (TypeError, ValueError) as exc:
            raise FormatError(f"not an integer: {d.get('n_obs')!r}", "n_obs") from exc
        return cls(autocov_hat=lags, n_obs=n_obs, **out)


def estimate_stats(series, lags: Sequence[int] = DEFAULT_LAGS) -> EmpiricalStats:
    """Sample moments of ``series`` and normalized autocovariances of its square.

    autocov_hat[n] is the lag-n sample autocovariance of x^2 (mean over the
    n_obs - n available pairs) divided by the squared sample mean of x^2.
    No small-sample bias corrections are applied.
    """
    x = np.asarray(series, dtype=np.float64).ravel()
    lags = sorted({int(k) for k in lags})
    if lags and lags[0] < 1:
        raise ValueError("lags must be >= 1")
    need = (lags[-1] if lags else 0) + 2
    if x.size < need:
        raise SeriesTooShort(f"series of length {x.size} is shorter than {need}")
    y = x * x
    m2 = float(y.mean())
    if not m2 > 0:
        raise SeriesTooShort("series has zero second moment")
    y2 = y * y
    m4 = float(y2.mean())
    m6 = float((y2 * y).mean())
    m8 = float((y2 * y2).mean())
    m10 = float((y2 * y2 * y).mean())
    acov = lagged_autocov(y, m2, np.asarray(lags, dtype=np.int64)) if lags else []
    return EmpiricalStats(
        second_moment=m2,
        gamma4=m4 / m2**2,
        gamma6=m6 / m2**3,
        gamma8=m8 / m2**4,
        gamma10=m10 / m2**5,
        autocov_hat={k: float(v) / m2**2 for k, v in zip(lags, acov)},
        n_obs=int(x.size),
    )


def write_series_csv(path, series, provenance: dict | None = None) -> None:
    with open(path, "w") as fh:
        if provenance is not None:
            fh.write("# " + json.dumps(provenance, sort_keys=True) + "\n")
        fh.write("x\n")
        fh.writelines(f"{v:.17g}\n" for v in np.asarray(series, dtype=np.float64))


def read_series_csv(path) -> np.ndarray:
    path = Path(path)
    try:
        lines = [ln.strip() for ln in path.read_text().splitlines()]
    except OSError as exc:
        raise FormatError(f"cannot read series ({exc})", str(path)) from exc
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if lines and not _is_number(lines[0]):
        lines = lines[1:]  # header
    try:
        values = np.array([float(ln.split(",")[0]) for ln in lines], dtype=np.float64)
    except ValueError as exc:
        raise FormatError(f"non-numeric value ({exc})", path.name) from exc
    if values.size == 0:
        raise FormatError("series is empty", path.name)
    return values


def _is_number(s: str) -> bool:
    try:
        float(s.split(",")[0])
    except ValueError:
        return False
    return True
