"""Analytical statistics of the GARCH-normal(1,1) process.

The model is

    sigma2_t = alpha0 + alpha1 * x_{t-1}^2 + beta1 * sigma2_{t-1},   x_t = sigma_t Z_t

with Z_t i.i.d. standard normal.  Everything here is a pure function of the
parameters, evaluated in float64.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, prod

from .errors import InvalidParams, NonFiniteMoment, NonStationary

#: Denominators closer to zero than this are treated as divergent.
SINGULAR_TOL = 1e-12

MAX_ORDER = 5


@dataclass(frozen=True)
class GarchParams:
    alpha0: float
    alpha1: float
    beta1: float

    def __post_init__(self):
        if not self.alpha0 > 0:
            raise InvalidParams(f"alpha0 must be positive, got {self.alpha0!r}")
        if not (self.alpha1 >= 0 and self.beta1 >= 0):
            raise InvalidParams(f"alpha1 and beta1 must be non-negative, got {self.alpha1!r}, {self.beta1!r}")
        if not self.alpha1 + self.beta1 < 1:
            raise NonStationary(f"alpha1 + beta1 = {self.alpha1 + self.beta1!r} must be < 1")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha0, self.alpha1, self.beta1)


def _check_order(m: int) -> None:
    if not (isinstance(m, int) and 1 <= m <= MAX_ORDER):
        raise ValueError(f"moment order m must be an integer in [1, {MAX_ORDER}], got {m!r}")


def double_factorial_gauss(j: int) -> int:
    """E(Z^{2j}) for standard normal Z, i.e. 1*3*5*...*(2j-1)."""
    if j < 0:
        raise ValueError("j must be non-negative")
    return prod(2 * i - 1 for i in range(1, j + 1))


def mu(alpha1, beta1, m: int):
    """E[(alpha1 Z^2 + beta1)^m]; the growth factor of the 2m-th moment.

    Works elementwise on numpy arrays as well as on scalars.
    """
    return sum(comb(m, j) * double_factorial_gauss(j) * alpha1**j * beta1 ** (m - j) for j in range(m + 1))


def _pair(p_or_pair) -> tuple[float, float]:
    if isinstance(p_or_pair, GarchParams):
        return p_or_pair.alpha1, p_or_pair.beta1
    a1, b1 = p_or_pair
    return a1, b1


def moment_exists(p_or_pair, m: int) -> bool:
    a1, b1 = _pair(p_or_pair)
    return bool(mu(a1, b1, m) < 1.0)


def second_moment(p: GarchParams) -> float:
    """Unconditional variance alpha0 / (1 - alpha1 - beta1)."""
    denom = 1.0 - p.alpha1 - p.beta1
    if denom <= SINGULAR_TOL:
        raise NonFiniteMoment("second moment diverges (alpha1 + beta1 >= 1)")
    return p.alpha0 / denom


def raw_even_moments(p: GarchParams, m: int) -> list[float]:
    """[E(x^0), E(x^2), ..., E(x^{2m})] by the standard GARCH moment recursion."""
    _check_order(m)
    a0, a1, b1 = p.as_tuple()
    out = [1.0]
    for k in range(1, m + 1):
        denom = 1.0 - mu(a1, b1, k)
        if denom <= SINGULAR_TOL:
            raise NonFiniteMoment(f"E(x^{2 * k}) diverges: mu(alpha1, beta1, {k}) = {1.0 - denom!r} >= 1")
        acc = 0.0
        for n in range(k):
            acc += out[n] / double_factorial_gauss(n) * a0 ** (k - n) * comb(k, k - n) * mu(a1, b1, n)
        out.append(double_factorial_gauss(k) * acc / denom)
    return out


def raw_even_moment(p: GarchParams, m: int) -> float:
    return raw_even_moments(p, m)[m]


def standardized_moment(p: GarchParams, m: int) -> float:
    """Gamma_{2m} = E(x^{2m}) / E(x^2)^m (independent of alpha0)."""
    raw = raw_even_moments(p, m)
    return raw[m] / raw[1] ** m


def _kurtosis_denominator(alpha1, beta1):
    return 1.0 - 3.0 * alpha1**2 - 2.0 * alpha1 * beta1 - beta1**2


def gamma4_closed(alpha1: float, beta1: float) -> float:
    d = _kurtosis_denominator(alpha1, beta1)
    if d <= SINGULAR_TOL:
        raise NonFiniteMoment(f"fourth moment diverges (1 - mu_2 = {d!r})")
    return 3.0 + 6.0 * alpha1**2 / d


def gamma6_closed(alpha1: float, beta1: float) -> float:
    d6 = 1.0 - 15.0 * alpha1**3 - 9.0 * alpha1**2 * beta1 - 3.0 * alpha1 * beta1**2 - beta1**3
    d4 = _kurtosis_denominator(alpha1, beta1)
    if d6 <= SINGULAR_TOL or d4 <= SINGULAR_TOL:
        raise NonFiniteMoment(f"sixth moment diverges (1 - mu_3 = {d6!r})")
    s = alpha1 + beta1
    q = 1.0 - s
    mu2 = beta1**2 + 2.0 * alpha1 * beta1 + 3.0 * alpha1**2
    inner = 1.0 + 3.0 * s / q + 3.0 * (1.0 + 2.0 * s / q) * mu2 / d4
    return 15.0 * q**3 * inner / d6


def autocov_hat(alpha1: float, beta1: float, n: int) -> float:
    """Lag-n autocovariance of x^2 divided by E(x^2)^2.

    Decays geometrically in ``n`` with ratio alpha1 + beta1.
    """
    if n < 1:
        raise ValueError(f"lag must be >= 1, got {n!r}")
    d = _kurtosis_denominator(alpha1, beta1)
    if d <= SINGULAR_TOL:
        raise NonFiniteMoment(f"autocovariance of x^2 needs a finite fourth moment (1 - mu_2 = {d!r})")
    pref = 2.0 * alpha1 * (1.0 - alpha1 * beta1 - beta1**2) / d
    return pref * (alpha1 + beta1) ** (n - 1)
