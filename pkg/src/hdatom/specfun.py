"""Modified Bessel functions I_nu and K_nu for real order and positive argument.

Evaluation routes:

* I_nu: ascending series (positive terms, no cancellation) up to the switch
  point, the large-x asymptotic expansion beyond it.
* K_nu: finite closed form for half-integer order; the asymptotic expansion
  beyond the switch point; below it the integral
  ``K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt`` by the trapezoid rule,
  which converges geometrically for this analytic, doubly-exponentially
  decaying integrand.

:func:`bessel_k_series` is an independent small-argument route (reflection
formula, logarithmic series at integer order) kept as a cross-check.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

EULER_GAMMA = 0.5772156649015329
_EPS = np.finfo(float).eps


class Regime(str, enum.Enum):
    ASCENDING_SERIES = "AscendingSeries"
    ASYMPTOTIC = "Asymptotic"
    HALF_INTEGER = "HalfIntegerClosedForm"
    INTEGRAL = "IntegralRepresentation"


@dataclass(frozen=True)
class BesselEval:
    order: float
    argument: float
    value: float
    regime_used: Regime
    est_error: float

    def __float__(self) -> float:
        return self.value


def switch_point(nu: float) -> float:
    return max(20.0, 2.0 * nu * nu)


def _check(nu: float, x: float) -> None:
    if not (math.isfinite(nu) and math.isfinite(x)):
        raise DomainError(f"non-finite input nu={nu}, x={x}")
    if not x > 0:
        raise DomainError(f"argument must be positive, got x={x}")


def _i_series(nu: float, x: float) -> tuple[float, float]:
    """sum_k (x/2)^{2k+nu} / (k! Gamma(k+nu+1)); nu may be negative non-integer."""
    half = 0.5 * x
    q = half * half
    if nu < 0 and float(nu).is_integer():
        return _i_series(-nu, x)
    g = math.gamma(nu + 1.0)
    term = half**nu / g
    total = term
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + nu))
        total += term
        if abs(term) <= 1e-17 * abs(total) and k > 2:
            break
        if k > 500:
            break
    return total, abs(term) + 4 * k * _EPS * abs(total)


def _asymptotic_terms(nu: float, x: float, sign: float) -> tuple[float, float]:
    """sum_k sign^k a_k(nu) / x^k, truncated at the smallest term."""
    mu = 4.0 * nu * nu
    total = 1.0
    term = 1.0
    prev = math.inf
    k = 0
    while True:
        k += 1
        nxt = term * sign * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(nxt) >= prev or nxt == 0.0:
            return total, abs(nxt)
        prev = abs(nxt)
        term = nxt
        total += term
        if abs(term) < 1e-17 * abs(total):
            return total, abs(term)
        if k > 200:
            return total, abs(term)


def _i_asymptotic(nu: float, x: float) -> tuple[float, float]:
    s, err = _asymptotic_terms(nu, x, -1.0)
    pref = math.exp(x) / math.sqrt(2.0 * math.pi * x)
    return pref * s, err + 2 * _EPS


def _k_asymptotic(nu: float, x: float) -> tuple[float, float]:
    s, err = _asymptotic_terms(nu, x, 1.0)
    pref = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x)
    return pref * s, err + 2 * _EPS


def _is_half_integer(nu: float) -> bool:
    return (2.0 * nu).is_integer() and not nu.is_integer()


def _k_half_integer(nu: float, x: float) -> float:
    n = int(round(abs(nu) - 0.5))
    total = 0.0
    for k in range(n + 1):
        total += math.factorial(n + k) / (math.factorial(k) * math.factorial(n - k) * (2.0 * x) ** k)
    return math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) * total


def _k_integral(nu: float, x: float, h: float = 0.05) -> tuple[float, float]:
    # integrand exponent ~ -x cosh t + nu t; peak where sinh t = nu / x
    t_peak = math.asinh(nu / x) if nu > 0 else 0.0

    def log_f(t):
        return -x * math.cosh(t) + nu * t

    top = log_f(t_peak)
    t_end = t_peak + 1.0
    while log_f(t_end) > top - 50.0:
        t_end += 1.0
    t = np.arange(0.0, t_end + h, h)
    # cosh(nu t) exp(-x cosh t), shifted by the peak exponent to avoid overflow
    expo = -x * np.cosh(t) - top
    f = 0.5 * (np.exp(expo + nu * t) + np.exp(expo - nu * t))
    fine = h * (f.sum() - 0.5 * f[0])
    coarse = 2 * h * (f[::2].sum() - 0.5 * f[0])
    scale = math.exp(top)
    err = abs(fine - coarse) / abs(fine) + 8 * _EPS
    return float(fine * scale), float(err)


def bessel_i(nu: float, x: float) -> BesselEval:
    nu = float(nu)
    x = float(x)
    _check(nu, x)
    if nu < 0:
        raise DomainError(f"order must be non-negative, got nu={nu}")
    if x > switch_point(nu):
        value, err = _i_asymptotic(nu, x)
        return BesselEval(nu, x, value, Regime.ASYMPTOTIC, err)
    value, abs_err = _i_series(nu, x)
    return BesselEval(nu, x, value, Regime.ASCENDING_SERIES, abs_err / abs(value))


def bessel_k(nu: float, x: float) -> BesselEval:
    """K_nu(x); negative orders are accepted through K_{-nu} = K_nu."""
    nu = abs(float(nu))
    x = float(x)
    _check(nu, x)
    if _is_half_integer(nu):
        return BesselEval(nu, x, _k_half_integer(nu, x), Regime.HALF_INTEGER, 8 * _EPS * (nu + 1))
    if x > switch_point(nu):
        value, err = _k_asymptotic(nu, x)
        return BesselEval(nu, x, value, Regime.ASYMPTOTIC, err)
    value, err = _k_integral(nu, x)
    return BesselEval(nu, x, value, Regime.INTEGRAL, err)


def _digamma_int(m: int) -> float:
    """psi(m) for a positive integer m."""
    return -EULER_GAMMA + sum(1.0 / j for j in range(1, m))


def _k_integer_series(n: int, x: float) -> float:
    half = 0.5 * x
    q = half * half
    first = 0.0
    for k in range(n):
        first += math.factorial(n - k - 1) / math.factorial(k) * (-q) ** k
    first *= 0.5 * half ** (-n)
    i_n, _ = _i_series(float(n), x)
    second = (-1) ** (n + 1) * math.log(half) * i_n
    third = 0.0
    term = 1.0 / math.factorial(n)
    k = 0
    while True:
        contrib = (_digamma_int(k + 1) + _digamma_int(n + k + 1)) * term
        third += contrib
        k += 1
        term *= q / (k * (n + k))
        if abs(contrib) < 1e-18 * max(abs(third), 1e-300) and k > 2:
            break
        if k > 300:
            break
    third *= (-1) ** n * 0.5 * half**n
    return first + second + third


def bessel_k_series(nu: float, x: float, near: float = 1e-3) -> float:
    """Small-x K_nu from ascending series; intended for x <= 2.

    Non-integer order uses pi (I_{-nu} - I_nu) / (2 sin(pi nu)). Exact integer
    order uses the logarithmic series. Within ``near`` of an integer the
    reflection formula loses digits to cancellation, so the value is obtained by
    five-point Lagrange interpolation in nu through the integer value and
    reflection values at n +- near, n +- 2 near.
    """
    nu = abs(float(nu))
    _check(nu, float(x))
    n = round(nu)
    if nu == n:
        return _k_integer_series(int(n), x)
    if abs(nu - n) < near:
        nodes = [n - 2 * near, n - near, n, n + near, n + 2 * near]
        vals = [bessel_k_series(v, x, near=0.0) if v != n else _k_integer_series(int(n), x) for v in nodes]
        out = 0.0
        for i, (vi, fi) in enumerate(zip(nodes, vals)):
            w = 1.0
            for j, vj in enumerate(nodes):
                if j != i:
                    w *= (nu - vj) / (vi - vj)
            out += w * fi
        return out
    i_neg, _ = _i_series(-nu, x)
    i_pos, _ = _i_series(nu, x)
    return math.pi * (i_neg - i_pos) / (2.0 * math.sin(math.pi * nu))


def bessel_i_derivative(nu: float, x: float) -> float:
    """I_nu'(x) = I_{nu+1}(x) + (nu/x) I_nu(x)."""
    return bessel_i(nu + 1, x).value + nu / x * bessel_i(nu, x).value


def bessel_k_derivative(nu: float, x: float) -> float:
    """K_nu'(x) = -K_{nu+1}(x) + (nu/x) K_nu(x)."""
    return -bessel_k(nu + 1, x).value + nu / x * bessel_k(nu, x).value


def wronskian(nu: float, x: float) -> float:
    """x (I_nu K_nu' - I_nu' K_nu); identically -1."""
    i = bessel_i(nu, x).value
    k = bessel_k(nu, x).value
    return x * (i * bessel_k_derivative(nu, x) - bessel_i_derivative(nu, x) * k)


def bessel_i_array(nu: float, x) -> np.ndarray:
    return np.array([bessel_i(nu, xi).value for xi in np.ravel(x)]).reshape(np.shape(x))


def bessel_k_array(nu: float, x) -> np.ndarray:
    return np.array([bessel_k(nu, xi).value for xi in np.ravel(x)]).reshape(np.shape(x))
