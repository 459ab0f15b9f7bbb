"""Scaling-family variational bounds and the classical circular-orbit analysis.

For a normalized trial f and its dilation f_s(r) = s^{-1/2} f(r/s) the energy is

    E(s) = A / s^2 - B / s^p,

with A the kinetic plus centrifugal expectation and B = kappa <r^{-p}> at s = 1.
For p < 2 the curve has an interior minimum; for p = 2 the two terms compete at
equal rate; for p > 2 it is unbounded below as s -> 0.

The trials carry the origin behaviour r^{l_d + 1} of the reduced function:
``Exponential`` is r^{l_d+1} e^{-r}, ``Gaussian`` is r^{l_d+1} e^{-r^2/2}.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError, QuadratureDivergent
from .reduction import centrifugal_coefficient, reduced_l

QUAD_TOL = 1e-10


class Trial(str, enum.Enum):
    EXPONENTIAL = "Exponential"
    GAUSSIAN = "Gaussian"


class InfimumKind(str, enum.Enum):
    MINIMUM_AT = "MinimumAt"
    INFIMUM_ZERO = "InfimumZero"
    UNBOUNDED_BELOW = "UnboundedBelow"


@dataclass(frozen=True)
class Infimum:
    kind: InfimumKind
    s_star: float | None = None
    energy: float | None = None


def classify_infimum(d: int, A: float, B: float, power: float | None = None) -> Infimum:
    """Infimum of A/s^2 - B/s^p over s > 0, p = d - 2 unless given."""
    if not (A > 0 and B > 0):
        raise DomainError(f"A and B must be positive, got A={A}, B={B}")
    p = d - 2 if power is None else power
    if math.isinf(B):
        return Infimum(InfimumKind.UNBOUNDED_BELOW)
    if p < 2:
        # E'(s) = 0  <=>  s^{2-p} = 2A / (p B)
        s_star = (2.0 * A / (p * B)) ** (1.0 / (2.0 - p))
        return Infimum(InfimumKind.MINIMUM_AT, s_star, A / s_star**2 - B / s_star**p)
    if p == 2:
        if A >= B:
            return Infimum(InfimumKind.INFIMUM_ZERO, energy=0.0)
        return Infimum(InfimumKind.UNBOUNDED_BELOW)
    return Infimum(InfimumKind.UNBOUNDED_BELOW)


@dataclass(frozen=True)
class ScalingCurve:
    d: int
    trial: Trial
    A: float
    B: float
    power: float
    infimum_class: Infimum
    b_divergent: bool = False

    def energy(self, s):
        """E(s) = A/s^2 - B/s^p (vectorised)."""
        s = np.asarray(s, dtype=float)
        return self.A / s**2 - self.B / s**self.power


def _shape(trial: Trial, a: float, r):
    if trial is Trial.EXPONENTIAL:
        return r**a * np.exp(-r), a / r - 1.0
    return r**a * np.exp(-0.5 * r * r), a / r - r


def _half_line(fn) -> float:
    """int_0^inf fn(r) dr, with r = u^2 on [0, 1] to tame r^{-q} endpoints."""
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            head, _ = integrate.quad(lambda u: 2.0 * u * fn(u * u) if u > 0 else 0.0, 0.0, 1.0,
                                     epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=400)
            tail, _ = integrate.quad(fn, 1.0, np.inf, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=400)
        except integrate.IntegrationWarning as exc:
            raise QuadratureDivergent(str(exc)) from exc
    total = head + tail
    if not math.isfinite(total):
        raise QuadratureDivergent("quadrature returned a non-finite value")
    return total


def trial_integrals(
    d: int,
    trial: Trial | str,
    kappa: float,
    l: int,
    power: float | None = None,
    scale: float = 1.0,
) -> tuple[float, float]:
    """(A, B) for the normalized trial dilated by ``scale``."""
    trial = Trial(trial)
    if d < 3:
        raise DomainError(f"d must be at least 3, got {d}")
    if not (kappa > 0 and scale > 0):
        raise DomainError("kappa and scale must be positive")
    p = d - 2 if power is None else power
    a = reduced_l(d, l) + 1.0
    c = centrifugal_coefficient(d, l)
    if 2.0 * a - p <= -1.0:
        raise QuadratureDivergent(f"<r^-{p}> diverges at the origin for a trial ~ r^{a}")

    def f_and_slope(r):
        x = r / scale
        g, ratio = _shape(trial, a, x)
        return g, ratio / scale

    norm = _half_line(lambda r: f_and_slope(r)[0] ** 2)

    def kinetic(r):
        g, slope = f_and_slope(r)
        return 0.5 * (slope * g) ** 2 + c * g * g / (2.0 * r * r)

    A = _half_line(kinetic) / norm
    B = kappa * _half_line(lambda r: f_and_slope(r)[0] ** 2 / r**p) / norm
    return A, B


def scaling_energy(
    d: int,
    trial: Trial | str,
    kappa: float,
    l: int,
    power: float | None = None,
) -> ScalingCurve:
    """Scaling curve of a trial family; a divergent B is reported, not raised."""
    trial = Trial(trial)
    p = d - 2 if power is None else power
    try:
        A, B = trial_integrals(d, trial, kappa, l, power)
    except QuadratureDivergent:
        A, _ = trial_integrals(d, trial, kappa, l, power=0.0)
        return ScalingCurve(d, trial, A, math.inf, p, Infimum(InfimumKind.UNBOUNDED_BELOW), b_divergent=True)
    return ScalingCurve(d, trial, A, B, p, classify_infimum(d, A, B, p))


def cutoff_trial_energy(
    d: int,
    kappa: float,
    l: int,
    cutoff: float,
    trial: Trial | str = Trial.EXPONENTIAL,
    power: float | None = None,
) -> tuple[float, float]:
    """Best energy of the trial family (r - a) e^{-(r-a)/s} (or its Gaussian
    counterpart) that vanishes at the wall r = a; returns (energy, s).

    Any such function is admissible for the problem with a Dirichlet wall at
    ``cutoff``, so the result bounds the walled ground energy from above.
    """
    trial = Trial(trial)
    if not cutoff > 0:
        raise DomainError(f"cutoff must be positive, got {cutoff}")
    p = d - 2 if power is None else power
    c = centrifugal_coefficient(d, l)

    def g(x):
        return _shape(trial, 1.0, x)

    norm = _half_line(lambda x: g(x)[0] ** 2)
    grad = _half_line(lambda x: (g(x)[0] * g(x)[1]) ** 2)

    def energy(log_s):
        s = math.exp(log_s)

        def pot(x):
            r = cutoff + s * x
            return (c / (2.0 * r * r) - kappa / r**p) * g(x)[0] ** 2

        return (grad / (2.0 * s * s) + _half_line(pot)) / norm

    # coarse scan in log s, then a bounded refinement around the best point
    grid = np.linspace(math.log(cutoff) - 4.0, math.log(cutoff) + 14.0, 37)
    vals = [energy(x) for x in grid]
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(energy, bounds=(lo, hi), method="bounded", options={"xatol": 1e-6})
    best, log_s = (res.fun, res.x) if res.fun < vals[i] else (vals[i], grid[i])
    return float(best), float(math.exp(log_s))


class CurvatureSign(str, enum.Enum):
    POSITIVE = "Positive"
    ZERO = "Zero"
    NEGATIVE = "Negative"
    NONE = "NoEquilibrium"


class Equilibrium(str, enum.Enum):
    STABLE = "Stable"
    NEUTRAL = "Neutral"
    UNSTABLE = "Unstable"
    NONE = "NoEquilibrium"


_FROM_SIGN = {
    CurvatureSign.POSITIVE: Equilibrium.STABLE,
    CurvatureSign.ZERO: Equilibrium.NEUTRAL,
    CurvatureSign.NEGATIVE: Equilibrium.UNSTABLE,
    CurvatureSign.NONE: Equilibrium.NONE,
}

UNCERTAINTY_NOTE = (
    "A particle resting on a circular orbit would have delta r = 0 and "
    "delta p_r = 0 at once, which the uncertainty relations exclude; the "
    "classical verdict is qualitative only."
)


@dataclass(frozen=True)
class EquilibriumReport:
    d: int
    L: float
    kappa: float
    r_star: float | None
    second_derivative: float | None
    second_derivative_sign: CurvatureSign
    classification: Equilibrium
    note: str = UNCERTAINTY_NOTE


def classical_equilibrium(d: int, L: float, kappa: float) -> EquilibriumReport:
    """Circular orbits of V_eff(r) = L^2/(2 r^2) - kappa / r^{d-2} (unit mass).

    At a stationary point (d-2) kappa = L^2 r*^{d-4}, which turns
    V_eff'' = 3 L^2 / r^4 - (d-2)(d-1) kappa / r^d into (4 - d) L^2 / r*^4.
    At d = 4 the potential is (L^2/2 - kappa) / r^2 and every radius is an
    equilibrium exactly when the bracket vanishes (compared at 1e-12 relative).
    """
    if d < 3:
        raise DomainError(f"d must be at least 3, got {d}")
    if not (L > 0 and kappa > 0):
        raise DomainError(f"L and kappa must be positive, got L={L}, kappa={kappa}")
    if d == 4:
        if math.isclose(0.5 * L * L, kappa, rel_tol=1e-12, abs_tol=0.0):
            sign = CurvatureSign.ZERO
            return EquilibriumReport(d, L, kappa, None, 0.0, sign, _FROM_SIGN[sign])
        sign = CurvatureSign.NONE
        return EquilibriumReport(d, L, kappa, None, None, sign, _FROM_SIGN[sign])
    r_star = ((d - 2) * kappa / (L * L)) ** (1.0 / (d - 4))
    curvature = (4 - d) * L * L / r_star**4
    sign = CurvatureSign.POSITIVE if d < 4 else CurvatureSign.NEGATIVE
    return EquilibriumReport(d, L, kappa, r_star, curvature, sign, _FROM_SIGN[sign])
