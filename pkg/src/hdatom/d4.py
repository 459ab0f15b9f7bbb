"""The critical dimension d = 4, where the potential is an inverse square.

With epsilon^2 = -2E, rho = epsilon r and R = (epsilon/rho) g(rho), the radial
equation becomes

    g'' + g'/rho - (1 + zeta/rho^2) g = 0,
    zeta = 1 + l_4 (l_4 + 1) - 3/4 - Z / (2 pi^2),   l_4 = l + 1/2,

so zeta = nu^2 >= 0 gives modified Bessel functions of order nu, and zeta < 0
is the fall-to-centre regime.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, NonPositiveRho
from .specfun import bessel_i, bessel_i_array, bessel_k, bessel_k_array


class Regime(str, enum.Enum):
    SUB_CRITICAL = "SubCritical"
    CRITICAL = "Critical"
    SUPER_CRITICAL = "SuperCritical"


@dataclass(frozen=True)
class ZetaReport:
    l: int
    Z: float
    zeta: float
    nu: float | None
    imaginary_order: bool
    critical_Z: float
    regime: Regime
    tolerance: float


def _centrifugal_part(l: int) -> float:
    l4 = l + 0.5
    return 1.0 + l4 * (l4 + 1.0) - 0.75


def critical_charge(l: int) -> float:
    return 2.0 * math.pi**2 * _centrifugal_part(l)


def zeta(l: int, Z: float, tol: float = 1e-12) -> ZetaReport:
    """zeta_l for charge Z; |zeta| <= tol is reported as Critical."""
    if l < 0:
        raise DomainError(f"l must be non-negative, got {l}")
    if not Z > 0:
        raise DomainError(f"Z must be positive, got {Z}")
    z = _centrifugal_part(l) - Z / (2.0 * math.pi**2)
    if abs(z) <= tol:
        regime = Regime.CRITICAL
    elif z > 0:
        regime = Regime.SUB_CRITICAL
    else:
        regime = Regime.SUPER_CRITICAL
    return ZetaReport(
        l=l,
        Z=float(Z),
        zeta=z,
        nu=math.sqrt(z) if z >= 0 else None,
        imaginary_order=z < 0,
        critical_Z=critical_charge(l),
        regime=regime,
        tolerance=tol,
    )


def d4_solutions(nu: float, rho_samples) -> tuple[np.ndarray, np.ndarray]:
    """Sample the two independent solutions I_nu(rho) and K_nu(rho)."""
    if nu < 0:
        raise DomainError(f"order must be non-negative, got {nu}")
    rho = np.asarray(rho_samples, dtype=float)
    if np.any(~(rho > 0)):
        raise NonPositiveRho("all rho samples must be positive")
    return bessel_i_array(nu, rho), bessel_k_array(nu, rho)


def ode_residual(nu: float, rho_samples, kind: str = "K", rel_step: float = 2e-3) -> np.ndarray:
    """Relative residual of g'' + g'/rho - (1 + nu^2/rho^2) g at each sample.

    Derivatives come from the three-point central stencil at steps h and 2h,
    combined by Richardson extrapolation; the step is ``rel_step * min(rho, 1)``.
    The residual is divided by |g''| + |g'/rho| + |(1 + nu^2/rho^2) g|.
    """
    fn = bessel_k if kind.upper().startswith("K") else bessel_i
    rho = np.asarray(rho_samples, dtype=float)
    out = np.empty_like(rho)
    for idx, r in enumerate(rho):
        h = rel_step * min(r, 1.0)
        g = {k: fn(nu, r + k * h).value for k in (-2, -1, 0, 1, 2)}
        d1_h = (g[1] - g[-1]) / (2 * h)
        d1_2h = (g[2] - g[-2]) / (4 * h)
        d2_h = (g[1] - 2 * g[0] + g[-1]) / (h * h)
        d2_2h = (g[2] - 2 * g[0] + g[-2]) / (4 * h * h)
        d1 = (4 * d1_h - d1_2h) / 3
        d2 = (4 * d2_h - d2_2h) / 3
        pot = (1.0 + nu * nu / (r * r)) * g[0]
        res = d2 + d1 / r - pot
        out[idx] = abs(res) / (abs(d2) + abs(d1 / r) + abs(pot))
    return out


class Kind(str, enum.Enum):
    I = "I"
    K = "K"


class InfinityClass(str, enum.Enum):
    DECAY = "ExponentialDecay"
    GROWTH = "ExponentialGrowth"


@dataclass(frozen=True)
class NormVerdict:
    """Normalizability of R = g / rho under the measure rho^3 d rho.

    ``normalizable`` follows the norm integral; ``diverges_pointwise_at_origin``
    records whether g itself blows up at rho -> 0. The two disagree for K_nu
    with 0 <= nu < 1.
    """

    kind: Kind
    nu: float
    origin_exponent: float
    infinity_class: InfinityClass
    norm_converges_at_origin: bool
    norm_converges_at_infinity: bool
    diverges_pointwise_at_origin: bool
    numeric_norm: float | None

    @property
    def normalizable(self) -> bool:
        return self.norm_converges_at_origin and self.norm_converges_at_infinity


def _k_norm(nu: float) -> float:
    """int_0^inf K_nu(rho)^2 rho d rho for 0 <= nu < 1."""

    def tail(r):
        return bessel_k(nu, r).value ** 2 * r

    # rho = u^m flattens the rho^{1-2nu} endpoint behaviour on [0, 1]
    m = 1.0 / (2.0 - 2.0 * nu)

    def head(u):
        if u == 0.0:
            return 0.0 if nu < 0.5 else _head_limit(nu, m)
        r = u**m
        return bessel_k(nu, r).value ** 2 * r * m * u ** (m - 1)

    a, _ = integrate.quad(head, 0.0, 1.0, epsabs=1e-12, epsrel=1e-12, limit=200)
    b, _ = integrate.quad(tail, 1.0, np.inf, epsabs=1e-12, epsrel=1e-12, limit=200)
    return a + b


def _head_limit(nu: float, m: float) -> float:
    # K_nu(r) ~ Gamma(nu) 2^{nu-1} r^{-nu}; integrand -> m (Gamma(nu) 2^{nu-1})^2 u^{m(2-2nu)-1} = m c^2
    if nu == 0.5:
        return m * math.pi / 2
    return m * (math.gamma(nu) * 2 ** (nu - 1)) ** 2


def normalizability(kind: Kind | str, nu: float) -> NormVerdict:
    kind = Kind(kind)
    if nu < 0:
        raise DomainError(f"order must be non-negative, got {nu}")
    if kind is Kind.I:
        # I_nu ~ rho^nu near 0; |g|^2 rho ~ rho^{1+2nu}; grows like e^{2 rho}/rho at infinity
        return NormVerdict(
            kind=kind,
            nu=nu,
            origin_exponent=1.0 + 2.0 * nu,
            infinity_class=InfinityClass.GROWTH,
            norm_converges_at_origin=True,
            norm_converges_at_infinity=False,
            diverges_pointwise_at_origin=False,
            numeric_norm=None,
        )
    origin_exponent = 1.0 - 2.0 * nu
    at_origin = origin_exponent > -1.0
    return NormVerdict(
        kind=kind,
        nu=nu,
        origin_exponent=origin_exponent,
        infinity_class=InfinityClass.DECAY,
        norm_converges_at_origin=at_origin,
        norm_converges_at_infinity=True,
        diverges_pointwise_at_origin=True,
        numeric_norm=_k_norm(nu) if at_origin else None,
    )
