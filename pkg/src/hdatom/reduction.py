"""Radial reduction of the d-dimensional problem and its dimensionless rescaling.

With R(r) = r^{-(d-1)/2} f(r) the radial equation becomes, in reduced units,

    -(1/2) f'' + [ l_d (l_d + 1) / (2 r^2) - kappa / r^p ] f = E f,

where l_d = l + (d - 3)/2 absorbs both the angular eigenvalue and the measure term.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import AtomConfig
from .errors import LengthMismatch, PositiveEnergy, ScalingUndefined
from .potentials import PotentialKind


def reduced_l(d: int, l: int) -> float:
    return l + (d - 3) / 2


def centrifugal_coefficient(d: int, l: int) -> float:
    """l_d (l_d + 1); equals l (l + d - 2) + (d - 1)(d - 3)/4."""
    ld = reduced_l(d, l)
    return ld * (ld + 1)


@dataclass(frozen=True)
class RadialProblem:
    d: int
    l: int
    l_d: float
    centrifugal: float
    kappa: float
    p: float
    potential_kind: PotentialKind = PotentialKind.GAUSS_LAW

    def effective_potential(self, r):
        """V_eff(r) = centrifugal / (2 r^2) - kappa / r^p (vectorised)."""
        r = np.asarray(r, dtype=float)
        return self.centrifugal / (2.0 * r * r) - self.kappa / r**self.p


def reduce(config: AtomConfig) -> RadialProblem:
    kappa, p = config.kappa, config.power
    return RadialProblem(
        d=config.d,
        l=config.l,
        l_d=reduced_l(config.d, config.l),
        centrifugal=centrifugal_coefficient(config.d, config.l),
        kappa=kappa,
        p=p,
        potential_kind=config.potential.kind,
    )


def _radii(grid) -> np.ndarray:
    return np.asarray(getattr(grid, "r", grid), dtype=float)


def to_wavefunction(f_samples, grid, d: int) -> np.ndarray:
    """Full radial function R(r_i) = r_i^{-(d-1)/2} f(r_i)."""
    f = np.asarray(f_samples, dtype=float)
    r = _radii(grid)
    if f.shape != r.shape:
        raise LengthMismatch(f"{f.shape} samples for a grid of {r.shape}")
    return f * r ** (-(d - 1) / 2)


def from_wavefunction(R_samples, grid, d: int) -> np.ndarray:
    R = np.asarray(R_samples, dtype=float)
    r = _radii(grid)
    if R.shape != r.shape:
        raise LengthMismatch(f"{R.shape} samples for a grid of {r.shape}")
    return R * r ** ((d - 1) / 2)


@dataclass(frozen=True)
class ScalingParams:
    alpha: float
    rho_exponent: Fraction
    lambda_exponent: Fraction
    lambda_sq: float

    @property
    def decay_sq(self) -> float:
        """Squared decay constant (alpha^{lambda_exponent} lambda)^2."""
        return self.alpha ** (2 * float(self.lambda_exponent)) * self.lambda_sq


def dimensionless_scale(problem: RadialProblem, energy: float) -> ScalingParams:
    """Exponents of the rescaling rho = alpha^{1/(4-d)} r; singular at d = 4."""
    if problem.d == 4:
        raise ScalingUndefined("the length scale alpha^{1/(4-d)} does not exist for d = 4")
    if problem.p != problem.d - 2:
        raise ScalingUndefined("rescaling assumes the Gauss-law power p = d - 2")
    if not energy < 0:
        raise PositiveEnergy(f"energy must be negative, got {energy}")
    alpha = 1.0  # mu q^2 / hbar^2
    return ScalingParams(
        alpha=alpha,
        rho_exponent=Fraction(1, 4 - problem.d),
        lambda_exponent=Fraction(3 - problem.d, 4 - problem.d),
        lambda_sq=-2.0 * energy,
    )
