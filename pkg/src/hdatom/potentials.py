"""Attractive power-law potentials for a one-electron atom in d dimensions.

Everything downstream sees a single pair ``(kappa, p)`` describing
``U(r) = -kappa / r**p``. Unit conventions are settled here and nowhere else.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import ConfigError, DimensionTooLow, NonPositiveRadius

if TYPE_CHECKING:
    from .core import AtomConfig


class PotentialKind(str, enum.Enum):
    GAUSS_LAW = "GaussLaw"
    BRANE_WORLD = "BraneWorld"
    EXPLICIT_POWER = "ExplicitPower"


@dataclass(frozen=True)
class PotentialSpec:
    """Which potential to use, plus optional overrides.

    ``GaussLaw`` uses flux conservation in d dimensions (p = d - 2);
    ``BraneWorld`` keeps the 3-d falloff p = 1 in every dimension;
    ``ExplicitPower`` takes both ``kappa`` and ``p`` from the caller.
    """

    kind: PotentialKind = PotentialKind.GAUSS_LAW
    coupling_override: float | None = None
    power_override: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", PotentialKind(self.kind))
        if self.coupling_override is not None and not self.coupling_override > 0:
            raise ConfigError(f"coupling override must be positive, got {self.coupling_override}")
        if self.power_override is not None:
            if self.kind is not PotentialKind.EXPLICIT_POWER:
                raise ConfigError("power_override is only meaningful for ExplicitPower")
            if not self.power_override > 0:
                raise ConfigError(f"power override must be positive, got {self.power_override}")
        if self.kind is PotentialKind.EXPLICIT_POWER and (
            self.coupling_override is None or self.power_override is None
        ):
            raise ConfigError("ExplicitPower needs both coupling_override and power_override")

    @classmethod
    def gauss_law(cls, coupling: float | None = None) -> PotentialSpec:
        return cls(PotentialKind.GAUSS_LAW, coupling_override=coupling)

    @classmethod
    def brane_world(cls, coupling: float | None = None) -> PotentialSpec:
        return cls(PotentialKind.BRANE_WORLD, coupling_override=coupling)

    @classmethod
    def explicit(cls, kappa: float, p: float) -> PotentialSpec:
        return cls(PotentialKind.EXPLICIT_POWER, coupling_override=kappa, power_override=p)


def gamma_half(m: int) -> float:
    """Gamma(m/2) for a positive integer m via Gamma(x+1) = x Gamma(x)."""
    if m < 1:
        raise ValueError("gamma_half needs m >= 1")
    if m % 2 == 0:
        value, x = 1.0, 1.0
    else:
        value, x = math.sqrt(math.pi), 0.5
    while 2 * x < m:
        value *= x
        x += 1.0
    return value


def eta(d: int) -> float:
    """Geometric prefactor Gamma(d/2) / (2 pi^{d/2} (d-2)) of the d-dim potential."""
    if d < 3:
        raise DimensionTooLow(f"d must be >= 3, got {d}")
    return gamma_half(d) / (2.0 * math.pi ** (d / 2) * (d - 2))


def coupling_and_power(spec: PotentialSpec, d: int, Z: float) -> tuple[float, float]:
    """Resolve a spec to ``(kappa, p)`` for dimension ``d`` and charge ``Z``.

    Reduced units (hbar = mu = q = 1) are assumed, so q**2 drops out.
    """
    if spec.kind is PotentialKind.GAUSS_LAW:
        p = float(d - 2)
        kappa = spec.coupling_override if spec.coupling_override is not None else eta(d) * Z
    elif spec.kind is PotentialKind.BRANE_WORLD:
        p = 1.0
        kappa = spec.coupling_override if spec.coupling_override is not None else float(Z)
    else:
        p = float(spec.power_override)
        kappa = float(spec.coupling_override)
    return float(kappa), p


def potential_energy(spec: PotentialSpec, config: AtomConfig, r: float) -> float:
    """Electron potential energy U(r) = -kappa / r**p."""
    if not r > 0:
        raise NonPositiveRadius(f"r must be positive, got {r}")
    kappa, p = coupling_and_power(spec, config.d, config.Z)
    return -kappa / r**p
