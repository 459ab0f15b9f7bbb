"""Units and the validated atom configuration shared by every module."""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DimensionTooLow, NegativeL, NonPositiveCharge
from .potentials import PotentialSpec, coupling_and_power


@dataclass(frozen=True)
class Constants:
    """Reduced units: hbar = mu = q = 1. No other system is supported."""

    hbar: float = 1.0
    mass: float = 1.0
    charge: float = 1.0


REDUCED = Constants()


@dataclass(frozen=True)
class AtomConfig:
    d: int
    Z: float
    l: int
    potential: PotentialSpec = field(default_factory=PotentialSpec)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 3:
            raise DimensionTooLow(f"d must be an integer >= 3, got {self.d}")
        if not self.Z > 0:
            raise NonPositiveCharge(f"Z must be positive, got {self.Z}")
        if int(self.l) != self.l or self.l < 0:
            raise NegativeL(f"l must be a non-negative integer, got {self.l}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "l", int(self.l))
        object.__setattr__(self, "Z", float(self.Z))

    @property
    def kappa(self) -> float:
        return coupling_and_power(self.potential, self.d, self.Z)[0]

    @property
    def power(self) -> float:
        return coupling_and_power(self.potential, self.d, self.Z)[1]


def make_atom_config(d: int, Z: float, l: int, potential: PotentialSpec | None = None) -> AtomConfig:
    return AtomConfig(d, Z, l, potential if potential is not None else PotentialSpec())
