"""Hydrogen-like atoms in d spatial dimensions: reduction, series analysis,
the d = 4 Bessel regime, numerical spectra and collapse studies."""

__version__ = "0.1.0"

from .core import AtomConfig, Constants, REDUCED, make_atom_config
from .errors import ConfigError, HDAtomError, InvariantViolation, NumericalError
from .potentials import PotentialKind, PotentialSpec

__all__ = [
    "AtomConfig",
    "Constants",
    "REDUCED",
    "make_atom_config",
    "ConfigError",
    "HDAtomError",
    "InvariantViolation",
    "NumericalError",
    "PotentialKind",
    "PotentialSpec",
    "__version__",
]
