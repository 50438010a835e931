"""Collapse-model parameters, physical constants and the dimensionless unit system.

Constants are CODATA 2018 values as shipped by :mod:`scipy.constants`:

* ``HBAR`` = 1.054571817e-34 J s
* ``K_B`` = 1.380649e-23 J/K
* ``M0`` = 1.66053906660e-27 kg (atomic mass unit, the conventional nucleon
  reference mass of CSL)

Simulations run in units where hbar = 1. A :class:`UnitScale` maps SI values
into those units and back; only the boundary of the program sees SI.
"""
from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType

from scipy import constants as _sc

HBAR: float = _sc.hbar
K_B: float = _sc.k
M0: float = _sc.physical_constants["atomic mass constant"][0]
M_HYDROGEN: float = 1.00782503223 * M0
YEAR: float = 365.25 * 86400.0

CONSTANTS = MappingProxyType({"hbar": HBAR, "k_B": K_B, "m0": M0})


def _check_positive(**values):
    for name, value in values.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class CollapseParams:
    """Collapse rate ``lam`` (1/s) and noise correlation length ``r_c`` (m)."""

    lam: float
    r_c: float

    def __post_init__(self):
        _check_positive(lam=self.lam, r_c=self.r_c)


@dataclass(frozen=True)
class ParticleSpec:
    mass: float
    m0: float = M0

    def __post_init__(self):
        _check_positive(mass=self.mass, m0=self.m0)

    @property
    def mass_ratio(self) -> float:
        return self.mass / self.m0


class InvalidScaleError(ValueError):
    pass


@dataclass(frozen=True)
class UnitScale:
    """SI size of the internal length, time and mass units.

    ``hbar`` gives the value of the reduced Planck constant in these units; the
    engines assume it equals one, which :meth:`natural` guarantees.
    """

    length_unit: float = 1.0
    time_unit: float = 1.0
    mass_unit: float = 1.0

    def __post_init__(self):
        for name in ("length_unit", "time_unit", "mass_unit"):
            value = getattr(self, name)
            if not value > 0:
                raise InvalidScaleError(f"{name} must be positive, got {value!r}")

    @classmethod
    def natural(cls, length_unit: float = 1e-7, mass_unit: float = M0) -> "UnitScale":
        """Scale with hbar = 1: the time unit is ``mass * length**2 / hbar``."""
        return cls(length_unit, mass_unit * length_unit**2 / HBAR, mass_unit)

    @property
    def energy_unit(self) -> float:
        return self.mass_unit * self.length_unit**2 / self.time_unit**2

    @property
    def action_unit(self) -> float:
        return self.energy_unit * self.time_unit

    @property
    def hbar(self) -> float:
        return HBAR / self.action_unit


def to_dimensionless(params: CollapseParams, scale: UnitScale) -> CollapseParams:
    return CollapseParams(params.lam * scale.time_unit, params.r_c / scale.length_unit)


def from_dimensionless(params: CollapseParams, scale: UnitScale) -> CollapseParams:
    return CollapseParams(params.lam / scale.time_unit, params.r_c * scale.length_unit)


@dataclass(frozen=True)
class CanonicalPoints:
    grw: CollapseParams
    adler_7: CollapseParams
    adler_6: CollapseParams

    def items(self):
        return (("grw", self.grw), ("adler_7", self.adler_7), ("adler_6", self.adler_6))


# Adler's values carry two decades of uncertainty either way; central values only.
_CANONICAL = CanonicalPoints(
    grw=CollapseParams(1e-16, 1e-7),
    adler_7=CollapseParams(1e-8, 1e-7),
    adler_6=CollapseParams(1e-6, 1e-6),
)


def canonical_points() -> CanonicalPoints:
    """The GRW and Adler theoretical parameter proposals (SI)."""
    return _CANONICAL
