"""Effective single-atom couplings.

The collective coupling of transition F' is ``sqrt(N) * gbar_F'``, where
``gbar_F'`` averages the squared coupling both over atom positions in the
cavity mode (giving ``gbar``) and over the m_F populations through the
pi-polarized dipole elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np
from scipy import integrate

from .atomic_data import EXCITED_F, MF_VALUES, DipoleTable

__all__ = [
    "TransverseModel",
    "SpatialModel",
    "MfDistribution",
    "EffectiveCouplings",
    "axial_average",
    "transverse_thermal_factor",
    "transverse_rms_width",
    "effective_couplings",
    "atom_resolved_couplings",
]


@dataclass(frozen=True)
class TransverseModel:
    """Thermal cloud in the transverse plane of the cavity mode.

    ``waist`` is in micrometres and is used both for the coupling envelope
    ``exp(-rho**2 / waist**2)`` and for the Gaussian trap beam. Trap depth and
    temperature are in microkelvin.
    """

    waist: float
    trap_depth: float
    temperature: float

    def __post_init__(self):
        if not self.waist > 0:
            raise ValueError("waist must be positive")
        if not 0 < self.temperature < self.trap_depth:
            raise ValueError(
                "need 0 < temperature < trap_depth for the harmonic trap approximation"
            )


Axial = Union[str, Sequence[float]]


@dataclass(frozen=True)
class SpatialModel:
    """Where the atoms sit relative to the standing-wave cavity mode.

    ``axial`` is either ``"uniform"`` (atoms spread evenly over the standing
    wave, as for a trap lattice incommensurate with the mode) or a sequence of
    axial phases ``k*z`` in radians, one per atom.
    """

    g_max: float = 9.2
    axial: Axial = "uniform"
    transverse: TransverseModel | None = None

    def __post_init__(self):
        if not self.g_max > 0:
            raise ValueError("g_max must be positive")
        if isinstance(self.axial, str):
            if self.axial != "uniform":
                raise ValueError(f"unknown axial distribution {self.axial!r}")
        else:
            phases = tuple(float(x) for x in self.axial)
            if not phases:
                raise ValueError("fixed axial positions must not be empty")
            object.__setattr__(self, "axial", phases)

    def scaled(self, factor: float) -> "SpatialModel":
        return SpatialModel(self.g_max * factor, self.axial, self.transverse)


def axial_average(model: SpatialModel) -> float:
    """RMS coupling over the axial distribution, ``sqrt(<|g_max cos kz|^2>)``."""
    if model.axial == "uniform":
        return model.g_max / math.sqrt(2.0)
    cos2 = np.cos(np.asarray(model.axial)) ** 2
    return model.g_max * math.sqrt(float(np.mean(cos2)))


def transverse_rms_width(model: TransverseModel) -> float:
    """Per-axis RMS width of the thermal cloud in micrometres.

    Harmonic expansion of the Gaussian trap ``-U0 exp(-2 rho^2 / w^2)`` gives
    a Gaussian density with variance ``w^2 T / (4 U0)`` along each axis.
    """
    return model.waist * math.sqrt(model.temperature / (4.0 * model.trap_depth))


def transverse_thermal_factor(model: SpatialModel | TransverseModel) -> float:
    """Reduction of the RMS coupling from the transverse thermal spread.

    Integrates the squared coupling envelope ``exp(-2 rho^2 / w^2)`` against
    the harmonic-trap Boltzmann density and returns the square root of the
    average. A model without transverse data gives 1.
    """
    tm = model.transverse if isinstance(model, SpatialModel) else model
    if tm is None:
        return 1.0
    ratio = tm.temperature / tm.trap_depth
    # u = rho / (w sqrt(T/U0)) keeps the cloud at unit scale for any T/U0;
    # density exp(-2 u^2) on the plane (weight u du), envelope^2 exp(-2 ratio u^2)
    density = lambda u: u * math.exp(-2.0 * u * u)
    weighted = lambda u: density(u) * math.exp(-2.0 * ratio * u * u)
    norm, _ = integrate.quad(density, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    num, _ = integrate.quad(weighted, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    return math.sqrt(num / norm)


@dataclass(frozen=True)
class MfDistribution:
    """Populations of the five ``|F=2, m_F>`` ground sublevels."""

    p: Mapping[int, float] = field(default_factory=lambda: {m: 0.2 for m in MF_VALUES})

    def __post_init__(self):
        p = {int(m): float(v) for m, v in self.p.items()}
        unknown = set(p) - set(MF_VALUES)
        if unknown:
            raise ValueError(f"m_F values out of range: {sorted(unknown)}")
        p = {m: p.get(m, 0.0) for m in MF_VALUES}
        if any(v < 0 for v in p.values()):
            raise ValueError("populations must be non-negative")
        total = math.fsum(p.values())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"populations must sum to 1, got {total!r}")
        object.__setattr__(self, "p", p)

    @classmethod
    def equal(cls) -> "MfDistribution":
        return cls({m: 1.0 / len(MF_VALUES) for m in MF_VALUES})

    @classmethod
    def delta(cls, m_f: int) -> "MfDistribution":
        return cls({m_f: 1.0})

    def reflected(self) -> "MfDistribution":
        return MfDistribution({-m: v for m, v in self.p.items()})


@dataclass(frozen=True)
class EffectiveCouplings:
    """``gbar`` and the per-transition ``gbar_F'`` in MHz."""

    gbar: float
    gbar_by_Fprime: Mapping[int, float]

    def __post_init__(self):
        g = {int(k): float(v) for k, v in self.gbar_by_Fprime.items()}
        if sorted(g) != list(EXCITED_F):
            raise ValueError(f"gbar_by_Fprime needs exactly the keys {EXCITED_F}")
        if any(v < 0 for v in g.values()) or self.gbar < 0:
            raise ValueError("couplings must be non-negative")
        object.__setattr__(self, "gbar_by_Fprime", g)

    def to_dict(self) -> dict:
        return {"gbar": self.gbar, "gbar_by_Fprime": {str(k): v for k, v in self.gbar_by_Fprime.items()}}


def effective_couplings(
    table: DipoleTable, dist: MfDistribution, spatial: SpatialModel
) -> EffectiveCouplings:
    """Spatially and m_F-averaged couplings for a pi-polarized probe.

    ``gbar = axial_average * transverse_thermal_factor`` and
    ``gbar_F' = gbar * sqrt(sum_m p(m) |<2,m|mu_0|F',m>|^2)``.
    """
    gbar = axial_average(spatial) * transverse_thermal_factor(spatial)
    by_f = {
        fe: gbar * math.sqrt(math.fsum(dist.p[m] * table.pi(fe, m) ** 2 for m in MF_VALUES))
        for fe in EXCITED_F
    }
    return EffectiveCouplings(gbar, by_f)


def atom_resolved_couplings(
    table: DipoleTable, atoms: Iterable[tuple[int, complex]]
) -> EffectiveCouplings:
    """Couplings from an explicit list of ``(m_F, g_i)`` pairs.

    This is the un-factorized average ``gbar_F' = sqrt(mean_i |<2,m_i|mu_0|F',m_i> g_i|^2)``
    together with ``gbar = sqrt(mean_i |g_i|^2)``.
    """
    atoms = list(atoms)
    if not atoms:
        raise ValueError("need at least one atom")
    n = len(atoms)
    gbar = math.sqrt(math.fsum(abs(g) ** 2 for _, g in atoms) / n)
    by_f = {
        fe: math.sqrt(math.fsum(abs(table.pi(fe, m) * g) ** 2 for m, g in atoms) / n)
        for fe in EXCITED_F
    }
    return EffectiveCouplings(gbar, by_f)
