"""Rb-87 D2 line data for the F=2 -> F'=1,2,3 transitions.

Dipole matrix elements are normalized so that the cycling transition
|F=2, m=2> <-> |F'=3, m'=3> has element exactly 1. Frequencies are in MHz
with the factor 2*pi stripped, and every frequency offset is referenced to
the F=2 -> F'=3 transition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping

from .angular import wigner3j, wigner6j

__all__ = [
    "GROUND_F",
    "EXCITED_F",
    "MF_VALUES",
    "Q_VALUES",
    "NUCLEAR_SPIN",
    "J_GROUND",
    "J_EXCITED",
    "DipoleTable",
    "LineConstants",
    "RB87_D2",
    "dipole_element",
    "build_dipole_table",
]

NUCLEAR_SPIN = Fraction(3, 2)
J_GROUND = Fraction(1, 2)
J_EXCITED = Fraction(3, 2)

GROUND_F = 2
EXCITED_F = (1, 2, 3)
MF_VALUES = tuple(range(-GROUND_F, GROUND_F + 1))
Q_VALUES = (-1, 0, 1)

# Steck, "Rubidium 87 D Line Data", excited-state hyperfine intervals (MHz)
_SPLIT_3_2 = 266.650
_SPLIT_2_1 = 156.947


def _raw_element(f_exc: int, m_f: int, q: int) -> float:
    # <F=2, m_F | mu | F', m_F + q> via Wigner-Eckart, up to the J-level reduced element
    f = GROUND_F
    angular = (-1) ** (f - m_f) * wigner3j(f, 1, f_exc, -m_f, -q, m_f + q)
    if angular == 0.0:
        return 0.0
    phase = (-1) ** int(f_exc + J_GROUND + 1 + NUCLEAR_SPIN)
    reduced = phase * math.sqrt((2 * f_exc + 1) * (2 * J_GROUND + 1)) * wigner6j(
        J_GROUND, J_EXCITED, 1, f_exc, f, NUCLEAR_SPIN
    )
    return angular * reduced


def _check_indices(f_exc: int, m_f: int, q: int) -> None:
    if f_exc not in EXCITED_F:
        raise ValueError(f"F' must be one of {EXCITED_F}, got {f_exc!r}")
    if m_f not in MF_VALUES:
        raise ValueError(f"m_F must be one of {MF_VALUES}, got {m_f!r}")
    if q not in Q_VALUES:
        raise ValueError(f"q must be one of {Q_VALUES}, got {q!r}")


@lru_cache(maxsize=None)
def dipole_element(f_exc: int, m_f: int, q: int) -> float:
    """Normalized dipole element ``<F=2, m_F| mu_q |F', m_F + q>``.

    Parameters
    ----------
    f_exc : int
        Excited hyperfine level F' in {1, 2, 3}.
    m_f : int
        Ground-state projection in {-2, ..., 2}.
    q : int
        Polarization index: -1, 0, +1 for sigma-, pi, sigma+.

    Returns
    -------
    float
        Element in units of the cycling element, which is exactly +1.
    """
    _check_indices(f_exc, m_f, q)
    if (f_exc, m_f, q) == (3, 2, 1):
        return 1.0
    return _raw_element(f_exc, m_f, q) / _raw_element(3, 2, 1)


@dataclass(frozen=True)
class DipoleTable:
    """All 45 normalized elements keyed by ``(F', m_F, q)``."""

    elements: Mapping[tuple[int, int, int], float]

    def __getitem__(self, key: tuple[int, int, int]) -> float:
        return self.elements[key]

    def __iter__(self) -> Iterator[tuple[int, int, int]]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def pi(self, f_exc: int, m_f: int) -> float:
        return self.elements[(f_exc, m_f, 0)]

    def line_strength(self, m_f: int) -> float:
        """Total squared element out of ``|F=2, m_F>`` summed over F' and q."""
        return sum(self.elements[(fe, m_f, q)] ** 2 for fe in EXCITED_F for q in Q_VALUES)

    def sum_rule_spread(self) -> float:
        strengths = [self.line_strength(m) for m in MF_VALUES]
        return max(strengths) - min(strengths)

    def filtered(self, keep) -> "DipoleTable":
        """Copy with every element for which ``keep(F', m_F, q)`` is false set to 0."""
        return DipoleTable({k: (v if keep(*k) else 0.0) for k, v in self.elements.items()})

    def to_dict(self) -> dict:
        return {f"{fe},{m},{q}": v for (fe, m, q), v in self.elements.items()}


def build_dipole_table() -> DipoleTable:
    elements = {
        (fe, m, q): dipole_element(fe, m, q)
        for fe in EXCITED_F
        for m in MF_VALUES
        for q in Q_VALUES
    }
    return DipoleTable(elements)


@dataclass(frozen=True)
class LineConstants:
    """Frequencies and rates of the line, in MHz (2*pi stripped).

    ``hyperfine_offsets[F']`` is omega_F' - omega_3, so the F'=3 entry is 0.
    ``kappa`` and ``gamma`` are the cavity-field and atomic-dipole decay rates.
    """

    hyperfine_offsets: Mapping[int, float] = field(
        default_factory=lambda: {1: -(_SPLIT_3_2 + _SPLIT_2_1), 2: -_SPLIT_3_2, 3: 0.0}
    )
    g_max: float = 9.2
    kappa: float = 2.6
    gamma: float = 3.0

    def __post_init__(self):
        offsets = {int(k): float(v) for k, v in self.hyperfine_offsets.items()}
        if sorted(offsets) != list(EXCITED_F):
            raise ValueError(f"hyperfine_offsets needs exactly the keys {EXCITED_F}")
        if offsets[3] != 0.0:
            raise ValueError("hyperfine_offsets[3] must be 0 (F'=3 is the reference)")
        if not offsets[1] < offsets[2] < offsets[3]:
            raise ValueError("hyperfine_offsets must increase strictly with F'")
        for name in ("g_max", "kappa", "gamma"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        object.__setattr__(self, "hyperfine_offsets", offsets)

    def to_dict(self) -> dict:
        return {
            "hyperfine_offsets": {str(k): v for k, v in self.hyperfine_offsets.items()},
            "g_max": self.g_max,
            "kappa": self.kappa,
            "gamma": self.gamma,
        }


RB87_D2 = LineConstants()
