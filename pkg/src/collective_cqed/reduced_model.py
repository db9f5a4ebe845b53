"""Single-excitation manifold of the collective-spin model.

Basis ordering is (photon, F'=1, F'=2, F'=3). The photon couples to the
symmetric excitation of each transition with strength ``sqrt(N) * gbar_F'``;
all energies are detunings in MHz from the F=2 -> F'=3 transition.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .atomic_data import EXCITED_F, RB87_D2, LineConstants
from .coupling import EffectiveCouplings
from .linalg import hermitian_eigh, jacobi_eigh

__all__ = [
    "ReducedSystem",
    "EigenMode",
    "build_hamiltonian",
    "eigenmodes",
    "splitting_size",
    "eigen_map",
]


@dataclass(frozen=True)
class ReducedSystem:
    atom_number: float
    cavity_detuning: float
    couplings: EffectiveCouplings
    atomic_offsets: Mapping[int, float] = field(default_factory=lambda: dict(RB87_D2.hyperfine_offsets))
    kappa: float = RB87_D2.kappa
    gamma: float = RB87_D2.gamma

    def __post_init__(self):
        if not self.atom_number >= 0:
            raise ValueError("atom_number must be >= 0")
        if not (self.kappa > 0 and self.gamma > 0):
            raise ValueError("kappa and gamma must be positive")
        offsets = {int(k): float(v) for k, v in self.atomic_offsets.items()}
        if sorted(offsets) != list(EXCITED_F):
            raise ValueError(f"atomic_offsets needs exactly the keys {EXCITED_F}")
        object.__setattr__(self, "atomic_offsets", offsets)

    @classmethod
    def from_line(
        cls,
        line: LineConstants,
        couplings: EffectiveCouplings,
        atom_number: float,
        cavity_detuning: float = 0.0,
    ) -> "ReducedSystem":
        return cls(atom_number, cavity_detuning, couplings, line.hyperfine_offsets, line.kappa, line.gamma)

    def with_(self, **changes) -> "ReducedSystem":
        return replace(self, **changes)

    def collective_coupling(self, f_exc: int) -> float:
        return math.sqrt(self.atom_number) * self.couplings.gbar_by_Fprime[f_exc]


@dataclass(frozen=True)
class EigenMode:
    energy: float
    photonic_weight: float
    state: np.ndarray = field(default=None, compare=False, repr=False)


def build_hamiltonian(sys: ReducedSystem, phases: Mapping[int, float] | None = None) -> np.ndarray:
    """4x4 Hamiltonian in MHz.

    With ``phases`` given, coupling F' is multiplied by ``exp(i*phases[F'])``
    and a complex Hermitian matrix is returned; the spectrum and photonic
    weights do not depend on these phases.
    """
    diag = [sys.cavity_detuning] + [sys.atomic_offsets[f] for f in EXCITED_F]
    if phases is None:
        h = np.diag(np.array(diag, dtype=float))
    else:
        h = np.diag(np.array(diag, dtype=complex))
    for k, f in enumerate(EXCITED_F, start=1):
        g = sys.collective_coupling(f)
        if phases is not None:
            g = g * np.exp(1j * phases.get(f, 0.0))
        h[0, k] = g
        h[k, 0] = np.conj(g)
    return h


def eigenmodes(sys: ReducedSystem, phases: Mapping[int, float] | None = None) -> list[EigenMode]:
    """Eigenmodes sorted by energy, exact ties by descending photonic weight."""
    h = build_hamiltonian(sys, phases)
    if phases is None:
        w, v = jacobi_eigh(h)
    else:
        w, v = hermitian_eigh(h)
    weights = np.abs(v[0, :]) ** 2
    modes = [EigenMode(float(w[k]), float(weights[k]), v[:, k]) for k in range(len(w))]
    modes.sort(key=lambda m: (m.energy, -m.photonic_weight))
    return modes


def splitting_size(sys: ReducedSystem, f_exc: int) -> float:
    """Gap of the avoided crossing between the cavity and transition ``f_exc``.

    The two eigenmodes with the largest weight on {photon, F'} are taken as
    the split pair. Raises ``ValueError`` unless every other coupled
    transition lies at least ten splittings away.
    """
    if f_exc not in EXCITED_F:
        raise ValueError(f"F' must be one of {EXCITED_F}")
    split = 2.0 * sys.collective_coupling(f_exc)
    for other in EXCITED_F:
        if other == f_exc or sys.collective_coupling(other) == 0.0:
            continue
        if abs(sys.atomic_offsets[other] - sys.atomic_offsets[f_exc]) < 10.0 * split:
            raise ValueError(
                f"crossing with F'={f_exc} is not isolated from F'={other} "
                f"(needs separation >= 10 x {split:.4g} MHz)"
            )
    modes = eigenmodes(sys)
    k = EXCITED_F.index(f_exc) + 1
    overlap = [abs(m.state[0]) ** 2 + abs(m.state[k]) ** 2 for m in modes]
    a, b = sorted(np.argsort(overlap)[-2:])
    return abs(modes[b].energy - modes[a].energy)


def eigen_map(
    template: ReducedSystem,
    cavity_detunings: Sequence[float],
    atom_number: float | None = None,
    threads: int | None = None,
) -> list[tuple[float, list[EigenMode]]]:
    """Eigenmodes at every cavity detuning of a monotone grid.

    Output order follows the grid regardless of ``threads``.
    """
    grid = [float(x) for x in cavity_detunings]
    if not grid:
        raise ValueError("cavity detuning grid is empty")
    diffs = np.diff(grid)
    if len(grid) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise ValueError("cavity detuning grid must be strictly monotone")
    base = template if atom_number is None else template.with_(atom_number=atom_number)

    def at(dc: float):
        return dc, eigenmodes(base.with_(cavity_detuning=dc))

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(at, grid))
    return [at(dc) for dc in grid]
