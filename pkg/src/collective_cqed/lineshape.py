"""Weak-drive transmission spectra.

In the linear regime the intracavity field follows

    alpha ~ 1 / [ i(D_C - D_p) + kappa + sum_F' N gbar_F'^2 / (i(w_F' - D_p) + gamma) ]

and the transmitted intensity is reported as ``|kappa * alpha|^2``, i.e.
normalized to the resonantly driven empty cavity.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .atomic_data import EXCITED_F
from .reduced_model import ReducedSystem

__all__ = [
    "ProbeSweep",
    "SpectrumGrid",
    "cavity_response",
    "spectrum_sweep",
    "transmission_peaks",
]


def _monotone(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d grid")
    if arr.size > 1:
        d = np.diff(arr)
        if not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError(f"{name} must be strictly monotone")
    return arr


@dataclass(frozen=True)
class ProbeSweep:
    probe_detunings: np.ndarray
    # cancels in the normalized output; kept for bookkeeping only
    drive_amplitude: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "probe_detunings", _monotone(self.probe_detunings, "probe_detunings"))

    @classmethod
    def linspace(cls, start: float = -700.0, stop: float = 700.0, num: int = 281) -> "ProbeSweep":
        return cls(np.linspace(start, stop, num))


@dataclass(frozen=True)
class SpectrumGrid:
    cavity_detunings: np.ndarray
    probe_detunings: np.ndarray
    values: np.ndarray  # shape (len(cavity_detunings), len(probe_detunings))


def cavity_response(sys: ReducedSystem, probe_detuning):
    """Normalized transmission ``nbar / nbar_empty`` at one or many probe detunings."""
    dp = np.asarray(probe_detuning, dtype=float)
    denom = 1j * (sys.cavity_detuning - dp) + sys.kappa
    for f in EXCITED_F:
        g2 = sys.atom_number * sys.couplings.gbar_by_Fprime[f] ** 2
        if g2:
            denom = denom + g2 / (1j * (sys.atomic_offsets[f] - dp) + sys.gamma)
    out = np.abs(sys.kappa / denom) ** 2
    return float(out) if out.ndim == 0 else out


def spectrum_sweep(
    template: ReducedSystem,
    cavity_detunings: Sequence[float],
    sweep: ProbeSweep,
    atom_number: float | None = None,
    threshold: float | None = None,
    threads: int | None = None,
) -> SpectrumGrid:
    """Transmission map over (cavity detuning x probe detuning).

    Values below ``threshold`` are set to 0 when a threshold is given, which
    mimics a detector floor.
    """
    rows = _monotone(cavity_detunings, "cavity_detunings")
    base = template if atom_number is None else template.with_(atom_number=atom_number)
    probes = sweep.probe_detunings

    def row(dc: float) -> np.ndarray:
        return cavity_response(base.with_(cavity_detuning=float(dc)), probes)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = np.vstack(list(pool.map(row, rows)))
    else:
        values = np.vstack([row(dc) for dc in rows])
    if threshold is not None:
        values = np.where(values < threshold, 0.0, values)
    return SpectrumGrid(rows, probes, values)


def transmission_peaks(sys: ReducedSystem, probe_detunings: Sequence[float]) -> list[tuple[float, float]]:
    """Local maxima of the transmission along a probe grid.

    Each grid maximum is refined by a bounded scalar search of the continuous
    response between its two neighbours. Returns ``(position, height)`` pairs.
    """
    x = _monotone(probe_detunings, "probe_detunings")
    if x[0] > x[-1]:
        x = x[::-1]
    y = cavity_response(sys, x)
    y = np.atleast_1d(y)
    peaks = []
    for i in range(1, len(x) - 1):
        if y[i] >= y[i - 1] and y[i] > y[i + 1]:
            res = minimize_scalar(
                lambda p: -cavity_response(sys, p),
                bounds=(x[i - 1], x[i + 1]),
                method="bounded",
                options={"xatol": 1e-9 * max(1.0, abs(x[i]))},
            )
            peaks.append((float(res.x), float(-res.fun)))
    return peaks
