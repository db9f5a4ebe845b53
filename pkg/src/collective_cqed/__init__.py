"""Multilevel collective strong coupling of atoms to an optical cavity.

Single-excitation eigenmodes and weak-drive transmission spectra for an
ensemble of Rb-87 atoms on the D2 line (F=2 -> F'=1,2,3) coupled to one cavity
mode, plus a brute-force small-N oracle for the full two-mode model.
"""

from .angular import clebsch_gordan, wigner3j, wigner6j
from .atomic_data import RB87_D2, DipoleTable, LineConstants, build_dipole_table, dipole_element
from .config import ConfigError, RunConfig, load_config, parse_config, serialize_config
from .coupling import (
    EffectiveCouplings,
    MfDistribution,
    SpatialModel,
    TransverseModel,
    atom_resolved_couplings,
    axial_average,
    effective_couplings,
    transverse_thermal_factor,
)
from .full_model import (
    AtomConfiguration,
    compare_reduced,
    dicke_matrix_elements,
    enumerate_basis,
    build_full_hamiltonian,
    full_eigenmodes,
    verification_battery,
)
from .linalg import hermitian_eigh, jacobi_eigh
from .lineshape import ProbeSweep, SpectrumGrid, cavity_response, spectrum_sweep, transmission_peaks
from .reduced_model import EigenMode, ReducedSystem, build_hamiltonian, eigen_map, eigenmodes, splitting_size

__version__ = "0.1.0"
