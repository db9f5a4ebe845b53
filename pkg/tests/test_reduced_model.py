import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from collective_cqed.atomic_data import EXCITED_F, RB87_D2
from collective_cqed.coupling import EffectiveCouplings, MfDistribution, SpatialModel, effective_couplings
from collective_cqed.reduced_model import (
    ReducedSystem,
    build_hamiltonian,
    eigen_map,
    eigenmodes,
    splitting_size,
)

OFFSETS = RB87_D2.hyperfine_offsets


def only(fe, g):
    return EffectiveCouplings(g, {f: (g if f == fe else 0.0) for f in EXCITED_F})


@pytest.fixture(scope="module")
def fig_couplings(table):
    # gbar = 6.5 MHz with equal m_F populations
    return effective_couplings(table, MfDistribution.equal(), SpatialModel(6.5 * math.sqrt(2)))


def _char_roots(sys):
    # det(H - x) = (D_C - x) prod_F (w_F - x) - sum_F G_F^2 prod_{F''!=F} (w_F'' - x)
    P = np.polynomial.Polynomial
    lin = {f: P([sys.atomic_offsets[f], -1]) for f in EXCITED_F}
    poly = P([sys.cavity_detuning, -1])
    for f in EXCITED_F:
        poly = poly * lin[f]
    for f in EXCITED_F:
        term = P([sys.collective_coupling(f) ** 2])
        for o in EXCITED_F:
            if o != f:
                term = term * lin[o]
        poly = poly - term
    return np.sort(poly.roots().real)


def test_validation(fig_couplings):
    with pytest.raises(ValueError):
        ReducedSystem(-1, 0, fig_couplings)
    with pytest.raises(ValueError):
        ReducedSystem(1, 0, fig_couplings, kappa=0)
    with pytest.raises(ValueError):
        ReducedSystem(1, 0, fig_couplings, atomic_offsets={1: 0.0, 3: 0.0})


def test_empty_cavity(fig_couplings):
    sys = ReducedSystem(0, -50.0, fig_couplings)
    h = build_hamiltonian(sys)
    assert np.count_nonzero(h - np.diag(np.diag(h))) == 0
    modes = eigenmodes(sys)
    assert sorted(m.energy for m in modes) == sorted([-50.0, *OFFSETS.values()])
    weights = {m.energy: m.photonic_weight for m in modes}
    assert weights[-50.0] == pytest.approx(1.0, abs=1e-15)
    assert sum(weights.values()) == pytest.approx(1.0, abs=1e-15)


def test_single_resonant_block():
    modes = eigenmodes(ReducedSystem(1, 0.0, only(3, 4.0)))
    resonant = [m for m in modes if m.photonic_weight > 0]
    assert [m.energy for m in resonant] == pytest.approx([-4.0, 4.0], abs=1e-12)
    assert [m.photonic_weight for m in resonant] == pytest.approx([0.5, 0.5], abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1e5), st.floats(-800, 300))
def test_trace_completeness_residual(fig_couplings, n, dc):
    sys = ReducedSystem(n, dc, fig_couplings)
    h = build_hamiltonian(sys)
    modes = eigenmodes(sys)
    assert sum(m.energy for m in modes) == pytest.approx(dc + sum(OFFSETS.values()), abs=1e-9)
    assert math.fsum(m.photonic_weight for m in modes) == pytest.approx(1.0, abs=1e-12)
    for m in modes:
        assert np.linalg.norm(h @ m.state - m.energy * m.state) <= 1e-9 * np.linalg.norm(h)
    assert [m.energy for m in modes] == sorted(m.energy for m in modes)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.5, 1e4), st.floats(-600, 200), st.tuples(*[st.floats(-math.pi, math.pi)] * 3))
def test_gauge_invariance(fig_couplings, n, dc, phases):
    sys = ReducedSystem(n, dc, fig_couplings)
    real = eigenmodes(sys)
    cplx = eigenmodes(sys, phases=dict(zip(EXCITED_F, phases)))
    assert [m.energy for m in cplx] == pytest.approx([m.energy for m in real], abs=1e-9)
    assert [m.photonic_weight for m in cplx] == pytest.approx([m.photonic_weight for m in real], abs=1e-9)


def test_against_characteristic_polynomial(fig_couplings):
    for n in (1, 10, 1000):
        for dc in (-400.0, -100.0, 0.0):
            sys = ReducedSystem(n, dc, fig_couplings)
            assert [m.energy for m in eigenmodes(sys)] == pytest.approx(_char_roots(sys), abs=1e-8)


@pytest.mark.parametrize("n", [1, 4, 100, 1e4])
def test_isolated_splitting(n):
    sys = ReducedSystem(n, 0.0, only(3, 6.5))
    assert splitting_size(sys, 3) == pytest.approx(2 * math.sqrt(n) * 6.5, rel=1e-9)
    assert splitting_size(sys, 3) / splitting_size(sys.with_(atom_number=1), 3) == pytest.approx(math.sqrt(n), rel=1e-9)


def test_splitting_examples():
    assert splitting_size(ReducedSystem(100, 0.0, only(3, 6.5)), 3) == pytest.approx(130.0, rel=1e-12)
    sys = ReducedSystem(1, OFFSETS[2], only(2, 3.0))
    assert splitting_size(sys, 2) == pytest.approx(6.0, rel=1e-12)


def test_splitting_all_couplings_active(fig_couplings):
    sys = ReducedSystem(1, 0.0, fig_couplings)
    roots = _char_roots(sys)
    near = sorted(roots, key=abs)[:2]
    assert splitting_size(sys, 3) == pytest.approx(abs(near[1] - near[0]), rel=1e-10)


def test_splitting_rejects_overlapping_crossings(fig_couplings):
    with pytest.raises(ValueError):
        splitting_size(ReducedSystem(1000, 0.0, fig_couplings), 3)
    with pytest.raises(ValueError):
        splitting_size(ReducedSystem(1, 0.0, fig_couplings), 4)


@pytest.mark.parametrize("n", [1, 100, 1000])
@pytest.mark.parametrize("sign", [-1, 1])
def test_dispersive_shift(fig_couplings, n, sign):
    dc = sign * 50 * math.sqrt(n) * fig_couplings.gbar
    sys = ReducedSystem(n, dc, fig_couplings)
    cav = max(eigenmodes(sys), key=lambda m: m.photonic_weight)
    predicted = sum(n * fig_couplings.gbar_by_Fprime[f] ** 2 / (dc - OFFSETS[f]) for f in EXCITED_F)
    assert cav.energy - dc == pytest.approx(predicted, rel=1e-2)
    assert cav.photonic_weight > 0.99


def test_eigen_map_continuity_and_threads(fig_couplings):
    tmpl = ReducedSystem(500, 0.0, fig_couplings)
    grid = np.linspace(-700, 300, 2001)
    serial = eigen_map(tmpl, grid)
    threaded = eigen_map(tmpl, grid, threads=4)
    assert [[m.energy for m in ms] for _, ms in serial] == [[m.energy for m in ms] for _, ms in threaded]
    energies = np.array([[m.energy for m in ms] for _, ms in serial])
    assert np.max(np.abs(np.diff(energies, axis=0))) <= grid[1] - grid[0] + 1e-9
    for _, ms in serial:
        assert math.fsum(m.photonic_weight for m in ms) == pytest.approx(1.0, abs=1e-12)


def test_eigen_map_far_detuned(fig_couplings):
    (dc, ms), = eigen_map(ReducedSystem(10, 0.0, fig_couplings), [-50000.0])
    cav = max(ms, key=lambda m: m.photonic_weight)
    assert cav.photonic_weight > 0.9999
    assert cav.energy == pytest.approx(dc, rel=1e-4)


def test_eigen_map_rejects_bad_grid(fig_couplings):
    tmpl = ReducedSystem(1, 0.0, fig_couplings)
    with pytest.raises(ValueError):
        eigen_map(tmpl, [])
    with pytest.raises(ValueError):
        eigen_map(tmpl, [0.0, 1.0, 0.5])
