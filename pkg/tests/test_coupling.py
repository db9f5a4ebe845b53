import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from collective_cqed.atomic_data import EXCITED_F, MF_VALUES
from collective_cqed.coupling import (
    EffectiveCouplings,
    MfDistribution,
    SpatialModel,
    TransverseModel,
    atom_resolved_couplings,
    axial_average,
    effective_couplings,
    transverse_rms_width,
    transverse_thermal_factor,
)


def test_uniform_axial_average():
    g = axial_average(SpatialModel(9.2))
    assert g == pytest.approx(9.2 / math.sqrt(2), rel=1e-12)
    assert round(g, 1) == 6.5


def test_antinode_and_node():
    assert axial_average(SpatialModel(9.2, axial=[0.0])) == pytest.approx(9.2, rel=1e-15)
    assert axial_average(SpatialModel(9.2, axial=[math.pi / 2])) == pytest.approx(0.0, abs=1e-14)


def test_dense_fixed_positions_approach_uniform():
    phases = np.linspace(0, 2 * np.pi, 4001)[:-1]
    assert axial_average(SpatialModel(9.2, axial=phases)) == pytest.approx(9.2 / math.sqrt(2), rel=1e-12)


def test_spatial_validation():
    with pytest.raises(ValueError):
        SpatialModel(9.2, axial=[])
    with pytest.raises(ValueError):
        SpatialModel(9.2, axial="gaussian")
    with pytest.raises(ValueError):
        SpatialModel(0.0)


@pytest.mark.parametrize("kw", [dict(waist=25, trap_depth=330, temperature=330),
                                dict(waist=25, trap_depth=330, temperature=400),
                                dict(waist=0, trap_depth=330, temperature=33),
                                dict(waist=25, trap_depth=330, temperature=0)])
def test_transverse_validation(kw):
    with pytest.raises(ValueError):
        TransverseModel(**kw)


def test_no_transverse_model_gives_unity():
    assert transverse_thermal_factor(SpatialModel()) == 1.0


def test_cold_limit():
    assert transverse_thermal_factor(TransverseModel(25, 330, 1e-6)) == pytest.approx(1.0, abs=1e-8)


def _cartesian_oracle(w, depth, temp):
    # independent route: 2-d Cartesian quadrature of the Gaussian density against exp(-2 rho^2/w^2)
    sigma2 = w * w * temp / (4 * depth)
    dens = lambda y, x: math.exp(-(x * x + y * y) / (2 * sigma2))
    env2 = lambda y, x: dens(y, x) * math.exp(-2 * (x * x + y * y) / (w * w))
    lim = 12 * math.sqrt(sigma2)
    num, _ = integrate.dblquad(env2, -lim, lim, -lim, lim, epsabs=0, epsrel=1e-11)
    den, _ = integrate.dblquad(dens, -lim, lim, -lim, lim, epsabs=0, epsrel=1e-11)
    return math.sqrt(num / den)


@pytest.mark.parametrize("temp", [33.0, 66.0, 150.0])
def test_thermal_factor_against_independent_quadrature(temp):
    assert transverse_thermal_factor(TransverseModel(25, 330, temp)) == pytest.approx(
        _cartesian_oracle(25, 330, temp), rel=1e-8
    )


def test_thermal_factor_closed_form_at_66uK():
    # Gaussian density against a Gaussian envelope: <env^2> = 1 / (1 + T/U0)
    assert transverse_thermal_factor(TransverseModel(25, 330, 66)) == pytest.approx(math.sqrt(1 / 1.2), rel=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.floats(1, 100), st.floats(10, 1000), st.floats(0.001, 0.99))
def test_thermal_factor_closed_form(w, depth, ratio):
    f = transverse_thermal_factor(TransverseModel(w, depth, ratio * depth))
    assert f == pytest.approx(math.sqrt(1 / (1 + ratio)), rel=1e-9)
    assert 0 < f <= 1


def test_rms_width():
    assert transverse_rms_width(TransverseModel(25, 330, 33)) == pytest.approx(25 * math.sqrt(0.025), rel=1e-14)


def test_mf_distribution_validation():
    with pytest.raises(ValueError):
        MfDistribution({m: 0.18 for m in MF_VALUES})
    with pytest.raises(ValueError):
        MfDistribution({3: 1.0})
    with pytest.raises(ValueError):
        MfDistribution({0: 1.5, 1: -0.5})
    assert MfDistribution.delta(1).p == {-2: 0.0, -1: 0.0, 0: 0.0, 1: 1.0, 2: 0.0}


def test_equal_population_couplings(table):
    ec = effective_couplings(table, MfDistribution.equal(), SpatialModel(9.2))
    gbar = 9.2 / math.sqrt(2)
    assert ec.gbar == pytest.approx(gbar, rel=1e-12)
    for fe in EXCITED_F:
        direct = gbar * math.sqrt(sum(table[(fe, m, 0)] ** 2 for m in MF_VALUES) / 5)
        assert ec.gbar_by_Fprime[fe] == pytest.approx(direct, rel=1e-12)
    assert ec.gbar_by_Fprime[3] ** 2 / gbar**2 == pytest.approx(7 / 15, rel=1e-12)


def test_delta_distribution(table):
    ec = effective_couplings(table, MfDistribution.delta(0), SpatialModel(9.2))
    assert ec.gbar_by_Fprime[3] == pytest.approx(9.2 / math.sqrt(2) * abs(table[(3, 0, 0)]), rel=1e-12)
    assert ec.gbar_by_Fprime[2] == 0.0


populations = st.lists(st.floats(0, 1), min_size=5, max_size=5).filter(lambda p: sum(p) > 1e-3).map(
    lambda p: MfDistribution({m: v / math.fsum(p) for m, v in zip(MF_VALUES, p)})
)




@settings(max_examples=80, deadline=None)
@given(populations, st.floats(0.01, 100))
def test_scaling_and_reflection(table, dist, s):
    sp = SpatialModel(9.2)
    base = effective_couplings(table, dist, sp)
    scaled = effective_couplings(table, dist, sp.scaled(s))
    assert scaled.gbar == pytest.approx(s * base.gbar, rel=1e-12)
    refl = effective_couplings(table, dist.reflected(), sp)
    for fe in EXCITED_F:
        assert scaled.gbar_by_Fprime[fe] == pytest.approx(s * base.gbar_by_Fprime[fe], rel=1e-12, abs=1e-300)
        assert refl.gbar_by_Fprime[fe] == pytest.approx(base.gbar_by_Fprime[fe], rel=1e-12, abs=1e-15)
        assert 0 <= base.gbar_by_Fprime[fe] <= base.gbar


@settings(max_examples=80, deadline=None)
@given(populations)
def test_total_strength_bound(table, dist):
    ec = effective_couplings(table, dist, SpatialModel(9.2))
    strength = {m: sum(table.pi(fe, m) ** 2 for fe in EXCITED_F) for m in MF_VALUES}
    total = sum(v**2 for v in ec.gbar_by_Fprime.values())
    assert total <= ec.gbar**2 * max(strength.values()) * (1 + 1e-12)


def test_total_strength_bound_equality(table):
    strength = {m: sum(table.pi(fe, m) ** 2 for fe in EXCITED_F) for m in MF_VALUES}
    m_best = max(strength, key=strength.get)
    ec = effective_couplings(table, MfDistribution.delta(m_best), SpatialModel(9.2))
    total = sum(v**2 for v in ec.gbar_by_Fprime.values())
    assert total == pytest.approx(ec.gbar**2 * strength[m_best], rel=1e-12)


def test_atom_resolved_matches_factorized(table):
    gbar = 9.2 / math.sqrt(2)
    atoms = [(m, gbar * np.exp(0.3j * k)) for k, m in enumerate(MF_VALUES)]
    a = atom_resolved_couplings(table, atoms)
    b = effective_couplings(table, MfDistribution.equal(), SpatialModel(9.2))
    assert a.gbar == pytest.approx(b.gbar, rel=1e-12)
    for fe in EXCITED_F:
        assert a.gbar_by_Fprime[fe] == pytest.approx(b.gbar_by_Fprime[fe], rel=1e-12)


def test_effective_couplings_validation():
    with pytest.raises(ValueError):
        EffectiveCouplings(1.0, {1: 0.1, 2: 0.1})
    with pytest.raises(ValueError):
        EffectiveCouplings(1.0, {1: -0.1, 2: 0.1, 3: 0.1})
