import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hdatom.errors import DomainError, QuadratureDivergent
from hdatom.variational import (
    CurvatureSign,
    Equilibrium,
    InfimumKind,
    Trial,
    classical_equilibrium,
    classify_infimum,
    cutoff_trial_energy,
    scaling_energy,
    trial_integrals,
)


def test_hydrogen_exponential_trial_is_exact():
    c = scaling_energy(3, Trial.EXPONENTIAL, 1.0, 0)
    assert c.A == pytest.approx(0.5, abs=1e-12)
    assert c.B == pytest.approx(1.0, abs=1e-12)
    inf = c.infimum_class
    assert inf.kind is InfimumKind.MINIMUM_AT
    assert inf.s_star == pytest.approx(2 * c.A / c.B, rel=1e-14)
    assert inf.energy == pytest.approx(-c.B**2 / (4 * c.A), rel=1e-14)
    assert abs(inf.energy + 0.5) < 1e-10


def test_gaussian_bound_above_exact():
    inf = scaling_energy(3, "Gaussian", 1.0, 0).infimum_class
    # the Gaussian family minimum is -4/(3 pi)
    assert inf.energy == pytest.approx(-4 / (3 * math.pi), rel=1e-9)
    assert inf.energy > -0.5


def test_d5_gaussian_unbounded():
    c = scaling_energy(5, Trial.GAUSSIAN, 1.0, 0)
    assert c.infimum_class.kind is InfimumKind.UNBOUNDED_BELOW
    e = c.energy([0.25, 0.5, 1.0])
    assert e[0] < e[1] < e[2]


def test_classify_examples():
    assert classify_infimum(3, 2.0, 5.0).kind is InfimumKind.MINIMUM_AT
    assert classify_infimum(3, 2.0, 5.0).s_star == pytest.approx(0.8)
    assert classify_infimum(4, 2.0, 1.0).kind is InfimumKind.INFIMUM_ZERO
    assert classify_infimum(4, 1.0, 1.0).kind is InfimumKind.INFIMUM_ZERO
    assert classify_infimum(4, 1.0, 2.0).kind is InfimumKind.UNBOUNDED_BELOW
    assert classify_infimum(7, 100.0, 1e-3).kind is InfimumKind.UNBOUNDED_BELOW
    with pytest.raises(DomainError):
        classify_infimum(3, 0.0, 1.0)


def test_equal_coefficients_cancel():
    from hdatom.variational import ScalingCurve, Infimum

    c = ScalingCurve(4, Trial.GAUSSIAN, 1.3, 1.3, 2, classify_infimum(4, 1.3, 1.3))
    assert np.all(c.energy(np.geomspace(1e-3, 1e3, 13)) == 0.0)
    assert c.infimum_class == Infimum(InfimumKind.INFIMUM_ZERO, energy=0.0)


@given(d=st.integers(3, 9), A=st.floats(1e-3, 1e3), B=st.floats(1e-3, 1e3))
def test_classification_table(d, A, B):
    kind = classify_infimum(d, A, B).kind
    if d == 3:
        assert kind is InfimumKind.MINIMUM_AT
    elif d == 4:
        assert kind is (InfimumKind.INFIMUM_ZERO if A >= B else InfimumKind.UNBOUNDED_BELOW)
    else:
        assert kind is InfimumKind.UNBOUNDED_BELOW


@given(A=st.floats(1e-2, 1e2), B=st.floats(1e-2, 1e2))
def test_minimum_is_a_minimum(A, B):
    inf = classify_infimum(3, A, B)
    s = inf.s_star
    e = lambda x: A / x**2 - B / x
    assert inf.energy == pytest.approx(e(s), rel=1e-12)
    assert e(0.9 * s) >= inf.energy and e(1.1 * s) >= inf.energy


@pytest.mark.parametrize("trial", list(Trial))
@pytest.mark.parametrize("d", [3, 4, 5, 7])
@pytest.mark.parametrize("l", [0, 2])
def test_scaling_identity(trial, d, l):
    s0, s = 1.7, 0.6
    A, B = trial_integrals(d, trial, 0.8, l)
    A2, B2 = trial_integrals(d, trial, 0.8, l, scale=s0)
    p = d - 2
    assert A2 / s**2 - B2 / s**p == pytest.approx(A / (s * s0) ** 2 - B / (s * s0) ** p, abs=1e-8)


def test_divergent_b_reported():
    with pytest.raises(QuadratureDivergent):
        trial_integrals(5, Trial.EXPONENTIAL, 1.0, 0, power=7)
    c = scaling_energy(5, Trial.EXPONENTIAL, 1.0, 0, power=7)
    assert c.b_divergent and math.isinf(c.B)
    assert c.infimum_class.kind is InfimumKind.UNBOUNDED_BELOW
    assert c.A > 0


def test_trial_validation():
    with pytest.raises(DomainError):
        trial_integrals(2, Trial.GAUSSIAN, 1.0, 0)
    with pytest.raises(DomainError):
        trial_integrals(3, Trial.GAUSSIAN, -1.0, 0)


def test_classical_examples():
    r = classical_equilibrium(3, 1, 1)
    assert r.r_star == 1.0 and r.classification is Equilibrium.STABLE
    r = classical_equilibrium(6, 1, 1)
    assert r.r_star == 2.0 and r.classification is Equilibrium.UNSTABLE
    r = classical_equilibrium(4, math.sqrt(2), 1)
    assert r.classification is Equilibrium.NEUTRAL and r.second_derivative_sign is CurvatureSign.ZERO
    r = classical_equilibrium(4, 1, 1)
    assert r.classification is Equilibrium.NONE and r.r_star is None
    assert "delta p_r = 0" in r.note
    with pytest.raises(DomainError):
        classical_equilibrium(5, 0, 1)


def _v_eff(d, L, kappa, r):
    return L * L / (2 * r * r) - kappa / r ** (d - 2)


@pytest.mark.parametrize("d", [3, 5, 6, 7])
def test_equilibrium_is_stationary(d):
    L, kappa = 1.3, 0.7
    rep = classical_equilibrium(d, L, kappa)
    r, h = rep.r_star, 1e-4 * rep.r_star
    v = [_v_eff(d, L, kappa, r + k * h) for k in (-1, 0, 1)]
    assert abs(v[2] - v[0]) / (2 * h) < 1e-6 * abs(v[1]) + 1e-9
    curv = (v[2] - 2 * v[1] + v[0]) / h**2
    assert curv == pytest.approx(rep.second_derivative, rel=1e-5)


LATTICE = [0.5, 1.0, 2.0]


@pytest.mark.parametrize("d", [3, 4, 5, 6, 7])
def test_classical_table(d):
    for L in LATTICE:
        for kappa in LATTICE:
            c = classical_equilibrium(d, L, kappa).classification
            if d == 3:
                assert c is Equilibrium.STABLE
            elif d == 4:
                assert c in (Equilibrium.NEUTRAL, Equilibrium.NONE)
                assert (c is Equilibrium.NEUTRAL) == (L * L / 2 == kappa)
            else:
                assert c is Equilibrium.UNSTABLE


@given(d=st.integers(3, 12), L=st.floats(0.01, 100), kappa=st.floats(0.01, 100))
def test_classification_follows_sign(d, L, kappa):
    rep = classical_equilibrium(d, L, kappa)
    table = {
        CurvatureSign.POSITIVE: Equilibrium.STABLE,
        CurvatureSign.ZERO: Equilibrium.NEUTRAL,
        CurvatureSign.NEGATIVE: Equilibrium.UNSTABLE,
        CurvatureSign.NONE: Equilibrium.NONE,
    }
    assert rep.classification is table[rep.second_derivative_sign]


def test_cutoff_trial_energy_bounds():
    # the hydrogen ground energy with a wall at a lies below every admissible trial
    e, s = cutoff_trial_energy(3, 1.0, 0, 1e-3)
    assert -0.5 < e < -0.45 and s > 0
    with pytest.raises(DomainError):
        cutoff_trial_energy(3, 1.0, 0, 0.0)
