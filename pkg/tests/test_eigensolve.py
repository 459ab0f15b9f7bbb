import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hdatom.core import make_atom_config
from hdatom.eigensolve import (
    Grid,
    Spacing,
    SpectrumResult,
    Stability,
    TridiagonalMatrix,
    assemble_hamiltonian,
    classify_collapse,
    collapse_study,
    collapse_threshold,
    count_nodes,
    eigenvector,
    lowest_eigenvalues,
    numerov_eigenvalue,
    numerov_shoot,
    spectrum,
    sturm_count,
)
from hdatom.errors import (
    ConfigError,
    ConvergenceError,
    CutoffTooSmall,
    GridTooCoarse,
    InvariantViolation,
)
from hdatom.potentials import PotentialKind, PotentialSpec
from hdatom.reduction import RadialProblem, reduce
from hdatom.variational import cutoff_trial_energy

HYDROGEN = make_atom_config(3, 1, 0, PotentialSpec.gauss_law(1.0))
BOHR = np.array([-0.5, -0.125, -1 / 18])
D4_CUTOFFS = [0.1, 0.05, 0.025, 0.0125, 0.00625]


def free_problem():
    return RadialProblem(d=3, l=0, l_d=0.0, centrifugal=0.0, kappa=0.0, p=1.0)


def test_grid_validation():
    assert Grid(0.0001, 200, 20000).h == pytest.approx((200 - 1e-4) / 19999, rel=1e-15)
    with pytest.raises(GridTooCoarse):
        Grid(0.1, 1, 15)
    with pytest.raises(ConfigError):
        Grid(1.0, 0.5, 100)
    with pytest.raises(ConfigError):
        Grid(0.0, 0.5, 100)
    assert Grid(0.1, 1, 16).refined().n == 31
    g = Grid.log(1e-3, 1e3, 61)
    assert g.spacing is Spacing.LOG and g.r[0] == pytest.approx(1e-3) and g.r[-1] == pytest.approx(1e3)


def test_assembly_formulas():
    prob = reduce(make_atom_config(5, 1, 1))
    grid = Grid(0.05, 10, 200)
    mat = assemble_hamiltonian(prob, grid)
    r = grid.r[1:-1]
    h = grid.h
    assert np.allclose(mat.diagonal, 1 / h**2 + prob.centrifugal / (2 * r**2) - prob.kappa / r**3, rtol=1e-14)
    assert np.all(mat.offdiagonal == -1 / (2 * h**2))
    dense = mat.to_dense()
    assert np.array_equal(dense, dense.T)


def test_free_particle_box():
    L = math.pi
    prev = 0.0
    for n in (200, 400, 800):
        e = lowest_eigenvalues(assemble_hamiltonian(free_problem(), Grid(0.01, L + 0.01, n)), 1)[0]
        err = abs(e - math.pi**2 / (2 * L**2))
        assert prev == 0.0 or err < prev
        prev = err
    assert prev < 1e-5


def test_lowest_eigenvalue_examples():
    diag = TridiagonalMatrix(np.array([1.0, 2.0, 3.0]), np.zeros(2))
    assert np.allclose(lowest_eigenvalues(diag, 2), [1, 2], atol=1e-12)
    two = TridiagonalMatrix(np.zeros(2), np.array([-0.5]))
    assert np.allclose(lowest_eigenvalues(two, 2), [-0.5, 0.5], atol=1e-12)
    with pytest.raises(ConfigError):
        lowest_eigenvalues(two, 3)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_sturm_count_vs_dense(seed):
    rng = np.random.default_rng(seed)
    mat = TridiagonalMatrix(rng.normal(size=50), rng.normal(size=49))
    dense = np.linalg.eigvalsh(mat.to_dense())
    assert sturm_count(mat, 0.0) == int(np.sum(dense < 0))
    k = 5
    assert np.allclose(lowest_eigenvalues(mat, k), dense[:k], atol=1e-10)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_generalized_pencil_vs_dense(seed):
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.1, 3.0, size=30)
    mat = TridiagonalMatrix(rng.normal(size=30), rng.normal(size=29), w)
    s = 1 / np.sqrt(w)
    dense = np.linalg.eigvalsh(s[:, None] * mat.to_dense() * s[None, :])
    assert np.allclose(lowest_eigenvalues(mat, 4), dense[:4], atol=1e-10)


def test_eigenvector_residual():
    mat = assemble_hamiltonian(reduce(HYDROGEN), Grid(1e-4, 60, 3000))
    e = lowest_eigenvalues(mat, 2)
    for val in e:
        x = eigenvector(mat, val)
        res = mat.to_dense() @ x - val * x
        assert np.linalg.norm(res) < 1e-6 * np.linalg.norm(x)


def test_count_nodes():
    assert count_nodes(np.sin(np.linspace(0.01, 3 * np.pi - 0.01, 500))) == 2
    assert count_nodes(np.array([1.0, 1e-14, -1e-14, 2.0])) == 0


def test_hydrogen_spectrum_bohr_with_small_wall():
    res = spectrum(HYDROGEN, Grid(1e-6, 200, 20000), 3)
    rel = np.abs(res.richardson_estimate - BOHR) / np.abs(BOHR)
    assert np.all(rel < 1e-5)
    assert res.node_counts == [0, 1, 2]
    assert res.numerov_agrees


def test_wall_shift_is_linear_in_cutoff():
    # E(a) - E(0) = (1/2) f'(0)^2 a = 2a for the 1s state
    prob = reduce(HYDROGEN)
    shifts = []
    for a in (1e-4, 2e-4, 4e-4):
        mat = assemble_hamiltonian(prob, Grid.log(a, 80, 8000))
        shifts.append(lowest_eigenvalues(mat, 1)[0] + 0.5)
    assert shifts[0] == pytest.approx(2e-4, rel=0.01)
    assert shifts[1] / shifts[0] == pytest.approx(2.0, rel=0.01)
    assert shifts[2] / shifts[1] == pytest.approx(2.0, rel=0.01)


def test_second_order_convergence():
    prob = reduce(HYDROGEN)
    errs = []
    for n in (1001, 2001, 4001, 8001):
        errs.append(abs(lowest_eigenvalues(assemble_hamiltonian(prob, Grid(1e-9, 40, n)), 1)[0] + 0.5))
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    assert all(3.8 < q < 4.2 for q in ratios)


def test_normalisation_and_sign():
    res = spectrum(HYDROGEN, Grid(1e-4, 60, 4000), 2, refine=False, cross_check=False)
    w = res.grid.weights
    for f in res.wavefunctions:
        assert np.sum(f * f * w) == pytest.approx(1.0, rel=1e-12)
        assert f[1] > 0
    assert res.converged is None


def test_brane_world_d5():
    cfg = make_atom_config(5, 1, 0, PotentialSpec.brane_world(1.0))
    res = spectrum(cfg, Grid(1e-4, 200, 20000), 1)
    assert res.richardson_estimate[0] == pytest.approx(-1 / 8, abs=1e-4)


def test_d4_subcritical_has_no_bound_state():
    res = spectrum(make_atom_config(4, 1, 0), Grid(1e-4, 200, 20000), 1, refine=False)
    assert res.eigenvalues[0] > -1e-6


def test_numerov_examples():
    prob = reduce(HYDROGEN)
    mismatches = []
    for n in (20000, 40000, 80000):
        r = numerov_shoot(prob, -0.5, Grid(1e-7, 60, n))
        assert r.node_count == 0
        mismatches.append(abs(r.log_derivative_mismatch))
    assert mismatches[0] > mismatches[1] > mismatches[2]
    assert mismatches[2] < 5e-6
    between = numerov_shoot(prob, -0.3, Grid(1e-7, 60, 20000))
    assert abs(between.log_derivative_mismatch) > 0.5


def test_numerov_nodes_monotone():
    prob = reduce(HYDROGEN)
    grid = Grid(1e-5, 80, 8000)
    counts = [numerov_shoot(prob, e, grid).node_count for e in np.linspace(-0.6, -0.03, 40)]
    assert all(b >= a for a, b in zip(counts, counts[1:]))
    assert counts[0] == 0 and counts[-1] >= 2


def test_numerov_log_grid_agrees_with_matrix():
    prob = reduce(HYDROGEN)
    grid = Grid.log(1e-6, 100, 4000)
    e_mat = lowest_eigenvalues(assemble_hamiltonian(prob, grid), 1)[0]
    assert numerov_eigenvalue(prob, grid, e_mat) == pytest.approx(e_mat, rel=1e-4)


def test_numerov_rescales_and_raises():
    prob = reduce(HYDROGEN)
    r = numerov_shoot(prob, -0.5, Grid(1e-4, 400, 8000))
    assert isinstance(r.rescaled, bool)
    assert r.match_index == int(np.nonzero(prob.effective_potential(Grid(1e-4, 400, 8000).r) <= -0.5)[0][-1])


def test_cutoff_too_small():
    prob = reduce(make_atom_config(12, 1, 0))
    with pytest.raises(CutoffTooSmall):
        assemble_hamiltonian(prob, Grid.log(1e-40, 1, 100))


def test_spectrum_invariants():
    grid = Grid(0.1, 1, 16)
    with pytest.raises(InvariantViolation):
        SpectrumResult(np.array([1.0, 0.5]), np.zeros((2, 16)), [0, 1], grid, None)
    with pytest.raises(InvariantViolation):
        SpectrumResult(np.array([0.5, 1.0]), np.zeros((2, 16)), [1, 1], grid, None)


def test_classify_collapse_rule():
    cut = [0.1, 0.05, 0.025, 0.0125]
    assert classify_collapse(cut, [-1, -2, -4, -8])[0] is Stability.COLLAPSING
    assert classify_collapse(cut, [-1, -2, -4, -7.9])[0] is Stability.BOUNDED
    assert classify_collapse(cut, [-0.5, -0.5, -0.5, -0.5])[0] is Stability.BOUNDED
    assert classify_collapse(cut, [0, 0, 0, 0])[0] is Stability.BOUNDED
    assert classify_collapse(cut, [0, -2, -4, -8])[0] is Stability.BOUNDED
    assert classify_collapse([0.2] + cut, [0, -1, -2, -4, -8])[0] is Stability.COLLAPSING


def test_collapse_study_validation():
    with pytest.raises(ConfigError):
        collapse_study(HYDROGEN, [0.1, 0.2], 100, 10)
    with pytest.raises(ConfigError):
        collapse_study(HYDROGEN, [20, 10], 100, 10)


def test_hydrogen_is_bounded():
    s = collapse_study(HYDROGEN, D4_CUTOFFS, 2000, 1e3)
    assert s.classification is Stability.BOUNDED
    # the wall raises the 1s level by about 2a
    assert s.ground_energies[-1] == pytest.approx(-0.5 + 2 * D4_CUTOFFS[-1], abs=1e-3)


def test_d4_supercritical_collapses_at_rate_four():
    s = collapse_study(make_atom_config(4, 25, 0), D4_CUTOFFS, 4000, 1e10)
    assert s.classification is Stability.COLLAPSING
    assert all(f == pytest.approx(4.0, rel=1e-3) for f in s.growth_factors)


def test_d4_subcritical_bounded():
    s = collapse_study(make_atom_config(4, 10, 0), D4_CUTOFFS, 4000, 1e10)
    assert s.classification is Stability.BOUNDED
    assert all(-1e-4 <= e <= 0 for e in s.ground_energies)


def test_d5_collapses_below_the_coupling_length():
    cfg = make_atom_config(5, 1, 0)
    cutoffs = [1e-3, 5e-4, 2.5e-4, 1.25e-4]
    s = collapse_study(cfg, cutoffs, 4000, 1e3)
    assert s.classification is Stability.COLLAPSING
    assert all(b < a for a, b in zip(s.ground_energies, s.ground_energies[1:]))
    assert all(f >= 2 for f in s.growth_factors)


def test_d5_collapse_below_variational_bound():
    cfg = make_atom_config(5, 1, 0)
    prob = reduce(cfg)
    cutoffs = [1e-2, 1e-3, 5e-4, 2.5e-4]
    s = collapse_study(cfg, cutoffs, 4000, 1e3)
    for a, e0 in zip(cutoffs, s.ground_energies):
        bound, _ = cutoff_trial_energy(5, prob.kappa, 0, a)
        assert e0 <= bound + 1e-3 * abs(bound) + 1e-9


def test_d4_threshold_bracket():
    bracket = collapse_threshold(lambda Z: make_atom_config(4, Z, 0), 10, 25, D4_CUTOFFS, 3000, 1e10, width=0.2)
    assert bracket.Z_collapsing - bracket.Z_bounded <= 0.2
    assert abs(bracket.midpoint - 2 * math.pi**2) < 0.5


def test_threshold_needs_a_bracket():
    with pytest.raises(ConvergenceError):
        collapse_threshold(lambda Z: make_atom_config(4, Z, 0), 25, 30, D4_CUTOFFS, 1000, 1e10)
