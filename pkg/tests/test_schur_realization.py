from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from krein_kernels.errors import NonHermitian, DimensionMismatch, DomainViolation, InequalityViolated, NotCoisometric, SingularResolvent
from krein_kernels.indefinite_linalg import Metric, inertia
from krein_kernels.kernel_spaces import PointChoice, Setting
from krein_kernels.rng import SplitMix64
from krein_kernels.sampling import blaschke_halfplane, blaschke_kernel, random_colligation, random_points
from krein_kernels.schur_realization import (
    Colligation,
    FiniteModelSpace,
    cayley,
    construct_from_space,
    eval_disk,
    eval_halfplane,
    kernel_colligation,
    kernel_direct,
    model_space_from_kernel,
    negative_squares_of_S,
    point_evaluation,
)

seeds = st.integers(min_value=0, max_value=2**64 - 1)
E1 = Metric.euclidean(1)


def shift_colligation() -> Colligation:
    # T=0, F=1, G=1, H=0 realizes S(z) = z in the disk
    return Colligation([[0]], [[1]], [[1]], [[0]], E1, E1, E1)


def grid_max(c, setting, K, pts):
    return max(float(np.max(np.abs(kernel_colligation(c, setting, z, w) - K(z, w))))
               for z in pts for w in pts)


# --- colligations -------------------------------------------------------------------

def test_colligation_rejects_non_coisometric():
    with pytest.raises(NotCoisometric):
        Colligation([[0.5]], [[0]], [[0]], [[1]], E1, E1, E1)


def test_colligation_rejects_index_mismatch():
    with pytest.raises(DimensionMismatch):
        Colligation(np.zeros((0, 0)), np.zeros((0, 1)), np.zeros((1, 0)), [[1]],
                    Metric(np.zeros((0, 0))), Metric.from_signature([-1]), E1)


def test_empty_state_space_gives_constant():
    H = np.array([[0, 1], [1, 0]])
    c = Colligation(np.zeros((0, 0)), np.zeros((0, 2)), np.zeros((2, 0)), H,
                    Metric(np.zeros((0, 0))), Metric.euclidean(2), Metric.euclidean(2))
    for z in [0.0, 0.4j, -0.7]:
        assert np.allclose(eval_disk(c, z), H)
        assert np.allclose(kernel_direct(c, Setting.DISK, z, 0.3), 0)


def test_shift_realization():
    c = shift_colligation()
    for z in [0.2, -0.5 + 0.1j]:
        assert abs(eval_disk(c, z)[0, 0] - z) < 1e-15
        for w in [0.3j, 0.1]:
            assert abs(kernel_direct(c, Setting.DISK, z, w)[0, 0] - 1) < 1e-14


@given(seeds, st.integers(1, 5), st.integers(1, 3))
def test_hilbert_colligation_is_contractive(seed, n, m):
    rng = SplitMix64(seed)
    c = random_colligation(rng, n, 0, m, 0)
    for z in random_points(rng, Setting.DISK, 10):
        assert np.linalg.norm(eval_disk(c, z), 2) <= 1 + 1e-10


def test_singular_resolvent_reported():
    c = Colligation([[1]], [[0]], [[0]], [[1]], E1, E1, E1)
    with pytest.raises(SingularResolvent):
        eval_disk(c, 1.0)


@given(seeds)
def test_halfplane_equals_disk_after_cayley(seed):
    rng = SplitMix64(seed)
    alpha = rng.halfplane_point()
    c = random_colligation(rng, 3, 1, 2, 0, alpha=alpha)
    assert np.allclose(eval_halfplane(c, alpha), c.H, atol=1e-15)
    for z in random_points(rng, Setting.HALF_PLANE, 5):
        assert np.max(np.abs(eval_halfplane(c, z) - eval_disk(c, cayley(z, alpha)))) < 1e-10


# --- kernels ---------------------------------------------------------------------

@given(seeds, st.integers(1, 8), st.integers(0, 2))
def test_kernel_direct_equals_colligation_kernel(seed, n, ind):
    rng = SplitMix64(seed)
    ind = min(ind, n)
    for setting in (Setting.DISK, Setting.HALF_PLANE):
        alpha = 0.0 if setting is Setting.DISK else rng.halfplane_point()
        c = random_colligation(rng, n, ind, 2, 1, alpha=alpha)
        for z, w in zip(random_points(rng, setting, 4), random_points(rng, setting, 4)):
            Kd = kernel_direct(c, setting, z, w)
            assert np.max(np.abs(Kd - kernel_colligation(c, setting, z, w))) < 1e-9
            # metric Hermitian symmetry
            J = c.metric_C.gram
            assert np.max(np.abs(J @ Kd - (J @ kernel_direct(c, setting, w, z)).conj().T)) < 1e-9


def test_point_evaluation_at_base_point(rng):
    alpha = 1.2 + 0.3j
    c = random_colligation(rng, 3, 1, 1, 0, alpha=alpha)
    Ca = point_evaluation(c, Setting.HALF_PLANE, alpha)
    assert np.allclose(Ca, c.G / math.sqrt(2 * math.pi * 2 * alpha.real))
    K = kernel_colligation(c, Setting.HALF_PLANE, alpha, alpha)
    Kd = kernel_direct(c, Setting.HALF_PLANE, alpha, alpha)
    assert np.max(np.abs(K - Kd)) < 1e-12


def test_negative_squares_hilbert_is_zero(rng):
    c = random_colligation(rng, 4, 0, 2, 0)
    assert negative_squares_of_S(c, Setting.DISK, PointChoice(random_points(rng, Setting.DISK, 8))) == 0


def test_negative_squares_attains_one(rng):
    c = random_colligation(rng, 3, 1, 1, 0)
    counts = [negative_squares_of_S(c, Setting.DISK, PointChoice(random_points(SplitMix64(7), Setting.DISK, n)))
              for n in (3, 5, 8)]
    assert counts[-1] == 1 and counts == sorted(counts)


@given(seeds, st.integers(1, 5), st.integers(0, 3))
def test_negative_squares_bounded_by_index(seed, n, ind):
    rng = SplitMix64(seed)
    ind = min(ind, n)
    c = random_colligation(rng, n, ind, 1, 0)
    pts = random_points(rng, Setting.DISK, n + 3)
    assert negative_squares_of_S(c, Setting.DISK, PointChoice(pts)) <= ind


# --- construction ---------------------------------------------------------------------

def test_hand_computed_one_dimensional_space():
    four_pi = 4 * math.pi
    m = FiniteModelSpace([[1 / four_pi]], [[-0.5]], [[1 / four_pi]], E1, 1.0)
    c = construct_from_space(m)
    assert abs(c.T[0, 0]) < 1e-15 and c.audit["k"] == 2.0
    assert abs(c.G[0, 0] - math.sqrt(4 * math.pi) / four_pi) < 1e-15
    K = blaschke_kernel([1.0])
    pts = [0.5, 1.0 + 1j, 2.0 - 0.5j, 0.3 + 2j]
    assert grid_max(c, Setting.HALF_PLANE, K, pts) < 1e-12
    # S is determined up to a unimodular constant; at z=2 the Blaschke factor is 1/3
    assert abs(abs(eval_halfplane(c, 2.0)[0, 0]) - 1 / 3) < 1e-12


def test_model_space_from_kernel_matches_hand_data():
    m = model_space_from_kernel(blaschke_kernel([1.0]), [1.0], 2.0)
    # R_2 k(., 1) = -(2 + 1)^{-1} k(., 1)
    assert abs(m.A_alpha[0, 0] + 1 / 3) < 1e-12
    assert abs(m.gram[0, 0] - 1 / (4 * math.pi)) < 1e-14


def test_zero_dimensional_space():
    m = FiniteModelSpace(np.zeros((0, 0)), np.zeros((0, 0)), np.zeros((1, 0)), E1, 1.0)
    c = construct_from_space(m)
    S = eval_halfplane(c, 0.7 + 0.2j)
    assert abs(abs(S[0, 0]) - 1) < 1e-12
    assert abs(kernel_direct(c, Setting.HALF_PLANE, 0.5, 1.5j + 1)[0, 0]) < 1e-14


@pytest.mark.parametrize("zeros", [[1.0], [1.0, 0.5 + 1j], [0.3 - 0.4j, 2.0, 1.0 + 2j], [0.5, 1.5, 0.7 + 1j, 2.0 - 1j]])
def test_blaschke_round_trip(zeros):
    alpha = 0.9 + 0.2j
    K = blaschke_kernel(zeros)
    m = model_space_from_kernel(K, zeros, alpha)
    c = construct_from_space(m)
    assert tuple(c.audit["slack_inertia"])[:2] == (0, 0)
    assert c.audit["ind_minus_C1"] == c.audit["ind_minus_C"]
    xs = np.linspace(0.2, 3.0, 10)
    grid = [complex(x, y) for x in xs[::3] for y in np.linspace(-2, 2, 3)]
    assert grid_max(c, Setting.HALF_PLANE, K, grid) < 1e-8
    assert negative_squares_of_S(c, Setting.HALF_PLANE, PointChoice(grid)) == 0


def test_constructed_blaschke_is_inner_on_boundary_proxy():
    zeros = [1.0, 0.5 + 1j]
    c = construct_from_space(model_space_from_kernel(blaschke_kernel(zeros), zeros, 1.0 + 0.5j))
    for y in np.linspace(-5, 5, 11):
        z = complex(1e-6, y)
        assert abs(abs(eval_halfplane(c, z)[0, 0]) - abs(blaschke_halfplane(zeros, z))) < 1e-8
        assert abs(abs(eval_halfplane(c, z)[0, 0]) - 1) < 1e-5


def test_inequality_violation_raises():
    # doubling the resolvent breaks the inequality for the 1-dim Blaschke space
    four_pi = 4 * math.pi
    m = FiniteModelSpace([[1 / four_pi]], [[-2.0]], [[1 / four_pi]], E1, 1.0)
    with pytest.raises(InequalityViolated):
        construct_from_space(m)


def test_model_space_requires_right_half_plane_alpha():
    with pytest.raises(DomainViolation):
        FiniteModelSpace([[1.0]], [[0.0]], [[0.0]], E1, -1.0)


@given(seeds, st.integers(1, 3))
def test_round_trip_from_random_realization(seed, n):
    # model space of a random Hilbert colligation's kernel at n points
    rng = SplitMix64(seed)
    alpha = rng.halfplane_point()
    c0 = random_colligation(rng, n, 0, 1, 0, alpha=alpha)
    K0 = lambda z, w: kernel_direct(c0, Setting.HALF_PLANE, z, w)  # noqa: E731
    pts = random_points(rng, Setting.HALF_PLANE, n)
    try:
        m = model_space_from_kernel(K0, pts, rng.halfplane_point())
    except NonHermitian:
        m = None
    # nearly dependent kernel sections give an ill-posed space
    assume(m is not None and np.min(np.linalg.eigvalsh(m.gram)) > 1e-6 * np.max(np.abs(m.gram)))
    G = m.gram
    slack = m.slack()
    assert inertia(slack, 1e-8, scale=max(1.0, np.max(np.abs(G)))).n_minus == 0
