from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from krein_kernels.errors import DomainViolation, NonIntrinsicPair, NotCoisometric, SingularDenominator
from krein_kernels.indefinite_linalg import inertia
from krein_kernels.kernel_spaces import Setting
from krein_kernels.quaternion_core import QMatrix, Quaternion, slice_point
from krein_kernels.quaternion_schur import (
    QColligation,
    blaschke_q,
    cayley_q,
    check_lemma27q,
    construct_q,
    eigen_relation_residual,
    eval_q,
    eval_q_unified,
    k_halfspace,
    kernel_forms_residual,
    kernel_q,
    negative_squares_q,
    proof_identity_residual,
    q_gram,
    random_q_colligation,
    rarb1q_residual,
    verify_stein,
)
from krein_kernels.rng import SplitMix64
from krein_kernels.sampling import blaschke_halfplane, blaschke_kernel, random_colligation
from krein_kernels.schur_realization import eval_halfplane, model_space_from_kernel
from krein_kernels.quaternion_core import SlicePowerSeries
from krein_kernels.unified_setting import ABPair, eval_unified

seeds = st.integers(min_value=0, max_value=2**64 - 1)


def hpoint(rng) -> Quaternion:
    """Random point of the right half-space."""
    return Quaternion(rng.uniform(0.1, 3.0), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2))


def real_colligation(rng, n, ind, alpha):
    """Real J-unitary colligation ``expm(J X)`` with ``X`` real antisymmetric."""
    from scipy.linalg import expm
    sig = np.array([1] * (n - ind) + [-1] * ind + [1], dtype=float)
    X = rng.normals((n + 1, n + 1))
    U = expm(np.diag(sig) @ (X - X.T) * 0.4)
    return QColligation(U[:n, :n], U[:n, n:], U[n:, :n], U[n:, n:], sig[:n], [1], [1], alpha)


# --- the kernel -----------------------------------------------------------------------

@given(seeds)
def test_kernel_forms_agree(seed):
    rng = SplitMix64(seed)
    p, q = hpoint(rng), hpoint(rng)
    assert kernel_forms_residual(p, q) < 1e-12


@given(seeds)
def test_kernel_real_base_point_and_real_collapse(seed):
    rng = SplitMix64(seed)
    a, mu = rng.uniform(0.1, 3), hpoint(rng)
    assert (k_halfspace(a, mu) - (a + mu.conj()).inv()).norm() < 1e-13
    s, t = rng.uniform(0.1, 3), rng.uniform(0.1, 3)
    assert (k_halfspace(s, t) - Quaternion(1 / (s + t))).norm() < 1e-14


@given(seeds)
def test_kernel_hermitian_symmetry(seed):
    rng = SplitMix64(seed)
    p, q = hpoint(rng), hpoint(rng)
    assert (k_halfspace(p, q) - k_halfspace(q, p).conj()).norm() < 1e-12


@given(seeds)
def test_kernel_reduces_to_complex_kernel_on_a_slice(seed):
    rng = SplitMix64(seed)
    z, w = complex(rng.uniform(0.1, 3), rng.uniform(-2, 2)), complex(rng.uniform(0.1, 3), rng.uniform(-2, 2))
    k = k_halfspace(Quaternion.from_complex(z), Quaternion.from_complex(w))
    assert (k - Quaternion.from_complex(1 / (z + np.conj(w)))).norm() < 1e-12


def test_kernel_singular_denominator():
    with pytest.raises(SingularDenominator):
        k_halfspace(Quaternion(0, 1, 0, 0), Quaternion(0, 1, 0, 0))


@given(seeds)
def test_proof_identity(seed):
    rng = SplitMix64(seed)
    assert proof_identity_residual(hpoint(rng), hpoint(rng)) < 1e-12


# --- the half-space identity ---------------------------------------------------------

def test_lemma_trivial_point():
    assert check_lemma27q(1.0, 1.0, 1.0, 1.0) < 1e-15


@given(seeds)
def test_lemma_random(seed):
    rng = SplitMix64(seed)
    a, b = rng.uniform(0.1, 3), rng.uniform(0.1, 3)
    assert check_lemma27q(a, b, hpoint(rng), hpoint(rng)) < 1e-10


def test_eigen_constant_variants(rng):
    # only -(alpha + conj(mu))^{-1} satisfies the resolvent eigenrelation
    worst = {v: 0.0 for v in ("alpha+conj(mu)", "alpha-conj(mu)", "alpha+mu")}
    for _ in range(20):
        a, mu, p = rng.uniform(0.1, 3), hpoint(rng), hpoint(rng)
        for v in worst:
            worst[v] = max(worst[v], eigen_relation_residual(a, mu, p, v))
    assert worst["alpha+conj(mu)"] < 1e-12
    assert worst["alpha-conj(mu)"] > 1e-3 and worst["alpha+mu"] > 1e-3
    mu = hpoint(rng)
    assert check_lemma27q(1.0, 2.0, mu, hpoint(rng), "alpha-conj(mu)") > 1e-3


def test_lemma_domain():
    with pytest.raises(DomainViolation):
        check_lemma27q(-1.0, 1.0, 1.0, 1.0)


# --- realizations -------------------------------------------------------------------------

def test_q_colligation_validation():
    with pytest.raises(DomainViolation):
        QColligation(QMatrix.zeros(0, 0), QMatrix.zeros(0, 1), QMatrix.zeros(1, 0), QMatrix.scalar(1), [], [1], [1], 1j)
    with pytest.raises(NotCoisometric):
        QColligation(QMatrix.zeros(0, 0), QMatrix.zeros(0, 1), QMatrix.zeros(1, 0), QMatrix.scalar(0.5), [], [1], [1])


@given(seeds, st.integers(1, 3), st.integers(0, 1))
def test_random_q_colligation_is_coisometric(seed, n, ind):
    rng = SplitMix64(seed)
    c = random_q_colligation(rng, n, min(ind, n), 2, 1)
    assert c.coisometry_defect() < 1e-10


@given(seeds)
def test_eval_at_base_point(seed):
    rng = SplitMix64(seed)
    c = random_q_colligation(rng, 2, 1, 1, 0, alpha=rng.uniform(0.2, 2))
    assert (eval_q(c, c.alpha) - c.H).max_abs() < 1e-12


@given(seeds)
def test_real_data_matches_complex_path(seed):
    rng = SplitMix64(seed)
    alpha = rng.uniform(0.2, 2.0)
    c = random_colligation(rng, 3, 1, 2, 1, alpha=alpha)
    cq = QColligation.from_complex(c)
    for t in [rng.uniform(0.1, 3) for _ in range(5)]:
        assert np.max(np.abs(eval_q(cq, t).Z1 - eval_halfplane(c, t))) < 1e-10
        assert eval_q(cq, t).Z2.size == 0 or np.max(np.abs(eval_q(cq, t).Z2)) < 1e-14


def test_real_coefficients_give_intrinsic_s(rng):
    cq = real_colligation(rng, 2, 1, 1.0)
    for _ in range(5):
        u = Quaternion(0, *rng.normals(3)).unit()
        v = eval_q(cq, slice_point(rng.uniform(0.1, 3), rng.normal(), u)).to_quaternion()
        im = v.as_array()[1:]
        assert np.linalg.norm(np.cross(im, u.as_array()[1:])) < 1e-10


def test_constant_colligation_kernel_vanishes():
    H = QMatrix.from_quaternions([[Quaternion(0, 0.6, 0.8, 0)]])
    c = QColligation(QMatrix.zeros(0, 0), QMatrix.zeros(0, 1), QMatrix.zeros(1, 0), H, [], [1], [1])
    p, q = Quaternion(1, 0.3, 0, 0.2), Quaternion(0.5, -1, 0.4, 0)
    assert kernel_q(c, p, q).max_abs() < 1e-14
    r = verify_stein(c, p, q)
    assert r["unstarred"] < 1e-14


@given(seeds)
def test_kernel_real_collapse(seed):
    rng = SplitMix64(seed)
    c = random_colligation(rng, 2, 1, 1, 0, alpha=rng.uniform(0.3, 2))
    cq = QColligation.from_complex(c)
    s, t = rng.uniform(0.1, 3), rng.uniform(0.1, 3)
    Ss, St = eval_halfplane(c, s), eval_halfplane(c, t)
    expect = (1 - Ss @ St.conj().T) / (2 * math.pi * (s + t))
    assert np.max(np.abs(kernel_q(cq, s, t).Z1 - expect)) < 1e-10


@given(seeds)
def test_stein_equation(seed):
    rng = SplitMix64(seed)
    c = random_q_colligation(rng, 2, 1, 1, 0, alpha=rng.uniform(0.3, 2))
    r = verify_stein(c, hpoint(rng), hpoint(rng))
    assert r["unstarred"] < 1e-9
    assert math.isfinite(r["starred"])
    s, t = rng.uniform(0.1, 3), rng.uniform(0.1, 3)
    assert verify_stein(c, s, t)["unstarred"] < 1e-10


@given(seeds, st.integers(0, 2))
def test_negative_squares_even_and_bounded(seed, ind):
    rng = SplitMix64(seed)
    c = random_q_colligation(rng, 2, ind, 1, 0, alpha=1.0)
    pts = [hpoint(rng) for _ in range(4)]
    kappa, embedded = negative_squares_q(c, pts)
    assert embedded % 2 == 0 and kappa <= ind


def test_gram_is_hermitian(rng):
    c = random_q_colligation(rng, 2, 1, 1, 0)
    G = q_gram(c, [hpoint(rng) for _ in range(3)])
    assert np.max(np.abs(G - G.conj().T)) < 1e-10


# --- construction from real-point data ----------------------------------------------------

def test_construction_from_real_blaschke_data():
    zeros = [0.5, 1.0, 2.5]
    m = model_space_from_kernel(blaschke_kernel(zeros), zeros, 1.3)
    # the inequality slack is positive semidefinite for kappa = 0 data
    assert inertia(m.slack(), 1e-9).n_minus == 0
    c = construct_q(m)
    assert c.coisometry_defect() < 1e-10
    for t in [0.2, 0.9, 3.0]:
        assert abs(abs(eval_q(c, t).to_quaternion().x0) - abs(blaschke_halfplane(zeros, t))) < 1e-10
    pts = [Quaternion(0.7, 0.2, -0.5, 0.3), Quaternion(1.2, -0.4, 0.1, 0.6), Quaternion(0.4, 1, 0, 0)]
    assert negative_squares_q(c, pts) == (0, 0)


def test_construction_needs_real_base_point():
    m = model_space_from_kernel(blaschke_kernel([1.0]), [1.0], 1.0 + 0.5j)
    with pytest.raises(DomainViolation):
        construct_q(m)


# --- unified setting ------------------------------------------------------------------------

def test_eval_q_unified_base_point_and_real_axis(rng):
    ab = ABPair.matched_half_plane_pair()
    c = random_colligation(rng, 2, 1, 1, 0, alpha=1.2)
    cq = QColligation.from_complex(c)
    assert (eval_q_unified(cq, ab, 1.2) - cq.H).max_abs() < 1e-12
    for t in [0.4, 2.2]:
        assert np.max(np.abs(eval_q_unified(cq, ab, t).Z1 - eval_unified(c, ab, t))) < 1e-10


def test_eval_q_unified_disk_pair_is_ball_form(rng):
    ab = ABPair.disk_pair()
    c = random_colligation(rng, 2, 0, 1, 0, alpha=0.4)
    cq = QColligation.from_complex(c)
    p = Quaternion(0.1, 0.2, -0.3, 0.1)
    from krein_kernels.quaternion_schur import _transfer_q
    bp = (p - 0.4) * (1 - p * 0.4).inv()
    assert (eval_q_unified(cq, ab, p) - _transfer_q(cq, bp)).max_abs() < 1e-12


def test_non_intrinsic_pair_rejected(rng):
    ab = ABPair([1.0], [0.0, 1j], validate=False)
    c = random_q_colligation(rng, 1, 0, 1, 0)
    with pytest.raises(NonIntrinsicPair):
        eval_q_unified(c, ab, Quaternion(0.2))


def test_rarb1q(rng):
    ab = ABPair.matched_half_plane_pair()
    f = SlicePowerSeries(0.0, [Quaternion(*rng.normals(4)) * 0.4 for _ in range(4)])
    pts = [Quaternion(0.3 * rng.normal(), *(0.3 * rng.normals(3))) for _ in range(10)]
    assert rarb1q_residual(ab, f, 1.0, pts) < 1e-10


# --- Blaschke factors of the ball -------------------------------------------------------------

@given(seeds)
def test_blaschke_involution(seed):
    rng = SplitMix64(seed)
    u = rng.uniform(-0.9, 0.9)
    p = Quaternion(*rng.normals(4))
    p = p * (rng.uniform(0, 0.9) / max(p.norm(), 1e-12))
    assert (blaschke_q(u, blaschke_q(-u, p)) - p).norm() < 1e-12
    assert blaschke_q(u, p).norm() < 1


def test_blaschke_trivial_cases():
    p = Quaternion(0.1, 0.2, 0.3, 0.1)
    assert (blaschke_q(0.0, p) - p).norm() < 1e-15
    assert abs(blaschke_q(0.5, 0.2).x0 - 0.7 / 1.1) < 1e-15
    with pytest.raises(DomainViolation):
        blaschke_q(1.0, p)


def test_cayley_q_is_intrinsic():
    u = Quaternion(0, 0.6, 0, 0.8)
    v = cayley_q(slice_point(0.5, 1.3, u), 1.0)
    assert np.linalg.norm(np.cross(v.as_array()[1:], u.as_array()[1:])) < 1e-14
