from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from krein_kernels.errors import DomainViolation, PoleAtAlpha, UnsupportedFunction, NonHermitianKernel
from krein_kernels.indefinite_linalg import inertia
from krein_kernels.kernel_spaces import (
    PointChoice,
    RationalSection,
    Setting,
    check_identity,
    hardy_kernel,
    inner_product,
    kernel_gram,
    negative_squares,
    resolvent_apply,
)
from krein_kernels.rng import SplitMix64
from krein_kernels.sampling import blaschke_kernel, random_points
from krein_kernels.unified_setting import ABPair

seeds = st.integers(min_value=0, max_value=2**64 - 1)
SETTINGS = [Setting.DISK, Setting.HALF_PLANE]


def random_span(rng, setting, size, m=1):
    return RationalSection.span(setting, random_points(rng, setting, size), rng.complex_normals((size, m)))


# --- kernel values ---------------------------------------------------------------

def test_hardy_kernel_values():
    assert hardy_kernel(Setting.DISK, 0, 0.3 + 0.4j) == 1
    assert abs(hardy_kernel(Setting.DISK, 0.5, 0.5) - 4 / 3) < 1e-15
    assert abs(hardy_kernel(Setting.HALF_PLANE, 1, 1) - 1 / (4 * math.pi)) < 1e-15


def test_hardy_kernel_domain():
    with pytest.raises(DomainViolation):
        hardy_kernel(Setting.DISK, 1.2, 0)
    with pytest.raises(DomainViolation):
        hardy_kernel(Setting.HALF_PLANE, -0.1, 1)


@given(seeds)
def test_hardy_kernel_hermitian(seed):
    rng = SplitMix64(seed)
    for s in SETTINGS:
        z, w = random_points(rng, s, 2)
        assert hardy_kernel(s, z, w) == np.conj(hardy_kernel(s, w, z))


# --- sections and resolvents ------------------------------------------------------

def test_section_merges_repeated_poles():
    f = RationalSection.span(Setting.DISK, [0.1, 0.1, 0.2], [1.0, 2.0, 0.0])
    assert f.mus.tolist() == [0.1]
    assert np.allclose(f.coeffs, [[3.0]])


def test_polynomial_rejected_off_disk():
    with pytest.raises(UnsupportedFunction):
        RationalSection.polynomial([1.0, 2.0], Setting.HALF_PLANE)


def test_resolvent_of_z_squared():
    f = RationalSection.polynomial([0, 0, 1])
    Rf = resolvent_apply(f, 1.0)
    assert np.allclose(Rf.poly[:, 0], [1, 1])
    for z in [0.3, -0.2 + 0.5j]:
        assert abs(Rf(z)[0] - (z + 1)) < 1e-14


@given(seeds)
def test_resolvent_eigenrelation_matches_difference_quotient(seed):
    rng = SplitMix64(seed)
    for s in SETTINGS:
        mu, alpha, z = random_points(rng, s, 3)
        k = RationalSection.kernel(s, mu)
        Rk = resolvent_apply(k, alpha)
        dq = (k(z) - k(alpha)) / (z - alpha)
        assert np.max(np.abs(Rk(z) - dq)) < 1e-10
    # half-plane constant stated explicitly
    mu, alpha = random_points(rng, Setting.HALF_PLANE, 2)
    k = RationalSection.kernel(Setting.HALF_PLANE, mu)
    assert np.allclose(resolvent_apply(k, alpha).coeffs, -1 / (alpha + np.conj(mu)) * k.coeffs)


def test_resolvent_pole_at_alpha():
    with pytest.raises(PoleAtAlpha):
        resolvent_apply(RationalSection.kernel(Setting.DISK, 0.5), 2.0)


@given(seeds)
def test_resolvent_identity(seed):
    rng = SplitMix64(seed)
    for s in SETTINGS:
        f = random_span(rng, s, rng.integer(1, 6), 2)
        a, b = random_points(rng, s, 2)
        lhs = resolvent_apply(f, a) - resolvent_apply(f, b)
        rhs = resolvent_apply(resolvent_apply(f, b), a).scale(a - b)
        pts = np.array(random_points(rng, s, 20))
        assert np.max(np.abs(lhs(pts) - rhs(pts))) < 1e-10


# --- inner products ---------------------------------------------------------------

def test_inner_product_kernel_norm():
    k = RationalSection.kernel(Setting.HALF_PLANE, 1.0)
    assert abs(inner_product(k, k) - 1 / (4 * math.pi)) < 1e-15


@given(seeds)
def test_inner_product_hermitian_and_reproducing(seed):
    rng = SplitMix64(seed)
    for s in SETTINGS:
        f, g = random_span(rng, s, 3, 2), random_span(rng, s, 2, 2)
        assert abs(inner_product(f, g) - np.conj(inner_product(g, f))) < 1e-12
        w = random_points(rng, s, 1)[0]
        c = rng.complex_normals(2)
        # reproducing property: <f, k_w c> = c^H f(w)
        assert abs(inner_product(f, RationalSection.kernel(s, w, c)) - np.vdot(c, f(w))) < 1e-12


def test_disk_polynomial_inner_product_is_coefficient_sum():
    f = RationalSection.polynomial([1.0, 2.0j, -1.0])
    g = RationalSection.polynomial([0.5, 1.0])
    assert abs(inner_product(f, g) - (0.5 + 2.0j)) < 1e-15


@pytest.mark.parametrize("setting", SETTINGS)
def test_gram_of_sections_is_psd(setting, rng):
    fs = [random_span(rng, setting, 3) for _ in range(4)]
    G = np.array([[inner_product(fk, fl) for fk in fs] for fl in fs])
    assert inertia(G, 1e-12).n_minus == 0


# --- structural identities -----------------------------------------------------------

@given(seeds)
def test_equadb2_on_kernel_sections(seed):
    rng = SplitMix64(seed)
    s = Setting.HALF_PLANE
    mu, nu, a, b = random_points(rng, s, 4)
    f, g = RationalSection.kernel(s, mu), RationalSection.kernel(s, nu)
    assert check_identity("equadb2", f, g, a, b) < 1e-12


@given(seeds, st.integers(1, 6))
def test_hardy_identities_on_spans(seed, size):
    rng = SplitMix64(seed)
    f, g = random_span(rng, Setting.DISK, size, 2), random_span(rng, Setting.DISK, size, 2)
    a, b = random_points(rng, Setting.DISK, 2)
    assert check_identity("equadb1", f, g, a, b) < 1e-10
    f, g = random_span(rng, Setting.HALF_PLANE, size, 2), random_span(rng, Setting.HALF_PLANE, size, 2)
    a, b = random_points(rng, Setting.HALF_PLANE, 2)
    assert check_identity("equadb2", f, g, a, b) < 1e-10


def test_equadb1_constant_one():
    one = RationalSection.polynomial([1.0])
    assert check_identity("equadb1", one, one, 0, 0) < 1e-15


@given(seeds)
def test_equadb1_with_polynomial_parts(seed):
    rng = SplitMix64(seed)
    p = RationalSection.polynomial(rng.complex_normals((3, 1)))
    f = random_span(rng, Setting.DISK, 2) + p
    g = RationalSection.polynomial(rng.complex_normals((2, 1))) + random_span(rng, Setting.DISK, 2)
    a, b = random_points(rng, Setting.DISK, 2)
    assert check_identity("equadb1", f, g, a, b) < 1e-10


@given(seeds)
def test_adjfa_disk_pair_reduces_to_equadb1(seed):
    rng = SplitMix64(seed)
    f, g = random_span(rng, Setting.DISK, 3), random_span(rng, Setting.DISK, 2)
    a, b = random_points(rng, Setting.DISK, 2)
    from krein_kernels.kernel_spaces import identity_terms
    ab = ABPair.disk_pair()
    fa, ga = (RationalSection(ab, h.mus, h.coeffs, h.poly) for h in (f, g))
    adj = sum(identity_terms("adjfa", fa, ga, a, b).values())
    eq1 = sum(identity_terms("equadb1", f, g, a, b).values())
    assert abs(adj + eq1) < 1e-12 and abs(adj) < 1e-12


def test_adjfa_half_plane_pair(rng):
    ab = ABPair.half_plane_pair()
    f = RationalSection.span(ab, [ab.sample_plus(rng) for _ in range(3)], rng.complex_normals((3, 1)))
    g = RationalSection.span(ab, [ab.sample_plus(rng) for _ in range(2)], rng.complex_normals((2, 1)))
    a, b = ab.sample_plus(rng), ab.sample_plus(rng)
    assert check_identity("adjfa", f, g, a, b) < 1e-10


def test_identity_domain_checks():
    k = RationalSection.kernel(Setting.HALF_PLANE, 1.0)
    with pytest.raises(DomainViolation):
        check_identity("equadb2", k, k, -1.0, 1.0)
    with pytest.raises(DomainViolation):
        check_identity("equadb1", k, k, 1.0, 1.0)


# --- negative squares -------------------------------------------------------------

def test_hardy_kernel_has_no_negative_squares(rng):
    for s in SETTINGS:
        pts = random_points(rng, s, 10)
        assert negative_squares(lambda z, w: hardy_kernel(s, z, w), PointChoice(pts)) == 0


def test_inner_function_kernel_positive(rng):
    K = blaschke_kernel([1.0, 0.5 + 1j])
    pts = random_points(rng, Setting.HALF_PLANE, 8)
    assert negative_squares(K, PointChoice(pts)) == 0


def test_non_hermitian_kernel_rejected():
    with pytest.raises(NonHermitianKernel):
        negative_squares(lambda z, w: z * w, PointChoice([0.1, 0.2j]))


@given(seeds)
def test_negative_squares_monotone_in_points(seed):
    from krein_kernels.sampling import random_colligation
    from krein_kernels.schur_realization import kernel_direct
    rng = SplitMix64(seed)
    c = random_colligation(rng, 3, 1)
    pts = random_points(rng, Setting.DISK, 6)
    K = lambda z, w: kernel_direct(c, Setting.DISK, z, w)  # noqa: E731
    counts = [negative_squares(K, PointChoice(pts[:n]), 1e-9) for n in range(1, 7)]
    assert counts == sorted(counts)


def test_kernel_gram_with_vectors():
    pts = [0.1, 0.2j]
    vecs = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    G = kernel_gram(lambda z, w: np.eye(2) * hardy_kernel(Setting.DISK, z, w), PointChoice(pts, vecs))
    assert G.shape == (2, 2) and abs(G[0, 1]) < 1e-15
