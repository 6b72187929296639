"""Seeded random draws of metrics, J-unitaries and coisometric colligations."""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .indefinite_linalg import Metric
from .kernel_spaces import Setting
from .rng import SplitMix64
from .schur_realization import Colligation


def signature(n: int, n_minus: int) -> np.ndarray:
    return np.array([1] * (n - n_minus) + [-1] * n_minus)


def random_hermitian(rng: SplitMix64, n: int) -> np.ndarray:
    X = rng.complex_normals((n, n))
    return 0.5 * (X + X.conj().T)


def random_j_unitary(rng: SplitMix64, signs, scale: float = 0.5) -> np.ndarray:
    """``U = expm(i J H)`` with ``H`` Hermitian, so ``U J U^H = J``."""
    J = np.diag(np.asarray(signs, dtype=float))
    H = random_hermitian(rng, len(signs))
    return expm(1j * scale * J @ H)


def random_colligation(rng: SplitMix64, dim_p: int, ind_p: int = 0, dim_c: int = 1, ind_c: int = 0,
                       alpha: complex = 0.0, scale: float = 0.5) -> Colligation:
    """A J-unitary (hence coisometric) colligation on ``P (+) C`` with ``D = C``."""
    sp, sc = signature(dim_p, ind_p), signature(dim_c, ind_c)
    U = random_j_unitary(rng, np.concatenate([sp, sc]), scale)
    n = dim_p
    return Colligation(U[:n, :n], U[:n, n:], U[n:, :n], U[n:, n:],
                       Metric.from_signature(sp), Metric.from_signature(sc), Metric.from_signature(sc),
                       base_point=alpha)


def random_points(rng: SplitMix64, setting, n: int) -> list[complex]:
    if setting is Setting.DISK:
        return [rng.disk_point() for _ in range(n)]
    if setting is Setting.HALF_PLANE:
        return [rng.halfplane_point() for _ in range(n)]
    return [setting.sample_plus(rng) for _ in range(n)]


def blaschke_halfplane(zeros, z: complex) -> complex:
    """``prod (z - w_j)/(z + conj(w_j))``, an inner function of the right half-plane."""
    out = 1.0 + 0j
    for w in zeros:
        out *= (z - w) / (z + np.conj(w))
    return out


def blaschke_kernel(zeros):
    """Kernel ``(1 - B(z) conj(B(w))) / (2 pi (z + conj(w)))`` of the model space of ``B``."""
    def K(z, w):
        Bz, Bw = blaschke_halfplane(zeros, z), blaschke_halfplane(zeros, w)
        return np.array([[(1.0 - Bz * np.conj(Bw)) / (2.0 * np.pi * (z + np.conj(w)))]])
    return K
