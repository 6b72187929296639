"""Finite-dimensional linear algebra over indefinite (Pontryagin) metrics.

A metric is a Hermitian invertible Gram matrix ``Q``; the form is
``[x, y] = y^H Q x``. The adjoint of ``A: (C^n, Q_dom) -> (C^m, Q_cod)`` is
``A^[*] = Q_dom^{-1} A^H Q_cod``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NonHermitian, RankAmbiguous

DEFAULT_TOL = 1e-10

__all__ = [
    "Inertia",
    "Metric",
    "MetricMap",
    "herm_eig",
    "inertia",
    "indef_adjoint",
    "is_coisometric",
    "defect_factorization",
    "direct_sum",
]


def _scale(M: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0


def _check_hermitian(M: np.ndarray, tol: float) -> None:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    err = float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0
    if err > tol * _scale(M):
        raise NonHermitian(f"matrix is not Hermitian: max|M - M^H| = {err:.3e}")


def herm_eig(M, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi.

    Returns ``(lam, U)`` with ``lam`` ascending and ``M = U diag(lam) U^H``.
    """
    A = np.array(M, dtype=complex)
    _check_hermitian(A, tol)
    n = A.shape[0]
    A = 0.5 * (A + A.conj().T)
    U = np.eye(n, dtype=complex)
    if n == 0:
        return np.zeros(0), U
    norm = float(np.linalg.norm(A))
    if norm == 0.0:
        return np.zeros(n), U
    eps = np.finfo(float).eps
    for _sweep in range(100):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= eps * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag <= eps * eps * norm:
                    continue
                # phase rotation makes A[p,q] real and positive, then a real Jacobi rotation
                phase = apq / mag
                theta = (A[q, q].real - A[p, p].real) / (2.0 * mag)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                W = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=complex)
                idx = [p, q]
                A[:, idx] = A[:, idx] @ W
                A[idx, :] = W.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                U[:, idx] = U[:, idx] @ W
    lam = np.real(np.diag(A)).copy()
    order = np.argsort(lam, kind="stable")
    return lam[order], U[:, order]


@dataclass(frozen=True)
class Inertia:
    n_plus: int
    n_minus: int
    n_zero: int

    def __iter__(self):
        return iter((self.n_plus, self.n_minus, self.n_zero))


def inertia(M, tol: float = DEFAULT_TOL, scale: float | None = None) -> Inertia:
    """Count eigenvalues above ``tol*scale``, below ``-tol*scale`` and in between.

    ``scale`` defaults to ``max(1, max|M_ij|)``.
    """
    M = np.asarray(M, dtype=complex)
    lam, _ = herm_eig(M, tol)
    thr = tol * (_scale(M) if scale is None else scale)
    n_plus = int(np.sum(lam > thr))
    n_minus = int(np.sum(lam < -thr))
    return Inertia(n_plus, n_minus, len(lam) - n_plus - n_minus)


@dataclass(frozen=True, eq=False)
class Metric:
    """Hermitian invertible Gram matrix defining ``[x, y] = y^H gram x``."""

    gram: np.ndarray
    ind_minus: int = field(init=False)

    def __post_init__(self):
        g = np.array(self.gram, dtype=complex)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise DimensionMismatch("gram must be square")
        iner = inertia(g)
        if iner.n_zero:
            raise NonHermitian("gram is singular (zero eigenvalue within tolerance)")
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "ind_minus", iner.n_minus)

    @classmethod
    def from_signature(cls, signs: Sequence[int]) -> "Metric":
        return cls(np.diag(np.asarray(signs, dtype=float)).astype(complex))

    @classmethod
    def euclidean(cls, n: int) -> "Metric":
        return cls(np.eye(n, dtype=complex))

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @property
    def is_canonical(self) -> bool:
        g = self.gram
        return bool(np.array_equal(g, np.diag(np.diag(g))) and np.all(np.abs(np.abs(np.diag(g)) - 1) == 0))

    @property
    def signature(self) -> list[int]:
        if not self.is_canonical:
            raise ValueError("metric is not in canonical diag(+-1) form; call normalize()")
        return [int(round(x.real)) for x in np.diag(self.gram)]

    def inv(self) -> np.ndarray:
        if self.is_canonical:
            return self.gram.copy()
        return np.linalg.inv(self.gram)

    def form(self, x, y) -> complex:
        """``[x, y] = y^H gram x``."""
        return complex(np.vdot(np.asarray(y), self.gram @ np.asarray(x)))

    def normalize(self) -> tuple["Metric", np.ndarray]:
        """Congruence to canonical form: returns ``(J, S)`` with ``S^H gram S = J``.

        Coordinates change as ``x = S x_canonical``.
        """
        lam, U = herm_eig(self.gram)
        S = U / np.sqrt(np.abs(lam))
        return Metric(np.diag(np.sign(lam)).astype(complex)), S

    def __repr__(self) -> str:
        if self.is_canonical:
            return f"Metric(signature={self.signature})"
        return f"Metric(dim={self.dim}, ind_minus={self.ind_minus})"


def direct_sum(*metrics: Metric) -> Metric:
    n = sum(m.dim for m in metrics)
    g = np.zeros((n, n), dtype=complex)
    i = 0
    for m in metrics:
        g[i:i + m.dim, i:i + m.dim] = m.gram
        i += m.dim
    return Metric(g)


@dataclass(frozen=True, eq=False)
class MetricMap:
    matrix: np.ndarray
    domain: Metric
    codomain: Metric

    def __post_init__(self):
        A = np.array(self.matrix, dtype=complex).reshape(self.codomain.dim, self.domain.dim) \
            if np.size(self.matrix) == self.codomain.dim * self.domain.dim else None
        if A is None:
            raise DimensionMismatch(
                f"matrix shape {np.shape(self.matrix)} does not match metrics "
                f"({self.codomain.dim} x {self.domain.dim})"
            )
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def __matmul__(self, other: "MetricMap") -> "MetricMap":
        return MetricMap(self.matrix @ other.matrix, other.domain, self.codomain)


def indef_adjoint(A: MetricMap) -> MetricMap:
    """``A^[*] = Q_dom^{-1} A^H Q_cod``, characterized by ``[Ax, y] = [x, A^[*] y]``."""
    if A.domain.is_canonical:
        adj = A.domain.gram @ A.matrix.conj().T @ A.codomain.gram
    else:
        adj = np.linalg.solve(A.domain.gram, A.matrix.conj().T @ A.codomain.gram)
    return MetricMap(adj, A.codomain, A.domain)


def is_coisometric(M: MetricMap, tol: float = DEFAULT_TOL) -> bool:
    prod = M.matrix @ indef_adjoint(M).matrix
    return bool(np.max(np.abs(prod - np.eye(M.codomain.dim)), initial=0.0) <= tol)


def defect_factorization(C: MetricMap, tol: float = DEFAULT_TOL) -> tuple[MetricMap, Metric]:
    """Factor the defect ``I - C C^[*] = X X^[*]`` on the codomain of ``C``.

    With ``Q`` the codomain Gram and ``Q (I - C C^[*]) = U diag(lam) U^H``,
    eigenvalues with ``|lam| <= tol * scale`` are dropped and
    ``X = Q^{-1} U_r |lam_r|^{1/2}`` on the space with metric ``diag(sign lam_r)``.
    Columns are ordered by descending ``|lam|`` and each column's first
    nonzero entry is made real positive, so the output is deterministic.

    Raises RankAmbiguous when some ``|lam|`` sits in ``(tol, 10 tol] * scale``.
    """
    Q = C.codomain.gram
    n = C.codomain.dim
    D = np.eye(n) - C.matrix @ indef_adjoint(C).matrix
    QD = Q @ D
    QD = 0.5 * (QD + QD.conj().T)
    lam, U = herm_eig(QD, tol=max(tol, 1e-8))
    scale = max(float(np.max(np.abs(lam), initial=0.0)), float(np.max(np.abs(Q))))
    cut = tol * scale
    ambiguous = (np.abs(lam) > cut) & (np.abs(lam) <= 10 * cut)
    if np.any(ambiguous):
        bad = float(lam[ambiguous][0])
        raise RankAmbiguous(f"defect eigenvalue {bad:.3e} inside guard band ({cut:.1e}, {10 * cut:.1e}]", bad)
    keep = np.abs(lam) > cut
    lam_r, U_r = lam[keep], U[:, keep]
    order = np.argsort(-np.abs(lam_r), kind="stable")
    lam_r, U_r = lam_r[order], U_r[:, order]
    for j in range(U_r.shape[1]):
        col = U_r[:, j]
        k = int(np.argmax(np.abs(col) > 1e-12 * np.max(np.abs(col))))
        U_r[:, j] = col * (abs(col[k]) / col[k])
    if C.codomain.is_canonical:
        X = Q @ U_r * np.sqrt(np.abs(lam_r))
    else:
        X = np.linalg.solve(Q, U_r) * np.sqrt(np.abs(lam_r))
    metric_c1 = Metric(np.diag(np.sign(lam_r)).astype(complex))
    return MetricMap(X, metric_c1, C.codomain), metric_c1
