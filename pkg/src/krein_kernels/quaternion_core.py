"""Quaternions, quaternionic matrices, slice functions and the star product.

A quaternion ``x0 + x1 i + x2 j + x3 k`` is stored as the complex pair
``(z1, z2) = (x0 + x1 i, x2 + x3 i)`` with ``q = z1 + z2 j``. Matrices use the
same split ``M = Z1 + Z2 j`` and embed as

    chi(M) = [[Z1, Z2], [-conj(Z2), conj(Z1)]]

which is a unital ring homomorphism; all spectral work goes through it.

Slice functions are evaluated on ``p = x + I y`` with ``I`` the imaginary unit
of ``p``. For left slice functions ``f(x + I y) = A + I B`` the star product is
``(f * g)(x + I y) = (A C - B D) + I (A D + B C)``; right slice functions put
``I`` on the right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import CenterMismatch, DimensionMismatch, NotInImage, SingularSResolvent

EMBED_TOL = 1e-12


@dataclass(frozen=True)
class Quaternion:
    x0: float = 0.0
    x1: float = 0.0
    x2: float = 0.0
    x3: float = 0.0

    @classmethod
    def from_complex(cls, z: complex) -> "Quaternion":
        z = complex(z)
        return cls(z.real, z.imag, 0.0, 0.0)

    @classmethod
    def from_pair(cls, z1: complex, z2: complex) -> "Quaternion":
        return cls(z1.real, z1.imag, z2.real, z2.imag)

    @classmethod
    def coerce(cls, x) -> "Quaternion":
        if isinstance(x, Quaternion):
            return x
        if isinstance(x, (int, float, complex, np.number)):
            return cls.from_complex(complex(x))
        arr = np.asarray(x, dtype=float).ravel()
        if arr.size != 4:
            raise DimensionMismatch("a quaternion needs four real components")
        return cls(*map(float, arr))

    @property
    def pair(self) -> tuple[complex, complex]:
        return complex(self.x0, self.x1), complex(self.x2, self.x3)

    def as_array(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.x2, self.x3])

    @property
    def real(self) -> float:
        return self.x0

    @property
    def imag_norm(self) -> float:
        return math.sqrt(self.x1 ** 2 + self.x2 ** 2 + self.x3 ** 2)

    def is_real(self, tol: float = 0.0) -> bool:
        return self.imag_norm <= tol

    def unit(self) -> "Quaternion":
        """Imaginary unit ``I`` with ``p = Re(p) + I |Im(p)|``; ``i`` for real ``p``."""
        r = self.imag_norm
        if r == 0.0:
            return Quaternion(0.0, 1.0)
        return Quaternion(0.0, self.x1 / r, self.x2 / r, self.x3 / r)

    def conj(self) -> "Quaternion":
        return Quaternion(self.x0, -self.x1, -self.x2, -self.x3)

    def norm2(self) -> float:
        return self.x0 ** 2 + self.x1 ** 2 + self.x2 ** 2 + self.x3 ** 2

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def inv(self) -> "Quaternion":
        n = self.norm2()
        if n == 0.0:
            raise ZeroDivisionError("quaternion 0 has no inverse")
        c = self.conj()
        return Quaternion(c.x0 / n, c.x1 / n, c.x2 / n, c.x3 / n)

    def __mul__(self, other):
        if isinstance(other, QMatrix):
            return other.lmul(self)
        o = Quaternion.coerce(other)
        a0, a1, a2, a3 = self.x0, self.x1, self.x2, self.x3
        b0, b1, b2, b3 = o.x0, o.x1, o.x2, o.x3
        return Quaternion(
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        )

    def __rmul__(self, other):
        return Quaternion.coerce(other) * self

    def __add__(self, other):
        o = Quaternion.coerce(other)
        return Quaternion(self.x0 + o.x0, self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-Quaternion.coerce(other))

    def __rsub__(self, other):
        return Quaternion.coerce(other) - self

    def __neg__(self):
        return Quaternion(-self.x0, -self.x1, -self.x2, -self.x3)

    def __truediv__(self, s: float):
        return Quaternion(self.x0 / s, self.x1 / s, self.x2 / s, self.x3 / s)

    def __pow__(self, n: int) -> "Quaternion":
        out = Quaternion(1.0)
        for _ in range(n):
            out = out * self
        return out

    def __abs__(self) -> float:
        return self.norm()

    def __repr__(self) -> str:
        return f"Quaternion({self.x0:.6g}, {self.x1:.6g}, {self.x2:.6g}, {self.x3:.6g})"


def qmul(p, q) -> Quaternion:
    return Quaternion.coerce(p) * Quaternion.coerce(q)


def qconj(p) -> Quaternion:
    return Quaternion.coerce(p).conj()


def qnorm(p) -> float:
    return Quaternion.coerce(p).norm()


def qinv(p) -> Quaternion:
    return Quaternion.coerce(p).inv()


def qdist(p, q) -> float:
    return (Quaternion.coerce(p) - Quaternion.coerce(q)).norm()


def slice_point(x: float, y: float, unit: Quaternion) -> Quaternion:
    """``x + unit * y``."""
    return Quaternion(x + unit.x0 * y, unit.x1 * y, unit.x2 * y, unit.x3 * y)


# --- matrices ----------------------------------------------------------------

class QMatrix:
    """Quaternionic matrix ``Z1 + Z2 j`` with complex ``m x n`` parts."""

    __slots__ = ("Z1", "Z2")

    def __init__(self, Z1, Z2=None):
        Z1 = np.atleast_2d(np.asarray(Z1, dtype=complex))
        Z2 = np.zeros_like(Z1) if Z2 is None else np.atleast_2d(np.asarray(Z2, dtype=complex))
        if Z1.shape != Z2.shape:
            raise DimensionMismatch("quaternion matrix parts differ in shape")
        Z1.setflags(write=False)
        Z2.setflags(write=False)
        object.__setattr__(self, "Z1", Z1)
        object.__setattr__(self, "Z2", Z2)

    def __setattr__(self, name, value):
        raise AttributeError("QMatrix is immutable")

    @classmethod
    def from_components(cls, X0, X1, X2, X3) -> "QMatrix":
        return cls(np.asarray(X0) + 1j * np.asarray(X1), np.asarray(X2) + 1j * np.asarray(X3))

    @classmethod
    def from_quaternions(cls, grid: Sequence[Sequence]) -> "QMatrix":
        rows = [[Quaternion.coerce(x).pair for x in row] for row in grid]
        Z1 = np.array([[a for a, _ in row] for row in rows], dtype=complex)
        Z2 = np.array([[b for _, b in row] for row in rows], dtype=complex)
        return cls(Z1, Z2)

    @classmethod
    def scalar(cls, q) -> "QMatrix":
        z1, z2 = Quaternion.coerce(q).pair
        return cls([[z1]], [[z2]])

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls(np.eye(n))

    @classmethod
    def zeros(cls, m: int, n: int) -> "QMatrix":
        return cls(np.zeros((m, n)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.Z1.shape

    def components(self) -> tuple[np.ndarray, ...]:
        return self.Z1.real, self.Z1.imag, self.Z2.real, self.Z2.imag

    def entry(self, i: int, j: int) -> Quaternion:
        return Quaternion.from_pair(complex(self.Z1[i, j]), complex(self.Z2[i, j]))

    def to_quaternion(self) -> Quaternion:
        if self.shape != (1, 1):
            raise DimensionMismatch("not a 1x1 quaternion matrix")
        return self.entry(0, 0)

    def embed(self) -> np.ndarray:
        return complex_embed(self)

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.shape[1] != other.shape[0]:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        A1, A2, B1, B2 = self.Z1, self.Z2, other.Z1, other.Z2
        return QMatrix(A1 @ B1 - A2 @ B2.conj(), A1 @ B2 + A2 @ B1.conj())

    def lmul(self, q) -> "QMatrix":
        """Left multiplication by a quaternion scalar."""
        z1, z2 = Quaternion.coerce(q).pair
        return QMatrix(z1 * self.Z1 - z2 * self.Z2.conj(), z1 * self.Z2 + z2 * self.Z1.conj())

    def rmul(self, q) -> "QMatrix":
        """Right multiplication by a quaternion scalar."""
        z1, z2 = Quaternion.coerce(q).pair
        return QMatrix(self.Z1 * z1 - self.Z2 * np.conj(z2), self.Z1 * z2 + self.Z2 * np.conj(z1))

    def __mul__(self, q) -> "QMatrix":
        if isinstance(q, (int, float, np.floating)):
            return QMatrix(self.Z1 * q, self.Z2 * q)
        return self.rmul(q)

    def __rmul__(self, q) -> "QMatrix":
        if isinstance(q, (int, float, np.floating)):
            return QMatrix(self.Z1 * q, self.Z2 * q)
        return self.lmul(q)

    def __add__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self.Z1 + other.Z1, self.Z2 + other.Z2)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self.Z1 - other.Z1, self.Z2 - other.Z2)

    def __neg__(self) -> "QMatrix":
        return QMatrix(-self.Z1, -self.Z2)

    def adjoint(self) -> "QMatrix":
        """Quaternionic conjugate transpose ``M^*``."""
        return QMatrix(self.Z1.conj().T, -self.Z2.T)

    def inv(self) -> "QMatrix":
        return complex_unembed(np.linalg.inv(self.embed()))

    def max_abs(self) -> float:
        """Largest entry modulus."""
        if not self.Z1.size:
            return 0.0
        return float(np.max(np.sqrt(np.abs(self.Z1) ** 2 + np.abs(self.Z2) ** 2)))

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.Z1.imag) <= tol) and np.all(np.abs(self.Z2) <= tol))

    def __repr__(self) -> str:
        return f"QMatrix(shape={self.shape})"


def complex_embed(M: QMatrix) -> np.ndarray:
    return np.block([[M.Z1, M.Z2], [-M.Z2.conj(), M.Z1.conj()]])


def complex_unembed(X: np.ndarray, tol: float = EMBED_TOL) -> QMatrix:
    """Inverse of :func:`complex_embed`; raises NotInImage without the block symmetry."""
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] % 2 or X.shape[1] % 2:
        raise NotInImage("embedded matrix must have even dimensions")
    m, n = X.shape[0] // 2, X.shape[1] // 2
    Z1, Z2 = X[:m, :n], X[:m, n:]
    err = max(np.max(np.abs(X[m:, n:] - Z1.conj()), initial=0.0), np.max(np.abs(X[m:, :n] + Z2.conj()), initial=0.0))
    if err > tol * max(1.0, float(np.max(np.abs(X), initial=0.0))):
        raise NotInImage(f"matrix lacks the quaternionic block symmetry (error {err:.2e})")
    return QMatrix(Z1, Z2)


def as_qmatrix(x) -> QMatrix:
    if isinstance(x, QMatrix):
        return x
    return QMatrix.scalar(x)


# --- slice functions and star products ----------------------------------------

def _slice_parts(f: Callable, p: Quaternion, side: str) -> tuple[QMatrix, QMatrix, Quaternion]:
    """``(A, B, I)`` with ``f(x + I y) = A + I B`` (left) or ``A + B I`` (right)."""
    unit = p.unit()
    fp, fq = as_qmatrix(f(p)), as_qmatrix(f(p.conj()))
    A = (fp + fq) * 0.5
    D = (fp - fq) * 0.5
    if side == "left":
        B = D.lmul(-unit)       # I^{-1} = -I
    else:
        B = D.rmul(-unit)
    return A, B, unit


def star_values(f: Callable, g: Callable, p) -> QMatrix:
    """``(f * g)(p)`` for left slice functions given as callables."""
    p = Quaternion.coerce(p)
    if p.is_real():
        return as_qmatrix(f(p)) @ as_qmatrix(g(p))
    A, B, unit = _slice_parts(f, p, "left")
    C, D, _ = _slice_parts(g, p, "left")
    return (A @ C - B @ D) + (A @ D + B @ C).lmul(unit)


def star_values_right(f: Callable, g: Callable, r) -> QMatrix:
    """``(f *_r g)(r)`` for right slice functions given as callables."""
    r = Quaternion.coerce(r)
    if r.is_real():
        return as_qmatrix(f(r)) @ as_qmatrix(g(r))
    A, B, unit = _slice_parts(f, r, "right")
    C, D, _ = _slice_parts(g, r, "right")
    return (A @ C - B @ D) + (A @ D + B @ C).rmul(unit)


@dataclass(frozen=True, eq=False)
class SlicePowerSeries:
    """``f(p) = sum_n (p - center)^n f_n`` with a real center and right coefficients."""

    center: float
    coeffs: tuple
    radius: float = math.inf

    MAX_DEGREE = 64

    def __post_init__(self):
        c = complex(self.center)
        if c.imag != 0:
            raise CenterMismatch("series centers must be real")
        coeffs = tuple(as_qmatrix(x) for x in self.coeffs)
        if not coeffs:
            raise ValueError("a series needs at least one coefficient")
        if len(coeffs) - 1 > self.MAX_DEGREE:
            coeffs = coeffs[: self.MAX_DEGREE + 1]
        shape = coeffs[0].shape
        if any(x.shape != shape for x in coeffs):
            raise DimensionMismatch("series coefficients differ in shape")
        object.__setattr__(self, "center", float(c.real))
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs[0].shape

    def __call__(self, p) -> QMatrix:
        u = Quaternion.coerce(p) - self.center
        # Horner with the scalar on the left: f_0 + u (f_1 + u (f_2 + ...))
        acc = self.coeffs[-1]
        for c in self.coeffs[-2::-1]:
            acc = c + acc.lmul(u)
        return acc

    def scalar(self, p) -> Quaternion:
        return self(p).to_quaternion()


def _check_centers(f: SlicePowerSeries, g: SlicePowerSeries) -> None:
    if f.center != g.center:
        raise CenterMismatch(f"series centers differ: {f.center} vs {g.center}")


def star_product(f: SlicePowerSeries, g: SlicePowerSeries) -> SlicePowerSeries:
    """Coefficient convolution ``(f * g)_n = sum_k f_k g_{n-k}``, truncated at degree 64."""
    _check_centers(f, g)
    deg = min(f.degree + g.degree, SlicePowerSeries.MAX_DEGREE)
    out = []
    for n in range(deg + 1):
        acc = None
        for k in range(max(0, n - g.degree), min(n, f.degree) + 1):
            term = f.coeffs[k] @ g.coeffs[n - k]
            acc = term if acc is None else acc + term
        out.append(acc)
    return SlicePowerSeries(f.center, tuple(out), min(f.radius, g.radius))


def star_eval(f: SlicePowerSeries, g: SlicePowerSeries, p, method: str = "conjugation") -> QMatrix:
    """``(f * g)(p)`` by one of three routes.

    ``series``: evaluate the coefficient convolution. ``slice``: the slice
    component formula. ``conjugation``: for scalar ``f`` with ``f(p) != 0``,
    ``f(p) g(f(p)^{-1} p f(p))``; otherwise falls back to ``slice``.
    """
    _check_centers(f, g)
    p = Quaternion.coerce(p)
    if method == "series":
        return star_product(f, g)(p)
    if method == "slice":
        return star_values(f, g, p)
    if method == "conjugation":
        if f.shape == (1, 1):
            fp = f.scalar(p)
            if fp.norm() > 1e-14:
                return g(fp.inv() * p * fp).lmul(fp)
        return star_values(f, g, p)
    raise ValueError(f"unknown method {method!r}")


def is_intrinsic(f: SlicePowerSeries, tol: float = 0.0) -> bool:
    """All coefficients real (for a real center this makes ``f`` slice preserving)."""
    return all(c.is_real(tol) for c in f.coeffs)


def resolvent_R_alpha_q(f: SlicePowerSeries, alpha: float) -> SlicePowerSeries:
    """``(p - alpha)^{-1}(f(p) - f(alpha))``: the coefficient shift at the center."""
    if complex(alpha) != f.center:
        raise CenterMismatch("R_alpha acts at the series center")
    if f.degree == 0:
        return SlicePowerSeries(f.center, (QMatrix.zeros(*f.shape),), f.radius)
    return SlicePowerSeries(f.center, f.coeffs[1:], f.radius)


def star_inverse_resolvent(A: QMatrix, G: QMatrix, p) -> QMatrix:
    """Value at ``p`` of ``G * (I - p A)^{-*} = (G - conj(p) G A)(I - 2Re(p) A + |p|^2 A^2)^{-1}``.

    Equals ``sum_n p^n G A^n`` where the series converges, since
    ``p^2 - 2Re(p) p + |p|^2 = 0``.
    """
    p = Quaternion.coerce(p)
    n = A.shape[0]
    if n == 0:
        return G
    Aem = A.embed()
    I = np.eye(2 * n)
    Q = I - 2.0 * p.real * Aem + p.norm2() * Aem @ Aem
    if np.linalg.cond(Q) > 1e12:
        raise SingularSResolvent(f"{p} lies on the S-spectrum sphere of 1/A")
    num = G - (G @ A).lmul(p.conj())
    return complex_unembed(np.linalg.solve(Q.T, num.embed().T).T)


def geometric_series(A: QMatrix, G: QMatrix, p, degree: int = 32) -> QMatrix:
    """Truncated ``sum_{n <= degree} p^n G A^n``, the oracle for :func:`star_inverse_resolvent`."""
    p = Quaternion.coerce(p)
    term = G
    acc = G
    pn = Quaternion(1.0)
    for _ in range(degree):
        term = term @ A
        pn = pn * p
        acc = acc + term.lmul(pn)
    return acc
