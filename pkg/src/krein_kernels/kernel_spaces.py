"""Hardy-type reproducing kernels and exact kernel-section arithmetic.

Functions are finite combinations of kernel sections ``k(., mu) c`` plus (in
the disk only) a polynomial part. The span is closed under the difference
quotient ``R_alpha``, and inner products follow from the reproducing
property ``<k(., mu) c, k(., nu) d> = d^H k(nu, mu) c``, so every identity
can be checked in closed form.

A setting is either :class:`Setting` (disk or right half-plane) or an
:class:`~krein_kernels.unified_setting.ABPair`, whose kernel is ``1/rho``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch, DomainViolation, NonHermitianKernel, PoleAtAlpha, UnsupportedFunction
from .indefinite_linalg import DEFAULT_TOL, inertia

__all__ = [
    "Setting",
    "RationalSection",
    "PointChoice",
    "hardy_kernel",
    "in_domain",
    "resolvent_apply",
    "rab_apply_section",
    "inner_product",
    "identity_terms",
    "check_identity",
    "kernel_gram",
    "negative_squares",
]

TWO_PI = 2.0 * math.pi


class Setting(enum.Enum):
    DISK = "disk"
    HALF_PLANE = "half_plane"


def _is_ab(setting) -> bool:
    return not isinstance(setting, Setting) and hasattr(setting, "rho")


def in_domain(setting, z: complex) -> bool:
    if setting is Setting.DISK:
        return abs(z) < 1.0
    if setting is Setting.HALF_PLANE:
        return z.real > 0.0
    if _is_ab(setting):
        return setting.classify(z).name == "OMEGA_PLUS"
    raise TypeError(f"unknown setting {setting!r}")


def _kernel_unchecked(setting, z, w):
    if setting is Setting.DISK:
        den = 1.0 - z * np.conj(w)
        return 1.0 / den
    if setting is Setting.HALF_PLANE:
        return 1.0 / (TWO_PI * (z + np.conj(w)))
    return 1.0 / setting.rho(z, w)


def hardy_kernel(setting, z: complex, w: complex) -> complex:
    """Reproducing kernel of the Hardy space of the setting.

    Disk ``1/(1 - z conj(w))``, half-plane ``1/(2 pi (z + conj(w)))``,
    (a, b)-setting ``1/rho(z, w)``.
    """
    for pt in (z, w):
        if not in_domain(setting, complex(pt)):
            raise DomainViolation(f"{pt} is outside the domain of {setting}")
    return complex(_kernel_unchecked(setting, complex(z), complex(w)))


def _same_setting(s1, s2) -> bool:
    if isinstance(s1, Setting) or isinstance(s2, Setting):
        return s1 is s2
    return s1 == s2


@dataclass(frozen=True, eq=False)
class RationalSection:
    """``f(z) = sum_i k(z, mu_i) c_i + sum_n z^n p_n`` with vector coefficients."""

    setting: object
    mus: np.ndarray            # (t,) complex
    coeffs: np.ndarray         # (t, m) complex
    poly: np.ndarray           # (d+1, m) ascending, possibly (0, m)

    def __post_init__(self):
        mus = np.atleast_1d(np.asarray(self.mus, dtype=complex))
        coeffs = np.asarray(self.coeffs, dtype=complex)
        poly = np.asarray(self.poly, dtype=complex)
        if coeffs.ndim == 1:
            coeffs = coeffs.reshape(len(mus), -1) if len(mus) else coeffs.reshape(0, poly.shape[-1] if poly.ndim == 2 else 1)
        if poly.ndim == 1:
            poly = poly.reshape(-1, coeffs.shape[1])
        if coeffs.shape[0] != len(mus) or poly.shape[1] != coeffs.shape[1]:
            raise DimensionMismatch("inconsistent section shapes")
        for mu in mus:
            if not in_domain(self.setting, complex(mu)):
                raise DomainViolation(f"pole parameter {mu} outside the domain")
        if poly.shape[0] and self.setting is not Setting.DISK:
            raise UnsupportedFunction("polynomial parts are only supported in the disk setting")
        mus, coeffs = _merge_terms(mus, coeffs)
        poly = _trim(poly)
        for a in (mus, coeffs, poly):
            a.setflags(write=False)
        object.__setattr__(self, "mus", mus)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "poly", poly)

    # constructors
    @classmethod
    def kernel(cls, setting, mu: complex, c=1.0) -> "RationalSection":
        c = np.atleast_1d(np.asarray(c, dtype=complex))
        return cls(setting, [mu], c.reshape(1, -1), np.zeros((0, c.size)))

    @classmethod
    def span(cls, setting, mus: Sequence[complex], coeffs) -> "RationalSection":
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim == 1:
            coeffs = coeffs.reshape(-1, 1)
        return cls(setting, mus, coeffs, np.zeros((0, coeffs.shape[1])))

    @classmethod
    def polynomial(cls, coeffs, setting=Setting.DISK) -> "RationalSection":
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim == 1:
            coeffs = coeffs.reshape(-1, 1)
        return cls(setting, np.zeros(0), np.zeros((0, coeffs.shape[1])), coeffs)

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        scalar = z.ndim == 0
        zz = np.atleast_1d(z)
        out = np.zeros((zz.size, self.dim), dtype=complex)
        for p in self.poly[::-1]:
            out = out * zz[:, None] + p
        if len(self.mus):
            K = _kernel_unchecked(self.setting, zz[:, None], self.mus[None, :])
            out += K @ self.coeffs
        return out[0] if scalar else out

    def __add__(self, other: "RationalSection") -> "RationalSection":
        if not _same_setting(self.setting, other.setting):
            raise ValueError("cannot add sections from different settings")
        d = max(len(self.poly), len(other.poly))
        poly = np.zeros((d, self.dim), dtype=complex)
        poly[: len(self.poly)] += self.poly
        poly[: len(other.poly)] += other.poly
        return RationalSection(self.setting, np.concatenate([self.mus, other.mus]),
                               np.vstack([self.coeffs, other.coeffs]), poly)

    def __neg__(self) -> "RationalSection":
        return self.scale(-1.0)

    def __sub__(self, other: "RationalSection") -> "RationalSection":
        return self + (-other)

    def scale(self, s: complex) -> "RationalSection":
        return RationalSection(self.setting, self.mus, s * self.coeffs, s * self.poly)

    def __mul__(self, s):
        return self.scale(s)

    __rmul__ = __mul__

    def multiply_by_z(self) -> "RationalSection":
        """``z f(z)``; only closed in the disk (``z k(z, mu) = (k(z, mu) - 1)/conj(mu)``)."""
        if self.setting is not Setting.DISK:
            raise UnsupportedFunction("z*f leaves the section class outside the disk setting")
        mus, coeffs = [], []
        const = np.zeros(self.dim, dtype=complex)
        poly_extra = np.zeros((0, self.dim), dtype=complex)
        for mu, c in zip(self.mus, self.coeffs):
            if mu == 0:
                # z k(z, 0) = z
                poly_extra = _padd(poly_extra, np.vstack([np.zeros(self.dim), c]))
            else:
                mus.append(mu)
                coeffs.append(c / np.conj(mu))
                const -= c / np.conj(mu)
        poly = np.vstack([np.zeros((1, self.dim)), self.poly]) if len(self.poly) else np.zeros((0, self.dim))
        poly = _padd(poly, poly_extra)
        poly = _padd(poly, const.reshape(1, -1))
        return RationalSection(self.setting, np.array(mus, dtype=complex),
                               np.array(coeffs, dtype=complex).reshape(-1, self.dim), poly)


def _padd(p, q):
    d = max(len(p), len(q))
    out = np.zeros((d, p.shape[1] if p.ndim == 2 and p.shape[1] else q.shape[1]), dtype=complex)
    out[: len(p)] += p
    out[: len(q)] += q
    return out


def _trim(poly: np.ndarray) -> np.ndarray:
    n = len(poly)
    while n and not np.any(poly[n - 1]):
        n -= 1
    return poly[:n].copy()


def _merge_terms(mus: np.ndarray, coeffs: np.ndarray):
    out_mu: list[complex] = []
    out_c: list[np.ndarray] = []
    for mu, c in zip(mus, coeffs):
        for i, m in enumerate(out_mu):
            if abs(m - mu) <= 1e-14 * (1.0 + abs(mu)):
                out_c[i] = out_c[i] + c
                break
        else:
            out_mu.append(complex(mu))
            out_c.append(np.array(c, dtype=complex))
    keep = [i for i, c in enumerate(out_c) if np.any(c != 0)]
    m = coeffs.shape[1]
    return (np.array([out_mu[i] for i in keep], dtype=complex),
            np.array([out_c[i] for i in keep], dtype=complex).reshape(-1, m))


@dataclass(frozen=True)
class PointChoice:
    """Points ``w_1..w_N`` and optional coefficient vectors ``c_1..c_N``.

    Without vectors the full block Gram over a basis of the coefficient
    space is used (the maximum over all vector choices).
    """

    points: tuple
    vectors: tuple | None = None

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.points)
        if not pts:
            raise ValueError("PointChoice needs at least one point")
        object.__setattr__(self, "points", pts)
        if self.vectors is not None:
            vecs = tuple(np.atleast_1d(np.asarray(v, dtype=complex)) for v in self.vectors)
            if len(vecs) != len(pts):
                raise DimensionMismatch("need one coefficient vector per point")
            object.__setattr__(self, "vectors", vecs)

    def validate(self, setting) -> None:
        for p in self.points:
            if not in_domain(setting, p):
                raise DomainViolation(f"point {p} outside the domain of {setting}")


# --- operators -------------------------------------------------------------

def _eigen_resolvent(setting, alpha: complex, mu: complex) -> complex:
    if setting is Setting.DISK:
        den = 1.0 - alpha * np.conj(mu)
        if abs(den) < 1e-14:
            raise PoleAtAlpha(f"k(., {mu}) has a pole at alpha={alpha}")
        return np.conj(mu) / den
    den = alpha + np.conj(mu)
    if abs(den) < 1e-14:
        raise PoleAtAlpha(f"k(., {mu}) has a pole at alpha={alpha}")
    return -1.0 / den


def resolvent_apply(f: RationalSection, alpha: complex) -> RationalSection:
    """``R_alpha f = (f(z) - f(alpha)) / (z - alpha)`` in closed form.

    Kernel sections are eigenvectors: ``R_alpha k(., mu) = conj(mu)/(1 - alpha conj(mu)) k(., mu)``
    in the disk and ``-(alpha + conj(mu))^{-1} k(., mu)`` in the half-plane.
    """
    if _is_ab(f.setting):
        raise UnsupportedFunction("use rab_apply_section for (a,b)-sections")
    alpha = complex(alpha)
    lam = np.array([_eigen_resolvent(f.setting, alpha, mu) for mu in f.mus], dtype=complex)
    coeffs = f.coeffs * lam[:, None] if len(lam) else f.coeffs
    poly = f.poly
    if len(poly) > 1:
        q = np.zeros((len(poly) - 1, f.dim), dtype=complex)
        acc = np.zeros(f.dim, dtype=complex)
        for n in range(len(poly) - 1, 0, -1):
            acc = poly[n] + alpha * acc
            q[n - 1] = acc
        poly = q
    else:
        poly = np.zeros((0, f.dim))
    return RationalSection(f.setting, f.mus, coeffs, poly)


def rab_apply_section(f: RationalSection, alpha: complex, swap: bool = False) -> RationalSection:
    """``R(a,b,alpha)`` (or ``R(b,a,alpha)`` if ``swap``) on sections of ``1/rho``.

    On ``K(., mu) = 1/rho(., mu)``:
    ``R(a,b,alpha) K_mu = conj(b(mu))/rho(alpha, mu) K_mu`` and
    ``R(b,a,alpha) K_mu = -conj(a(mu))/rho(alpha, mu) K_mu``.
    """
    ab = f.setting
    if not _is_ab(ab):
        raise UnsupportedFunction("rab_apply_section needs an (a,b)-setting section")
    lam = []
    for mu in f.mus:
        r = ab.rho(alpha, mu)
        if abs(r) < 1e-14:
            raise PoleAtAlpha(f"rho(alpha, {mu}) vanishes")
        lam.append((-np.conj(ab.a(mu)) if swap else np.conj(ab.b(mu))) / r)
    lam = np.array(lam, dtype=complex)
    return RationalSection(ab, f.mus, f.coeffs * lam[:, None] if len(lam) else f.coeffs, f.poly)


# --- inner products ----------------------------------------------------------

def _coef_form(J, c, d) -> complex:
    return complex(np.vdot(d, c if J is None else J @ c))


def inner_product(f: RationalSection, g: RationalSection, J=None) -> complex:
    """``[f, g]_J = <f, J g>`` computed exactly from the reproducing property."""
    if not _same_setting(f.setting, g.setting):
        raise ValueError("sections live in different settings")
    if f.dim != g.dim:
        raise DimensionMismatch("coefficient dimensions differ")
    if (len(f.poly) or len(g.poly)) and f.setting is not Setting.DISK:
        raise UnsupportedFunction("polynomial parts have no inner product in this setting")
    Jm = None if J is None else np.asarray(J, dtype=complex)
    total = 0j
    setting = f.setting
    # terms are summed in a fixed order so the value is independent of any parallel split
    for mu, c in zip(f.mus, f.coeffs):
        for nu, d in zip(g.mus, g.coeffs):
            total += _coef_form(Jm, c, d) * _kernel_unchecked(setting, nu, mu)
        for n, d in enumerate(g.poly):
            total += _coef_form(Jm, c, d) * np.conj(mu) ** n
    for n, c in enumerate(f.poly):
        for nu, d in zip(g.mus, g.coeffs):
            total += _coef_form(Jm, c, d) * nu ** n
        if n < len(g.poly):
            total += _coef_form(Jm, c, g.poly[n])
    return complex(total)


# --- structural identities -------------------------------------------------

IDENTITY_FORMULAS = {
    "equadb1": "<f,g> + a<R_a f,g> + conj(b)<f,R_b g> - (1 - a conj(b))<R_a f,R_b g> - g(b)^* f(a) = 0",
    "equadb2": "<R_a f,g> + <f,R_b g> + (a + conj(b))<R_a f,R_b g> + 2 pi g(b)^* f(a) = 0",
    "adjfa": "<R(a,b,x)f,R(a,b,y)g> - <R(b,a,x)f,R(b,a,y)g> + g(y)^* f(x) = 0",
}


def identity_terms(which: str, f: RationalSection, g: RationalSection, alpha: complex, beta: complex,
                   J=None) -> dict[str, complex]:
    """The individual terms of one of the Hardy-space identities; they sum to zero."""
    alpha, beta = complex(alpha), complex(beta)
    Jm = None if J is None else np.asarray(J, dtype=complex)
    point = _coef_form(Jm, f(alpha), g(beta))
    if which == "equadb1":
        if f.setting is not Setting.DISK:
            raise DomainViolation("equadb1 lives in the disk setting")
        Rf, Rg = resolvent_apply(f, alpha), resolvent_apply(g, beta)
        return {
            "<f,g>": inner_product(f, g, Jm),
            "a<Rf,g>": alpha * inner_product(Rf, g, Jm),
            "conj(b)<f,Rg>": np.conj(beta) * inner_product(f, Rg, Jm),
            "-(1-a conj(b))<Rf,Rg>": -(1 - alpha * np.conj(beta)) * inner_product(Rf, Rg, Jm),
            "-g(b)^*f(a)": -point,
        }
    if which == "equadb2":
        if f.setting is not Setting.HALF_PLANE:
            raise DomainViolation("equadb2 lives in the half-plane setting")
        Rf, Rg = resolvent_apply(f, alpha), resolvent_apply(g, beta)
        return {
            "<Rf,g>": inner_product(Rf, g, Jm),
            "<f,Rg>": inner_product(f, Rg, Jm),
            "(a+conj(b))<Rf,Rg>": (alpha + np.conj(beta)) * inner_product(Rf, Rg, Jm),
            "2pi g(b)^*f(a)": TWO_PI * point,
        }
    if which == "adjfa":
        if not _is_ab(f.setting):
            raise DomainViolation("adjfa needs sections of an (a,b)-setting")
        return {
            "<Rab f,Rab g>": inner_product(rab_apply_section(f, alpha), rab_apply_section(g, beta), Jm),
            "-<Rba f,Rba g>": -inner_product(rab_apply_section(f, alpha, True),
                                             rab_apply_section(g, beta, True), Jm),
            "g(b)^*f(a)": point,
        }
    raise ValueError(f"unknown identity {which!r}")


def check_identity(which: str, f: RationalSection, g: RationalSection, alpha: complex, beta: complex,
                   ab=None, J=None) -> float:
    """Absolute value of the left-hand side of the chosen identity.

    For ``adjfa`` pass either sections already in the (a,b)-setting, or
    ``ab`` to reinterpret the sections' pole parameters as sections of ``1/rho``.
    """
    if which == "adjfa" and ab is not None and not _same_setting(f.setting, ab):
        f = RationalSection(ab, f.mus, f.coeffs, f.poly)
        g = RationalSection(ab, g.mus, g.coeffs, g.poly)
    for pt in (alpha, beta):
        if not in_domain(f.setting, complex(pt)):
            raise DomainViolation(f"{pt} outside the domain")
    return abs(sum(identity_terms(which, f, g, alpha, beta, J).values()))


# --- negative squares --------------------------------------------------------

def kernel_gram(kernel: Callable, choice: PointChoice, metric=None) -> np.ndarray:
    """Gram matrix ``[K(w_l, w_k) c_k, c_l]`` (block form when no vectors are given)."""
    pts = choice.points
    blocks = [[np.atleast_2d(np.asarray(kernel(zl, zk), dtype=complex)) for zk in pts] for zl in pts]
    m = blocks[0][0].shape[0]
    Jm = np.eye(m) if metric is None else np.asarray(getattr(metric, "gram", metric), dtype=complex)
    if choice.vectors is None:
        return np.block([[Jm @ B for B in row] for row in blocks])
    vecs = choice.vectors
    N = len(pts)
    G = np.empty((N, N), dtype=complex)
    for l in range(N):
        for k in range(N):
            G[l, k] = np.vdot(vecs[l], Jm @ blocks[l][k] @ vecs[k])
    return G


def negative_squares(kernel: Callable, choice: PointChoice, tol: float = DEFAULT_TOL, metric=None) -> int:
    G = kernel_gram(kernel, choice, metric)
    err = float(np.max(np.abs(G - G.conj().T)))
    if err > max(tol, 1e-9) * max(1.0, float(np.max(np.abs(G)))):
        raise NonHermitianKernel(f"kernel Gram not Hermitian (error {err:.2e})")
    return inertia(0.5 * (G + G.conj().T), tol).n_minus
