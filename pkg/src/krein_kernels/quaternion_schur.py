"""Quaternionic half-space kernels, realizations and the unified setting.

The Hardy space of ``H_+ = {Re p > 0}`` has reproducing kernel ``k(p, q)/(2 pi)``
with

    k(p, q) = (conj(p) + conj(q)) (|p|^2 + 2 Re(p) conj(q) + conj(q)^2)^{-1}
            = (|q|^2 + 2 Re(q) p + p^2)^{-1} (p + q)

left slice hyperholomorphic in ``p`` and right slice hyperholomorphic in
``conj(q)``. For a real base point ``alpha > 0`` a coisometric colligation gives

    S(p) = H + b(p) G * (I - b(p) T)^{-*} F,   b(p) = (p - alpha)(p + alpha)^{-1}.

``b`` is intrinsic, so the star product with it is pointwise and the value
comes from the S-resolvent formula at ``b(p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import (
    DimensionMismatch,
    DomainViolation,
    NonIntrinsicPair,
    NotCoisometric,
    SingularDenominator,
)
from .indefinite_linalg import DEFAULT_TOL, inertia
from .quaternion_core import (
    QMatrix,
    Quaternion,
    as_qmatrix,
    complex_unembed,
    star_inverse_resolvent,
    star_values,
    star_values_right,
)
from .schur_realization import Colligation

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class QColligation:
    """Quaternionic colligation with real base point ``alpha > 0``.

    Metrics are real signature lists; the coisometry check runs on the
    complex embedding, where each sign is doubled.
    """

    T: QMatrix
    F: QMatrix
    G: QMatrix
    H: QMatrix
    sig_P: tuple
    sig_D: tuple
    sig_C: tuple
    alpha: float = 1.0
    tol: float = 1e-8

    def __post_init__(self):
        a = complex(self.alpha)
        if a.imag != 0 or a.real <= 0:
            raise DomainViolation("quaternionic base point must be real and positive")
        object.__setattr__(self, "alpha", float(a.real))
        for name in ("sig_P", "sig_D", "sig_C"):
            object.__setattr__(self, name, tuple(int(s) for s in getattr(self, name)))
        n, d, c = len(self.sig_P), len(self.sig_D), len(self.sig_C)
        for name, shape in {"T": (n, n), "F": (n, d), "G": (c, n), "H": (c, d)}.items():
            M = getattr(self, name)
            M = M if isinstance(M, QMatrix) else QMatrix(np.asarray(M, dtype=complex).reshape(shape))
            if M.shape != shape:
                if M.Z1.size or shape[0] * shape[1]:
                    raise DimensionMismatch(f"{name} has shape {M.shape}, expected {shape}")
                M = QMatrix(np.zeros(shape))
            object.__setattr__(self, name, M)
        if sum(s < 0 for s in self.sig_D) != sum(s < 0 for s in self.sig_C):
            raise DimensionMismatch("D and C must have the same negative index")
        err = self.coisometry_defect()
        if err > self.tol:
            raise NotCoisometric(f"quaternionic colligation is not coisometric (defect {err:.2e})")

    def block(self) -> QMatrix:
        n, d, c = len(self.sig_P), len(self.sig_D), len(self.sig_C)
        Z1 = np.zeros((n + c, n + d), dtype=complex)
        Z2 = np.zeros_like(Z1)
        for M, (r0, c0) in ((self.T, (0, 0)), (self.F, (0, n)), (self.G, (n, 0)), (self.H, (n, n))):
            h, w = M.shape
            if h and w:
                Z1[r0:r0 + h, c0:c0 + w] = M.Z1
                Z2[r0:r0 + h, c0:c0 + w] = M.Z2
        return QMatrix(Z1, Z2)

    def coisometry_defect(self) -> float:
        """``max |M J_dom M^* J_cod - I|`` on quaternionic entries."""
        M = self.block()
        Jd = np.diag(np.concatenate([self.sig_P, self.sig_D]).astype(float))
        Jc = np.diag(np.concatenate([self.sig_P, self.sig_C]).astype(float))
        P = M @ QMatrix(Jd) @ M.adjoint() @ QMatrix(Jc)
        return (P - QMatrix.identity(P.shape[0])).max_abs()

    @property
    def dim_P(self) -> int:
        return len(self.sig_P)

    @property
    def J_C(self) -> QMatrix:
        return QMatrix(np.diag(np.array(self.sig_C, dtype=float)))

    @property
    def J_D(self) -> QMatrix:
        return QMatrix(np.diag(np.array(self.sig_D, dtype=float)))

    def value_adjoint(self, S: QMatrix) -> QMatrix:
        """Metric adjoint ``J_D S^* J_C`` of a value ``S: D -> C``."""
        return self.J_D @ S.adjoint() @ self.J_C

    @property
    def kappa_bound(self) -> int:
        return sum(s < 0 for s in self.sig_P)

    @classmethod
    def from_complex(cls, c: Colligation, tol: float = 1e-8) -> "QColligation":
        """View a complex colligation with real base point as a quaternionic one."""
        if c.base_point.imag != 0 or c.base_point.real <= 0:
            raise DomainViolation("need a real positive base point")
        sig = []
        for m in (c.metric_P, c.metric_D, c.metric_C):
            if not m.is_canonical:
                raise ValueError("metrics must be canonical diag(+-1)")
            sig.append(tuple(m.signature))
        return cls(QMatrix(c.T), QMatrix(c.F), QMatrix(c.G), QMatrix(c.H), *sig, alpha=c.base_point.real, tol=tol)


def random_q_colligation(rng, dim_p: int, ind_p: int = 0, dim_c: int = 1, ind_c: int = 0,
                         alpha: float = 1.0, scale: float = 0.5) -> QColligation:
    """``U = exp(J A)`` with ``A`` quaternionic anti-Hermitian is J-unitary, hence coisometric."""
    n = dim_p + dim_c
    sp = [1] * (dim_p - ind_p) + [-1] * ind_p
    sc = [1] * (dim_c - ind_c) + [-1] * ind_c
    X = QMatrix.from_components(*(rng.normals((n, n)) for _ in range(4)))
    A = (X - X.adjoint()) * (0.5 * scale)
    J = QMatrix(np.diag(np.array(sp + sc, dtype=float)))
    U = complex_unembed(expm((J @ A).embed()), tol=1e-10)
    Z1, Z2 = U.Z1, U.Z2
    blk = lambda r, c: QMatrix(Z1[r, c], Z2[r, c])  # noqa: E731
    P, C = slice(0, dim_p), slice(dim_p, n)
    return QColligation(blk(P, P), blk(P, C), blk(C, P), blk(C, C), sp, sc, sc, alpha)


# --- the half-space kernel ---------------------------------------------------

def _den_check(q: Quaternion) -> None:
    if q.norm() < 1e-14:
        raise SingularDenominator("kernel denominator vanishes")


def k_halfspace(p, q, form: str = "right") -> Quaternion:
    """``k(p, q)``; ``form="left"`` uses the ``(conj p + conj q)(...)^{-1}`` factorization."""
    p, q = Quaternion.coerce(p), Quaternion.coerce(q)
    if form == "left":
        qb = q.conj()
        den = p.norm2() + (qb * (2.0 * p.real)) + qb * qb
        _den_check(den)
        return (p.conj() + qb) * den.inv()
    den = q.norm2() + p * (2.0 * q.real) + p * p
    _den_check(den)
    return den.inv() * (p + q)


def kernel_forms_residual(p, q) -> float:
    return (k_halfspace(p, q, "left") - k_halfspace(p, q, "right")).norm()


def proof_identity_residual(nu, mu) -> float:
    """``|-nu k(nu, mu) - k(nu, mu) conj(mu) + 1|``."""
    nu, mu = Quaternion.coerce(nu), Quaternion.coerce(mu)
    kv = k_halfspace(nu, mu)
    return (-(nu * kv) - kv * mu.conj() + 1.0).norm()


def eigen_constant(alpha: float, mu, variant: str = "alpha+conj(mu)") -> Quaternion:
    """Candidate right eigenvalue ``c`` in ``R_alpha k(., mu) = k(., mu) c``.

    ``alpha+conj(mu)`` gives ``-(alpha + conj(mu))^{-1}`` (the correct one);
    ``alpha-conj(mu)`` and ``alpha+mu`` are the other readings, kept for comparison.
    """
    mu = Quaternion.coerce(mu)
    base = {"alpha+conj(mu)": alpha + mu.conj(), "alpha-conj(mu)": alpha - mu.conj(), "alpha+mu": alpha + mu}[variant]
    return -(base.inv())


def eigen_relation_residual(alpha: float, mu, p, variant: str = "alpha+conj(mu)") -> float:
    """``|(p - alpha)^{-1}(k(p,mu) - k(alpha,mu)) - k(p,mu) c|`` for the chosen constant."""
    p, mu = Quaternion.coerce(p), Quaternion.coerce(mu)
    lhs = (p - alpha).inv() * (k_halfspace(p, mu) - k_halfspace(alpha, mu))
    return (lhs - k_halfspace(p, mu) * eigen_constant(alpha, mu, variant)).norm()


def lemma27q_terms(alpha: float, beta: float, mu, nu, variant: str = "alpha+conj(mu)") -> dict[str, Quaternion]:
    """Terms of the half-space identity on ``f = k(., mu)/2pi``, ``g = k(., nu)/2pi``.

    Right-linear inner products: ``<f c, g d> = conj(d) <f, g> c`` and
    ``<f, K(., nu)> = f(nu)``, with ``R_alpha k(., mu) = k(., mu) c_mu``.
    """
    if not (alpha > 0 and beta > 0):
        raise DomainViolation("alpha and beta must be real and positive")
    mu, nu = Quaternion.coerce(mu), Quaternion.coerce(nu)
    if mu.real <= 0 or nu.real <= 0:
        raise DomainViolation("mu, nu must lie in the right half-space")
    K = lambda x, y: k_halfspace(x, y) / TWO_PI  # noqa: E731
    c_mu = eigen_constant(alpha, mu, variant)
    c_nu = eigen_constant(beta, nu, variant)
    kvm = K(nu, mu)
    return {
        "<Rf,g>": kvm * c_mu,
        "<f,Rg>": c_nu.conj() * kvm,
        "(a+b)<Rf,Rg>": (alpha + beta) * (c_nu.conj() * kvm * c_mu),
        "2pi g(b)^* f(a)": TWO_PI * (K(beta, nu).conj() * K(alpha, mu)),
    }


def check_lemma27q(alpha: float, beta: float, mu, nu, variant: str = "alpha+conj(mu)") -> float:
    terms = lemma27q_terms(alpha, beta, mu, nu, variant)
    total = Quaternion()
    for t in terms.values():
        total = total + t
    return total.norm()


# --- realizations ------------------------------------------------------------

def cayley_q(p, alpha: float) -> Quaternion:
    """``(p - alpha)(p + alpha)^{-1}`` (intrinsic for real alpha)."""
    p = Quaternion.coerce(p)
    d = p + alpha
    _den_check(d)
    return (p - alpha) * d.inv()


def _transfer_q(c: QColligation, u: Quaternion) -> QMatrix:
    if c.dim_P == 0:
        return c.H
    W = star_inverse_resolvent(c.T, c.G, u)
    return c.H + (W @ c.F).lmul(u)


def eval_q(c: QColligation, p) -> QMatrix:
    """``S(p) = H + b(p) G * (I - b(p) T)^{-*} F`` with ``b(p) = (p - alpha)(p + alpha)^{-1}``."""
    p = Quaternion.coerce(p)
    if p.real <= 0:
        raise DomainViolation("p must lie in the right half-space")
    return _transfer_q(c, cayley_q(p, c.alpha))


def s_adjoint_right(c: QColligation, r) -> QMatrix:
    """``S(conj(r))^*`` as a right slice function of ``r``."""
    r = Quaternion.coerce(r)
    return eval_q(c, r.conj()).adjoint()


def kernel_q(c: QColligation, p, q) -> QMatrix:
    """``(1/2pi) [k(p,q) I - S(p) * k(p,q) *_r S(q)^*]``.

    The left star product in ``p`` uses the slice formula with values at
    ``p`` and ``conj(p)``. The result is a right slice function of
    ``r = conj(q)``, and the right star product with ``S(q)^*`` uses the
    values at ``r`` and ``conj(r)``.
    """
    p, q = Quaternion.coerce(p), Quaternion.coerce(q)
    m = len(c.sig_C)
    S = lambda x: eval_q(c, x)  # noqa: E731

    def left(r: Quaternion) -> QMatrix:
        qq = r.conj()
        return star_values(S, lambda x: QMatrix.identity(m).lmul(k_halfspace(x, qq)), p)

    def sstar(r: Quaternion) -> QMatrix:
        return c.J_D @ s_adjoint_right(c, r) @ c.J_C

    M = star_values_right(left, sstar, q.conj())
    kI = QMatrix.identity(m).lmul(k_halfspace(p, q))
    return (kI - M) * (1.0 / TWO_PI)


def kernel_q_pointwise(c: QColligation, p, q) -> QMatrix:
    """``(1/2pi) [k(p,q) - S(p) k(p,q) S(q)^*]`` without star products (valid for intrinsic ``S``)."""
    p, q = Quaternion.coerce(p), Quaternion.coerce(q)
    m = len(c.sig_C)
    kq = k_halfspace(p, q)
    Sp, Sq = eval_q(c, p), eval_q(c, q)
    return (QMatrix.identity(m).lmul(kq) - Sp.rmul(kq) @ c.value_adjoint(Sq)) * (1.0 / TWO_PI)


def verify_stein(c: QColligation, p, q) -> dict[str, float]:
    """Residuals of ``2pi(p K + K q_bar) = I - S(p) S(q)^[*]`` and of the variant with ``K^*``."""
    p, q = Quaternion.coerce(p), Quaternion.coerce(q)
    K = kernel_q(c, p, q)
    m = len(c.sig_C)
    rhs = QMatrix.identity(m) - eval_q(c, p) @ c.value_adjoint(eval_q(c, q))
    plain = (K.lmul(p) + K.rmul(q.conj())) * TWO_PI - rhs
    starred = (K.lmul(p) + K.adjoint().rmul(q.conj())) * TWO_PI - rhs
    return {"unstarred": plain.max_abs(), "starred": starred.max_abs()}


def q_gram(c: QColligation, points) -> np.ndarray:
    """Embedded block Gram ``chi(J_C K(p_l, p_k))``."""
    pts = [Quaternion.coerce(p) for p in points]
    Jc = c.J_C
    m = len(c.sig_C)
    N = len(pts)
    Z1 = np.zeros((N * m, N * m), dtype=complex)
    Z2 = np.zeros_like(Z1)
    for l, pl in enumerate(pts):
        for k, pk in enumerate(pts):
            B = Jc @ kernel_q(c, pl, pk)
            Z1[l * m:(l + 1) * m, k * m:(k + 1) * m] = B.Z1
            Z2[l * m:(l + 1) * m, k * m:(k + 1) * m] = B.Z2
    return QMatrix(Z1, Z2).embed()


def negative_squares_q(c: QColligation, points, tol: float = 1e-9) -> tuple[int, int]:
    """``(kappa, n_minus of the embedded Gram)``; the embedded count is always even."""
    G = q_gram(c, points)
    G = 0.5 * (G + G.conj().T)
    nm = inertia(G, tol).n_minus
    return nm // 2, nm


# --- unified setting -----------------------------------------------------------

def _require_real(ab) -> None:
    if not ab.is_real:
        raise NonIntrinsicPair("quaternionic (a, b) pairs need real coefficients")


def poly_q(coeffs, p: Quaternion) -> Quaternion:
    """Real-coefficient polynomial at a quaternion (Horner; real coefficients commute)."""
    acc = Quaternion()
    for a in np.asarray(coeffs)[::-1]:
        acc = acc * p + float(np.real(a))
    return acc


def sigma_q(ab, p) -> Quaternion:
    p = Quaternion.coerce(p)
    a = poly_q(ab.a_coef, p)
    _den_check(a)
    return a.inv() * poly_q(ab.b_coef, p)


def eval_q_unified(c: QColligation, ab, p) -> QMatrix:
    """``S(p) = H + b_s(p) G * (I - b_s(p) T)^{-*} F``.

    ``b_s(p) = (sigma(p) - sigma(alpha))(1 - sigma(p) sigma(alpha))^{-1}`` is intrinsic
    for a real pair and real ``alpha``.
    """
    _require_real(ab)
    p = Quaternion.coerce(p)
    alpha = c.alpha
    if abs(ab.sigma_prime(alpha)) < 1e-12:
        raise DomainViolation("sigma'(alpha) vanishes")
    s, sa = sigma_q(ab, p), float(np.real(ab.sigma(alpha)))
    d = 1.0 - s * sa
    _den_check(d)
    return _transfer_q(c, (s - sa) * d.inv())


def R_ab_q(ab, f, alpha: float, p, swap: bool = False):
    """``(a(alpha) b(p) - b(alpha) a(p))^{-1}(a(p) f(p) - a(alpha) f(alpha))`` for real pairs."""
    _require_real(ab)
    p = Quaternion.coerce(p)
    ac, bc = (ab.b_coef, ab.a_coef) if swap else (ab.a_coef, ab.b_coef)
    aa, ba = float(np.real(poly_q(ac, Quaternion(alpha)).x0)), float(np.real(poly_q(bc, Quaternion(alpha)).x0))
    den = poly_q(bc, p) * aa - poly_q(ac, p) * ba
    _den_check(den)
    fp, fa = as_qmatrix(f(p)), as_qmatrix(f(Quaternion(alpha)))
    return (fp.lmul(poly_q(ac, p)) - fa * aa).lmul(den.inv())


def rarb1q_residual(ab, f, alpha: float, points) -> float:
    """``max |a(alpha) R(b,a) f + b(alpha) R(a,b) f + f|`` at quaternionic points."""
    aa, ba = float(np.real(ab.a(alpha))), float(np.real(ab.b(alpha)))
    worst = 0.0
    for p in points:
        val = R_ab_q(ab, f, alpha, p, swap=True) * aa + R_ab_q(ab, f, alpha, p) * ba + as_qmatrix(f(p))
        worst = max(worst, val.max_abs())
    return worst


def blaschke_q(u: float, p) -> Quaternion:
    """``(1 + p u)^{-1}(p + u)`` for real ``u`` in (-1, 1)."""
    if not -1.0 < u < 1.0:
        raise DomainViolation("u must lie in (-1, 1)")
    p = Quaternion.coerce(p)
    d = 1.0 + p * u
    if d.norm() < 1e-14:
        raise SingularDenominator("1 + p u vanishes")
    return d.inv() * (p + u)


def construct_q(m, tol: float = DEFAULT_TOL) -> QColligation:
    """Quaternionic realization from real-point model-space data.

    The data ``(gram, A_alpha, E_alpha)`` at a real base point is run
    through the complex construction and the result is read as a
    quaternionic colligation; ``eval_q`` then gives the slice extension.
    """
    from .schur_realization import canonical_state_space, construct_from_space
    if complex(m.alpha).imag != 0:
        raise DomainViolation("quaternionic construction needs a real base point")
    return QColligation.from_complex(canonical_state_space(construct_from_space(m, tol)))
