"""Generalized Schur functions from coisometric colligations.

A colligation ``[[T, F], [G, H]] : P (+) D -> P (+) C`` defines

* disk:        ``S(z) = H + z G (I - z T)^{-1} F``
* half-plane:  ``S(z) = H + b(z) G (I - b(z) T)^{-1} F``, ``b(z) = (z - alpha)/(z + conj(alpha))``

and the model-space construction runs the other way: from a finite
R_alpha-invariant space (Gram, matrix of R_alpha, point evaluation at alpha)
it builds ``T``, ``G``, factors the coisometry defect to get ``F``, ``H``, and
returns a colligation whose kernel reproduces the space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainViolation,
    InequalityViolated,
    NotCoisometric,
    SingularResolvent,
)
from .indefinite_linalg import (
    DEFAULT_TOL,
    Inertia,
    Metric,
    MetricMap,
    defect_factorization,
    direct_sum,
    indef_adjoint,
    inertia,
    is_coisometric,
)
from .kernel_spaces import PointChoice, Setting, negative_squares

TWO_PI = 2.0 * math.pi

# a resolvent whose condition number exceeds this is treated as singular
SINGULAR_COND = 1e12


@dataclass(frozen=True, eq=False)
class Colligation:
    T: np.ndarray
    F: np.ndarray
    G: np.ndarray
    H: np.ndarray
    metric_P: Metric
    metric_D: Metric
    metric_C: Metric
    base_point: complex = 0.0
    tol: float = 1e-8
    audit: dict | None = field(default=None, repr=False)

    def __post_init__(self):
        n, d, c = self.metric_P.dim, self.metric_D.dim, self.metric_C.dim
        shapes = {"T": (n, n), "F": (n, d), "G": (c, n), "H": (c, d)}
        for name, shape in shapes.items():
            arr = np.array(getattr(self, name), dtype=complex)
            if arr.size == shape[0] * shape[1]:
                arr = arr.reshape(shape)
            if arr.shape != shape:
                raise DimensionMismatch(f"{name} has shape {arr.shape}, expected {shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "base_point", complex(self.base_point))
        if self.metric_D.ind_minus != self.metric_C.ind_minus:
            raise DimensionMismatch("D and C must have the same negative index")
        if not is_coisometric(self.block, self.tol):
            err = np.max(np.abs(self.block.matrix @ indef_adjoint(self.block).matrix - np.eye(n + c)))
            raise NotCoisometric(f"colligation is not coisometric (defect {err:.2e})")

    @property
    def block(self) -> MetricMap:
        n, d, c = self.dim_P, self.metric_D.dim, self.metric_C.dim
        M = np.zeros((n + c, n + d), dtype=complex)
        M[:n, :n], M[:n, n:], M[n:, :n], M[n:, n:] = self.T, self.F, self.G, self.H
        return MetricMap(M, direct_sum(self.metric_P, self.metric_D), direct_sum(self.metric_P, self.metric_C))

    @property
    def dim_P(self) -> int:
        return self.metric_P.dim

    @property
    def kappa_bound(self) -> int:
        return self.metric_P.ind_minus


def _resolve(T: np.ndarray, x: complex) -> np.ndarray:
    """``(I - x T)^{-1}``, raising SingularResolvent at exceptional points."""
    n = T.shape[0]
    M = np.eye(n) - x * T
    if n == 0:
        return M
    if np.linalg.cond(M) > SINGULAR_COND:
        raise SingularResolvent(f"I - x T is singular at x = {x}")
    return np.linalg.inv(M)


def cayley(z: complex, alpha: complex) -> complex:
    """``(z - alpha)/(z + conj(alpha))``: right half-plane onto the disk, alpha to 0."""
    return (z - alpha) / (z + np.conj(alpha))


def _transfer(c: Colligation, x: complex) -> np.ndarray:
    return c.H + x * c.G @ _resolve(c.T, x) @ c.F


def eval_disk(c: Colligation, z: complex) -> np.ndarray:
    """``S(z) = H + z G (I - z T)^{-1} F``."""
    return _transfer(c, complex(z))


def eval_halfplane(c: Colligation, z: complex) -> np.ndarray:
    alpha = c.base_point
    if alpha.real <= 0:
        raise DomainViolation("half-plane base point needs Re(alpha) > 0")
    z = complex(z)
    if z == alpha:
        return c.H.copy()
    return _transfer(c, cayley(z, alpha))


def evaluate(c: Colligation, setting: Setting, z: complex) -> np.ndarray:
    if setting is Setting.DISK:
        return eval_disk(c, z)
    if setting is Setting.HALF_PLANE:
        return eval_halfplane(c, z)
    raise ValueError(f"use unified_setting.eval_unified for {setting!r}")


def value_adjoint(c: Colligation, S: np.ndarray) -> np.ndarray:
    """Metric adjoint ``S^[*] = J_D^{-1} S^H J_C`` of a value ``S: D -> C``."""
    return indef_adjoint(MetricMap(S, c.metric_D, c.metric_C)).matrix


def kernel_denominator(setting: Setting, z: complex, w: complex) -> complex:
    if setting is Setting.DISK:
        return 1.0 - z * np.conj(w)
    if setting is Setting.HALF_PLANE:
        return TWO_PI * (z + np.conj(w))
    raise ValueError(setting)


def kernel_direct(c: Colligation, setting: Setting, z: complex, w: complex) -> np.ndarray:
    """``K_S(z, w) = (I - S(z) S(w)^[*]) / d(z, w)`` from the closed formula."""
    Sz = evaluate(c, setting, z)
    Sw = evaluate(c, setting, w)
    m = c.metric_C.dim
    return (np.eye(m) - Sz @ value_adjoint(c, Sw)) / kernel_denominator(setting, complex(z), complex(w))


def point_evaluation(c: Colligation, setting: Setting, w: complex) -> np.ndarray:
    """Point evaluation ``C_w : P -> C`` on the state space.

    Disk: ``G (I - w T)^{-1}``. Half-plane:
    ``(alpha + conj(alpha))/(w + conj(alpha)) C_alpha (I - b(w) T)^{-1}`` with
    ``C_alpha = G / sqrt(2 pi k)``, ``k = 2 Re(alpha)``.
    """
    w = complex(w)
    if setting is Setting.DISK:
        return c.G @ _resolve(c.T, w)
    alpha = c.base_point
    k = 2.0 * alpha.real
    C_alpha = c.G / math.sqrt(TWO_PI * k)
    return (k / (w + np.conj(alpha))) * C_alpha @ _resolve(c.T, cayley(w, alpha))


def state_adjoint(c: Colligation, X: np.ndarray) -> np.ndarray:
    """Adjoint of ``X : P -> C`` with respect to the state and coefficient metrics."""
    return indef_adjoint(MetricMap(X, c.metric_P, c.metric_C)).matrix


def kernel_colligation(c: Colligation, setting: Setting, z: complex, w: complex) -> np.ndarray:
    """``K(z, w) = C_z C_w^[*]`` from the realization."""
    Cz = point_evaluation(c, setting, z)
    Cw = point_evaluation(c, setting, w)
    return Cz @ state_adjoint(c, Cw)


def negative_squares_of_S(c: Colligation, setting: Setting, choice: PointChoice, tol: float = 1e-9) -> int:
    return negative_squares(lambda z, w: kernel_direct(c, setting, z, w), choice, tol, c.metric_C)


# --- finite model spaces -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class FiniteModelSpace:
    """A finite R_alpha-invariant reproducing kernel space given by matrices.

    ``gram[i, j] = [f_j, f_i]``; column ``j`` of ``A_alpha`` holds the
    coordinates of ``R_alpha f_j`` (or ``R(a,b,alpha) f_j`` in an
    (a, b)-setting); column ``j`` of ``E_alpha`` is ``f_j(alpha)``.
    """

    gram: np.ndarray
    A_alpha: np.ndarray
    E_alpha: np.ndarray
    coeff_metric: Metric
    alpha: complex
    setting: object = Setting.HALF_PLANE

    def __post_init__(self):
        g = np.array(self.gram, dtype=complex)
        n = g.shape[0] if g.ndim == 2 else 0
        A = np.array(self.A_alpha, dtype=complex).reshape(n, n)
        E = np.array(self.E_alpha, dtype=complex).reshape(self.coeff_metric.dim, n)
        object.__setattr__(self, "gram", g.reshape(n, n))
        object.__setattr__(self, "A_alpha", A)
        object.__setattr__(self, "E_alpha", E)
        object.__setattr__(self, "alpha", complex(self.alpha))
        if self.setting is Setting.HALF_PLANE and self.alpha.real <= 0:
            raise DomainViolation("half-plane model spaces need Re(alpha) > 0")
        if n:
            Metric(g)  # validates Hermitian invertible

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @property
    def metric(self) -> Metric:
        return Metric(self.gram)

    def _rho_alpha(self) -> tuple[complex, complex, float]:
        """``(a(alpha), b(alpha), rho(alpha, alpha))`` for the setting's (a, b) pair."""
        alpha = self.alpha
        if self.setting is Setting.DISK:
            return 1.0 + 0j, alpha, 1.0 - abs(alpha) ** 2
        ab = self.setting
        a, b = complex(ab.a(alpha)), complex(ab.b(alpha))
        return a, b, float(abs(a) ** 2 - abs(b) ** 2)

    def colligation_blocks(self) -> tuple[np.ndarray, np.ndarray]:
        """``(T, G)`` of the construction."""
        n = self.dim
        A, E = self.A_alpha, self.E_alpha
        if self.setting is Setting.HALF_PLANE:
            k = 2.0 * self.alpha.real
            return k * A + np.eye(n), math.sqrt(TWO_PI * k) * E
        a, b, r = self._rho_alpha()
        if r <= 0:
            raise DomainViolation("alpha must lie in Omega_+ (rho(alpha, alpha) > 0)")
        return (r * A - np.conj(b) * np.eye(n)) / np.conj(a), math.sqrt(r) * E

    def inequality_form(self) -> np.ndarray:
        """Hermitian matrix of the defining inequality (must be <= 0).

        Half-plane: ``2Re(alpha)[Af,Af] + [Af,f] + [f,Af] + 2 pi [f(alpha),f(alpha)]``.
        (a, b) and disk: ``[R(a,b)f,R(a,b)f] - [R(b,a)f,R(b,a)f] + [f(alpha),f(alpha)]``.
        """
        P, A, E, J = self.gram, self.A_alpha, self.E_alpha, self.coeff_metric.gram
        if self.setting is Setting.HALF_PLANE:
            k = 2.0 * self.alpha.real
            form = k * A.conj().T @ P @ A + A.conj().T @ P + P @ A + TWO_PI * E.conj().T @ J @ E
        else:
            a, b, _ = self._rho_alpha()
            Rba = -(np.eye(self.dim) + b * A) / a
            form = A.conj().T @ P @ A - Rba.conj().T @ P @ Rba + E.conj().T @ J @ E
        return 0.5 * (form + form.conj().T)

    def slack(self) -> np.ndarray:
        """``I - C^[*] C`` as a Hermitian form, with ``C = [T; G]``."""
        T, G = self.colligation_blocks()
        P, J = self.gram, self.coeff_metric.gram
        s = P - T.conj().T @ P @ T - G.conj().T @ J @ G
        return 0.5 * (s + s.conj().T)


def canonical_state_space(c: Colligation) -> Colligation:
    """Similar colligation whose state metric is diag(+-1).

    With ``S^H P S = J`` from :meth:`Metric.normalize` the state changes as
    ``x = S x'``: ``T' = S^{-1} T S``, ``F' = S^{-1} F``, ``G' = G S``. The
    transfer function and the kernel are unchanged.
    """
    if c.metric_P.is_canonical:
        return c
    J, S = c.metric_P.normalize()
    Si = np.linalg.inv(S)
    return Colligation(Si @ c.T @ S, Si @ c.F, c.G @ S, c.H, J, c.metric_D, c.metric_C,
                       c.base_point, tol=c.tol, audit=c.audit)


def model_space_from_kernel(kernel: Callable, points: Sequence[complex], alpha: complex,
                            coeff_metric: Metric | None = None, setting=Setting.HALF_PLANE) -> FiniteModelSpace:
    """Model space spanned by ``K(., w_j) e_l`` for a kernel given as a callable.

    Coordinates of ``g`` in the span solve ``Gamma x = [J g(w_i)]_i``, so the
    matrix of the resolvent is computed from pointwise values of
    ``(R f_j)(w_i)`` only. Points must differ from ``alpha``.
    """
    alpha = complex(alpha)
    pts = [complex(w) for w in points]
    if any(abs(w - alpha) < 1e-12 for w in pts):
        raise DomainViolation("model-space points must differ from alpha")
    m = np.atleast_2d(np.asarray(kernel(pts[0], pts[0]))).shape[0]
    J = np.eye(m, dtype=complex) if coeff_metric is None else coeff_metric.gram
    cm = coeff_metric or Metric.euclidean(m)
    N = len(pts)
    K = [[np.atleast_2d(np.asarray(kernel(wi, wj), dtype=complex)) for wj in pts] for wi in pts]
    gram = np.block([[J @ K[i][j] for j in range(N)] for i in range(N)])
    Ka = [np.atleast_2d(np.asarray(kernel(alpha, wj), dtype=complex)) for wj in pts]
    E = np.hstack(Ka)

    if setting is Setting.HALF_PLANE:
        def resolvent_value(fw, fa, w):
            return (fw - fa) / (w - alpha)
    else:
        if setting is Setting.DISK:
            aa, ba = 1.0, alpha
            afun, bfun = (lambda z: 1.0), (lambda z: z)
        else:
            afun, bfun = setting.a, setting.b
            aa, ba = complex(afun(alpha)), complex(bfun(alpha))

        def resolvent_value(fw, fa, w):
            return (afun(w) * fw - aa * fa) / (aa * bfun(w) - ba * afun(w))

    RV = np.block([[J @ resolvent_value(K[i][j], Ka[j], pts[i]) for j in range(N)] for i in range(N)])
    A = np.linalg.solve(gram, RV)
    return FiniteModelSpace(gram, A, E, cm, alpha, setting)


def construct_from_space(m: FiniteModelSpace, tol: float = DEFAULT_TOL) -> Colligation:
    """Build a coisometric colligation whose kernel reproduces the model space.

    Steps: ``T``, ``G`` from the resolvent and the point evaluation; check
    ``I - C^[*] C >= 0`` for ``C = [T; G]``; factor ``I - C C^[*] = X X^[*]``
    and split ``X = [F; H]``. The result carries an ``audit`` dict with the
    intermediate objects.
    """
    T, G = m.colligation_blocks()
    slack = m.slack()
    scale = max(1.0, float(np.max(np.abs(m.gram)))) if m.dim else 1.0
    slack_in = inertia(slack, tol, scale=scale) if m.dim else Inertia(0, 0, 0)
    if slack_in.n_minus:
        from .indefinite_linalg import herm_eig
        lam_min = float(herm_eig(slack)[0][0])
        raise InequalityViolated(f"model-space inequality violated (slack eigenvalue {lam_min:.3e})", lam_min)
    P_metric = Metric(m.gram) if m.dim else Metric(np.zeros((0, 0)))
    C_map = MetricMap(np.vstack([T, G]), P_metric, direct_sum(P_metric, m.coeff_metric))
    X, metric_c1 = defect_factorization(C_map, tol)
    n = m.dim
    F, H = X.matrix[:n], X.matrix[n:]
    audit = {
        "k": 2.0 * m.alpha.real if m.setting is Setting.HALF_PLANE else None,
        "T": T,
        "G": G,
        "F": F,
        "H": H,
        "metric_C1": metric_c1,
        "slack": slack,
        "slack_inertia": slack_in,
        "ind_minus_C1": metric_c1.ind_minus,
        "ind_minus_C": m.coeff_metric.ind_minus,
    }
    base = m.alpha
    return Colligation(T, F, G, H, P_metric, metric_c1, m.coeff_metric, base, tol=1e-7, audit=audit)
