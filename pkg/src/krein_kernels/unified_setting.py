"""The (a, b) framework: ``rho(z, w) = a(z) conj(a(w)) - b(z) conj(b(w))``.

The pair splits a declared domain into ``Omega_+ = {|b| < |a|}``,
``Omega_- = {|b| > |a|}`` and ``Omega_0``. The disk is ``(1, z)``; the
right half-plane comes from ``(sqrt(pi)(z + 1), sqrt(pi)(z - 1))``, whose
kernel ``1/rho = 1/(2 pi (z + conj(w)))`` matches the half-plane Hardy kernel.

Generalized resolvents::

    R(a,b,alpha) f = (a f - a(alpha) f(alpha)) / (a(alpha) b - b(alpha) a)

satisfy ``a(alpha) R(b,a,alpha) + b(alpha) R(a,b,alpha) = -I``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (
    DomainViolation,
    NonInvertibleSigma,
    SingularResolvent,
    ZeroDenominator,
)
from .indefinite_linalg import MetricMap, indef_adjoint
from .schur_realization import SINGULAR_COND, Colligation, FiniteModelSpace, state_adjoint, value_adjoint

MAX_DEGREE = 8
CLASSIFY_BAND = 1e-12


class Region(enum.Enum):
    OMEGA_PLUS = "omega_plus"
    OMEGA_MINUS = "omega_minus"
    OMEGA_ZERO = "omega_zero"


@dataclass(frozen=True)
class RectDomain:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def grid(self, n: int = 32) -> np.ndarray:
        x = np.linspace(self.xmin, self.xmax, n)
        y = np.linspace(self.ymin, self.ymax, n)
        X, Y = np.meshgrid(x, y)
        return (X + 1j * Y).ravel()

    def contains(self, z: complex) -> bool:
        return self.xmin <= z.real <= self.xmax and self.ymin <= z.imag <= self.ymax


@dataclass(frozen=True)
class DiskDomain:
    center: complex
    radius: float

    def grid(self, n: int = 32) -> np.ndarray:
        x = np.linspace(-self.radius, self.radius, n)
        X, Y = np.meshgrid(x, x)
        Z = (X + 1j * Y).ravel()
        return self.center + Z[np.abs(Z) <= self.radius]

    def contains(self, z: complex) -> bool:
        return abs(z - self.center) <= self.radius


class ABPair:
    """Polynomials ``a``, ``b`` (ascending coefficients) on a declared domain.

    Construction samples the domain on a deterministic grid (at least 1000
    points) and checks that ``Omega_+`` and ``Omega_-`` are both hit and
    that ``a`` has no zero among the ``Omega_+`` samples.
    """

    def __init__(self, a, b, domain=None, validate: bool = True):
        a = np.trim_zeros(np.atleast_1d(np.asarray(a, dtype=complex)), "b")
        b = np.trim_zeros(np.atleast_1d(np.asarray(b, dtype=complex)), "b")
        if len(a) == 0:
            raise ZeroDenominator("a is identically zero")
        if max(len(a), len(b)) - 1 > MAX_DEGREE:
            raise ValueError(f"a, b limited to degree {MAX_DEGREE}")
        self.a_coef = a
        self.b_coef = b if len(b) else np.zeros(1, dtype=complex)
        self.domain = domain if domain is not None else RectDomain(-4.0, 4.0, -4.0, 4.0)
        if validate:
            self._validate()

    def _validate(self) -> None:
        pts = self.domain.grid(40)
        if len(pts) < 1000:
            pts = self.domain.grid(48)
        av, bv = np.abs(self.a(pts)), np.abs(self.b(pts))
        plus = bv < av - CLASSIFY_BAND
        minus = bv > av + CLASSIFY_BAND
        if not plus.any() or not minus.any():
            raise DomainViolation("Omega_+ and Omega_- must both be nonempty on the domain")
        if np.any(av[plus] < 1e-12):
            raise DomainViolation("a vanishes in Omega_+")

    # canonical pairs
    @classmethod
    def disk_pair(cls) -> "ABPair":
        return cls([1.0], [0.0, 1.0], DiskDomain(0.0, 2.0))

    @classmethod
    def half_plane_pair(cls) -> "ABPair":
        """``a = sqrt(2 pi)(z + 1)/2``, ``b = sqrt(2 pi)(z - 1)/2``; gives ``rho = pi (z + conj(w))``."""
        s = math.sqrt(2.0 * math.pi) / 2.0
        return cls([s, s], [-s, s])

    @classmethod
    def matched_half_plane_pair(cls) -> "ABPair":
        """``a = sqrt(pi)(z + 1)``, ``b = sqrt(pi)(z - 1)``; gives ``rho = 2 pi (z + conj(w))``."""
        s = math.sqrt(math.pi)
        return cls([s, s], [-s, s])

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.a_coef.imag == 0) and np.all(self.b_coef.imag == 0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ABPair):
            return NotImplemented
        return (np.array_equal(self.a_coef, other.a_coef) and np.array_equal(self.b_coef, other.b_coef)
                and self.domain == other.domain)

    def __hash__(self):
        return hash((tuple(self.a_coef), tuple(self.b_coef), self.domain))

    def __repr__(self) -> str:
        return f"ABPair(a={self.a_coef.tolist()}, b={self.b_coef.tolist()})"

    def a(self, z):
        return P.polyval(z, self.a_coef)

    def b(self, z):
        return P.polyval(z, self.b_coef)

    def rho(self, z, w):
        return self.a(z) * np.conj(self.a(w)) - self.b(z) * np.conj(self.b(w))

    def delta(self, z, alpha):
        return self.b(z) * self.a(alpha) - self.a(z) * self.b(alpha)

    def sigma(self, z):
        az = self.a(z)
        if np.any(np.abs(az) < 1e-300):
            raise ZeroDenominator("a(z) = 0")
        return self.b(z) / az

    def sigma_prime(self, z):
        a, b = self.a(z), self.b(z)
        da, db = P.polyval(z, P.polyder(self.a_coef)), P.polyval(z, P.polyder(self.b_coef))
        return (db * a - b * da) / a ** 2

    def classify(self, z) -> Region:
        d = abs(self.b(z)) - abs(self.a(z))
        if d < -CLASSIFY_BAND:
            return Region.OMEGA_PLUS
        if d > CLASSIFY_BAND:
            return Region.OMEGA_MINUS
        return Region.OMEGA_ZERO

    def rerepresent(self, U: np.ndarray) -> "ABPair":
        """``(a, b) -> (a, b) U`` for a 2x2 matrix ``U`` acting on the row ``(a, b)``."""
        n = max(len(self.a_coef), len(self.b_coef))
        A = np.zeros(n, dtype=complex)
        B = np.zeros(n, dtype=complex)
        A[: len(self.a_coef)] = self.a_coef
        B[: len(self.b_coef)] = self.b_coef
        return ABPair(A * U[0, 0] + B * U[1, 0], A * U[0, 1] + B * U[1, 1], self.domain, validate=False)

    def sample_plus(self, rng, tries: int = 10_000) -> complex:
        """A random point of ``Omega_+`` with ``rho(z, z)`` bounded away from 0."""
        dom = self.domain
        for _ in range(tries):
            if isinstance(dom, RectDomain):
                z = complex(rng.uniform(dom.xmin, dom.xmax), rng.uniform(dom.ymin, dom.ymax))
            else:
                r = dom.radius * math.sqrt(rng.uniform())
                t = 2.0 * math.pi * rng.uniform()
                z = dom.center + complex(r * math.cos(t), r * math.sin(t))
            if self.rho(z, z).real > 0.25 * max(1.0, abs(self.a(z)) ** 2):
                return z
        raise DomainViolation("could not sample Omega_+")


J0 = np.diag([1.0, -1.0])


def rho(ab: ABPair, z, w):
    return ab.rho(z, w)


def delta(ab: ABPair, z, alpha):
    return ab.delta(z, alpha)


def sigma(ab: ABPair, z):
    return ab.sigma(z)


def classify(ab: ABPair, z) -> Region:
    return ab.classify(complex(z))


def random_j0_unitary(rng, scale: float = 0.7) -> np.ndarray:
    """``U = expm(i J0 H)`` so that ``U J0 U^H = J0``."""
    from scipy.linalg import expm
    X = np.array([[rng.normal(), complex(rng.normal(), rng.normal())], [0, rng.normal()]])
    H = np.triu(X) + np.triu(X, 1).conj().T
    return expm(1j * scale * J0 @ H)


# --- rational functions and the generalized resolvents ----------------------

@dataclass(frozen=True, eq=False)
class RationalFunction:
    """Vector-valued ``num(z) / den(z)``; ``num`` is ``(deg+1, m)`` ascending, ``den`` scalar ascending."""

    num: np.ndarray
    den: np.ndarray

    def __post_init__(self):
        num = np.asarray(self.num, dtype=complex)
        if num.ndim == 1:
            num = num.reshape(-1, 1)
        den = np.atleast_1d(np.asarray(self.den, dtype=complex))
        if not np.any(den):
            raise ZeroDenominator("denominator is identically zero")
        # unit max-norm scaling: a monic form blows up when the leading coefficient nearly cancels
        scale = den[np.argmax(np.abs(den))]
        object.__setattr__(self, "num", num / scale)
        object.__setattr__(self, "den", np.trim_zeros(den, "b") / scale)

    @classmethod
    def kernel_sum(cls, ab: ABPair, mus, coeffs) -> "RationalFunction":
        """``sum_i c_i / rho(z, mu_i)`` as one fraction (``rho(., mu)`` is a polynomial in z)."""
        coeffs = np.asarray(coeffs, dtype=complex).reshape(len(mus), -1)
        m = coeffs.shape[1]
        facs = []
        for mu in mus:
            am, bm = np.conj(ab.a(mu)), np.conj(ab.b(mu))
            facs.append(P.polysub(ab.a_coef * am, ab.b_coef * bm))
        den = np.array([1.0 + 0j])
        for f in facs:
            den = P.polymul(den, f)
        num = np.zeros((1, m), dtype=complex)
        for i, c in enumerate(coeffs):
            other = np.array([1.0 + 0j])
            for j, f in enumerate(facs):
                if j != i:
                    other = P.polymul(other, f)
            num = _vpadd(num, np.outer(other, c))
        return cls(num, den)

    @property
    def dim(self) -> int:
        return self.num.shape[1]

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        d = P.polyval(z, self.den)
        if np.any(np.abs(d) < 1e-300):
            raise ZeroDenominator(f"pole at {z}")
        n = np.stack([P.polyval(z, self.num[:, j]) for j in range(self.dim)], axis=-1)
        return n / np.asarray(d)[..., None]


def _vpadd(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    out = np.zeros((max(len(p), len(q)), p.shape[1]), dtype=complex)
    out[: len(p)] += p
    out[: len(q)] += q
    return out


def _vpmul(scalar_poly: np.ndarray, vp: np.ndarray) -> np.ndarray:
    return np.stack([P.polymul(scalar_poly, vp[:, j]) for j in range(vp.shape[1])], axis=1)


def _diff_quotient(poly: np.ndarray, alpha: complex) -> np.ndarray:
    """Coefficients of ``(p(z) - p(alpha)) / (z - alpha)`` for a (vector) polynomial ``p``.

    Horner partial sums; the quotient is exact for ``p - p(alpha)`` so no
    cancellation at ``alpha`` is assumed.
    """
    poly = np.asarray(poly, dtype=complex)
    if poly.ndim == 1:
        poly = poly[:, None]
    n = len(poly)
    if n <= 1:
        return np.zeros((1, poly.shape[1]), dtype=complex)
    q = np.zeros((n - 1, poly.shape[1]), dtype=complex)
    acc = poly[-1].copy()
    for k in range(n - 2, -1, -1):
        q[k] = acc
        acc = poly[k] + alpha * acc
    return q


def R_ab_apply(ab: ABPair, f: RationalFunction, alpha: complex, swap: bool = False) -> RationalFunction:
    """``R(a,b,alpha) f`` (``R(b,a,alpha) f`` if ``swap``) as a rational function.

    With ``[p] = (p - p(alpha))/(z - alpha)`` and ``f = N/D``::

        R f = ([a] N + a(alpha)([N] - f(alpha)[D])) / (D (a(alpha)[b] - b(alpha)[a]))

    which is the defining quotient with the common factor ``z - alpha``
    removed from numerator and denominator.
    """
    alpha = complex(alpha)
    ac, bc = (ab.b_coef, ab.a_coef) if swap else (ab.a_coef, ab.b_coef)
    aa, ba = P.polyval(alpha, ac), P.polyval(alpha, bc)
    qa, qb = _diff_quotient(ac, alpha)[:, 0], _diff_quotient(bc, alpha)[:, 0]
    ql = P.polysub(aa * qb, ba * qa)
    if not np.any(np.abs(ql) > 1e-14):
        raise ZeroDenominator("a(alpha) b - b(alpha) a vanishes identically")
    fa = f(alpha)
    num = _vpadd(_vpmul(qa, f.num), aa * _vpadd(_diff_quotient(f.num, alpha),
                                                -np.outer(_diff_quotient(f.den, alpha)[:, 0], fa)))
    return RationalFunction(num, P.polymul(f.den, ql))


def classical_resolvent(f: RationalFunction, alpha: complex) -> RationalFunction:
    """``(f(z) - f(alpha)) / (z - alpha)``."""
    alpha = complex(alpha)
    qn = _vpadd(_diff_quotient(f.num, alpha), -np.outer(_diff_quotient(f.den, alpha)[:, 0], f(alpha)))
    return RationalFunction(qn, f.den)


def rarb1_residual(ab: ABPair, f: RationalFunction, alpha: complex, points) -> float:
    """``max |a(alpha) R(b,a,alpha) f + b(alpha) R(a,b,alpha) f + f|`` over the points."""
    Rab = R_ab_apply(ab, f, alpha)
    Rba = R_ab_apply(ab, f, alpha, swap=True)
    aa, ba = ab.a(alpha), ab.b(alpha)
    pts = np.asarray(points, dtype=complex)
    return float(np.max(np.abs(aa * Rba(pts) + ba * Rab(pts) + f(pts))))


# --- transport to the disk ---------------------------------------------------

class SigmaInverse:
    """Local inverse of ``sigma = b/a`` near a seed point, by Newton continuation.

    Newton is run along the segment from ``sigma(seed)`` to the target in
    steps; for real pairs and real targets a bisection on the real slice is
    the fallback.
    """

    def __init__(self, ab: ABPair, seed: complex, tol: float = 1e-12):
        seed = complex(seed)
        if abs(ab.sigma_prime(seed)) < 1e-12:
            raise NonInvertibleSigma(f"sigma'({seed}) vanishes")
        self.ab, self.seed, self.tol = ab, seed, tol

    def _newton(self, u: complex, z: complex) -> complex | None:
        for _ in range(60):
            step = (self.ab.sigma(z) - u) / self.ab.sigma_prime(z)
            z = z - step
            if abs(step) <= self.tol * max(1.0, abs(z)):
                return z
        return None

    def _bisect(self, u: float) -> complex | None:
        g = lambda x: (self.ab.sigma(x) - u).real  # noqa: E731
        x0 = self.seed.real
        for width in (0.5, 1.0, 2.0, 4.0, 8.0):
            lo, hi = x0 - width, x0 + width
            if g(lo) * g(hi) < 0:
                for _ in range(200):
                    mid = 0.5 * (lo + hi)
                    if g(lo) * g(mid) <= 0:
                        hi = mid
                    else:
                        lo = mid
                return complex(0.5 * (lo + hi))
        return None

    def __call__(self, u: complex) -> complex:
        u = complex(u)
        u0 = complex(self.ab.sigma(self.seed))
        z = self.seed
        steps = 16
        for k in range(1, steps + 1):
            target = u0 + (u - u0) * k / steps
            nz = self._newton(target, z)
            if nz is None:
                break
            z = nz
        else:
            return z
        if self.ab.is_real and u.imag == 0 and self.seed.imag == 0:
            x = self._bisect(u.real)
            if x is not None:
                return x
        raise NonInvertibleSigma(f"sigma inverse failed at {u}")


def transport_to_disk(ab: ABPair, f: Callable, base_point: complex) -> Callable:
    """``F`` with ``f(z) = F(sigma(z)) / a(z)``, i.e. ``F(u) = a(z) f(z)`` at ``z = sigma^{-1}(u)``."""
    inv = SigmaInverse(ab, base_point)

    def F(u):
        z = inv(u)
        return ab.a(z) * np.asarray(f(z))

    F.sigma_inverse = inv  # type: ignore[attr-defined]
    return F


# --- realizations in the (a, b) setting --------------------------------------

def _check_base(ab: ABPair, alpha: complex) -> tuple[complex, complex, float]:
    aa, ba = complex(ab.a(alpha)), complex(ab.b(alpha))
    r = float(abs(aa) ** 2 - abs(ba) ** 2)
    if r <= 0:
        raise DomainViolation("base point must lie in Omega_+")
    return aa, ba, r


def model_operators(c: Colligation, ab: ABPair) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(R(a,b,alpha), R(b,a,alpha), C_alpha)`` on the state space of ``c``.

    Inverts ``T = (rho(alpha,alpha) R(a,b) - conj(b(alpha)))/conj(a(alpha))``,
    ``G = sqrt(rho(alpha,alpha)) C_alpha`` and uses
    ``a(alpha) R(b,a) + b(alpha) R(a,b) = -I``.
    """
    aa, ba, r = _check_base(ab, c.base_point)
    n = c.dim_P
    Rab = (np.conj(aa) * c.T + np.conj(ba) * np.eye(n)) / r
    Rba = -(np.eye(n) + ba * Rab) / aa
    return Rab, Rba, c.G / math.sqrt(r)


def disk_blaschke(u: complex, v: complex) -> complex:
    """``(u - v) / (1 - u conj(v))``."""
    return (u - v) / (1.0 - u * np.conj(v))


def eval_unified(c: Colligation, ab: ABPair, z: complex, form: str = "sigma") -> np.ndarray:
    """``S(z)`` in the (a, b) setting.

    ``form="sigma"``: ``H + b_s(z) G (I - b_s(z) T)^{-1} F`` with
    ``b_s(z) = (sigma(z) - sigma(alpha)) / (1 - sigma(z) conj(sigma(alpha)))``.
    ``form="resolvent"``: ``H - |a(alpha)|^2 delta(z,alpha) / (a(alpha)^2 rho(alpha,alpha))
    G (a(z) R(b,a) + b(z) R(a,b))^{-1} F``.
    """
    z, alpha = complex(z), c.base_point
    if form == "sigma":
        x = disk_blaschke(complex(ab.sigma(z)), complex(ab.sigma(alpha)))
        n = c.dim_P
        M = np.eye(n) - x * c.T
        if n and np.linalg.cond(M) > SINGULAR_COND:
            raise SingularResolvent(f"singular at {z}")
        return c.H + x * c.G @ (np.linalg.solve(M, c.F) if n else c.F)
    if form == "resolvent":
        aa, _, r = _check_base(ab, alpha)
        Rab, Rba, _ = model_operators(c, ab)
        M = ab.a(z) * Rba + ab.b(z) * Rab
        if c.dim_P and np.linalg.cond(M) > SINGULAR_COND:
            raise SingularResolvent(f"singular at {z}")
        coef = abs(aa) ** 2 * ab.delta(z, alpha) / (aa ** 2 * r)
        return c.H - coef * c.G @ (np.linalg.solve(M, c.F) if c.dim_P else c.F)
    raise ValueError(form)


def point_evaluation_unified(c: Colligation, ab: ABPair, w: complex) -> np.ndarray:
    """``C_w = -C_alpha (a(w) R(b,a,alpha) + b(w) R(a,b,alpha))^{-1}``."""
    Rab, Rba, Ca = model_operators(c, ab)
    M = ab.a(w) * Rba + ab.b(w) * Rab
    if c.dim_P and np.linalg.cond(M) > SINGULAR_COND:
        raise SingularResolvent(f"singular at {w}")
    return -Ca @ np.linalg.inv(M) if c.dim_P else Ca


def kernel_unified(c: Colligation, ab: ABPair, z: complex, w: complex, form: str = "direct") -> np.ndarray:
    """``(I - S(z) S(w)^[*]) / rho(z, w)`` (``direct``) or ``C_z C_w^[*]`` (``resolvent``)."""
    z, w = complex(z), complex(w)
    if form == "direct":
        Sz, Sw = eval_unified(c, ab, z), eval_unified(c, ab, w)
        m = c.metric_C.dim
        return (np.eye(m) - Sz @ value_adjoint(c, Sw)) / ab.rho(z, w)
    if form == "resolvent":
        Cz, Cw = point_evaluation_unified(c, ab, z), point_evaluation_unified(c, ab, w)
        return Cz @ state_adjoint(c, Cw)
    raise ValueError(form)


def step_identity_residuals(c: Colligation, ab: ABPair, z: complex) -> dict[str, float]:
    """Residuals of the two pencil identities linking the sigma and resolvent forms.

    * ``a(z) R(b,a) + b(z) R(a,b) = -(a(z)/a(alpha)) (I - (delta(z,alpha)/a(z)) R(a,b))``
    * ``(1 - sigma(z) conj(sigma(alpha))) (I - b_s(z) T)
      = rho(alpha,alpha)/|a(alpha)|^2 (I - (delta(z,alpha)/a(z)) R(a,b))``
    """
    z, alpha = complex(z), c.base_point
    aa, ba, r = _check_base(ab, alpha)
    Rab, Rba, _ = model_operators(c, ab)
    n = c.dim_P
    I = np.eye(n)
    az, bz = ab.a(z), ab.b(z)
    d = ab.delta(z, alpha)
    lhs1 = az * Rba + bz * Rab
    rhs1 = -(az / aa) * (I - (d / az) * Rab)
    sz, sa = ab.sigma(z), ab.sigma(alpha)
    x = disk_blaschke(sz, sa)
    lhs2 = (1.0 - sz * np.conj(sa)) * (I - x * c.T)
    rhs2 = r / abs(aa) ** 2 * (I - (d / az) * Rab)
    return {
        "resolvent_pencil": float(np.max(np.abs(lhs1 - rhs1), initial=0.0)),
        "sigma_pencil": float(np.max(np.abs(lhs2 - rhs2), initial=0.0)),
    }


def unified_inequality_slacks(m: FiniteModelSpace) -> dict[str, np.ndarray]:
    """The three equivalent forms of the (a, b) model-space inequality.

    ``native``: ``[Rab f,Rab f] - [Rba f,Rba f] + [f(alpha),f(alpha)]`` (<= 0).
    ``contraction``: ``I - C^[*] C`` for ``C = [T; G]`` (>= 0); equals ``-rho(alpha,alpha) native``.
    ``disk``: the disk inequality after transport by ``f = F(sigma)/a``, where
    ``R(a,b,alpha)`` becomes ``R_s / a(alpha)`` with ``s = sigma(alpha)`` and
    ``F(s) = a(alpha) f(alpha)``; equals ``|a(alpha)|^2 native``.
    """
    a, b, _ = m._rho_alpha()
    s = b / a
    Pm, J = m.gram, m.coeff_metric.gram
    I = np.eye(m.dim)
    Rs = a * m.A_alpha
    Fs = a * m.E_alpha
    disk = Rs.conj().T @ Pm @ Rs - (I + s * Rs).conj().T @ Pm @ (I + s * Rs) + Fs.conj().T @ J @ Fs
    return {"native": m.inequality_form(), "contraction": m.slack(), "disk": 0.5 * (disk + disk.conj().T)}
