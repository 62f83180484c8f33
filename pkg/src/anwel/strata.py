"""Severi loci EG^i and the equiclassical locus EC of A_n as factorization problems.

A slice member lies in EG^i when ``x^(n+1) + (frozen high part) + P(x) = Q^2 R``
with ``Q, R`` monic of degrees ``i`` and ``n + 1 - 2i`` and ``deg P < i``.  The
unknowns are the non-leading coefficients of ``Q`` and ``R``; the equations
match the coefficients of ``x^i .. x^n``.  For EC of ``A_(2k)`` the factor
``R`` is replaced by ``(x + beta)^3`` and ``deg Q = k - 1``.

Coefficient conventions: ``Q = x^i + alpha_1 x^(i-1) + ... + alpha_i`` and
likewise for ``R`` with ``beta_j``.  Variable vectors are ordered
``(alpha_1, ..., alpha_i, beta_1, ..., beta_r)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from anwel.errors import BadIndices, DegreeMismatch, NonConvergence, SingularJacobian
from anwel.polynomial import Poly
from anwel.solver import SquareSystem, SystemFamily, newton_refine

# ---------------------------------------------------------------------------
# tiny multivariate polynomial helpers: dict exponent-tuple -> coefficient


def _mono(nv: int, k: int | None = None, coef=1) -> dict:
    e = [0] * nv
    if k is not None:
        e[k] = 1
    return {tuple(e): coef}


def _madd(a: dict, b: dict, scale=1) -> dict:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + scale * c
    return {e: c for e, c in out.items() if c != 0}


def _mmul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c != 0}


def _upoly_mul(p: list, q: list, nv: int) -> list:
    out = [{} for _ in range(len(p) + len(q) - 1)]
    for a, ca in enumerate(p):
        for b, cb in enumerate(q):
            out[a + b] = _madd(out[a + b], _mmul(ca, cb))
    return out


def _monic_symbolic(deg: int, first_var: int, nv: int) -> list:
    """Coefficients (low to high) of ``x^deg + sum_j v_(first+j-1) x^(deg-j)``."""
    coeffs = [None] * (deg + 1)
    coeffs[deg] = _mono(nv)
    for j in range(1, deg + 1):
        coeffs[deg - j] = _mono(nv, first_var + j - 1)
    return coeffs


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class SliceTarget:
    """Frozen high coefficients of an affine slice.

    The target polynomial is ``x^(n+1) + epsilon * sum_j high[j] x^(i+j)``
    (``j < n - i``) plus ``xn_coeff * x^n``.  Members of the miniversal family
    have ``xn_coeff = 0``; it is nonzero only for the tangent-cone target when
    ``i = n`` (``A_1`` for EG, ``A_2`` for EC), where the ``x^n`` term is
    removable by translation.
    """

    n: int
    i: int
    high: tuple = ()
    epsilon: float = 1.0
    xn_coeff: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "high", tuple(float(h) for h in self.high))
        if len(self.high) != self.n - self.i:
            raise ValueError(f"expected {self.n - self.i} frozen coefficients, got {len(self.high)}")

    @classmethod
    def tangent_cone(cls, n: int, i: int) -> SliceTarget:
        """The slice with target ``x^(n+1) + x^i``."""
        if i < n:
            return cls(n, i, (1.0,) + (0.0,) * (n - i - 1), 1.0)
        return cls(n, i, (), 1.0, xn_coeff=1.0)

    def vector(self) -> np.ndarray:
        """Target coefficients of ``x^i .. x^n``."""
        t = np.zeros(self.n + 1 - self.i)
        t[: self.n - self.i] = self.epsilon * np.asarray(self.high, dtype=float)
        t[-1] += self.xn_coeff
        return t

    def polynomial(self) -> Poly:
        c = np.zeros(self.n + 2)
        c[self.i : self.n + 1] = self.vector()
        c[self.n + 1] = 1.0
        return Poly(c)


@dataclass(frozen=True)
class EGWitness:
    n: int
    i: int
    Q: Poly
    R: Poly
    P: Poly = field(default=None)

    def __post_init__(self):
        if self.Q.degree != self.i or self.R.degree != self.n + 1 - 2 * self.i:
            raise DegreeMismatch("witness degrees do not match (n, i)")
        if self.P is None:
            G = self.Q * self.Q * self.R
            object.__setattr__(self, "P", Poly(G.coeffs[: self.i]))

    def product(self) -> Poly:
        return self.Q * self.Q * self.R


@dataclass(frozen=True)
class ECWitness:
    k: int
    Q: Poly
    beta: complex
    P: Poly = field(default=None)

    def __post_init__(self):
        if self.Q.degree != self.k - 1:
            raise DegreeMismatch("Q must have degree k - 1")
        if self.P is None:
            G = self.product()
            object.__setattr__(self, "P", Poly(G.coeffs[: self.k + 1]))

    def product(self) -> Poly:
        return self.Q * self.Q * Poly([self.beta, 1]) ** 3


# ---------------------------------------------------------------------------
# multiplicities


def _check_eg(n: int, i: int):
    if n < 1 or i < 1 or i > (n + 1) // 2:
        raise BadIndices(f"need 1 <= i <= floor((n+1)/2), got n={n}, i={i}")


def multiplicity_eg(n: int, i: int) -> int:
    _check_eg(n, i)
    return math.comb(n + 1 - i, i)


def multiplicity_ec(k: int) -> int:
    if k < 1:
        raise BadIndices("k must be >= 1")
    return k


# ---------------------------------------------------------------------------
# residuals


def _monic_of_degree(p: Poly, deg: int, tol: float = 1e-12) -> bool:
    return p.degree == deg and abs(p.lead - 1) <= tol


def eg_residual(target: SliceTarget, Q: Poly, R: Poly) -> np.ndarray:
    """Coefficients of ``x^i .. x^n`` in ``Q^2 R - target``; zero certifies EG^i membership."""
    n, i = target.n, target.i
    if not _monic_of_degree(Q, i) or not _monic_of_degree(R, n + 1 - 2 * i):
        raise DegreeMismatch("Q, R must be monic of degrees i and n+1-2i")
    G = Q * Q * R
    c = np.array([G.coeff(m) for m in range(i, n + 1)])
    return c - target.vector()


def ec_tangent_target(k: int) -> SliceTarget:
    return SliceTarget.tangent_cone(2 * k, k + 1)


def ec_residual(k: int, Q: Poly, beta: complex, target: SliceTarget | None = None) -> np.ndarray:
    """Coefficients of ``x^(k+1) .. x^(2k)`` in ``Q^2 (x+beta)^3 - target``.

    The default target is the tangent-cone polynomial ``x^(2k+1) + x^(k+1)``.
    """
    if not _monic_of_degree(Q, k - 1):
        raise DegreeMismatch("Q must be monic of degree k - 1")
    target = ec_tangent_target(k) if target is None else target
    G = Q * Q * Poly([beta, 1]) ** 3
    c = np.array([G.coeff(m) for m in range(k + 1, 2 * k + 1)])
    return c - target.vector()


# ---------------------------------------------------------------------------
# square systems


def _eg_product(n: int, i: int) -> tuple[list, int]:
    r = n + 1 - 2 * i
    nv = i + r
    Q = _monic_symbolic(i, 0, nv)
    R = _monic_symbolic(r, i, nv)
    return _upoly_mul(_upoly_mul(Q, Q, nv), R, nv), nv


def _ec_product(k: int) -> tuple[list, int]:
    nv = k
    Q = _monic_symbolic(k - 1, 0, nv)
    lin = [_mono(nv, k - 1), _mono(nv)]
    cube = _upoly_mul(_upoly_mul(lin, lin, nv), lin, nv)
    return _upoly_mul(_upoly_mul(Q, Q, nv), cube, nv), nv


def _matching_system(G: list, lo: int, hi: int, t: Sequence, nv: int) -> SquareSystem:
    zero = (0,) * nv
    polys = []
    for m, tm in zip(range(lo, hi + 1), t):
        polys.append(_madd(G[m], {zero: -complex(tm)}))
    return SquareSystem.from_polys(polys, nv)


def eg_system(target: SliceTarget) -> SquareSystem:
    """Coefficient matching ``Q^2 R = target`` on ``x^i .. x^n`` as a square system."""
    _check_eg(target.n, target.i)
    G, nv = _eg_product(target.n, target.i)
    return _matching_system(G, target.i, target.n, target.vector(), nv)


def ec_system(target: SliceTarget) -> SquareSystem:
    n = target.n
    if n % 2 or target.i != n // 2 + 1:
        raise BadIndices("EC slices need n = 2k and i = k + 1")
    k = n // 2
    G, nv = _ec_product(k)
    return _matching_system(G, k + 1, 2 * k, target.vector(), nv)


def _constant_family(sys0: SquareSystem, delta: np.ndarray) -> SystemFamily:
    m = sys0.dim
    direction = SquareSystem(m, np.zeros((m, sys0.nvars), np.int64), -np.asarray(delta, complex),
                             np.arange(m), sys0.nvars)
    return SystemFamily(sys0, direction)


def eg_family(n: int, i: int, start: np.ndarray, end: np.ndarray) -> SystemFamily:
    """Family whose eps=0 member matches ``start`` and eps=1 member matches ``end``."""
    base = eg_system(_from_vector(n, i, start))
    return _constant_family(base, np.asarray(end) - np.asarray(start))


def ec_family(k: int, start: np.ndarray, end: np.ndarray) -> SystemFamily:
    base = ec_system(_from_vector(2 * k, k + 1, start))
    return _constant_family(base, np.asarray(end) - np.asarray(start))


def _from_vector(n: int, i: int, t: np.ndarray) -> SliceTarget:
    t = np.asarray(t, dtype=float)
    return SliceTarget(n, i, tuple(t[: n - i]), 1.0, float(t[-1]))


def reduced_eg_system(n: int, i: int) -> SquareSystem:
    """The map ``(n+1) Q R - 2x Q' R - x Q R' - (n+1-i)``, coefficients of ``x^0 .. x^(n-i)``.

    The coefficient of ``x^m`` is ``sum_(a+b=m) (n+1-2a-b) Q_a R_b``; the top
    coefficient ``x^(n+1-i)`` vanishes identically.
    """
    _check_eg(n, i)
    r = n + 1 - 2 * i
    nv = i + r
    Q = _monic_symbolic(i, 0, nv)
    R = _monic_symbolic(r, i, nv)
    H = [{} for _ in range(n + 2 - i)]
    for a, qa in enumerate(Q):
        for b, rb in enumerate(R):
            w = n + 1 - 2 * a - b
            if w:
                H[a + b] = _madd(H[a + b], _mmul(qa, rb), w)
    if H[n + 1 - i]:
        raise AssertionError("top coefficient of the reduced operator did not cancel")
    zero = (0,) * nv
    H[0] = _madd(H[0], {zero: -(n + 1 - i)})
    return SquareSystem.from_polys(H[: n + 1 - i], nv)


@dataclass(frozen=True)
class ECReduction:
    """Triangular reduced EC system read off the operator ``G -> (2k+1) G - x G'``.

    The coefficient of ``x^(k-j)`` in the reduced polynomial is
    ``a[j] * alpha_j + b[j] * beta * alpha_(j-1)`` (``alpha_0 = 1``,
    ``alpha_k = 0``) and the constant coefficient must equal ``constant``.
    """

    k: int
    a: tuple
    b: tuple
    constant: int
    nu: tuple


def ec_reduction(k: int) -> ECReduction:
    """Derive the reduced EC system symbolically.

    Applying ``G -> (2k+1) G - x G'`` to ``G = Q^2 (x+beta)^3`` gives
    ``Q (x+beta)^2 H`` with ``H = (2k+1)(x+beta) Q - 2x Q' (x+beta) - 3x Q``;
    applied to the target ``x^(2k+1) + x^(k+1)`` it leaves
    ``((2k+1) - (k+1)) x^(k+1)`` above degree ``k``, which forces ``H`` to be
    that constant.
    """
    if k < 1:
        raise BadIndices("k must be >= 1")
    nv = k
    Q = _monic_symbolic(k - 1, 0, nv)
    beta = _mono(nv, k - 1)
    H = [{} for _ in range(k + 1)]
    for p, qp in enumerate(Q):
        # (2k+1)(x+beta)Q - 2xQ'(x+beta) - 3xQ, term by term in Q_p x^p
        top = 2 * k + 1 - 2 * p - 3
        H[p + 1] = _madd(H[p + 1], qp, top)
        H[p] = _madd(H[p], _mmul(qp, beta), 2 * k + 1 - 2 * p)
    if H[k]:
        raise AssertionError("top coefficient of the reduced EC operator did not cancel")
    constant = (2 * k + 1) - (k + 1)
    zero = (0,) * nv
    a, b = [], []
    for j in range(1, k + 1):
        coeff = H[k - j]
        alpha_j = _mono(nv, j - 1) if j < k else None
        prev = _mmul(_mono(nv, j - 2), beta) if j >= 2 else beta
        (pe, bj), = [(e, c) for e, c in coeff.items() if e in prev]
        aj = coeff.get(next(iter(alpha_j)), 0) if alpha_j else 0
        extra = set(coeff) - set(prev) - (set(alpha_j) if alpha_j else set())
        if extra or zero in coeff:
            raise AssertionError(f"unexpected monomials in reduced EC equation {j}")
        a.append(int(aj))
        b.append(int(bj))
    nu = [Fraction(1)]
    for j in range(1, k):
        nu.append(-Fraction(b[j - 1], a[j - 1]) * nu[-1])
    return ECReduction(k, tuple(a), tuple(b), constant, tuple(nu))


def ec_reduced_system(k: int) -> SquareSystem:
    red = ec_reduction(k)
    nv = k
    zero = (0,) * nv
    polys = []
    for j in range(1, k + 1):
        poly = {}
        if j < k:
            poly = _madd(poly, _mono(nv, j - 1), red.a[j - 1])
        prev = _mmul(_mono(nv, j - 2), _mono(nv, k - 1)) if j >= 2 else _mono(nv, k - 1)
        poly = _madd(poly, prev, red.b[j - 1])
        if j == k:
            poly = _madd(poly, {zero: -red.constant})
        polys.append(poly)
    return SquareSystem.from_polys(polys, nv)


# ---------------------------------------------------------------------------
# witnesses from solution vectors


def eg_witness(n: int, i: int, z: Sequence[complex]) -> EGWitness:
    z = np.asarray(z, dtype=complex)
    r = n + 1 - 2 * i
    Q = Poly(np.concatenate([z[:i][::-1], [1.0]]))
    R = Poly(np.concatenate([z[i : i + r][::-1], [1.0]]))
    return EGWitness(n, i, Q, R)


def ec_witness(k: int, z: Sequence[complex]) -> ECWitness:
    z = np.asarray(z, dtype=complex)
    Q = Poly(np.concatenate([z[: k - 1][::-1], [1.0]]))
    return ECWitness(k, Q, complex(z[k - 1]))


def eg_weights(n: int, i: int) -> np.ndarray:
    return np.concatenate([np.arange(1, i + 1), np.arange(1, n + 2 - 2 * i)])


def ec_weights(k: int) -> np.ndarray:
    return np.concatenate([np.arange(1, k), [1]])


def normalize_target(n: int, i: int, t: np.ndarray) -> tuple[float, np.ndarray]:
    """Weighted rescaling ``x -> lam x`` that brings the largest weighted coefficient to 1.

    ``t`` holds the coefficients of ``x^i .. x^n``; the one of ``x^m`` has
    weight ``n + 1 - m``.  Returns ``(lam, t_scaled)``; ``lam = 0`` for the
    zero target.
    """
    t = np.asarray(t, dtype=float)
    w = n + 1 - np.arange(i, n + 1)
    lam = float(np.max(np.abs(t) ** (1.0 / w), initial=0.0))
    if lam == 0.0:
        return 0.0, t.copy()
    return lam, t / lam ** w


def ec_closed_form(k: int, polish: bool = True) -> list:
    """All ``k`` EC witnesses of the tangent-cone slice of ``A_(2k)``.

    ``alpha_j = nu_j beta^j`` with the rational ``nu_j`` from
    :func:`ec_reduction`, and ``beta`` runs over the k-th roots of
    ``constant / (b_k nu_(k-1))``.  Every witness is checked against
    :func:`ec_residual`.
    """
    red = ec_reduction(k)
    C = Fraction(red.constant) / (red.b[-1] * red.nu[-1])
    mag = abs(float(C)) ** (1.0 / k)
    phase = 0.0 if C > 0 else np.pi
    system = ec_system(ec_tangent_target(k)) if polish else None
    out = []
    for l in range(k):
        beta = mag * np.exp(1j * (phase + 2 * np.pi * l) / k)
        if abs(beta.imag) < 1e-14 * mag:
            beta = complex(beta.real, 0.0)
        z = np.array([float(red.nu[j]) * beta ** j for j in range(1, k)] + [beta], dtype=complex)
        if polish:
            try:
                z2 = newton_refine(system, z, tol=1e-13)
                z = np.where(z.imag == 0, z2.real, z2)
            except (NonConvergence, SingularJacobian):
                pass
        w = ec_witness(k, z)
        res = np.max(np.abs(ec_residual(k, w.Q, w.beta)))
        if res > 1e-9:
            raise NonConvergence(f"EC closed-form witness fails the residual check ({res:.2e})")
        out.append(w)
    out.sort(key=lambda w: (round(w.beta.real, 10), round(w.beta.imag, 10)))
    return out
