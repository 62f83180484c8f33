"""Dense univariate polynomials over the complex numbers.

Coefficients are stored low-to-high in an immutable complex array.  Degrees in
this package stay below ~25, so nothing here tries to be clever about sparsity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np
import numpy.polynomial.polynomial as npoly

from anwel.errors import DegreeTooSmall, NonConvergence

Scalar = Union[int, float, complex]

DEFAULT_TOL = 1e-9


class Poly:
    """Immutable dense polynomial ``sum(coeffs[k] * x**k)``.

    Trailing zeros are trimmed exactly on construction, so ``degree`` is the
    index of the last nonzero coefficient and ``None`` for the zero polynomial.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[Scalar]):
        c = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                     dtype=complex).ravel()
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:0]
        c = c.copy()
        c.setflags(write=False)
        self._c = c

    @classmethod
    def x(cls) -> Poly:
        return cls([0, 1])

    @classmethod
    def constant(cls, value: Scalar) -> Poly:
        return cls([value])

    @classmethod
    def from_roots(cls, roots: Sequence[Scalar], lead: Scalar = 1) -> Poly:
        if len(roots) == 0:
            return cls([lead])
        return cls(lead * npoly.polyfromroots(np.asarray(roots, dtype=complex)))

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int | None:
        return self._c.size - 1 if self._c.size else None

    @property
    def lead(self) -> complex:
        return complex(self._c[-1]) if self._c.size else 0j

    def is_zero(self) -> bool:
        return self._c.size == 0

    def is_real(self, tol: float = DEFAULT_TOL) -> bool:
        return bool(np.all(np.abs(self._c.imag) <= tol * (1.0 + np.abs(self._c.real))))

    def real_coeffs(self, tol: float = DEFAULT_TOL) -> np.ndarray:
        """Real view of the coefficients; raises ValueError if any is not real."""
        if not self.is_real(tol):
            raise ValueError("polynomial has non-real coefficients")
        return self._c.real.copy()

    def coeff(self, k: int) -> complex:
        return complex(self._c[k]) if 0 <= k < self._c.size else 0j

    def monic(self) -> Poly:
        if self.is_zero():
            raise ValueError("zero polynomial has no monic normalization")
        return Poly(self._c / self._c[-1])

    def shift(self, t: Scalar) -> Poly:
        """Return ``p(x + t)``."""
        out = np.zeros(1, dtype=complex)
        lin = np.array([t, 1], dtype=complex)
        for a in self._c[::-1]:
            out = npoly.polymul(out, lin)
            out[0] += a
        return Poly(out)

    def __call__(self, x):
        return evaluate(self, x)

    def __add__(self, other):
        return poly_arith("add", self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return poly_arith("sub", self, other)

    def __rsub__(self, other):
        return poly_arith("sub", _as_poly(other), self)

    def __mul__(self, other):
        if isinstance(other, Poly):
            return poly_arith("mul", self, other)
        return poly_arith("scale", self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return Poly(-self._c)

    def __pow__(self, e: int) -> Poly:
        out = Poly([1])
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        return f"Poly({np.round(self._c, 12).tolist()})"


def _as_poly(q) -> Poly:
    return q if isinstance(q, Poly) else Poly([q])


def poly_arith(op: str, p: Poly, q) -> Poly:
    """Exact coefficientwise or convolution arithmetic.

    ``op`` is one of ``add``, ``sub``, ``mul``, ``scale``; for ``scale`` the
    second operand is a scalar, otherwise a Poly or scalar.
    """
    if op == "scale":
        return Poly(p.coeffs * complex(q))
    q = _as_poly(q)
    if op == "mul":
        if p.is_zero() or q.is_zero():
            return Poly([])
        return Poly(np.convolve(p.coeffs, q.coeffs))
    if op in ("add", "sub"):
        size = max(p.coeffs.size, q.coeffs.size)
        a = np.zeros(size, dtype=complex)
        b = np.zeros(size, dtype=complex)
        a[: p.coeffs.size] = p.coeffs
        b[: q.coeffs.size] = q.coeffs
        return Poly(a + b if op == "add" else a - b)
    raise ValueError(f"unknown op {op!r}")


def derivative(p: Poly, order: int = 1) -> Poly:
    c = p.coeffs
    for _ in range(order):
        if c.size <= 1:
            return Poly([])
        c = c[1:] * np.arange(1, c.size)
    return Poly(c)


def evaluate(p: Poly, x):
    """Horner evaluation; ``x`` may be a scalar or an array."""
    x = np.asarray(x, dtype=complex)
    acc = np.zeros_like(x)
    for a in p.coeffs[::-1]:
        acc = acc * x + a
    return complex(acc) if acc.ndim == 0 else acc


@dataclass(frozen=True)
class RootCluster:
    center: complex
    multiplicity: int
    radius: float


def _split(roots: np.ndarray, idx: list[int]) -> tuple[list[int], list[int]]:
    """Cut the longest edge of the minimum spanning tree of ``roots[idx]``."""
    pts = roots[idx]
    d = np.abs(pts[:, None] - pts[None, :])
    inside = [0]
    best = d[0].copy()
    parent = np.zeros(len(idx), dtype=int)
    edges = []
    while len(inside) < len(idx):
        best[inside] = np.inf
        j = int(np.argmin(best))
        edges.append((best[j], parent[j], j))
        inside.append(j)
        closer = d[j] < best
        parent[closer] = j
        best = np.minimum(best, d[j])
    cut = max(edges)
    adj = {k: [] for k in range(len(idx))}
    for _, u, v in edges:
        if (u, v) != (cut[1], cut[2]):
            adj[u].append(v)
            adj[v].append(u)
    seen, stack = {0}, [0]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    a = [idx[k] for k in range(len(idx)) if k in seen]
    b = [idx[k] for k in range(len(idx)) if k not in seen]
    return a, b


def _taylor_threshold(c: np.ndarray, j: int, rho: float, tol: float) -> float:
    """Allowed size of ``p^(j)(z) / j!`` for ``|z| <= rho``.

    Componentwise backward error ``tol`` plus a rounding floor, so coefficients
    that cancel to (near) zero do not make the test unsatisfiable.
    """
    k = np.arange(j, c.size)
    binom = np.array([math.comb(int(kk), j) for kk in k], dtype=float)
    powers = binom * rho ** (k - j)
    rounding = 1e3 * np.finfo(float).eps * float(np.max(np.abs(c)))
    return float(tol * np.sum(np.abs(c[j:]) * powers) + rounding * np.sum(powers))


def _polish_center(pm: Poly, center: complex, mult: int, radius: float, max_iter: int) -> complex:
    """Newton on ``p^(mult-1)``, whose root is simple at an exact ``mult``-fold root."""
    target = derivative(pm, mult - 1)
    dtarget = derivative(target)
    z = center
    fz = abs(evaluate(target, z))
    for _ in range(max_iter):
        dz = evaluate(dtarget, z)
        if dz == 0:
            break
        step = evaluate(target, z) / dz
        cand = z - step
        fc = abs(evaluate(target, cand))
        if not fc < fz and abs(step) > 0:
            break
        z, fz = cand, fc
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    if abs(z - center) > max(2 * radius, 1e-12 * max(1.0, abs(center))):
        z = center
    return complex(z)


def _is_numerical_root(c: np.ndarray, z: complex, mult: int, rho: float, tol: float) -> bool:
    """``p^(j)(z) / j!`` is at tolerance level for every ``j < mult``."""
    pm = Poly(c)
    for j in range(mult):
        val = abs(evaluate(derivative(pm, j), z)) / math.factorial(j)
        if val > _taylor_threshold(c, j, rho, tol):
            return False
    return True


def all_roots(p: Poly, tol: float = DEFAULT_TOL, max_iter: int = 60) -> list[RootCluster]:
    """All complex roots of ``p`` grouped into multiplicity clusters.

    Companion-matrix eigenvalues of the monic normalization, then top-down
    clustering: a group of ``s`` approximate roots is one ``s``-fold root when
    it fits, alone, in a disc of radius ``tol^(1/(2s)) * max(|center|, 1)`` and the
    first ``s`` Taylor coefficients at its polished center vanish to ``tol``;
    otherwise it is split along its widest gap.  Output is sorted by
    (real part, imaginary part) so it is deterministic for a fixed input.
    """
    if p.degree is None or p.degree < 1:
        raise DegreeTooSmall("all_roots needs degree >= 1")
    c = p.monic().coeffs
    roots = npoly.polyroots(c) if c.size > 2 else np.array([-c[0]], dtype=complex)
    roots = np.asarray(roots, dtype=complex)
    pm = Poly(c)
    clusters = []
    pending = [list(range(roots.size))]
    while pending:
        idx = pending.pop()
        s = len(idx)
        pts = roots[idx]
        center = complex(pts.mean())
        radius = float(np.max(np.abs(pts - center)))
        unit = max(abs(center), 1.0)
        # eigenvalues of an s-fold root scatter well beyond tol^(1/s) when it is
        # ill-conditioned, so the disc test is loose and the Taylor test decides
        disc = tol ** (0.5 / s) * unit
        others = np.delete(roots, idx)
        crowded = others.size > 0 and float(np.min(np.abs(others - center))) < disc
        if s > 1 and (2 * radius >= disc or crowded):
            pending.extend(_split(roots, idx))
            continue
        z = _polish_center(pm, center, s, radius, max_iter)
        rho = max(abs(z), tol ** (1.0 / s) * unit)
        if _is_numerical_root(c, z, s, rho, tol):
            clusters.append(RootCluster(z, s, radius))
        elif s > 1:
            pending.extend(_split(roots, idx))
        else:
            raise NonConvergence(f"root near {z} has residual {abs(evaluate(pm, z)):.3e}")
    clusters.sort(key=lambda r: (round(r.center.real, 10), round(r.center.imag, 10)))
    return clusters


def sylvester_matrix(p: Poly, q: Poly) -> np.ndarray:
    m, n = p.degree, q.degree
    size = m + n
    S = np.zeros((size, size), dtype=complex)
    ph, qh = p.coeffs[::-1], q.coeffs[::-1]
    for r in range(n):
        S[r, r : r + m + 1] = ph
    for r in range(m):
        S[n + r, r : r + n + 1] = qh
    return S


def resultant(p: Poly, q: Poly) -> complex:
    if p.degree is None or q.degree is None:
        return 0j
    if p.degree == 0:
        return p.lead ** q.degree
    if q.degree == 0:
        return q.lead ** p.degree
    return complex(np.linalg.det(sylvester_matrix(p, q)))


def discriminant(p: Poly) -> complex:
    """``(-1)^(d(d-1)/2) * Res(p, p') / lc(p)``; zero iff ``p`` has a repeated root."""
    d = p.degree
    if d is None or d < 2:
        raise DegreeTooSmall("discriminant needs degree >= 2")
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return sign * resultant(p, derivative(p)) / p.lead
