"""All-solutions solver for small square polynomial systems.

Total-degree homotopy in projective coordinates (random affine patch, gamma
trick), tracked with an RK4 predictor on the Davydenko ODE and a short Newton
corrector.  All paths of one homotopy are advanced together as numpy batches;
each path keeps its own time and step size.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from anwel.errors import NonConvergence, PathCollision, PathFailure, SingularJacobian

Monomials = Mapping[tuple, complex]


def seeded_rng(*key: int) -> np.random.Generator:
    """Counter-based generator keyed by up to two 64-bit words, plus a counter word."""
    words = [int(k) & 0xFFFFFFFFFFFFFFFF for k in key] + [0, 0, 0]
    return np.random.Generator(
        np.random.Philox(
            key=np.array(words[:2], dtype=np.uint64),
            counter=np.array([0, words[2], 0, 0], dtype=np.uint64),
        )
    )


def _one_hot(idx: np.ndarray, size: int) -> np.ndarray:
    S = np.zeros((idx.size, size))
    S[np.arange(idx.size), idx] = 1.0
    return S


@dataclass(frozen=True, eq=False)
class SquareSystem:
    """``dim`` polynomial equations in ``dim`` unknowns, stored as stacked terms.

    Term ``t`` contributes ``coefficients[t] * prod(x ** exponents[t])`` to
    equation ``rows[t]``.
    """

    dim: int
    exponents: np.ndarray
    coefficients: np.ndarray
    rows: np.ndarray
    nvars: int | None = None
    _S: np.ndarray = field(init=False, repr=False)
    _DE: np.ndarray = field(init=False, repr=False)
    _Dc: np.ndarray = field(init=False, repr=False)
    _DS: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        nv = self.dim if self.nvars is None else self.nvars
        object.__setattr__(self, "nvars", nv)
        E = np.asarray(self.exponents, dtype=np.int64).reshape(-1, nv)
        c = np.asarray(self.coefficients, dtype=complex).ravel()
        rows = np.asarray(self.rows, dtype=np.int64).ravel()
        for name, val in (("exponents", E), ("coefficients", c), ("rows", rows)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "_S", _one_hot(rows, self.dim))
        dE, dc, didx = [], [], []
        for k in range(nv):
            mask = E[:, k] > 0
            Ek = E[mask].copy()
            dc.append(c[mask] * Ek[:, k])
            Ek[:, k] -= 1
            dE.append(Ek)
            didx.append(rows[mask] * nv + k)
        object.__setattr__(self, "_DE", np.concatenate(dE) if dE else np.zeros((0, nv), np.int64))
        object.__setattr__(self, "_Dc", np.concatenate(dc) if dc else np.zeros(0, complex))
        didx = np.concatenate(didx) if didx else np.zeros(0, np.int64)
        object.__setattr__(self, "_DS", _one_hot(didx, self.dim * nv))

    @classmethod
    def from_polys(cls, polys: Sequence[Monomials], nvars: int | None = None) -> SquareSystem:
        nv = len(polys) if nvars is None else nvars
        E, c, rows = [], [], []
        for r, poly in enumerate(polys):
            for exp, coef in sorted(poly.items()):
                if coef != 0:
                    E.append(exp)
                    c.append(coef)
                    rows.append(r)
        return cls(len(polys), np.array(E, dtype=np.int64).reshape(-1, nv), np.array(c), np.array(rows), nv)

    @property
    def degrees(self) -> tuple:
        tot = self.exponents.sum(axis=1)
        return tuple(int(tot[self.rows == r].max(initial=0)) for r in range(self.dim))

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.coefficients.imag == 0))

    def _monomials(self, X: np.ndarray, E: np.ndarray) -> np.ndarray:
        # integer powers by repeated multiplication; complex ** goes through exp/log
        top = int(E.max(initial=0))
        P = np.empty(X.shape + (top + 1,), dtype=complex)
        P[..., 0] = 1.0
        for e in range(1, top + 1):
            P[..., e] = P[..., e - 1] * X
        M = np.ones(X.shape[:-1] + (E.shape[0],), dtype=complex)
        for k in range(E.shape[1]):
            M = M * P[..., k, E[:, k]]
        return M

    def evaluate(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=complex)
        return (self._monomials(X, self.exponents) * self.coefficients) @ self._S

    def jacobian(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=complex)
        J = (self._monomials(X, self._DE) * self._Dc) @ self._DS
        return J.reshape(X.shape[:-1] + (self.dim, self.nvars))

    def homogenize(self) -> SquareSystem:
        """Homogenized system in ``(x_0, x_1, ..., x_m)``."""
        deg = np.array(self.degrees)[self.rows]
        E0 = deg - self.exponents.sum(axis=1)
        E = np.column_stack([E0, self.exponents])
        return SquareSystem(self.dim, E, self.coefficients, self.rows, self.nvars + 1)

    def __add__(self, other: SquareSystem) -> SquareSystem:
        return SquareSystem(
            self.dim,
            np.concatenate([self.exponents, other.exponents]),
            np.concatenate([self.coefficients, other.coefficients]),
            np.concatenate([self.rows, other.rows]),
            self.nvars,
        )

    def scaled(self, factor: complex) -> SquareSystem:
        return SquareSystem(self.dim, self.exponents, self.coefficients * factor, self.rows, self.nvars)

    def evaluate_mp(self, x, mp):
        """Evaluation and Jacobian with mpmath scalars (extended-precision polish)."""
        F = [mp.mpc(0)] * self.dim
        J = [[mp.mpc(0)] * self.nvars for _ in range(self.dim)]
        for e, cf, r in zip(self.exponents, self.coefficients, self.rows):
            cf = mp.mpc(cf.real, cf.imag)
            powers = [x[k] ** int(e[k]) for k in range(self.nvars)]
            term = cf
            for p in powers:
                term *= p
            F[r] += term
            for k in range(self.nvars):
                if e[k] > 0:
                    d = cf * int(e[k])
                    for j in range(self.nvars):
                        d *= x[j] ** (int(e[j]) - (1 if j == k else 0))
                    J[r][k] += d
        return F, J


@dataclass(frozen=True)
class SystemFamily:
    """``base + eps * direction``: a system whose coefficients are affine in eps."""

    base: SquareSystem
    direction: SquareSystem

    def at(self, eps: complex) -> SquareSystem:
        return self.base + self.direction.scaled(eps)


@dataclass
class SolutionSet:
    points: list
    residuals: list
    multiplicity_clusters: list
    bezout_bound: int
    n_infinite: int = 0
    n_failed: int = 0

    @property
    def count(self) -> int:
        """Number of solutions counted with multiplicity."""
        return sum(c for _, c in self.multiplicity_clusters)

    def real_points(self, tol: float = 1e-8) -> list:
        return [p for p in self.points if np.all(np.abs(p.imag) <= tol * (1 + np.abs(p.real)))]


def _solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.solve(A, b[..., None])[..., 0]
    except np.linalg.LinAlgError:
        out = np.full(b.shape, np.nan, dtype=complex)
        for k in range(A.shape[0]):
            try:
                out[k] = np.linalg.solve(A[k], b[k])
            except np.linalg.LinAlgError:
                pass
        return out


def _norm(X: np.ndarray) -> np.ndarray:
    return np.max(np.abs(X), axis=-1)


@dataclass
class _Homotopy:
    H: Callable
    Hz: Callable
    Hs: Callable


def _track(hom: _Homotopy, Z0: np.ndarray, *, h0=0.02, hmax=0.1, hmin=1e-13,
           max_steps=4000, first_tol=1e-3, final_tol=1e-9):
    """Track all rows of ``Z0`` from s=0 to s=1.  Returns (Z, s, finished)."""
    Z = np.array(Z0, dtype=complex)
    N = Z.shape[0]
    s = np.zeros(N)
    h = np.full(N, h0)
    streak = np.zeros(N, dtype=np.int64)
    steps = np.zeros(N, dtype=np.int64)
    done = np.zeros(N, dtype=bool)
    dead = np.zeros(N, dtype=bool)

    def flow(z, t):
        return _solve(hom.Hz(z, t), -hom.Hs(z, t))

    with np.errstate(over="ignore", invalid="ignore"):
        _track_loop(flow, hom, Z, s, h, streak, steps, done, dead, hmax, hmin, max_steps,
                    first_tol, final_tol)
    return Z, s, done


def _track_loop(flow, hom, Z, s, h, streak, steps, done, dead, hmax, hmin, max_steps,
                first_tol, final_tol):
    while True:
        idx = np.flatnonzero(~(done | dead))
        if idx.size == 0:
            break
        z, t = Z[idx], s[idx]
        step = np.minimum(h[idx], 1.0 - t)
        last = step >= 1.0 - t
        t1 = np.where(last, 1.0, t + step)
        st = step[:, None]
        k1 = flow(z, t)
        k2 = flow(z + 0.5 * st * k1, t + 0.5 * step)
        k3 = flow(z + 0.5 * st * k2, t + 0.5 * step)
        k4 = flow(z + st * k3, t1)
        zc = z + st / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        scale = 1.0 + _norm(zc)
        ok = np.isfinite(zc).all(axis=1)
        for it in range(3):
            dz = _solve(hom.Hz(zc, t1), -hom.H(zc, t1))
            nd = _norm(dz)
            ok &= np.isfinite(nd)
            if it == 0:
                ok &= nd <= first_tol * scale
            zc = zc + dz
        ok &= nd <= final_tol * scale
        good, bad = idx[ok], idx[~ok]
        Z[good] = zc[ok]
        s[good] = t1[ok]
        streak[good] += 1
        grow = good[streak[good] >= 3]
        h[grow] = np.minimum(2.0 * h[grow], hmax)
        streak[grow] = 0
        done[good[s[good] >= 1.0]] = True
        h[bad] *= 0.5
        streak[bad] = 0
        steps[idx] += 1
        dead[bad[h[bad] < hmin]] = True
        dead[idx[steps[idx] > max_steps]] = True
        dead &= ~done


def newton_refine(sys: SquareSystem, x0, tol: float = 1e-12, max_iter: int = 30,
                  extended: bool = False, cond_limit: float = 1e14) -> np.ndarray:
    """Polish a root of ``sys`` from ``x0``; quadratic near simple roots.

    Raises SingularJacobian at (numerically) singular iterates and
    NonConvergence if the residual never drops below ``tol``.
    """
    x = np.array(x0, dtype=complex).ravel()
    scale = 1.0 + float(np.max(np.abs(sys.coefficients), initial=0.0))
    for _ in range(max_iter):
        F = sys.evaluate(x)
        res = float(np.max(np.abs(F)))
        J = sys.jacobian(x)
        if not np.all(np.isfinite(J)) or np.linalg.cond(J) > cond_limit:
            if res <= tol * 1e-3:
                break
            raise SingularJacobian(f"Jacobian singular at {x}")
        dx = np.linalg.solve(J, -F)
        x = x + dx
        if res <= tol and np.max(np.abs(dx)) <= 1e-15 * (1 + np.max(np.abs(x))):
            break
    res = float(np.max(np.abs(sys.evaluate(x))))
    if res > tol * scale:
        raise NonConvergence(f"residual {res:.3e} after {max_iter} Newton steps")
    if extended:
        x = _mp_polish(sys, x)
    return x


def _mp_polish(sys: SquareSystem, x: np.ndarray, digits: int = 40, iters: int = 3) -> np.ndarray:
    import mpmath

    mp = mpmath.mp.clone() if hasattr(mpmath.mp, "clone") else mpmath.mp
    old = mp.dps
    mp.dps = digits
    try:
        z = [mp.mpc(v.real, v.imag) for v in x]
        for _ in range(iters):
            F, J = sys.evaluate_mp(z, mp)
            dz = mp.lu_solve(mp.matrix(J), mp.matrix([-f for f in F]))
            z = [z[k] + dz[k] for k in range(len(z))]
        return np.array([complex(v) for v in z])
    finally:
        mp.dps = old


def residual(sys: SquareSystem, x) -> float:
    return float(np.max(np.abs(sys.evaluate(np.asarray(x, dtype=complex)))))


def _point_key(p: np.ndarray) -> tuple:
    return tuple(v for z in p for v in (round(z.real, 8), round(z.imag, 8)))


def canonical_order(points: Sequence[np.ndarray]) -> list:
    return sorted(points, key=_point_key)


def _cluster_points(points: list, radius: float) -> list:
    """Greedy clustering; returns list of (member indices)."""
    groups: list[list[int]] = []
    for k, p in enumerate(points):
        for g in groups:
            q = points[g[0]]
            if np.max(np.abs(p - q)) <= radius * (1 + np.max(np.abs(q))):
                g.append(k)
                break
        else:
            groups.append([k])
    return groups


def _symmetrize(points: list, tol: float) -> list:
    """Snap near-real points to real and make conjugate partners exact conjugates."""
    out = [p.copy() for p in points]
    used = [False] * len(out)
    for a, p in enumerate(out):
        if used[a]:
            continue
        used[a] = True
        if np.max(np.abs(p.imag)) <= tol * (1 + np.max(np.abs(p.real))):
            out[a] = p.real.astype(complex)
            continue
        best, bd = None, np.inf
        for b in range(a + 1, len(out)):
            if used[b]:
                continue
            d = np.max(np.abs(out[b] - p.conj()))
            if d < bd:
                best, bd = b, d
        if best is not None and bd <= tol * (1 + np.max(np.abs(p))):
            used[best] = True
            avg = 0.5 * (p + out[best].conj())
            if avg.imag[np.argmax(np.abs(avg.imag))] < 0:
                avg = avg.conj()
            out[a], out[best] = avg, avg.conj()
    return out


def finalize_points(sys: SquareSystem, endpoints: list, tol: float, polish_tol: float = 1e-11,
                    ) -> tuple[list, list, list]:
    """Dedup endpoints into clusters, polish centers, enforce conjugate symmetry."""
    radius = tol ** 0.5
    groups = _cluster_points(endpoints, radius)
    centers, counts = [], []
    for g in groups:
        c = np.mean([endpoints[k] for k in g], axis=0)
        if len(g) == 1:
            try:
                c = newton_refine(sys, c, tol=polish_tol)
            except (NonConvergence, SingularJacobian):
                pass
        centers.append(c)
        counts.append(len(g))
    if sys.is_real:
        sym = _symmetrize(centers, radius)
        for k, (c, m) in enumerate(zip(sym, counts)):
            if m == 1:
                try:
                    c2 = newton_refine(sys, c, tol=polish_tol)
                    if np.all(c.imag == 0):
                        c2 = c2.real.astype(complex)
                    sym[k] = c2
                except (NonConvergence, SingularJacobian):
                    pass
        centers = _symmetrize(sym, radius)
    order = sorted(range(len(centers)), key=lambda k: _point_key(centers[k]))
    centers = [centers[k] for k in order]
    counts = [counts[k] for k in order]
    res = [residual(sys, c) for c in centers]
    return centers, res, counts


def total_degree_start(degrees: Sequence[int]) -> np.ndarray:
    """Solutions of ``x_j^d_j = 1`` (all combinations of roots of unity)."""
    roots = [np.exp(2j * np.pi * np.arange(d) / d) for d in degrees]
    return np.array(list(itertools.product(*roots)), dtype=complex).reshape(-1, len(degrees))


def solve_all(sys: SquareSystem, seed: int = 0, tol: float = 1e-10, max_steps: int = 4000,
              gamma: complex | None = None, raise_on_failure: bool = True) -> SolutionSet:
    """All isolated complex solutions of ``sys`` via a total-degree homotopy.

    The start system is ``x_j^d_j - 1`` (homogenized), randomized by
    ``gamma``; without an explicit gamma it is drawn from ``seed``.  Paths
    ending at infinity are dropped; paths that stall before the end raise
    PathFailure so the caller can retry with another seed.
    """
    m = sys.dim
    degs = list(sys.degrees)
    if m < 1 or min(degs) < 1:
        raise ValueError("system must have dim >= 1 and nonconstant equations")
    bezout = int(np.prod(degs))
    rng = seeded_rng(seed, 0x5EED)
    if gamma is None:
        gamma = np.exp(2j * np.pi * rng.uniform())
    v = rng.normal(size=m + 1) + 1j * rng.normal(size=m + 1)
    v /= np.linalg.norm(v)

    Fh = sys.homogenize()
    E = np.zeros((2 * m, m + 1), dtype=np.int64)
    c = np.zeros(2 * m, dtype=complex)
    rows = np.zeros(2 * m, dtype=np.int64)
    for j, d in enumerate(degs):
        E[2 * j, j + 1] = d
        E[2 * j + 1, 0] = d
        c[2 * j], c[2 * j + 1] = 1.0, -1.0
        rows[2 * j] = rows[2 * j + 1] = j
    G = SquareSystem(m, E, c, rows, m + 1)

    def H(Z, s):
        s = s[:, None]
        val = (1 - s) * gamma * G.evaluate(Z) + s * Fh.evaluate(Z)
        return np.concatenate([val, (Z @ v - 1.0)[:, None]], axis=1)

    def Hz(Z, s):
        s = s[:, None, None]
        J = (1 - s) * gamma * G.jacobian(Z) + s * Fh.jacobian(Z)
        patch = np.broadcast_to(v, (Z.shape[0], 1, m + 1))
        return np.concatenate([J, patch], axis=1)

    def Hs(Z, s):
        val = Fh.evaluate(Z) - gamma * G.evaluate(Z)
        return np.concatenate([val, np.zeros((Z.shape[0], 1))], axis=1)

    X0 = total_degree_start(degs)
    Z0 = np.column_stack([np.ones(X0.shape[0]), X0])
    Z0 = Z0 / (Z0 @ v)[:, None]
    Z, s, finished = _track(_Homotopy(H, Hz, Hs), Z0, max_steps=max_steps)

    endpoints, n_inf = [], 0
    early = 0
    for k in range(Z.shape[0]):
        z = Z[k]
        if not finished[k]:
            if s[k] < 0.99:
                early += 1
            else:
                n_inf += 1
            continue
        z0 = z[0]
        if abs(z0) <= 1e-8 * np.max(np.abs(z)):
            n_inf += 1
            continue
        x = z[1:] / z0
        try:
            xp = newton_refine(sys, x, tol=1e-11, max_iter=8)
        except (NonConvergence, SingularJacobian):
            if residual(sys, x) <= 1e-8 * (1 + np.max(np.abs(sys.coefficients))):
                endpoints.append(x)
            else:
                n_inf += 1
            continue
        if np.max(np.abs(xp - x)) <= tol ** 0.5 * (1 + np.max(np.abs(x))):
            endpoints.append(xp)
        else:
            n_inf += 1
    if early and raise_on_failure:
        raise PathFailure(early, f"{early} of {Z.shape[0]} paths stalled before the endpoint")
    centers, res, counts = finalize_points(sys, endpoints, tol)
    return SolutionSet(centers, res, list(zip(centers, counts)), bezout, n_inf, early)


def solve_with_retries(sys: SquareSystem, seed: int = 0, attempts: int = 4, **kw) -> SolutionSet:
    last = None
    for a in range(attempts):
        try:
            return solve_all(sys, seed=seed + 7919 * a, **kw)
        except PathFailure as exc:
            last = exc
    raise last


def warm_start_solve(family: SystemFamily, base_solutions: SolutionSet, eps_path: complex,
                     seed: int = 0, tol: float = 1e-10, max_steps: int = 4000) -> SolutionSet:
    """Continue the solutions of ``family.at(0)`` to ``family.at(eps_path)``.

    The parameter follows ``eps(s) = eps_path * (s + kappa * s * (1 - s))``
    with a random complex ``kappa``, which avoids the (real) discriminant of
    the family with probability one.
    """
    if eps_path == 0:
        return base_solutions
    rng = seeded_rng(seed, 0xCAFE)
    kappa = 0.5 * np.exp(1j * rng.uniform(0.25 * np.pi, 0.75 * np.pi)) * rng.choice([-1, 1])
    B, D = family.base, family.direction

    def eps(s):
        return eps_path * (s + kappa * s * (1 - s))

    def H(X, s):
        return B.evaluate(X) + eps(s)[:, None] * D.evaluate(X)

    def Hz(X, s):
        return B.jacobian(X) + eps(s)[:, None, None] * D.jacobian(X)

    def Hs(X, s):
        de = eps_path * (1 + kappa * (1 - 2 * s))
        return de[:, None] * D.evaluate(X)

    starts = []
    for p, mult in base_solutions.multiplicity_clusters:
        if mult != 1:
            raise PathCollision("base solution set has a multiple point")
        starts.append(p)
    X0 = np.array(starts, dtype=complex).reshape(len(starts), -1)
    X, s, finished = _track(_Homotopy(H, Hz, Hs), X0, max_steps=max_steps)
    if not finished.all():
        n = int((~finished).sum())
        raise PathFailure(n, f"{n} parameter-homotopy paths stalled")
    target = family.at(eps_path)
    endpoints = [X[k] for k in range(X.shape[0])]
    groups = _cluster_points(endpoints, tol ** 0.5)
    if len(groups) != len(endpoints):
        raise PathCollision("two tracked paths converged to the same endpoint")
    centers, res, counts = finalize_points(target, endpoints, tol)
    if len(centers) != len(endpoints):
        raise PathCollision("endpoints merged during polishing")
    return SolutionSet(centers, res, list(zip(centers, counts)), base_solutions.bezout_bound)
