"""Signed real counts of slice intersections with EG^i, EC and the discriminant.

Every count works in weighted-normalized coordinates: the real rescaling
``x -> lam x`` (``lam > 0``) preserves the real structure and the node types,
so a slice is first rescaled until its largest weighted coefficient is 1,
solved there, and the real solutions are mapped back for reporting.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
import numpy.polynomial.polynomial as npoly

from anwel.errors import (
    BadIndices,
    DegenerateMember,
    NonConvergence,
    NonGenericSlice,
    PathCollision,
    PathFailure,
    SingularJacobian,
    TooIllConditioned,
)
from anwel.polynomial import Poly, all_roots, derivative, discriminant, evaluate
from anwel.singularity import (
    ELLIPTIC,
    HYPERBOLIC,
    AnFamily,
    DeformationPoint,
    SingularPointRecord,
    SingularityInventory,
    classify_singularities,
    deformation_point_from_member,
    delta_invariant,
    milnor_number,
    welschinger_sign,
    witness_inventory,
)
from anwel.solver import SolutionSet, newton_refine, seeded_rng, solve_with_retries, warm_start_solve
from anwel.strata import (
    SliceTarget,
    ec_closed_form,
    ec_family,
    ec_system,
    ec_tangent_target,
    ec_weights,
    ec_witness,
    eg_family,
    eg_system,
    eg_weights,
    eg_witness,
    multiplicity_ec,
    multiplicity_eg,
    normalize_target,
    reduced_eg_system,
)

REAL_TOL = 1e-8
MAX_RESAMPLES = 12
_RETRYABLE = (NonGenericSlice, PathFailure, PathCollision, DegenerateMember, NonConvergence,
              SingularJacobian, TooIllConditioned)


def eg_tag(i: int) -> str:
    return f"EG({i})"


@dataclass(frozen=True)
class RealSolution:
    point: DeformationPoint
    inventory: SingularityInventory
    sign: int


@dataclass
class CountReport:
    stratum: str
    family: AnFamily
    seed: int
    epsilon: float
    complex_count: int
    real_solutions: list
    W: int
    expected_multiplicity: int
    resamples: int = 0
    i: int | None = None
    k: int | None = None
    slice: dict | None = field(default=None, compare=False)

    @property
    def real_count(self) -> int:
        return len(self.real_solutions)


@dataclass
class InvarianceVerdict:
    stratum: str
    family: AnFamily
    trials: int
    W_values: list
    invariant: bool
    real_count_histogram: dict
    resamples: int = 0
    epsilon: float = 1e-3
    seed: int = 0
    i: int | None = None
    k: int | None = None
    reports: list = field(default_factory=list, compare=False)

    @property
    def W(self) -> int | None:
        return self.W_values[0] if self.invariant else None

    def offending(self) -> list:
        """Slice descriptors of trials whose W differs from the most common value."""
        if self.invariant:
            return []
        mode = Counter(self.W_values).most_common(1)[0][0]
        return [
            {"trial": t, "W": w, "slice": self.reports[t].slice if t < len(self.reports) else None}
            for t, w in enumerate(self.W_values)
            if w != mode
        ]


# ---------------------------------------------------------------------------
# tangent-cone starting solutions


@lru_cache(maxsize=None)
def tangent_cone_eg_solutions(n: int, i: int) -> SolutionSet:
    """Solutions of the tangent-cone EG^i system, via the reduced (quadratic) system."""
    reduced = solve_with_retries(reduced_eg_system(n, i), seed=0)
    direct = eg_system(SliceTarget.tangent_cone(n, i))
    pts = []
    for p in reduced.points:
        q = newton_refine(direct, p, tol=1e-13)
        pts.append(np.where(p.imag == 0, q.real, q))
    if len(pts) != multiplicity_eg(n, i) or reduced.count != len(pts):
        raise PathFailure(abs(len(pts) - multiplicity_eg(n, i)), "tangent-cone solve lost solutions")
    return SolutionSet(pts, [0.0] * len(pts), [(p, 1) for p in pts], reduced.bezout_bound)


@lru_cache(maxsize=None)
def tangent_cone_ec_solutions(k: int) -> SolutionSet:
    pts = []
    for w in ec_closed_form(k):
        pts.append(np.concatenate([w.Q.coeffs[:-1][::-1], [w.beta]]))
    return SolutionSet(pts, [0.0] * len(pts), [(p, 1) for p in pts], 3 ** k)


# ---------------------------------------------------------------------------
# slice draws


def random_slice(n: int, i: int, epsilon: float, rng: np.random.Generator) -> SliceTarget:
    """Frozen coefficients drawn uniformly from ``[-1, 1] * epsilon``."""
    return SliceTarget(n, i, tuple(rng.uniform(-1.0, 1.0, size=n - i)), epsilon)


def random_line(n: int, epsilon: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Base point in ``[-1, 1]^n * epsilon``; direction in ``[-1, 1]^n`` with ``|d_0| >= 0.1``."""
    base = epsilon * rng.uniform(-1.0, 1.0, size=n)
    while True:
        d = rng.uniform(-1.0, 1.0, size=n)
        if abs(d[0]) >= 0.1:
            return base, d


def _resampled(draw: Callable, compute: Callable, seed: int, trial: int, max_resamples: int):
    last = None
    for attempt in range(max_resamples + 1):
        rng = seeded_rng(seed, trial, attempt)
        sl = draw(rng)
        sub_seed = int(rng.integers(0, 2**62))
        try:
            report = compute(sl, sub_seed)
        except _RETRYABLE as exc:
            last = exc
            continue
        report.resamples = attempt
        report.seed = seed
        report.slice = dict(report.slice or {}, trial=trial, attempt=attempt)
        return report
    raise NonGenericSlice(f"no generic slice after {max_resamples} resamples: {last}")


# ---------------------------------------------------------------------------
# EG^i


def _slice_descriptor(sl: SliceTarget) -> dict:
    return {"n": sl.n, "i": sl.i, "high": list(sl.high), "epsilon": sl.epsilon, "xn_coeff": sl.xn_coeff}


def _solve_slice(kind: str, n: int, i: int, t: np.ndarray, seed: int):
    """Solve a normalized slice by continuation from the tangent cone."""
    lam, tn = normalize_target(n, i, t)
    if kind == "EG":
        base, start = tangent_cone_eg_solutions(n, i), SliceTarget.tangent_cone(n, i).vector()
        expected = multiplicity_eg(n, i)
    else:
        k = n // 2
        base, start = tangent_cone_ec_solutions(k), ec_tangent_target(k).vector()
        expected = multiplicity_ec(k)
    if lam == 0.0:
        if expected != 1:
            raise NonGenericSlice("slice passes through the origin")
        zero = np.zeros(base.points[0].size, dtype=complex)
        return 0.0, SolutionSet([zero], [0.0], [(zero, 1)], base.bezout_bound)
    if np.array_equal(tn, start):
        return lam, base
    family = eg_family(n, i, start, tn) if kind == "EG" else ec_family(n // 2, start, tn)
    sols = warm_start_solve(family, base, 1.0, seed=seed)
    if sols.count != expected:
        raise PathFailure(abs(expected - sols.count), "continuation lost solutions")
    return lam, sols


def _is_real_vec(z: np.ndarray, tol: float = REAL_TOL) -> bool:
    return bool(np.all(np.abs(z.imag) <= tol * (1 + np.abs(z.real))))


def _eg_report(family: AnFamily, i: int, sl: SliceTarget, seed: int, tol: float = REAL_TOL) -> CountReport:
    n = family.n
    if sl.n != n or sl.i != i:
        raise BadIndices("slice does not match (n, i)")
    lam, sols = _solve_slice("EG", n, i, sl.vector(), seed)
    w = eg_weights(n, i)
    real = []
    for z in sols.points:
        wit = eg_witness(n, i, z)
        inv = witness_inventory(family.sigma, wit.Q, wit.R)
        if inv.has_degenerate:
            raise NonGenericSlice("slice meets a wall of EG^i")
        if not _is_real_vec(z, tol):
            continue
        wit_n = eg_witness(n, i, z.real)
        inv = witness_inventory(family.sigma, wit_n.Q, wit_n.R)
        orig = eg_witness(n, i, z.real * lam ** w)
        pt = deformation_point_from_member(family, orig.product() * family.sigma)
        real.append(RealSolution(pt, inv, welschinger_sign(inv)))
    return CountReport(
        stratum=eg_tag(i), family=family, seed=seed, epsilon=sl.epsilon,
        complex_count=sols.count, real_solutions=real, W=sum(r.sign for r in real),
        expected_multiplicity=multiplicity_eg(n, i), i=i, slice=_slice_descriptor(sl),
    )


def count_eg(family: AnFamily, i: int, slice: SliceTarget | None = None, seed: int = 0,
             epsilon: float = 1e-3, trial: int = 0, max_resamples: int = MAX_RESAMPLES,
             tol: float = REAL_TOL) -> CountReport:
    """Signed count of real members of EG^i on one slice.

    With an explicit ``slice`` the count is done on that slice and a wall
    raises NonGenericSlice; otherwise slices are drawn from ``(seed, trial)``
    and resampled on walls.
    """
    if not 1 <= i <= delta_invariant(family.n):
        raise BadIndices(f"need 1 <= i <= {delta_invariant(family.n)}")
    if slice is not None:
        try:
            return _eg_report(family, i, slice, seed, tol)
        except _RETRYABLE as exc:
            raise NonGenericSlice(str(exc)) from exc
    n = family.n

    def draw(rng):
        return random_slice(n, i, epsilon, rng)

    return _resampled(draw, lambda sl, s: _eg_report(family, i, sl, s, tol), seed, trial, max_resamples)


# ---------------------------------------------------------------------------
# EC


def _ec_report(k: int, sl: SliceTarget, seed: int, tol: float = REAL_TOL) -> CountReport:
    n = 2 * k
    family = AnFamily(n, "even")
    lam, sols = _solve_slice("EC", n, k + 1, sl.vector(), seed)
    w = ec_weights(k)
    real = []
    for z in sols.points:
        wit = ec_witness(k, z)
        inv = witness_inventory(1, wit.Q, cusp_at=-wit.beta)
        if inv.has_degenerate:
            raise NonGenericSlice("slice meets a wall of EC")
        if not _is_real_vec(z, tol):
            continue
        wit_n = ec_witness(k, z.real)
        inv = witness_inventory(1, wit_n.Q, cusp_at=-wit_n.beta)
        orig = ec_witness(k, z.real * lam ** w)
        pt = deformation_point_from_member(family, orig.product())
        real.append(RealSolution(pt, inv, welschinger_sign(inv)))
    return CountReport(
        stratum="EC", family=family, seed=seed, epsilon=sl.epsilon,
        complex_count=sols.count, real_solutions=real, W=sum(r.sign for r in real),
        expected_multiplicity=multiplicity_ec(k), k=k, slice=_slice_descriptor(sl),
    )


def count_ec(k: int, slice: SliceTarget | None = None, seed: int = 0, epsilon: float = 1e-3,
             trial: int = 0, max_resamples: int = MAX_RESAMPLES, tol: float = REAL_TOL) -> CountReport:
    """Signed count of real members of EC(A_2k); a real member carries one real cusp."""
    if k < 1:
        raise BadIndices("k must be >= 1")
    if slice is not None:
        try:
            return _ec_report(k, slice, seed, tol)
        except _RETRYABLE as exc:
            raise NonGenericSlice(str(exc)) from exc

    def draw(rng):
        return random_slice(2 * k, k + 1, epsilon, rng)

    return _resampled(draw, lambda sl, s: _ec_report(k, sl, s, tol), seed, trial, max_resamples)


# ---------------------------------------------------------------------------
# discriminant


def _normalized_line(n: int, base: np.ndarray, direction: np.ndarray):
    """Re-center the line where ``a_0 = 0`` and rescale so local intersections sit at ``|s| = O(1)``.

    Returns ``(t0, tau, b_hat, d_hat)``: the normalized member at parameter
    ``s`` has coefficients ``b_hat + s * d_hat`` and corresponds to
    ``t = t0 + s * tau`` on the original line ``base + t * direction``.
    """
    if direction[0] == 0:
        raise NonGenericSlice("line is parallel to the hyperplane a_0 = 0")
    t0 = -base[0] / direction[0]
    p = base + t0 * direction
    p[0] = 0.0
    w = n + 1 - np.arange(n)
    lam = float(np.max(np.abs(p[1:]) ** (1.0 / w[1:]), initial=0.0))
    if lam == 0.0:
        lam = 1.0
    tau = lam ** (n + 1) / abs(direction[0])
    return t0, tau, p / lam ** w, direction * tau / lam ** w


def _member(n: int, a: np.ndarray) -> Poly:
    c = np.zeros(n + 2, dtype=complex)
    c[:n] = a
    c[n + 1] = 1.0
    return Poly(c)


def line_discriminant(n: int, b_hat: np.ndarray, d_hat: np.ndarray, radius: float = 2.0) -> Poly:
    """``disc_x`` of the normalized member along the line, as a polynomial in ``s``.

    Sampled at ``2n + 1`` points on a circle and interpolated by FFT.
    """
    N = 2 * n + 1
    s = radius * np.exp(2j * np.pi * np.arange(N) / N)
    vals = np.array([discriminant(_member(n, b_hat + sp * d_hat)) for sp in s])
    c = np.fft.fft(vals) / N / radius ** np.arange(N)
    c = c.real
    mag = np.abs(c) * radius ** np.arange(N)
    c[mag < 1e-13 * mag.max()] = 0.0
    return Poly(c)


def _refine_node(n: int, b_hat, d_hat, s0: float, xi0: float) -> tuple[float, float]:
    """Newton on ``F(xi; s) = F'(xi; s) = 0`` for a real node on the line."""
    s, xi = float(s0), float(xi0)
    for _ in range(20):
        F = _member(n, b_hat + s * d_hat)
        Fd = _member(n, d_hat) - Poly([0] * (n + 1) + [1])
        f1, f2 = evaluate(F, xi).real, evaluate(derivative(F), xi).real
        J = np.array([
            [evaluate(derivative(F), xi).real, evaluate(Fd, xi).real],
            [evaluate(derivative(F, 2), xi).real, evaluate(derivative(Fd), xi).real],
        ])
        try:
            dx, ds = np.linalg.solve(J, [-f1, -f2])
        except np.linalg.LinAlgError:
            break
        xi, s = xi + dx, s + ds
        if abs(dx) + abs(ds) < 1e-15 * (1 + abs(xi) + abs(s)):
            break
    return s, xi


def local_line_roots(n: int, b_hat: np.ndarray, d_hat: np.ndarray, tol: float = REAL_TOL) -> list:
    """The ``n`` roots of the line discriminant inside the Milnor ball (smallest ``|s|``)."""
    D = line_discriminant(n, b_hat, d_hat)
    if D.degree is None or D.degree < n:
        raise NonGenericSlice("line discriminant has too few roots")
    roots = sorted(npoly.polyroots(D.coeffs.real), key=abs)
    local = roots[:n]
    if len(roots) > n and abs(roots[n]) < 3.0 * max(abs(local[-1]), 1.0):
        raise NonGenericSlice("local and far discriminant roots are not separated")
    for a in range(n):
        for b in range(a + 1, n):
            if abs(local[a] - local[b]) < 1e-6:
                raise NonGenericSlice("line meets the discriminant non-transversally")
    out = []
    for r in local:
        r = complex(r)
        if abs(r.imag) <= tol * (1 + abs(r.real)):
            r = complex(r.real, 0.0)
        elif abs(r.imag) < 1e-4:
            raise NonGenericSlice("cannot decide whether a discriminant root is real")
        out.append(r)
    return out


def _discr_report(family: AnFamily, base: np.ndarray, direction: np.ndarray, seed: int,
                  epsilon: float, tol: float = REAL_TOL) -> CountReport:
    n = family.n
    base = np.asarray(base, dtype=float)
    direction = np.asarray(direction, dtype=float)
    t0, tau, bh, dh = _normalized_line(n, base, direction)
    roots = local_line_roots(n, bh, dh, tol)
    real = []
    for s in roots:
        if s.imag != 0.0:
            continue
        F = _member(n, bh + s.real * dh)
        inv = classify_singularities(F)
        nodes = [r for r in inv.records if r.kind in (HYPERBOLIC, ELLIPTIC)]
        if len(inv.records) != 1 or len(nodes) != 1:
            raise NonGenericSlice("real discriminant point is not a single real node")
        sr, xi = _refine_node(n, bh, dh, s.real, nodes[0].x_location.real)
        F = _member(n, bh + sr * dh) * family.sigma
        inv = classify_singularities(F)
        if len(inv.records) != 1 or inv.has_degenerate:
            raise NonGenericSlice("real discriminant point is not a single real node")
        for cl in all_roots(F):
            if cl.multiplicity > 1 and cl.radius > 1e-4:
                raise NonGenericSlice("node cluster too wide")
        a = base + (t0 + sr * tau) * direction
        real.append(RealSolution(DeformationPoint(family, tuple(float(v) for v in a)), inv,
                                 welschinger_sign(inv)))
    real.sort(key=lambda r: r.point.a[0])
    return CountReport(
        stratum="DISCR", family=family, seed=seed, epsilon=epsilon,
        complex_count=len(roots), real_solutions=real, W=sum(r.sign for r in real),
        expected_multiplicity=milnor_number(n),
        slice={"base": base.tolist(), "direction": direction.tolist()},
    )


def count_discr(family: AnFamily, line: tuple | None = None, seed: int = 0, epsilon: float = 1e-3,
                trial: int = 0, max_resamples: int = MAX_RESAMPLES, tol: float = REAL_TOL) -> CountReport:
    """Signed count of real nodal members along a real line in ``B(A_n)``."""
    if line is not None:
        try:
            return _discr_report(family, line[0], line[1], seed, epsilon, tol)
        except _RETRYABLE as exc:
            raise NonGenericSlice(str(exc)) from exc
    n = family.n

    def draw(rng):
        return random_line(n, epsilon, rng)

    return _resampled(draw, lambda ln, s: _discr_report(family, ln[0], ln[1], s, epsilon, tol),
                      seed, trial, max_resamples)


# ---------------------------------------------------------------------------
# experiments


def count_stratum(family: AnFamily, stratum: str, i: int | None = None, seed: int = 0,
                  epsilon: float = 1e-3, trial: int = 0, tol: float = REAL_TOL) -> CountReport:
    stratum = stratum.upper()
    if stratum == "EG":
        return count_eg(family, i, seed=seed, epsilon=epsilon, trial=trial, tol=tol)
    if stratum == "EC":
        if family.n % 2:
            raise BadIndices("EC of A_n with odd n coincides with EG; use the EG stratum")
        return count_ec(family.n // 2, seed=seed, epsilon=epsilon, trial=trial, tol=tol)
    if stratum == "DISCR":
        return count_discr(family, seed=seed, epsilon=epsilon, trial=trial, tol=tol)
    raise ValueError(f"unknown stratum {stratum!r}")


def invariance_experiment(family: AnFamily, stratum: str, i: int | None = None, trials: int = 20,
                          epsilon: float = 1e-3, seed: int = 0, tol: float = REAL_TOL) -> InvarianceVerdict:
    """Count on ``trials`` independent random slices and check that W never changes."""
    if trials < 2:
        raise ValueError("an invariance experiment needs at least 2 trials")
    reports = [count_stratum(family, stratum, i=i, seed=seed, epsilon=epsilon, trial=t, tol=tol)
               for t in range(trials)]
    Ws = [r.W for r in reports]
    hist = Counter(r.real_count for r in reports)
    return InvarianceVerdict(
        stratum=reports[0].stratum, family=family, trials=trials, W_values=Ws,
        invariant=len(set(Ws)) == 1, real_count_histogram=dict(sorted(hist.items())),
        resamples=sum(r.resamples for r in reports), epsilon=epsilon, seed=seed,
        i=reports[0].i, k=reports[0].k, reports=reports,
    )


def w_eg_formula(family: AnFamily, i: int):
    """Known W^eg values (top stratum only); ``"new"`` elsewhere."""
    n = family.n
    if i != delta_invariant(n):
        return "new"
    if n % 2:
        k = (n + 1) // 2
        return 1 if family.form == "h" else (-1) ** k
    k = n // 2
    return 0 if k % 2 else 1


def w_ec_formula(k: int) -> int:
    return 1 if k % 2 else 0


def w_discr_formula(family: AnFamily):
    # D coincides with EG exactly when delta(A_n) = 1, i.e. n <= 2
    if delta_invariant(family.n) == 1:
        return w_eg_formula(family, 1)
    return "new"


def _families(n: int) -> list:
    return [AnFamily(n, "even")] if n % 2 == 0 else [AnFamily(n, "h"), AnFamily(n, "e")]


@lru_cache(maxsize=None)
def tangent_count_eg(n: int, i: int, seed: int = 0) -> int:
    """Complex solution count of the tangent-cone EG^i system by total-degree homotopy."""
    return solve_with_retries(reduced_eg_system(n, i), seed=seed).count


@lru_cache(maxsize=None)
def tangent_count_ec(k: int, seed: int = 0) -> int:
    return solve_with_retries(ec_system(ec_tangent_target(k)), seed=seed).count


def _w_summary(verdict: InvarianceVerdict):
    return verdict.W if verdict.invariant else "varies"


def closed_form_table(n_max: int, seed: int = 0, trials: int = 3, epsilon: float = 1e-3) -> list:
    """Computed multiplicities and W beside the closed forms, for every n <= n_max."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    rows = []
    for n in range(1, n_max + 1):
        for fam in _families(n):
            for i in range(1, delta_invariant(n) + 1):
                mt = tangent_count_eg(n, i, seed)
                v = invariance_experiment(fam, "EG", i=i, trials=trials, epsilon=epsilon, seed=seed)
                rows.append(dict(n=n, form=fam.form, stratum=eg_tag(i), mt_computed=mt,
                                 mt_formula=multiplicity_eg(n, i), W_computed=_w_summary(v),
                                 W_formula=w_eg_formula(fam, i)))
            if n % 2 == 0:
                k = n // 2
                mt = tangent_count_ec(k, seed)
                v = invariance_experiment(fam, "EC", trials=trials, epsilon=epsilon, seed=seed)
                rows.append(dict(n=n, form=fam.form, stratum="EC", mt_computed=mt,
                                 mt_formula=multiplicity_ec(k), W_computed=_w_summary(v),
                                 W_formula=w_ec_formula(k)))
            v = invariance_experiment(fam, "DISCR", trials=trials, epsilon=epsilon, seed=seed)
            mts = {r.complex_count for r in v.reports}
            rows.append(dict(n=n, form=fam.form, stratum="DISCR",
                             mt_computed=mts.pop() if len(mts) == 1 else -1,
                             mt_formula=milnor_number(n), W_computed=_w_summary(v),
                             W_formula=w_discr_formula(fam)))
    return rows


def row_matches(row: dict) -> bool:
    if row["mt_computed"] != row["mt_formula"]:
        return False
    return row["W_formula"] == "new" or row["W_computed"] == row["W_formula"]


# ---------------------------------------------------------------------------
# plain-data views (used for JSON emission)


def _record_to_dict(r: SingularPointRecord) -> dict:
    c = complex(r.local_coefficient)
    real_point = r.x_location.imag == 0
    return {
        "x_re": float(r.x_location.real),
        "x_im": float(r.x_location.imag),
        "mult": int(r.multiplicity_in_F),
        "kind": r.kind,
        "c": float(c.real) if real_point else [float(c.real), float(c.imag)],
    }


def _record_from_dict(d: dict) -> SingularPointRecord:
    c = d["c"]
    c = complex(c[0], c[1]) if isinstance(c, list) else complex(c, 0.0)
    return SingularPointRecord(complex(d["x_re"], d["x_im"]), d["mult"], d["kind"], c)


def report_to_dict(r: CountReport) -> dict:
    return {
        "stratum": r.stratum,
        "n": r.family.n,
        "i": r.i,
        "k": r.k,
        "form": r.family.form,
        "seed": r.seed,
        "epsilon": float(r.epsilon),
        "complex_count": r.complex_count,
        "real_solutions": [
            {
                "a": [float(v) for v in sol.point.a],
                "inventory": [_record_to_dict(rec) for rec in sol.inventory.records],
                "sign": sol.sign,
            }
            for sol in r.real_solutions
        ],
        "W": r.W,
        "expected_multiplicity": r.expected_multiplicity,
        "resamples": r.resamples,
    }


def report_from_dict(d: dict) -> CountReport:
    family = AnFamily(d["n"], d["form"])
    sols = [
        RealSolution(
            DeformationPoint(family, tuple(s["a"])),
            SingularityInventory(tuple(_record_from_dict(x) for x in s["inventory"])),
            s["sign"],
        )
        for s in d["real_solutions"]
    ]
    return CountReport(
        stratum=d["stratum"], family=family, seed=d["seed"], epsilon=d["epsilon"],
        complex_count=d["complex_count"], real_solutions=sols, W=d["W"],
        expected_multiplicity=d["expected_multiplicity"], resamples=d["resamples"],
        i=d["i"], k=d["k"],
    )


def verdict_to_dict(v: InvarianceVerdict) -> dict:
    return {
        "stratum": v.stratum,
        "n": v.family.n,
        "i": v.i,
        "k": v.k,
        "form": v.family.form,
        "seed": v.seed,
        "epsilon": float(v.epsilon),
        "trials": v.trials,
        "W_values": list(v.W_values),
        "invariant": v.invariant,
        "real_count_histogram": {str(k): c for k, c in v.real_count_histogram.items()},
        "resamples": v.resamples,
        "offending": v.offending(),
    }
