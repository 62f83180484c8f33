"""The A_n miniversal family ``y^2 = F(x)`` and real classification of its members.

A member is ``F(x) = sigma * (x^(n+1) + a_{n-1} x^(n-1) + ... + a_0)`` with
``sigma = -1`` for the real form ``e`` and ``+1`` otherwise.  The curve is
singular exactly over the multiple roots of ``F``; a root of multiplicity
``m`` with leading local coefficient ``c`` gives the local model
``y^2 = c (x - xi)^m``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from anwel.errors import DegenerateMember, DegreeTooSmall
from anwel.polynomial import DEFAULT_TOL, Poly, all_roots, derivative, evaluate

FORMS = ("h", "e", "even")

HYPERBOLIC = "hyperbolic_node"
ELLIPTIC = "elliptic_node"
CONJ_NODES = "conjugate_node_pair"
REAL_CUSP = "real_cusp"
CONJ_CUSPS = "conjugate_cusp_pair"
DEGENERATE = "degenerate"
KINDS = (HYPERBOLIC, ELLIPTIC, CONJ_NODES, REAL_CUSP, CONJ_CUSPS, DEGENERATE)

# Local coefficients below this (on unit-scaled data) mean the member sits on a wall.
COEFF_FLOOR = 1e-7


def is_real(z: complex, tol: float = DEFAULT_TOL) -> bool:
    return abs(complex(z).imag) <= tol * (1.0 + abs(complex(z).real))


@dataclass(frozen=True)
class AnFamily:
    n: int
    form: str

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.form not in FORMS:
            raise ValueError(f"form must be one of {FORMS}")
        if self.n % 2 == 0 and self.form != "even":
            raise ValueError("even n has the single real form 'even'")
        if self.n % 2 == 1 and self.form == "even":
            raise ValueError("odd n needs form 'h' or 'e'")

    @classmethod
    def default(cls, n: int, form: str | None = None) -> AnFamily:
        if form is None:
            form = "even" if n % 2 == 0 else "h"
        return cls(n, form)

    @property
    def sigma(self) -> int:
        return -1 if self.form == "e" else 1

    @property
    def label(self) -> str:
        return f"A_{self.n}" if self.form == "even" else f"A^{self.form}_{self.n}"


@dataclass(frozen=True)
class DeformationPoint:
    family: AnFamily
    a: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(self.a))
        if len(self.a) != self.family.n:
            raise ValueError(f"expected {self.family.n} coefficients, got {len(self.a)}")


@dataclass(frozen=True)
class SingularPointRecord:
    x_location: complex
    multiplicity_in_F: int
    kind: str
    local_coefficient: complex


@dataclass(frozen=True)
class SingularityInventory:
    records: tuple = ()
    s: int = field(init=False)
    ic: int = field(init=False)
    total_delta: int = field(init=False)
    has_degenerate: bool = field(init=False)

    def __post_init__(self):
        recs = tuple(self.records)
        object.__setattr__(self, "records", recs)
        object.__setattr__(self, "s", sum(r.kind == ELLIPTIC for r in recs))
        object.__setattr__(self, "ic", sum(r.kind == CONJ_CUSPS for r in recs))
        delta = 0
        for r in recs:
            pair = r.kind in (CONJ_NODES, CONJ_CUSPS)
            delta += (2 if pair else 1) * (r.multiplicity_in_F // 2)
        object.__setattr__(self, "total_delta", delta)
        object.__setattr__(self, "has_degenerate", any(r.kind == DEGENERATE for r in recs))

    def kind_counts(self) -> Counter:
        return Counter(r.kind for r in self.records)


def delta_invariant(n: int) -> int:
    if n < 1:
        raise ValueError("n must be >= 1")
    return (n + 1) // 2


def milnor_number(n: int) -> int:
    if n < 1:
        raise ValueError("n must be >= 1")
    return n


def cusp_count_ec(n: int) -> int:
    """Number of cusps on a generic equiclassical member: 1 for even n, 0 for odd."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 1 if n % 2 == 0 else 0


def member_polynomial(pt: DeformationPoint) -> Poly:
    n = pt.family.n
    c = np.zeros(n + 2, dtype=complex)
    c[:n] = pt.a
    c[n + 1] = 1.0
    return Poly(pt.family.sigma * c)


def deformation_point_from_member(family: AnFamily, F: Poly, tol: float = DEFAULT_TOL) -> DeformationPoint:
    """Recover ``(a_0..a_{n-1})`` from a member polynomial.

    A nonzero ``x^n`` coefficient is removed by the real translation
    ``x -> x - c_n / (n + 1)``, which does not change the singularity types.
    """
    n = family.n
    G = F * family.sigma
    if G.degree != n + 1:
        raise ValueError("member polynomial has the wrong degree")
    G = G.monic()
    shift = G.coeff(n) / (n + 1)
    if shift != 0:
        G = G.shift(-shift)
    a = [G.coeff(j) for j in range(n)]
    if all(is_real(v, tol) for v in a):
        a = [v.real for v in a]
    return DeformationPoint(family, tuple(a))


def _local_coefficient(F: Poly, xi: complex, m: int) -> complex:
    return complex(evaluate(derivative(F, m), xi)) / math.factorial(m)


def _record(xi: complex, m: int, c: complex, tol: float, floor: float) -> SingularPointRecord | None:
    """Build a record; returns None for the negative-imaginary conjugate representative."""
    real = is_real(xi, tol)
    if not real and xi.imag < 0:
        return None
    if m >= 4 or abs(c) < floor:
        kind = DEGENERATE
    elif m == 2:
        if real:
            kind = HYPERBOLIC if c.real > 0 else ELLIPTIC
        else:
            kind = CONJ_NODES
    else:
        kind = REAL_CUSP if real else CONJ_CUSPS
    if real:
        xi = complex(xi.real, 0.0)
        if kind != CONJ_NODES:
            c = complex(c.real, 0.0)
    return SingularPointRecord(xi, m, kind, c)


def classify_singularities(F: Poly, tol: float = DEFAULT_TOL, floor: float = COEFF_FLOOR) -> SingularityInventory:
    """Locate and classify all singular points of ``y^2 = F(x)``.

    Singular points sit at ``(xi, 0)`` for multiple roots ``xi`` of ``F``.
    Multiplicity >= 4, or a vanishing local coefficient, is reported as
    ``degenerate``.
    """
    if F.degree is None or F.degree < 2:
        raise DegreeTooSmall("classify_singularities needs degree >= 2")
    records = []
    for cl in all_roots(F, tol):
        if cl.multiplicity < 2:
            continue
        c = _local_coefficient(F, cl.center, cl.multiplicity)
        rec = _record(cl.center, cl.multiplicity, c, tol, floor * max(1.0, abs(F.lead)))
        if rec is not None:
            records.append(rec)
    return SingularityInventory(tuple(records))


def witness_inventory(
    sigma: int,
    Q: Poly,
    R: Poly | None = None,
    cusp_at: complex | None = None,
    tol: float = DEFAULT_TOL,
    floor: float = COEFF_FLOOR,
) -> SingularityInventory:
    """Inventory of ``sigma * Q^2 * R`` (or ``sigma * Q^2 * (x - cusp_at)^3``).

    Nodes are read off the roots of ``Q``; their local coefficient is
    ``sigma * Q'(xi)^2 * R(xi)``.  Repeated roots of ``Q`` or ``R`` and roots
    shared between them are walls and are reported as degenerate.
    """
    if cusp_at is not None:
        R = Poly([-cusp_at, 1]) ** 3
    elif R is None:
        R = Poly([1])
    dQ = derivative(Q)
    records = []
    if Q.degree and Q.degree > 0:
        for cl in all_roots(Q, tol):
            xi = cl.center
            m = 2 * cl.multiplicity
            if cl.multiplicity > 1:
                c = 0j
            else:
                c = sigma * complex(evaluate(dQ, xi)) ** 2 * complex(evaluate(R, xi))
            rec = _record(xi, m, c, tol, floor)
            if rec is not None:
                records.append(rec)
    if cusp_at is not None:
        c = sigma * complex(evaluate(Q, cusp_at)) ** 2
        rec = _record(complex(cusp_at), 3, c, tol, floor)
        if rec is not None:
            records.append(rec)
    elif R.degree and R.degree > 1:
        for cl in all_roots(R, tol):
            if cl.multiplicity > 1:
                rec = _record(cl.center, cl.multiplicity, 0j, tol, floor)
                if rec is not None:
                    records.append(rec)
    return SingularityInventory(tuple(records))


def welschinger_sign(inv: SingularityInventory) -> int:
    """``(-1)^(s + ic)``: elliptic real nodes and conjugate cusp pairs flip the sign."""
    if inv.has_degenerate:
        raise DegenerateMember("member has a non-nodal, non-cuspidal singular point")
    return -1 if (inv.s + inv.ic) % 2 else 1


def kind_multiset(inv: SingularityInventory) -> Sequence[str]:
    return sorted(r.kind for r in inv.records)
