import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anwel.errors import DegenerateMember
from anwel.polynomial import Poly
from anwel.singularity import (
    CONJ_CUSPS,
    CONJ_NODES,
    DEGENERATE,
    ELLIPTIC,
    HYPERBOLIC,
    REAL_CUSP,
    AnFamily,
    DeformationPoint,
    SingularPointRecord,
    SingularityInventory,
    classify_singularities,
    cusp_count_ec,
    deformation_point_from_member,
    delta_invariant,
    kind_multiset,
    member_polynomial,
    milnor_number,
    welschinger_sign,
    witness_inventory,
)
from anwel.strata import eg_witness

x = Poly.x()


def rec(kind, x0=0.0, m=2, c=1.0):
    return SingularPointRecord(complex(x0), m, kind, complex(c))


@pytest.mark.parametrize("n, d", [(1, 1), (4, 2), (7, 4), (2, 1), (9, 5)])
def test_delta(n, d):
    assert delta_invariant(n) == d


@pytest.mark.parametrize("n", [1, 2, 6])
def test_milnor(n):
    assert milnor_number(n) == n


@pytest.mark.parametrize("n, c", [(4, 1), (5, 0), (2, 1)])
def test_cusp_count(n, c):
    assert cusp_count_ec(n) == c


def test_family_validation():
    with pytest.raises(ValueError):
        AnFamily(2, "h")
    with pytest.raises(ValueError):
        AnFamily(3, "even")
    with pytest.raises(ValueError):
        AnFamily(0, "h")
    assert AnFamily(3, "e").sigma == -1 and AnFamily(3, "h").sigma == 1
    with pytest.raises(ValueError):
        DeformationPoint(AnFamily(2, "even"), (1.0,))


def test_member_polynomial_examples():
    assert member_polynomial(DeformationPoint(AnFamily(2, "even"), (0, 0))) == x ** 3
    assert member_polynomial(DeformationPoint(AnFamily(1, "h"), (-1,))) == x ** 2 - 1
    assert member_polynomial(DeformationPoint(AnFamily(1, "e"), (1,))) == -(x ** 2) - 1


def test_member_round_trip_removes_xn_term():
    fam = AnFamily(3, "e")
    F = -((x + 0.25) ** 2 * (x ** 2 - 2))
    pt = deformation_point_from_member(fam, F)
    G = member_polynomial(pt)
    assert G.coeff(3) == 0
    # translation keeps the singularity types
    assert kind_multiset(classify_singularities(G)) == kind_multiset(classify_singularities(F))


def test_classify_examples():
    inv = classify_singularities((x - 1) ** 2 * (x - 3))
    assert [r.kind for r in inv.records] == [ELLIPTIC]
    assert inv.records[0].local_coefficient.real == pytest.approx(-2)

    inv = classify_singularities((x - 1) ** 2 * (x + 2))
    assert [r.kind for r in inv.records] == [HYPERBOLIC]
    assert inv.records[0].local_coefficient.real == pytest.approx(3)

    inv = classify_singularities((x + 1) ** 3 * x)
    assert [r.kind for r in inv.records] == [REAL_CUSP]
    assert inv.records[0].local_coefficient.real == pytest.approx(-1)

    inv = classify_singularities((x ** 2 + 1) ** 2 * x)
    assert [r.kind for r in inv.records] == [CONJ_NODES]
    assert inv.records[0].x_location.imag == pytest.approx(1)
    assert inv.total_delta == 2


def test_classify_degenerate():
    inv = classify_singularities((x - 1) ** 4 * (x + 1))
    assert inv.has_degenerate
    with pytest.raises(DegenerateMember):
        welschinger_sign(inv)


def test_sign_examples():
    assert welschinger_sign(SingularityInventory((rec(HYPERBOLIC), rec(HYPERBOLIC, 1)))) == 1
    assert welschinger_sign(SingularityInventory((rec(ELLIPTIC), rec(REAL_CUSP, 1, 3)))) == -1
    assert welschinger_sign(SingularityInventory((rec(CONJ_CUSPS, 1j, 3),))) == -1
    assert welschinger_sign(SingularityInventory((rec(CONJ_NODES, 1j),))) == 1


def test_witness_inventory_sign_of_form():
    Q, R = x - 1, x + 2
    assert [r.kind for r in witness_inventory(1, Q, R).records] == [HYPERBOLIC]
    assert [r.kind for r in witness_inventory(-1, Q, R).records] == [ELLIPTIC]
    inv = witness_inventory(1, (x - 1) ** 2, R)
    assert inv.has_degenerate
    inv = witness_inventory(1, Poly([1]), cusp_at=-1 / 3)
    assert [r.kind for r in inv.records] == [REAL_CUSP]


def test_witness_matches_direct_classification():
    Q = (x - 0.5) * (x ** 2 + 1)
    R = x + 2
    for sigma in (1, -1):
        a = witness_inventory(sigma, Q, R)
        b = classify_singularities(sigma * Q * Q * R)
        assert kind_multiset(a) == kind_multiset(b)


def _kinds(inv):
    return sorted(r.kind for r in inv.records)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.integers(-6, 6), min_size=1, max_size=3, unique=True),
    st.lists(st.integers(-6, 6), min_size=0, max_size=3, unique=True),
    st.integers(0, 2),
    st.sampled_from([1, -1]),
)
def test_q2r_node_typing(q_roots, r_roots, n_pairs, sigma):
    # real roots spaced by 1/2, conjugate pairs placed off the axis
    qr = [0.5 * r for r in q_roots]
    rr = [0.5 * r + 0.25 for r in r_roots]
    Q = Poly.from_roots(qr)
    for k in range(n_pairs):
        Q = Q * ((x - 0.3 * k) ** 2 + 1 + k)
    R = Poly.from_roots(rr) if rr else Poly([1])
    F = sigma * Q * Q * R
    if F.degree < 2:
        return
    inv = classify_singularities(F)
    assert len(inv.records) == len(qr) + n_pairs
    for xi in qr:
        r = next(r for r in inv.records if abs(r.x_location - xi) < 1e-6)
        expected = HYPERBOLIC if sigma * R(xi).real > 0 else ELLIPTIC
        assert r.kind == expected
    assert sum(r.kind == CONJ_NODES for r in inv.records) == n_pairs
    assert inv.total_delta == Q.degree


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.integers(-5, 5), min_size=1, max_size=3, unique=True),
    st.floats(-2, 2, allow_nan=False),
)
def test_classification_shift_invariant(q_roots, t):
    Q = Poly.from_roots([0.5 * r for r in q_roots])
    F = Q * Q * (x - 3.1) * ((x + 0.2) ** 3)
    assert _kinds(classify_singularities(F)) == _kinds(classify_singularities(F.shift(t)))


@settings(max_examples=30, deadline=None)
@given(st.permutations([HYPERBOLIC, ELLIPTIC, ELLIPTIC, CONJ_NODES, CONJ_CUSPS, REAL_CUSP]))
def test_sign_ignores_record_order(kinds):
    recs = [rec(k, i) for i, k in enumerate(kinds)]
    base = welschinger_sign(SingularityInventory(tuple(recs)))
    random.Random(0).shuffle(recs)
    assert welschinger_sign(SingularityInventory(tuple(recs))) == base


@pytest.mark.parametrize("n, i", [(3, 2), (4, 2), (5, 1), (6, 3), (7, 3)])
def test_eg_witness_member_has_delta_i(n, i):
    rng = np.random.default_rng(n * 10 + i)
    r = n + 1 - 2 * i
    z = np.concatenate([rng.normal(size=i), rng.normal(size=r)])
    w = eg_witness(n, i, z)
    fam = AnFamily.default(n)
    pt = deformation_point_from_member(fam, w.product())
    inv = classify_singularities(member_polynomial(pt))
    assert inv.total_delta == i
    assert not any(r.kind == DEGENERATE for r in inv.records)
