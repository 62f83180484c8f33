import math

import numpy as np
import pytest

from anwel.counts import _solve_slice, random_slice
from anwel.errors import SingularJacobian
from anwel.solver import (
    SolutionSet,
    SquareSystem,
    canonical_order,
    newton_refine,
    residual,
    seeded_rng,
    solve_all,
    warm_start_solve,
)
from anwel.strata import (
    SliceTarget,
    eg_family,
    eg_system,
    multiplicity_eg,
    normalize_target,
    reduced_eg_system,
)

S3 = 1 / math.sqrt(3)


def quadratic():
    return SquareSystem.from_polys([{(2,): 1.0, (0,): -1.0}])


def _match(A, B):
    """Largest distance from a point of A to its nearest point of B (and back)."""
    A, B = np.asarray(A), np.asarray(B)
    d = np.max(np.abs(A[:, None, :] - B[None, :, :]), axis=-1)
    return max(d.min(axis=1).max(), d.min(axis=0).max())


def test_univariate_quadratic():
    sols = solve_all(quadratic())
    assert sols.count == 2
    assert sorted(round(p[0].real, 12) for p in sols.points) == [-1.0, 1.0]
    assert all(p[0].imag == 0 for p in sols.points)


def test_reduced_a2_hand_solution():
    sols = solve_all(reduced_eg_system(2, 1))
    assert sols.count == 2
    expected = [np.array([1j * S3, -2j * S3]), np.array([-1j * S3, 2j * S3])]
    assert _match(sols.points, expected) < 1e-12
    assert sols.real_points() == []


def test_reduced_a4_one_real():
    sols = solve_all(reduced_eg_system(4, 2))
    assert sols.count == 3
    assert len(sols.real_points()) == 1


def test_infinite_solutions_are_dropped():
    # x*y = 1, x*y + x = 3 has the single finite solution x = 2, y = 1/2
    sys = SquareSystem.from_polys([{(1, 1): 1.0, (0, 0): -1.0}, {(1, 1): 1.0, (1, 0): 1.0, (0, 0): -3.0}])
    sols = solve_all(sys)
    assert sols.count == 1
    assert np.allclose(sols.points[0], [2.0, 0.5])
    assert sols.n_infinite == 3
    assert sols.count <= sols.bezout_bound


def test_newton_examples():
    assert abs(newton_refine(quadratic(), [1.1])[0] - 1) < 1e-14
    with pytest.raises(SingularJacobian):
        newton_refine(quadratic(), [0.0])


def test_newton_recovers_hand_solution():
    true = np.array([1j * S3, -2j * S3])
    x = newton_refine(reduced_eg_system(2, 1), true + 1e-2 * np.array([1, -1]))
    assert np.max(np.abs(x - true)) < 1e-12


def test_extended_polish_keeps_root():
    x = newton_refine(reduced_eg_system(4, 2), solve_all(reduced_eg_system(4, 2)).points[0],
                      extended=True)
    assert residual(reduced_eg_system(4, 2), x) < 1e-14


@pytest.mark.parametrize("n, i", [(2, 1), (4, 2), (5, 2), (6, 3), (7, 2)])
def test_jacobian_matches_finite_differences(n, i):
    sys = eg_system(SliceTarget.tangent_cone(n, i))
    rng = np.random.default_rng(n * 7 + i)
    h = 1e-6
    for _ in range(10):
        x = rng.normal(size=sys.nvars) + 1j * rng.normal(size=sys.nvars)
        J = sys.jacobian(x)
        fd = np.empty_like(J)
        for k in range(sys.nvars):
            e = np.zeros(sys.nvars)
            e[k] = h
            fd[:, k] = (sys.evaluate(x + e) - sys.evaluate(x - e)) / (2 * h)
        assert np.max(np.abs(fd - J)) <= 1e-5 * max(1.0, np.max(np.abs(J)))


def test_batched_evaluation_matches_single():
    sys = reduced_eg_system(5, 2)
    X = np.random.default_rng(0).normal(size=(4, sys.nvars)).astype(complex)
    batch = sys.evaluate(X)
    for row, x in zip(batch, X):
        assert np.allclose(row, sys.evaluate(x))


@pytest.mark.parametrize("n, i", [(3, 1), (5, 2), (6, 3)])
def test_determinism(n, i):
    a = solve_all(reduced_eg_system(n, i), seed=11)
    b = solve_all(reduced_eg_system(n, i), seed=11)
    assert len(a.points) == len(b.points)
    for p, q in zip(a.points, b.points):
        assert p.tobytes() == q.tobytes()


def test_canonical_order_is_permutation_invariant():
    pts = [np.array([1 + 1j, 0]), np.array([1 - 1j, 0]), np.array([-2.0, 1.0])]
    assert [p.tobytes() for p in canonical_order(pts)] == [
        p.tobytes() for p in canonical_order(pts[::-1])
    ]


def test_seeded_rng_streams():
    a = seeded_rng(5, 1, 0).uniform(size=3)
    assert np.array_equal(a, seeded_rng(5, 1, 0).uniform(size=3))
    assert not np.array_equal(a, seeded_rng(5, 2, 0).uniform(size=3))
    assert not np.array_equal(a, seeded_rng(5, 1, 1).uniform(size=3))


def test_warm_start_zero_path_is_identity():
    base = solve_all(reduced_eg_system(4, 2))
    t = SliceTarget.tangent_cone(4, 2).vector()
    out = warm_start_solve(eg_family(4, 2, t, t), base, 0.0)
    assert out is base or all(np.array_equal(p, q) for p, q in zip(out.points, base.points))


@pytest.mark.parametrize("n, i, count", [(4, 2, 3), (6, 3, 4)])
def test_warm_start_random_slice(n, i, count):
    sl = random_slice(n, i, 1e-3, seeded_rng(3, n, i))
    lam, sols = _solve_slice("EG", n, i, sl.vector(), seed=0)
    assert sols.count == count
    if (n, i) == (4, 2):
        assert len(sols.real_points()) == 1


def _normalized_target(n, i, sl):
    _, tn = normalize_target(n, i, sl.vector())
    return SliceTarget(n, i, tuple(tn[:-1]), 1.0)


@pytest.mark.parametrize(
    "n, i", [(n, i) for n in range(2, 8) for i in range(1, (n + 1) // 2 + 1)]
)
def test_warm_start_agrees_with_total_degree(n, i):
    for trial in range(10):
        sl = random_slice(n, i, 1e-3, seeded_rng(17, n * 10 + i, trial))
        _, warm = _solve_slice("EG", n, i, sl.vector(), seed=trial)
        full = solve_all(eg_system(_normalized_target(n, i, sl)), seed=trial)
        assert warm.count == full.count == multiplicity_eg(n, i)
        assert _match(warm.points, full.points) < 1e-6


def test_solution_set_real_points():
    s = SolutionSet([np.array([1.0 + 0j]), np.array([1j])], [0, 0], [], 2)
    assert len(s.real_points()) == 1
