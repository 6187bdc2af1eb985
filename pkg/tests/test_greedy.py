import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from greedybounds.constants import combined_bounds, upper_weights
from greedybounds.greedy import (
    EnumerationBudgetError,
    greedy_order,
    greedy_residual,
    greedy_sets,
    is_greedy_set,
    project,
    sigma_tilde,
    sigma_upper,
)
from greedybounds.lorentz import CoefVec, rearrange
from greedybounds.spaces import make_space
from greedybounds.witnesses import difference_lebesgue, difference_lebesgue_tilde

small_vectors = st.lists(st.integers(-3, 3), min_size=1, max_size=9).map(
    lambda v: CoefVec.from_dense(np.array(v, dtype=float)))


def enumerate_sigma_tilde(space, x, N):
    supp = sorted(x.support)
    best = math.inf
    for k in range(min(N, len(supp)) + 1):
        for A in itertools.combinations(supp, k):
            best = min(best, space.norm(x - x.restrict(A)))
    return best


# -- orderings and greedy sets -------------------------------------------------------

def test_greedy_order_examples():
    assert greedy_order(CoefVec({1: 1.0, 2: 2.0})) == (2, 1)
    assert greedy_order(CoefVec({1: 1.0, 2: -1.0})) == (1, 2)
    assert sorted(greedy_order(CoefVec({1: 1.0, 2: -1.0}), "enumerate-all")) == [(1, 2), (2, 1)]
    with pytest.raises(ValueError):
        greedy_order(CoefVec({1: 1.0}), "random")


def test_greedy_order_consistent_with_rearrange(rng):
    for _ in range(1000):
        x = CoefVec.from_dense(rng.integers(-4, 5, int(rng.integers(1, 12))).astype(float))
        pi = greedy_order(x)
        assert np.array_equal(np.array([abs(x[n]) for n in pi]), rearrange(x))


def test_greedy_sets_examples():
    x = CoefVec({1: 3.0, 2: -2.0, 3: 1.0})
    assert greedy_sets(x, 2) == [frozenset({1, 2})]
    ties = CoefVec({1: 1.0, 2: 1.0, 3: 1.0})
    assert len(greedy_sets(ties, 2, "enumerate-all")) == 3
    assert greedy_sets(ties, 2) == [frozenset({1, 2})]
    with pytest.raises(ValueError):
        greedy_sets(x, -1)


def test_greedy_sets_padding():
    x = CoefVec({2: 1.0, 5: 3.0})
    assert greedy_sets(x, 4) == [frozenset({1, 2, 3, 5})]


def test_greedy_sets_budget():
    x = CoefVec.from_dense(np.ones(30))
    with pytest.raises(EnumerationBudgetError):
        greedy_sets(x, 15, "enumerate-all")


@given(small_vectors, st.integers(0, 9))
def test_greedy_set_inequality(x, N):
    for A in greedy_sets(x, N, "enumerate-all"):
        assert len(A) == N
        assert is_greedy_set(x, A, N)
        # a greedy set carries the largest l1 mass among sets of its size
        mass = sum(abs(x[n]) for n in A)
        supp = sorted(x.support)
        for B in itertools.combinations(supp, min(N, len(supp))):
            assert mass >= sum(abs(x[n]) for n in B) - 1e-12


def test_greedy_sets_exhaustive(rng):
    for _ in range(200):
        x = CoefVec.from_dense(rng.integers(-2, 3, 8).astype(float))
        N = int(rng.integers(0, len(x) + 1))
        got = set(greedy_sets(x, N, "enumerate-all"))
        supp = sorted(x.support)
        brute = {frozenset(A) for A in itertools.combinations(supp, N) if is_greedy_set(x, A, N)}
        assert got == brute


# -- projections ------------------------------------------------------------------

def test_project_examples():
    X = make_space("difference")
    x = CoefVec({1: 1.0, 2: -2.0, 4: 3.0})
    assert project(X, x, x.support).vector == x
    empty = project(X, x, ())
    assert len(empty.vector) == 0 and empty.norm == 0
    tw = project(X, x, {2, 4}, {2: -1.0})
    assert tw.vector == CoefVec({2: 2.0, 4: 3.0})


def test_project_kt_witness():
    K = make_space("kt:2:2")
    N = 16
    x = CoefVec({n: (-1.0) ** n * n**-0.5 for n in range(1, 2 * N + 1)})
    P = project(K, x, range(2, 2 * N + 1, 2))
    b2 = np.abs(np.cumsum(P.vector.to_dense() / np.sqrt(np.arange(1, 2 * N + 1)))).max()
    assert b2 == pytest.approx(math.fsum(1 / (2 * n) for n in range(1, N + 1)), rel=1e-12)


# -- residuals ---------------------------------------------------------------------

def test_difference_lebesgue_witnesses():
    X = make_space("difference")
    for N in range(1, 9):
        w = difference_lebesgue(N)
        out = greedy_residual(X, w.x, N, greedy_set=w.greedy_set)
        assert out.residual_norm == 1 + 6 * N
        assert sigma_upper(X, w.x, N, w.competitors) == 1
        wt = difference_lebesgue_tilde(N)
        out = greedy_residual(X, wt.x, N, greedy_set=wt.greedy_set)
        assert out.residual_norm == 4 * N + 1
        assert sigma_tilde(X, wt.x, N).value <= 1


def test_worst_greedy_residual_over_ties():
    X = make_space("difference")
    N = 3
    w = difference_lebesgue_tilde(N)
    worst = greedy_residual(X, w.x, N, "enumerate-all")
    assert worst.residual_norm == 4 * N + 1
    assert worst.all_sets_count > 1


def test_residual_small_support():
    X = make_space("lp:2")
    x = CoefVec({3: 1.0, 7: 2.0})
    out = greedy_residual(X, x, 3)
    assert out.residual_norm == 0 and len(out.set) == 3


def test_invalid_explicit_set():
    X = make_space("lp:2")
    x = CoefVec({1: 1.0, 2: 2.0})
    with pytest.raises(ValueError):
        greedy_residual(X, x, 1, greedy_set={1})


def test_residual_vanishes_on_greedy_set(rng):
    X = make_space("kt:2:2")
    for _ in range(100):
        x = CoefVec.from_dense(rng.standard_normal(10))
        N = int(rng.integers(1, 10))
        out = greedy_residual(X, x, N)
        assert all(out.residual[n] == 0 for n in out.set)
        assert out.approximant + out.residual == x


# -- expansional and best approximation errors ---------------------------------------

def test_sigma_tilde_full_support():
    X = make_space("lp:1")
    x = CoefVec({1: 1.0, 2: 2.0})
    assert sigma_tilde(X, x, 2).value == 0
    assert sigma_tilde(X, x, 5).value == 0


def test_sigma_tilde_budget():
    X = make_space("lp:2")
    x = CoefVec.from_dense(np.arange(1.0, 41.0))
    with pytest.raises(EnumerationBudgetError):
        sigma_tilde(X, x, 20, budget=1000)


def test_sigma_tilde_monotone(rng):
    for desc in ("kt:2:2", "lindenstrauss", "difference"):
        X = make_space(desc)
        for _ in range(70):
            x = CoefVec.from_dense(rng.standard_normal(8))
            vals = [sigma_tilde(X, x, N).value for N in range(0, 9)]
            assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_difference_solver_matches_enumeration(rng):
    X = make_space("difference")
    for _ in range(300):
        x = CoefVec.from_dense(rng.integers(-3, 4, int(rng.integers(1, 10))).astype(float))
        N = int(rng.integers(0, 6))
        assert sigma_tilde(X, x, N).value == pytest.approx(enumerate_sigma_tilde(X, x, N),
                                                           abs=1e-12)


def test_sigma_upper_examples():
    X = make_space("difference")
    w = difference_lebesgue(3)
    assert sigma_upper(X, w.x, 3, w.competitors) == 1
    x = CoefVec({1: 3.0, 2: 1.0, 5: 2.0})
    G = [x.restrict(A) for A in greedy_sets(x, 2, "enumerate-all")]
    g = greedy_residual(X, x, 2)
    assert sigma_upper(X, x, 2, G) <= g.residual_norm
    assert sigma_upper(X, x, 2) == sigma_tilde(X, x, 2).value
    with pytest.raises(ValueError):
        sigma_upper(X, x, 1, [CoefVec({1: 1.0, 2: 1.0})])


def test_sigma_chain(rng):
    X = make_space("lindenstrauss")
    for _ in range(100):
        x = CoefVec.from_dense(rng.standard_normal(8))
        N = int(rng.integers(0, 8))
        z = CoefVec({int(n): float(rng.standard_normal()) for n in rng.choice(np.arange(1, 9), N)})
        su = sigma_upper(X, x, N, [z] if len(z) <= N else [])
        st_ = sigma_tilde(X, x, N).value
        assert su <= st_ + 1e-12 and st_ <= X.norm(x) + 1e-12


@pytest.mark.parametrize("desc", ["difference", "summing", "lindenstrauss", "kt:2:2", "kt:1:2",
                                  "blocks:pow:0.5", "lp:3", "lorentz:2:1", "trig:4:1:256"])
def test_residual_bounded_by_main_estimate(desc, rng):
    X = make_space(desc)
    N_max = 6
    eta1, eta2, _, _ = upper_weights(X, N_max)
    for _ in range(40):
        x = CoefVec.from_dense(rng.integers(-3, 4, 9).astype(float))
        for N in range(1, N_max + 1):
            out = greedy_residual(X, x, N, "enumerate-all")
            st_ = sigma_tilde(X, x, N).value
            bound = combined_bounds(eta1, eta2, N).Ltilde
            assert out.residual_norm <= bound * st_ * (1 + 1e-6) + 1e-9
