import math

import numpy as np
import pytest

from greedybounds.constants import (
    BoundRecord,
    ConsistencyError,
    LebesgueWitness,
    Probe,
    closed_form_records,
    combined_bounds,
    democracy,
    derived_corollaries,
    dual_democracy,
    k_constant,
    lebesgue_bounds,
    qg_constants,
    superdemocracy,
    upper_weights,
)
from greedybounds.greedy import EnumerationBudgetError
from greedybounds.lorentz import CoefVec, norm_l1_hat, norm_m
from greedybounds.spaces import lindenstrauss_dual_c0_democracy, make_space
from greedybounds.weights import WeightSeq, classify, concave_majorant, dual, power
from greedybounds import witnesses as W


# -- records ------------------------------------------------------------------

def test_bound_record_consistency():
    BoundRecord("K", 1, 1.0, "", 1.0 + 1e-12, "combined")
    with pytest.raises(ConsistencyError):
        BoundRecord("K", 1, 2.0, "", 1.0, "combined")
    r = BoundRecord("D*", 1, 2.0, "", 1.0, "pairing-sum", conditional=True)
    assert not r.tight
    assert BoundRecord("K", 2, 4.0, "", 4.0, "combined").tight


def test_closed_form_records():
    recs = closed_form_records(make_space("difference"), 3)
    D = [r for r in recs if r.quantity == "D"]
    assert [(r.lower, r.upper) for r in D] == [(2, 2), (4, 4), (6, 6)]


# -- democracy ---------------------------------------------------------------------

def test_difference_democracy():
    X = make_space("difference")
    dem = democracy(X, 12, 6)
    N = np.arange(1, 7)
    assert np.array_equal(dem.D_win, 2 * N)
    assert np.array_equal(dem.d_win, np.ones(6))
    for r in dem.records:
        assert r.lower <= r.upper
    ddem = dual_democracy(X, 12, 6, primal=dem)
    assert ddem.exact
    assert np.array_equal(ddem.Dstar_win, N)
    assert np.array_equal(ddem.dstar_win, np.ones(6))


def test_lindenstrauss_democracy():
    dem = democracy(make_space("lindenstrauss"), 12, 5)
    assert np.allclose(dem.d_win, np.arange(2, 7), rtol=1e-12)
    assert np.allclose(dem.D_win, 2 * np.arange(1, 6), rtol=1e-12)


def test_lindenstrauss_dual_c0_values():
    C0 = make_space("lindenstrauss_dual")
    dem = democracy(C0, 12, 7)
    for N in range(1, 8):
        assert dem.D_win[N - 1] == pytest.approx(lindenstrauss_dual_c0_democracy(N), rel=1e-12)
    for n in (1, 2, 3):
        assert dem.D_win[2**n - 2] == n


def test_lp_democracy_flat():
    dem = democracy(make_space("lp:3"), 8, 4)
    assert np.allclose(dem.D_win, np.arange(1, 5) ** (1 / 3))
    assert np.allclose(dem.d_win, dem.D_win)


def test_democracy_quasi_concave_and_monotone_in_window():
    for desc in ("difference", "lindenstrauss", "kt:2:2", "blocks:pow:0.5", "summing"):
        X = make_space(desc)
        small = democracy(X, 8, 5)
        big = democracy(X, 11, 5)
        assert np.all(small.D_win <= big.D_win + 1e-12)
        assert np.all(small.d_win >= big.d_win - 1e-12)
        assert classify(WeightSeq(big.D_win)).is_quasiconcave


def test_sampled_democracy(rng):
    X = make_space("kt:2:2")
    ex = democracy(X, 10, 4)
    sm = democracy(X, 10, 4, mode="sampled", samples=3000, rng=rng)
    assert np.all(sm.D_win <= ex.D_win + 1e-12)
    assert np.all(sm.d_win >= ex.d_win - 1e-12)


def test_democracy_budget():
    with pytest.raises(EnumerationBudgetError):
        democracy(make_space("lp:2"), 30, 15, budget=10_000)
    with pytest.raises(ValueError):
        democracy(make_space("lp:2"), 4, 5)


def test_kt1_dual_democracy():
    X = make_space("kt:1:2")
    ddem = dual_democracy(X, 10, 8, n_random=50)
    H = [math.sqrt(math.fsum(1 / j for j in range(1, N + 1))) for N in range(1, 9)]
    D = ddem.by("Dstar")
    for r, h in zip(D, H):
        assert r.upper == pytest.approx(h)
        assert r.lower <= r.upper * (1 + 1e-9)


@pytest.mark.parametrize("desc", ["difference", "summing", "lindenstrauss_dual", "lp:3",
                                  "lorentz:2:1"])
def test_pairing_bound(desc):
    X = make_space(desc)
    dem = democracy(X, 10, 5)
    ddem = dual_democracy(X, 10, 5, primal=dem)
    ld_star = np.minimum.accumulate(ddem.dstar_win[::-1])[::-1]
    N = np.arange(1, 6)
    assert np.all(N <= dem.D_win * ld_star * (1 + 1e-12))
    if ddem.exact:
        assert np.all(N <= ddem.Dstar_win * dem.ld_win * (1 + 1e-12))


# -- embeddings driven by democracy ---------------------------------------------------

@pytest.mark.parametrize("desc", ["difference", "lindenstrauss", "kt:2:2", "blocks:pow:0.5",
                                  "summing"])
def test_upper_democracy_embedding(desc, rng):
    X = make_space(desc)
    w = 10
    dem = democracy(X, w, w)
    eta = concave_majorant(WeightSeq(dem.D_win))
    A = rng.standard_normal((300, w)) * (rng.random((300, w)) < 0.6)
    norms = X.norm_batch(A)
    for a, n in zip(A, norms):
        assert n <= norm_l1_hat(a, eta) * (1 + 1e-9) + 1e-12


@pytest.mark.parametrize("desc", ["difference", "summing", "lindenstrauss", "kt:2:2",
                                  "blocks:pow:0.5", "lp:1.5"])
def test_lower_marcinkiewicz_embedding(desc, rng):
    X = make_space(desc)
    M = 12
    _, eta2, _, _ = upper_weights(X, M)
    A = rng.standard_normal((300, M))
    norms = X.norm_batch(A)
    for a, n in zip(A, norms):
        assert norm_m(a, dual(eta2)) <= n * (1 + 1e-9)


# -- combined bounds ---------------------------------------------------------------

def test_combined_bounds_difference():
    for N in range(1, 17):
        c = combined_bounds(power(1.0, 16).scaled(2), power(1.0, 16), N)
        assert c.concave and c.K == 2 * N and c.L == 1 + 6 * N and c.Ltilde == 1 + 4 * N


def test_combined_bounds_nonconcave_uses_ot():
    eta1 = WeightSeq([1, 1, 3, 3])
    c = combined_bounds(eta1, power(1.0, 4), 4)
    assert not c.concave and c.base == c.OT


def test_upper_weights_sources():
    eta1, eta2, s1, s2 = upper_weights(make_space("lindenstrauss"), 8)
    assert (s1, s2) == ("trivial", "closed-form")
    assert eta1.values.tolist() == [2.0 * j for j in range(1, 9)]
    assert eta2(7) == 3


# -- superdemocracy -----------------------------------------------------------------

def test_superdemocracy_difference():
    X = make_space("difference")
    dem = democracy(X, 10, 5)
    ddem = dual_democracy(X, 10, 5, primal=dem)
    recs = superdemocracy(X, dem, ddem)
    mu = [r for r in recs if r.quantity == "mu"]
    assert [r.lower for r in mu] == [2 * N for N in range(1, 6)]
    assert all(r.tight for r in mu)


def test_superdemocracy_lp():
    X = make_space("lp:2")
    dem = democracy(X, 8, 4)
    mu = [r for r in superdemocracy(X, dem) if r.quantity == "mu"]
    assert all(r.lower == pytest.approx(1) for r in mu)


def test_kt_bidemocracy_band():
    X = make_space("kt:2:2")
    D, Ds, _, _ = upper_weights(X, 512)
    vals = [D(N) * Ds(N) / N for N in range(1, 513)]
    assert max(vals) / min(vals) < 10


# -- quasi-greedy constants -----------------------------------------------------------

def test_qg_blocks_witness():
    for w in ("pow:0.5", "onepluslog"):
        B = make_space(f"blocks:{w}")
        om = B.params["omega"]
        recs = qg_constants(B, [W.blocks_greedy(N) for N in range(1, 9)], 8)
        g = {r.N: r.lower for r in recs if r.quantity == "g"}
        gc = {r.N: r.lower for r in recs if r.quantity == "gc"}
        for N in range(1, 9):
            assert g[N] == pytest.approx(om(N), rel=1e-12)
            assert gc[N] == pytest.approx(om(N), rel=1e-12)


def test_qg_kt1_witness():
    K = make_space("kt:1:2")
    for n in range(0, 5):
        x, N, G = W.kt1_greedy(n)
        recs = qg_constants(K, [Probe(x, "kt1", greedy={N: G})], N)
        g = [r for r in recs if r.quantity == "g" and r.N == N][0]
        assert g.lower >= (n + 1) / K.norm(x) - 1e-12


def test_qg_unconditional(rng):
    X = make_space("lp:2")
    probes = [Probe(CoefVec.from_dense(rng.standard_normal(8))) for _ in range(50)]
    recs = qg_constants(X, probes, 6)
    assert all(r.lower <= 1 + 1e-9 for r in recs)
    assert all(r.upper == 1 for r in recs)


def test_qg_lindenstrauss_registered_bound(rng):
    X = make_space("lindenstrauss")
    probes = [Probe(CoefVec.from_dense(rng.standard_normal(10))) for _ in range(30)]
    recs = qg_constants(X, probes, 5)
    assert {r.upper for r in recs if r.quantity == "g"} == {3.0}
    assert {r.upper for r in recs if r.quantity == "ghat"} == {6.0}


# -- conditionality ------------------------------------------------------------------

def test_k_difference():
    X = make_space("difference")
    recs = k_constant(X, 3, exhaustive_window=12)
    assert [r.lower for r in recs] == [2, 4, 6]
    assert [r.upper for r in recs] == [2, 4, 6]
    probes = [W.difference_conditionality(N) for N in range(1, 11)]
    recs = k_constant(X, 10, probes)
    assert [r.lower for r in recs] == [2 * N for N in range(1, 11)]


def test_k_kt22():
    X = make_space("kt:2:2")
    Ns = (8, 16, 32)
    recs = k_constant(X, 32, [W.kt_conditionality(2, N) for N in Ns])
    for r in recs:
        assert r.lower <= r.upper * (1 + 1e-9)
        if r.N in Ns:
            ratio = r.lower / math.sqrt(math.log(r.N + 1))
            assert 0.2 <= ratio <= 5
        if r.N > 1:
            assert r.upper_source == "direct"


def test_k_lp_trivial():
    recs = k_constant(make_space("lp:2"), 4, exhaustive_window=6)
    assert all(r.lower == pytest.approx(1) and r.upper == 1 for r in recs)


# -- Lebesgue constants ---------------------------------------------------------------

def test_lebesgue_difference():
    X = make_space("difference")
    N_max = 16
    wits = [w for N in range(1, N_max + 1)
            for w in (W.difference_lebesgue(N), W.difference_lebesgue_tilde(N))]
    recs = lebesgue_bounds(X, N_max, wits)
    for r in recs:
        expect = 1 + (6 if r.quantity == "L" else 4) * r.N
        assert r.lower == expect and r.upper == expect


def test_lebesgue_bad_competitor():
    X = make_space("difference")
    bad = LebesgueWitness(CoefVec({1: 1.0, 2: 3.0}), 1, None, (CoefVec({1: 1.0, 2: 1.0}),))
    with pytest.raises(ValueError):
        lebesgue_bounds(X, 2, [bad])


def test_lebesgue_lindenstrauss_rate():
    X = make_space("lindenstrauss")
    recs = lebesgue_bounds(X, 255, [])
    L = {r.N: r.upper for r in recs if r.quantity == "L"}
    for n in range(1, 9):
        N = 2**n - 1
        assert L[N] == 1 + 3 * 2 * n


def test_lebesgue_trig_rate():
    X = make_space("trig:4:1:512")
    eta1, eta2, _, _ = upper_weights(X, 64)
    for N in range(1, 65):
        c = combined_bounds(eta1, eta2, N)
        assert c.OT <= c.U * (1 + 1e-12)
        assert c.U <= 4 * N**0.25 * (1 + 1e-12)


# -- corollaries ---------------------------------------------------------------------

def test_corollaries_difference():
    X = make_space("difference")
    dem = democracy(X, 10, 5)
    checks = derived_corollaries(X, 5, dem)
    chain = [c for c in checks if c.name.startswith("OT")]
    assert all(c.passed and c.lhs == c.rhs == 2 * c.N for c in chain)


def test_corollaries_conditional_flags():
    X = make_space("lindenstrauss")
    dem = democracy(X, 10, 5)
    probes = [Probe(W.lindenstrauss_spread(k)) for k in range(1, 4)]
    qg = qg_constants(X, probes, 5)
    krecs = k_constant(X, 5, probes)
    checks = derived_corollaries(X, 5, dem, qg, krecs)
    assert any(c.conditional for c in checks)
    assert all(c.passed for c in checks if not c.conditional)
    assert any(c.name.startswith("K/(g") for c in checks)


def test_corollaries_lp():
    X = make_space("lp:2")
    checks = derived_corollaries(X, 6)
    assert all(c.passed for c in checks)
    assert all(c.lhs <= math.sqrt(c.N) * (1 + 1e-12) for c in checks)
