import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from greedybounds.weights import (
    WeightSeq,
    classify,
    combo_table,
    combos,
    compensated_cumsum,
    concave_majorant,
    delta,
    difference,
    dilation,
    dual,
    logarithmic,
    one_plus_log,
    parse_weight,
    power,
    prefix_concave_length,
    quasi_concave_envelope,
    summing,
)

from conftest import random_nondecreasing, random_quasiconcave

positive_lists = st.lists(st.floats(0.01, 100.0), min_size=1, max_size=40)
increments = st.lists(st.floats(0.0, 10.0), min_size=1, max_size=40)


def nondecreasing(incs):
    v = np.cumsum(incs)
    v[0] = max(v[0], 0.5)
    return WeightSeq(np.maximum.accumulate(v))


# -- construction -----------------------------------------------------------

def test_weight_validation():
    with pytest.raises(ValueError):
        WeightSeq([0.0, 1.0])
    with pytest.raises(ValueError):
        WeightSeq([1.0, -1.0])
    with pytest.raises(ValueError):
        WeightSeq([])
    with pytest.raises(ValueError):
        WeightSeq([1.0, np.inf])
    w = WeightSeq([1, 2, 3])
    assert w(0) == 0.0 and w(3) == 3.0 and w.M == 3
    with pytest.raises(ValueError):
        w.values[0] = 5.0


def test_parse_weight():
    assert parse_weight("1, 2,3").values.tolist() == [1, 2, 3]
    assert parse_weight("pow:0.5", 4)(4) == 2.0
    assert parse_weight("const", 3).values.tolist() == [1, 1, 1]
    assert parse_weight("log:1:3", 2)(1) == pytest.approx(math.log(4))
    assert parse_weight("powlog:1:1:1", 2)(2) == pytest.approx(2 * math.log(3))
    assert parse_weight("onepluslog", 3)(3) == pytest.approx(1 + math.log(3))
    with pytest.raises(ValueError):
        parse_weight("pow:0.5")
    with pytest.raises(ValueError):
        parse_weight("1,2", 3)


# -- transforms: worked examples -------------------------------------------------

def test_delta_examples():
    assert delta(WeightSeq([1, 2, 3, 4])).tolist() == [1, 1, 1, 1]
    assert delta(WeightSeq([2, 4, 6, 8])).tolist() == [2, 2, 2, 2]
    assert delta(WeightSeq([1, 1, 1])).tolist() == [1, 0, 0]


def test_summing_examples():
    assert summing(WeightSeq([1, 1, 1])).allclose(WeightSeq([1, 1.5, 11 / 6]))
    assert summing(WeightSeq([1, 2, 3, 4])).values.tolist() == [1, 2, 3, 4]


def test_difference_examples():
    assert difference(WeightSeq([1, 2, 3, 4])).values.tolist() == [1, 2, 3, 4]
    assert difference(WeightSeq([1, 1, 1, 1])).values.tolist() == [1, 0, 0, 0]
    with pytest.raises(ValueError):
        difference(WeightSeq([2, 1]))


def test_dual_examples():
    assert dual(power(1.0, 5)).values.tolist() == [1] * 5
    assert dual(WeightSeq(np.ones(4))).values.tolist() == [1, 2, 3, 4]
    with pytest.raises(ValueError):
        dual(WeightSeq([1.0, 0.0]))


def test_summing_matches_exact_rational_oracle():
    vals = [Fraction(3), Fraction(5), Fraction(7, 2), Fraction(11)]
    exact, acc = [], Fraction(0)
    for j, v in enumerate(vals, 1):
        acc += v / j
        exact.append(float(acc))
    got = summing(WeightSeq([float(v) for v in vals])).values
    assert np.allclose(got, exact, rtol=1e-15, atol=0)


def test_compensated_cumsum_long_sum():
    x = np.full(10**5, 0.1)
    assert compensated_cumsum(x)[-1] == pytest.approx(10**4, rel=1e-15)


# -- transform identities (properties) ------------------------------------------

@given(increments)
def test_summing_difference_identity(incs):
    eta = nondecreasing(incs)
    assert summing(difference(eta)).allclose(eta, 1e-12)


@given(positive_lists)
def test_difference_summing_identity(vals):
    eta = WeightSeq(vals)
    assert difference(summing(eta)).allclose(eta, 1e-12)


@given(positive_lists)
def test_dual_involution(vals):
    eta = WeightSeq(vals)
    back = dual(dual(eta))
    assert np.max(np.abs(back.values - eta.values) / eta.values) < 1e-12


def test_transform_identities_random(rng):
    for _ in range(100):
        M = int(rng.integers(1, 200))
        eta = WeightSeq(random_nondecreasing(rng, M))
        pos = WeightSeq(rng.uniform(0.01, 10, M))
        assert summing(difference(eta)).allclose(eta, 1e-12)
        assert difference(summing(pos)).allclose(pos, 1e-12)
        assert dual(dual(pos)).allclose(pos, 1e-12)


# -- classes ---------------------------------------------------------------------

def test_classify_identity_weight():
    c = classify(power(1.0, 32))
    assert c.is_quasiconcave and c.is_concave and c.is_nondecreasing
    assert c.doubling_constant == 2.0


def test_classify_sqrt_regular():
    c = classify(power(0.5, 64))
    assert c.is_concave
    # direct summation oracle: sum j^{-1/2} / sqrt(N) < 2
    oracle = max(sum(j**-0.5 for j in range(1, N + 1)) / math.sqrt(N) for N in range(1, 65))
    assert c.regularity[1] == pytest.approx(oracle, rel=1e-12)
    assert c.regularity[1] <= 2


def test_classify_log_not_regular():
    c = classify(logarithmic(1.0, 3.0, 256))
    assert c.is_concave
    assert c.regularity[1] > 2
    # frozen direct-summation value at N = 256
    assert c.regularity[1] == pytest.approx(
        sum(math.log(j + 3) / j for j in range(1, 257)) / math.log(259), rel=1e-12)


def test_class_chain_implications(rng):
    for _ in range(200):
        eta = WeightSeq(random_nondecreasing(rng, int(rng.integers(2, 60))))
        c = classify(eta)
        if c.is_concave:
            assert c.is_quasiconcave
        if c.is_quasiconcave:
            assert c.is_nondecreasing and c.is_doubling and c.doubling_constant <= 2 + 1e-12


def _equivalence_chain(eta):
    qc = classify(eta).is_quasiconcave
    s_conc = classify(summing(eta)).is_concave
    hat_le = bool(np.all(difference(eta).values <= eta.values * (1 + 1e-12)))
    dual_qc = classify(dual(eta)).is_quasiconcave
    return qc, s_conc, hat_le, dual_qc


def test_equivalence_chain(rng):
    seen = set()
    for _ in range(300):
        M = int(rng.integers(2, 50))
        v = random_quasiconcave(rng, M) if rng.random() < 0.5 else random_nondecreasing(rng, M)
        v = v + 1e-3  # keep strictly positive so the dual exists
        chain = _equivalence_chain(WeightSeq(v))
        assert len(set(chain)) == 1, chain
        seen.add(chain[0])
    assert seen == {True, False}


def test_summing_log_bound(rng):
    for _ in range(100):
        eta = WeightSeq(random_nondecreasing(rng, 100))
        N = np.arange(1, 101)
        assert np.all(summing(eta).values <= eta.values * (1 + np.log(N)) * (1 + 1e-12))


def test_doubling_summing_bounds(rng):
    for _ in range(100):
        eta = WeightSeq(random_quasiconcave(rng, 64))
        c = classify(eta).doubling_constant
        s = summing(eta)
        assert np.all(eta.values <= c / math.log(2) * s.values * (1 + 1e-12))
        assert classify(s).doubling_constant <= 1.5 * c * (1 + 1e-12)


def test_concave_majorant_bounds(rng):
    for _ in range(200):
        eta = WeightSeq(random_quasiconcave(rng, int(rng.integers(1, 80))))
        maj = concave_majorant(eta)
        assert np.all(eta.values <= maj.values)
        assert np.all(maj.values <= 2 * eta.values * (1 + 1e-12))
        assert classify(maj).is_concave


def test_concave_majorant_example():
    maj = concave_majorant(WeightSeq([1, 1, 3]))
    assert maj.values.tolist() == [1, 2, 3]


def test_quasi_concave_envelope(rng):
    for _ in range(100):
        eta = WeightSeq(rng.uniform(0.1, 5, int(rng.integers(1, 40))))
        env = quasi_concave_envelope(eta)
        assert classify(env).is_quasiconcave
        assert np.all(env.values >= eta.values)
    qc = WeightSeq(random_quasiconcave(rng, 30))
    assert quasi_concave_envelope(qc).allclose(qc, 1e-12)


def test_prefix_concave_length():
    assert prefix_concave_length(power(0.5, 10)) == 10
    assert prefix_concave_length(WeightSeq([1, 2, 3, 5])) == 3


# -- dilation ------------------------------------------------------------------

def test_dilation_power_index():
    rep = dilation(power(0.5, 4096), 16)
    assert rep.truncated
    assert rep.i_lower_est == pytest.approx(0.5, abs=1e-9)
    assert rep.I_upper_est == pytest.approx(0.5, abs=1e-9)


def test_dilation_constant():
    rep = dilation(WeightSeq(np.ones(64)), 8)
    assert np.all(rep.phi == 1) and np.all(rep.Phi == 1)
    assert rep.i_lower_est == 0 and rep.I_upper_est == 0


def test_dilation_log_truncation_value():
    # the lower index of ln(j+3) is 0, but at a finite truncation the estimate
    # is max_M' ln(ln(M+3)/ln(M/M'+3))/ln M'; frozen direct-evaluation value
    rep = dilation(logarithmic(1.0, 3.0, 4096), 16)
    oracle = max(math.log(min(math.log(m * k + 3) / math.log(k + 3)
                              for k in range(1, 4096 // m + 1))) / math.log(m)
                 for m in range(2, 17))
    assert rep.i_lower_est == pytest.approx(oracle, rel=1e-12)
    assert rep.i_lower_est == pytest.approx(0.14551537774532036, rel=1e-12)
    # and it decays as the truncation grows
    bigger = dilation(logarithmic(1.0, 3.0, 1 << 16), 16)
    assert bigger.i_lower_est < rep.i_lower_est
    assert rep.i_lower_est <= rep.I_upper_est


def test_dilation_sequences_ordered(rng):
    for _ in range(50):
        eta = WeightSeq(rng.uniform(0.1, 3, 64))
        rep = dilation(eta, 8)
        assert np.all(rep.phi <= rep.Phi)


def test_dilation_small_cap():
    rep = dilation(power(1.0, 8), 1)
    assert rep.i_lower_est is None and rep.I_upper_est is None
    with pytest.raises(ValueError):
        dilation(power(1.0, 8), 9)


# -- combined quantities -----------------------------------------------------------

def test_combos_difference_basis():
    for N in range(1, 20):
        c = combos(power(1.0, 20).scaled(2), power(1.0, 20), N)
        assert c.S == c.T12 == c.T21 == c.OT == 2 * N


def test_combos_identity_constant():
    M = 50
    for N in range(1, M + 1):
        c = combos(power(1.0, M), WeightSeq(np.ones(M)), N)
        H = math.fsum(1 / j for j in range(1, N + 1))
        assert c.S == 1 and c.T12 == 1
        assert c.T21 == pytest.approx(H, rel=1e-14) and c.U == pytest.approx(H, rel=1e-14)


def test_combos_constant_pair():
    one = WeightSeq(np.ones(10))
    c = combos(one, one, 10)
    assert (c.S, c.T12, c.T21) == (1, 1, 1)
    assert c.U == pytest.approx(sum(1 / j**2 for j in range(1, 11)))


def test_combos_errors():
    with pytest.raises(ValueError):
        combos(power(1.0, 3), power(1.0, 3), 4)
    with pytest.raises(ValueError):
        combos(WeightSeq([2, 1]), power(1.0, 2), 2)


def test_combo_table_matches_pointwise(rng):
    a, b = WeightSeq(random_quasiconcave(rng, 40)), WeightSeq(random_quasiconcave(rng, 40))
    t = combo_table(a, b)
    for N in (1, 7, 40):
        r = combos(a, b, N)
        assert t.at(N).S == pytest.approx(r.S, rel=1e-14)
        assert t.at(N).OT == pytest.approx(r.OT, rel=1e-14)
        assert t.at(N).U == pytest.approx(r.U, rel=1e-14)


def test_combo_chain_random_qc_pairs(rng):
    for _ in range(1000):
        M = int(rng.integers(1, 60))
        a = WeightSeq(random_quasiconcave(rng, M))
        b = WeightSeq(random_quasiconcave(rng, M))
        t = combo_table(a, b)
        tol = 1e-12 * np.maximum(1, t.U)
        assert np.all(t.S <= t.OT + tol)
        assert np.all(t.OT <= np.maximum(t.T12, t.T21) + tol)
        assert np.all(np.maximum(t.T12, t.T21) <= t.U + tol)


def test_one_plus_log_generator():
    w = one_plus_log(5)
    assert w(1) == 1.0 and classify(w).is_concave
