"""Democracy functions, greedy-type constants and two-sided bounds.

Computed quantities come in two flavours.  Window values are brute-force
extrema over index sets inside ``{1..window}``: a maximum is a lower bound
for the true supremum and a minimum is an upper bound for the true
infimum.  Upper bounds for greedy constants come from the combined
quantities of the upper democracy weights.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .greedy import EnumerationBudgetError, greedy_residual, greedy_sets, sigma_tilde, sigma_upper
from .lorentz import CoefVec
from .spaces import SpaceModel, conjugate_exponent, dual_probe_rows
from .weights import WeightSeq, combos, prefix_concave_length, quasi_concave_envelope

__all__ = [
    "ConsistencyError",
    "BoundRecord",
    "DemocracyResult",
    "DualDemocracyResult",
    "Probe",
    "LebesgueWitness",
    "CorollaryCheck",
    "democracy",
    "dual_democracy",
    "upper_weights",
    "combined_bounds",
    "superdemocracy",
    "qg_constants",
    "k_constant",
    "lebesgue_bounds",
    "derived_corollaries",
    "closed_form_records",
]

ENUM_BUDGET = 5_000_000


class ConsistencyError(AssertionError):
    """A certified lower bound exceeds a certified upper bound."""


@dataclass(frozen=True)
class BoundRecord:
    """Two-sided bound for one quantity at one ``N``.

    ``upper_source`` is one of ``closed-form``, ``combined``, ``pairing-sum``,
    ``holder``, ``direct``, ``window``, ``exact``, ``registered``, ``trivial``.
    Records fed by estimated inputs are marked ``conditional`` and are exempt
    from the consistency check.
    """

    quantity: str
    N: int
    lower: Optional[float]
    lower_witness: str = ""
    upper: Optional[float] = None
    upper_source: str = ""
    window: int = 0
    conditional: bool = False
    rtol: float = 1e-9

    def __post_init__(self):
        if self.conditional or self.lower is None or self.upper is None:
            return
        if self.lower > self.upper * (1 + self.rtol) + self.rtol:
            raise ConsistencyError(
                f"{self.quantity}(N={self.N}): lower {self.lower!r} > upper {self.upper!r}"
                f" [{self.upper_source}]")

    @property
    def tight(self) -> bool:
        return (self.lower is not None and self.upper is not None
                and abs(self.upper - self.lower) <= self.rtol * max(1.0, abs(self.upper)))


def _fmt_set(A, eps=None) -> str:
    A = sorted(int(a) for a in A)
    if eps is None:
        return "A={" + ",".join(map(str, A)) + "}"
    signs = "".join("+" if e > 0 else "-" for e in eps)
    return "A={" + ",".join(map(str, A)) + "} eps=" + signs


# -- democracy ----------------------------------------------------------------

def _signs(N):
    if N == 0:
        return np.ones((1, 0))
    tails = np.array(list(itertools.product((1.0, -1.0), repeat=N - 1)), dtype=float)
    return np.hstack([np.ones((tails.shape[0], 1)), tails.reshape(tails.shape[0], N - 1)])


def _exhaustive_rows(window, N):
    combos_ = np.array(list(itertools.combinations(range(window), N)), dtype=np.int64)
    signs = _signs(N)
    nA, nS = len(combos_), len(signs)
    rows = np.zeros((nA * nS, window))
    ai = np.repeat(np.arange(nA), nS)
    si = np.tile(np.arange(nS), nA)
    r = np.arange(nA * nS)[:, None]
    rows[r, combos_[ai]] = signs[si]
    return rows, combos_[ai] + 1, signs[si]


def _sampled_rows(window, N, samples, rng):
    sets, signs = [], []
    structured = [np.arange(N), np.arange(1, 2 * N, 2)[:N] if 2 * N <= window else np.arange(N)]
    for A in structured:
        for s in (np.ones(N), (-1.0) ** np.arange(N)):
            sets.append(A)
            signs.append(s)
    for _ in range(samples):
        A = np.sort(rng.choice(window, size=N, replace=False))
        s = rng.choice([-1.0, 1.0], size=N)
        s[0] = 1.0
        sets.append(A)
        signs.append(s)
    sets, signs = np.array(sets), np.array(signs)
    rows = np.zeros((len(sets), window))
    rows[np.arange(len(sets))[:, None], sets] = signs
    return rows, sets + 1, signs


def _rows_for(window, N, mode, samples, rng):
    if mode == "exhaustive":
        return _exhaustive_rows(window, N)
    if mode == "sampled":
        return _sampled_rows(window, N, samples, rng)
    raise ValueError(f"unknown democracy mode {mode!r}")


def _check_budget(window, N_max, mode, samples, budget):
    if window < N_max:
        raise ValueError("window must be at least N_max")
    if mode == "exhaustive":
        total = sum(math.comb(window, N) * 2 ** max(N - 1, 0) for N in range(1, N_max + 1))
    else:
        total = N_max * (samples + 4)
    if total > budget:
        raise EnumerationBudgetError(f"{total} democracy evaluations exceed the budget {budget}")


@dataclass
class DemocracyResult:
    window: int
    D_win: np.ndarray
    d_win: np.ndarray
    ld_win: np.ndarray
    D_witness: List[str]
    d_witness: List[str]
    records: List[BoundRecord] = field(default_factory=list)

    def by(self, quantity: str) -> List[BoundRecord]:
        return [r for r in self.records if r.quantity == quantity]


def upper_weights(space: SpaceModel, N_max: int) -> Tuple[WeightSeq, WeightSeq, str, str]:
    """Quasi-concave upper weights for ``D`` and ``D*`` on ``1..N_max``.

    Closed-form upper bounds when registered, capped by the triangle bounds
    ``c1 N`` and ``c2 N``, then replaced by their least quasi-concave
    majorant (which is still an upper bound).
    """
    j = np.arange(1, N_max + 1, dtype=float)
    out, src = [], []
    for q, c in (("D", space.c1), ("Dstar", space.c2)):
        v = c * j
        s = "trivial"
        cf = space.closed_forms.get(q)
        if cf is not None and cf.upper is not None:
            cv = np.array([cf.upper(int(n)) for n in j])
            if np.any(cv < v):
                s = "closed-form"
            v = np.minimum(v, cv)
        out.append(quasi_concave_envelope(WeightSeq(v, f"{q}-up")))
        src.append(s)
    return out[0], out[1], src[0], src[1]


def democracy(space: SpaceModel, window: int = 12, N_max: int = 6, mode: str = "exhaustive",
              samples: int = 10_000, rng: Optional[np.random.Generator] = None,
              budget: int = ENUM_BUDGET, dual_upper: Optional[WeightSeq] = None) -> DemocracyResult:
    """Window democracy values ``D_win``, ``d_win``, ``ld_win`` for ``N = 1..N_max``.

    ``mode="exhaustive"`` runs through every ``|A| = N`` inside the window and
    every sign pattern with first sign ``+1`` (the norm is even);
    ``"sampled"`` draws ``samples`` random pairs plus flat and alternating
    patterns.  Lower bounds for ``d`` and ``ld`` use ``N <= D*(N) ld(N)``
    with ``dual_upper`` (default: the space's upper ``D*`` weight).
    """
    rng = np.random.default_rng(0) if rng is None else rng
    _check_budget(window, N_max, mode, samples, budget)
    D_win = np.zeros(N_max)
    d_win = np.zeros(N_max)
    D_wit, d_wit = [], []
    for N in range(1, N_max + 1):
        rows, sets, signs = _rows_for(window, N, mode, samples, rng)
        vals = space.norm_batch(rows)
        i, k = int(np.argmax(vals)), int(np.argmin(vals))
        D_win[N - 1], d_win[N - 1] = vals[i], vals[k]
        D_wit.append(_fmt_set(sets[i], signs[i]))
        d_wit.append(_fmt_set(sets[k], signs[k]))
    # sup over |A| <= N equals sup over |A| = N for a true D; keep the
    # window value monotone the same way
    D_win = np.maximum.accumulate(D_win)
    ld_win = np.minimum.accumulate(d_win[::-1])[::-1]
    if dual_upper is None:
        _, dual_upper, _, _ = upper_weights(space, N_max)
    res = DemocracyResult(window, D_win, d_win, ld_win, D_wit, d_wit)
    tol = 1e-6 if space.approximate else 1e-9
    for N in range(1, N_max + 1):
        lo_c, up_c = space.closed_bounds("D", N)
        res.records.append(BoundRecord(
            "D", N, float(D_win[N - 1]), D_wit[N - 1],
            up_c if up_c is not None else space.c1 * N,
            "closed-form" if up_c is not None else "trivial", window, rtol=tol))
        pairing = N / float(dual_upper(N))
        lo_c, _ = space.closed_bounds("d", N)
        lo = max(pairing, lo_c) if lo_c is not None else pairing
        res.records.append(BoundRecord(
            "d", N, lo, "closed-form" if lo_c is not None and lo_c >= pairing else "pairing",
            float(d_win[N - 1]), "window", window, rtol=tol))
        res.records.append(BoundRecord(
            "ld", N, pairing, "pairing", float(ld_win[N - 1]), "window", window, rtol=tol))
    return res


@dataclass
class DualDemocracyResult:
    window: int
    Dstar_win: np.ndarray
    dstar_win: Optional[np.ndarray]
    exact: bool
    records: List[BoundRecord] = field(default_factory=list)

    def by(self, quantity: str) -> List[BoundRecord]:
        return [r for r in self.records if r.quantity == quantity]


def dual_democracy(space: SpaceModel, window: int = 12, N_max: int = 6, mode: str = "exhaustive",
                   samples: int = 10_000, rng: Optional[np.random.Generator] = None,
                   budget: int = ENUM_BUDGET, primal: Optional[DemocracyResult] = None,
                   n_random: int = 0) -> DualDemocracyResult:
    """Window values of ``D*`` and ``d*``.

    With an exact dual norm the window max/min are exact values over the
    window.  Otherwise ``D*_win`` is the pairing estimate (sign-matched flat
    and power-decay probes plus ``n_random`` random ones) and ``d*_win``
    uses the dual upper bound when one is registered.  ``primal`` adds the
    lower bound ``N / ld_win(N)``.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    _check_budget(window, N_max, mode, samples, budget)
    exact = space.dual_batch is not None
    Dstar = np.zeros(N_max)
    dstar = np.zeros(N_max) if (exact or space.dual_upper_batch is not None) else None
    D_wit = []
    for N in range(1, N_max + 1):
        rows, sets, signs = _rows_for(window, N, mode, samples, rng)
        if exact:
            vals = space.dual_batch_exact(rows)
        else:
            vals = np.array([_dual_lower(space, r, window, n_random, rng) for r in rows])
        i = int(np.argmax(vals))
        Dstar[N - 1] = vals[i]
        D_wit.append(_fmt_set(sets[i], signs[i]))
        if dstar is not None:
            up = vals if exact else space.dual_batch_upper(rows)
            dstar[N - 1] = up.min()
    Dstar = np.maximum.accumulate(Dstar)
    res = DualDemocracyResult(window, Dstar, dstar, exact)
    D_up, _, _, _ = upper_weights(space, N_max)
    tol = 1e-6 if space.approximate else 1e-9
    for N in range(1, N_max + 1):
        lo = float(Dstar[N - 1])
        wit = D_wit[N - 1]
        if primal is not None and N / primal.ld_win[N - 1] > lo:
            lo, wit = N / float(primal.ld_win[N - 1]), "pairing with ld_win"
        _, up_c = space.closed_bounds("Dstar", N)
        res.records.append(BoundRecord(
            "Dstar", N, lo, wit, up_c if up_c is not None else space.c2 * N,
            "closed-form" if up_c is not None else "trivial", window, rtol=tol))
        lo_c, up_cd = space.closed_bounds("dstar", N)
        pairing = N / float(D_up(N))
        lo_d = max(pairing, lo_c) if lo_c is not None else pairing
        if dstar is not None:
            up_d, src = float(dstar[N - 1]), "window"
        elif up_cd is not None:
            up_d, src = up_cd, "closed-form"
        else:
            up_d, src = None, ""
        res.records.append(BoundRecord("dstar", N, lo_d, "pairing", up_d, src, window, rtol=tol))
    return res


def _dual_lower(space, row, M, n_random, rng):
    f = CoefVec.from_dense(row)
    P = dual_probe_rows(f, M, n_random, rng, space.is_complex)
    nums = np.abs(P @ row)
    dens = space.norm_batch(P)
    return float(np.max(np.where(dens > 0, nums / np.where(dens > 0, dens, 1), 0)))


def closed_form_records(space: SpaceModel, N_max: int) -> List[BoundRecord]:
    """Records for every registered closed form, ``N = 1..N_max``."""
    out = []
    for q, cf in space.closed_forms.items():
        for N in range(1, N_max + 1):
            lo, up = cf.bounds(N)
            out.append(BoundRecord(q, N, lo, f"{cf.provenance}: {cf.anchor}", up,
                                   "closed-form" if up is not None else ""))
    return out


# -- combined quantities -------------------------------------------------------

@dataclass(frozen=True)
class CombinedBound:
    N: int
    S: float
    T12: float
    T21: float
    OT: float
    U: float
    concave: bool

    @property
    def base(self) -> float:
        """``S_N`` when the first weight is concave on ``1..N``, else ``min T``."""
        return min(self.S, self.OT) if self.concave else self.OT

    @property
    def K(self) -> float:
        return self.base

    @property
    def L(self) -> float:
        return 1.0 + 3.0 * self.base

    @property
    def Ltilde(self) -> float:
        return 1.0 + 2.0 * self.base


def combined_bounds(eta1: WeightSeq, eta2: WeightSeq, N: int) -> CombinedBound:
    """Upper bounds ``K <= OT``, ``L <= 1 + 3 OT``, ``Ltilde <= 1 + 2 OT``.

    ``eta1`` and ``eta2`` must bound the norms of signed indicator sums and
    their duals; ``eta1`` must be quasi-concave.  When ``eta1`` is concave on
    ``1..N`` the smaller ``S_N`` is used instead.
    """
    c = combos(eta1, eta2, N)
    concave = prefix_concave_length(eta1) >= N
    return CombinedBound(N, c.S, c.T12, c.T21, c.OT, c.U, concave)


# -- superdemocracy -------------------------------------------------------------

def superdemocracy(space: SpaceModel, dem: DemocracyResult,
                   ddem: Optional[DualDemocracyResult] = None) -> List[BoundRecord]:
    """``mu_N``, the bidemocracy constant and the ``D* d / N`` band."""
    N_max = len(dem.D_win)
    D_up, Ds_up, _, _ = upper_weights(space, N_max)
    d_lo = {r.N: r.lower for r in dem.by("d")}
    out = []
    for N in range(1, N_max + 1):
        n = np.arange(1, N + 1)
        mu_lo = float(np.max(dem.D_win[:N] / dem.d_win[:N]))
        mu_up = float(max(D_up(int(k)) / d_lo[int(k)] for k in n))
        out.append(BoundRecord("mu", N, mu_lo, "window ratio", mu_up, "closed-form",
                               dem.window, rtol=1e-6 if space.approximate else 1e-9))
        if ddem is not None:
            bid_lo = float(np.max(dem.D_win[:N] * ddem.Dstar_win[:N] / n))
            bid_up = float(max(D_up(int(k)) * Ds_up(int(k)) / k for k in n))
            out.append(BoundRecord("bidem", N, bid_lo, "window product", bid_up, "closed-form",
                                   dem.window, rtol=1e-6 if space.approximate else 1e-9))
            band_lo = float(ddem.Dstar_win[N - 1] * d_lo[N] / N)
            band_up = float(Ds_up(N) * dem.d_win[N - 1] / N)
            out.append(BoundRecord("Dstar-band", N, band_lo, "D*_win d_low / N", band_up,
                                   "closed-form", dem.window,
                                   rtol=1e-6 if space.approximate else 1e-9))
    return out


# -- probes -----------------------------------------------------------------

@dataclass(frozen=True)
class Probe:
    """Test vector with optional explicit greedy sets ``{n: A}``."""

    x: CoefVec
    label: str = "probe"
    greedy: Dict[int, frozenset] = field(default_factory=dict)
    subsets: Tuple[frozenset, ...] = ()


def _greedy_set(p: Probe, n: int) -> frozenset:
    if n in p.greedy:
        return p.greedy[n]
    return greedy_sets(p.x, n)[0]


def qg_constants(space: SpaceModel, probes: Sequence[Probe], N_max: int) -> List[BoundRecord]:
    """Lower bounds for ``g_N``, ``gc_N`` and ``ghat_N`` from probe vectors.

    Upper bounds are attached only for registered facts (e.g. ``g <= 3``);
    ``ghat <= 2 min(g, gc)`` and ``gc <= 1 + g`` follow from them.
    """
    g = np.zeros(N_max)
    gc = np.zeros(N_max)
    gh = np.zeros(N_max)
    wg, wgc, wgh = [""] * N_max, [""] * N_max, [""] * N_max
    for p in probes:
        nx = space.norm(p.x)
        if nx == 0:
            continue
        Gs = {0: CoefVec()}
        for n in range(1, N_max + 1):
            Gs[n] = p.x.restrict(_greedy_set(p, n))
        for n in range(1, N_max + 1):
            a = space.norm(Gs[n]) / nx
            b = space.norm(p.x - Gs[n]) / nx
            if a > g[n - 1]:
                g[n - 1], wg[n - 1] = a, f"{p.label} G_{n}"
            if b > gc[n - 1]:
                gc[n - 1], wgc[n - 1] = b, f"{p.label} I-G_{n}"
            for k in range(n):
                c = space.norm(Gs[n] - Gs[k]) / nx
                if c > gh[n - 1]:
                    gh[n - 1], wgh[n - 1] = c, f"{p.label} G_{n}-G_{k}"
    for arr, wit in ((g, wg), (gc, wgc), (gh, wgh)):
        for i in range(1, N_max):
            if arr[i] < arr[i - 1]:
                arr[i], wit[i] = arr[i - 1], wit[i - 1]
    facts = space.facts
    ups = {
        "g": facts.get("g"),
        "gc": facts.get("gc", None if "g" not in facts else 1 + facts["g"]),
    }
    if "ghat" in facts:
        ups["ghat"] = facts["ghat"]
    elif ups["g"] is not None:
        ups["ghat"] = 2 * min(ups["g"], ups["gc"])
    else:
        ups["ghat"] = None
    out = []
    for q, arr, wit in (("g", g, wg), ("gc", gc, wgc), ("ghat", gh, wgh)):
        for N in range(1, N_max + 1):
            up = ups[q]
            out.append(BoundRecord(q, N, float(arr[N - 1]), wit[N - 1], up,
                                   "registered" if up is not None else ""))
    return out


def _sign_probes(window):
    for s in _signs(window):
        yield CoefVec.from_dense(s)


def k_constant(space: SpaceModel, N_max: int, probes: Sequence[Probe] = (),
               exhaustive_window: int = 0, eta1: Optional[WeightSeq] = None,
               eta2: Optional[WeightSeq] = None) -> List[BoundRecord]:
    """Bounds for the conditionality constants ``K_N``.

    The lower bound is the largest ``||P_A x|| / ||x||`` over probes (their
    explicit subsets, or every ``|A| <= N`` inside a small support), plus an
    exhaustive sweep over all sign vectors on ``{1..exhaustive_window}`` when
    requested.  The upper bound comes from the combined quantities of the
    upper democracy weights, and for KT spaces also from the direct bound
    ``H_N^{1/r'}``.
    """
    if eta1 is None or eta2 is None:
        eta1, eta2, _, _ = upper_weights(space, N_max)
    # any x supported inside A is fixed by P_A
    best = np.ones(N_max)
    wit = ["x supported in A"] * N_max

    def consider(x, A, label):
        nx = space.norm(x)
        if nx == 0 or not A:
            return
        r = space.norm(x.restrict(A)) / nx
        k = len(A)
        if k <= N_max and r > best[k - 1]:
            best[k - 1], wit[k - 1] = r, f"{label} {_fmt_set(A)}"

    for p in probes:
        if p.subsets:
            for A in p.subsets:
                consider(p.x, A, p.label)
        elif len(p.x) <= 16:
            supp = [int(n) for n in p.x.indices]
            for k in range(1, min(N_max, len(supp)) + 1):
                for A in itertools.combinations(supp, k):
                    consider(p.x, frozenset(A), p.label)
    if exhaustive_window:
        w = exhaustive_window
        X = _signs(w)
        nx = space.norm_batch(X)
        for k in range(1, min(N_max, w) + 1):
            for A in itertools.combinations(range(w), k):
                P = np.zeros_like(X)
                P[:, A] = X[:, A]
                r = space.norm_batch(P) / nx
                i = int(np.argmax(r))
                if r[i] > best[k - 1]:
                    best[k - 1] = r[i]
                    wit[k - 1] = f"signs on 1..{w} {_fmt_set(np.array(A) + 1, X[i])}"
    best = np.maximum.accumulate(best)
    for i in range(1, N_max):
        if best[i] == best[i - 1] and not wit[i]:
            wit[i] = wit[i - 1]
    out = []
    kt = space.name == "kt"
    for N in range(1, N_max + 1):
        cb = combined_bounds(eta1, eta2, N)
        up, src = cb.K, "combined"
        if kt:
            rp = conjugate_exponent(space.params["r"])
            direct = 1.0 if math.isinf(rp) else math.fsum(1.0 / np.arange(1, N + 1)) ** (1 / rp)
            if direct < up:
                up, src = direct, "direct"
        if "K" in space.facts and space.facts["K"] < up:
            up, src = space.facts["K"], "registered"
        out.append(BoundRecord("K", N, float(best[N - 1]), wit[N - 1], up, src,
                               rtol=1e-6 if space.approximate else 1e-9))
    return out


@dataclass(frozen=True)
class LebesgueWitness:
    """A vector with a chosen greedy set and competing ``N``-term approximants."""

    x: CoefVec
    N: int
    greedy_set: Optional[frozenset] = None
    competitors: Tuple[CoefVec, ...] = ()
    label: str = "witness"


def lebesgue_bounds(space: SpaceModel, N_max: int, witnesses: Sequence[LebesgueWitness] = (),
                    eta1: Optional[WeightSeq] = None,
                    eta2: Optional[WeightSeq] = None) -> List[BoundRecord]:
    """Two-sided bounds for ``L_N`` and ``Ltilde_N``.

    Lower bounds: ``||x - G_N x|| / sigma_upper`` and ``||x - G_N x|| /
    sigma_tilde`` over the witnesses.  Upper bounds: ``1 + 3 base`` and
    ``1 + 2 base`` with ``base`` from :func:`combined_bounds`.
    """
    if eta1 is None or eta2 is None:
        eta1, eta2, _, _ = upper_weights(space, N_max)
    lowL = {N: (0.0, "") for N in range(1, N_max + 1)}
    lowLt = dict(lowL)
    for w in witnesses:
        if w.N > N_max:
            continue
        for z in w.competitors:
            if len(z) > w.N:
                raise ValueError(f"{w.label}: competitor supported on more than N indices")
        out = greedy_residual(space, w.x, w.N, greedy_set=w.greedy_set)
        st = sigma_tilde(space, w.x, w.N).value
        su = sigma_upper(space, w.x, w.N, w.competitors)
        if su > 0 and out.residual_norm / su > lowL[w.N][0]:
            lowL[w.N] = (out.residual_norm / su, w.label)
        if st > 0 and out.residual_norm / st > lowLt[w.N][0]:
            lowLt[w.N] = (out.residual_norm / st, w.label)
    recs = []
    for N in range(1, N_max + 1):
        cb = combined_bounds(eta1, eta2, N)
        tol = 1e-6 if space.approximate else 1e-9
        recs.append(BoundRecord("L", N, lowL[N][0] or None, lowL[N][1], cb.L, "combined", rtol=tol))
        recs.append(BoundRecord("Ltilde", N, lowLt[N][0] or None, lowLt[N][1], cb.Ltilde,
                                "combined", rtol=tol))
    return recs


# -- corollaries ---------------------------------------------------------------

@dataclass(frozen=True)
class CorollaryCheck:
    name: str
    N: int
    lhs: float
    rhs: float
    passed: bool
    conditional: bool = False
    note: str = ""


BAND = (0.1, 10.0)


def derived_corollaries(space: SpaceModel, N_max: int,
                        dem: Optional[DemocracyResult] = None,
                        qg: Sequence[BoundRecord] = (),
                        k_records: Sequence[BoundRecord] = ()) -> List[CorollaryCheck]:
    """Numerical instances of the consequences of the combined bounds.

    * ``OT_N <= min(c2 D(N), c1 D*(N)) <= c1 c2 N`` on the upper weights.
    * ``D*(N) <= sum_j ghat_j / d(j)`` and ``T_N <= sum_j ghat_j mu_j / j``
      fed with estimated ``ghat`` (conditional).
    * ``K_N / (g_N ln(N+1))`` inside the band ``[1/10, 10]`` when ``g`` has a
      registered upper bound.
    """
    eta1, eta2, _, _ = upper_weights(space, N_max)
    out = []
    for N in range(1, N_max + 1):
        c = combos(eta1, eta2, N)
        mid = min(space.c2 * eta1(N), space.c1 * eta2(N))
        top = space.c1 * space.c2 * N
        ok = c.OT <= mid * (1 + 1e-12) and mid <= top * (1 + 1e-12)
        out.append(CorollaryCheck("OT<=min(c2 D,c1 D*)<=c1c2N", N, c.OT, mid, ok,
                                  note=f"c1c2N={top:g}"))
    ghat = {r.N: r.lower for r in qg if r.quantity == "ghat"}
    if dem is not None and ghat:
        d_up = dem.d_win
        mu = np.maximum.accumulate(dem.D_win / dem.d_win)
        for N in range(1, min(N_max, len(d_up)) + 1):
            if N not in ghat:
                continue
            rhs = math.fsum(ghat[j] / d_up[j - 1] for j in range(1, N + 1))
            out.append(CorollaryCheck("D*<=sum ghat/d", N, float(eta2(N)), rhs, eta2(N) <= rhs,
                                      conditional=True,
                                      note="estimated ghat and window d; not asserted"))
            rhs2 = math.fsum(ghat[j] * mu[j - 1] / j for j in range(1, N + 1))
            T = combos(eta1, eta2, N).T12
            out.append(CorollaryCheck("T<=sum ghat mu/j", N, T, rhs2, T <= rhs2,
                                      conditional=True,
                                      note="estimated ghat and window mu; not asserted"))
    g_up = space.facts.get("g")
    if g_up is not None:
        for r in k_records:
            if r.quantity != "K" or r.lower is None:
                continue
            ratio = r.lower / (g_up * math.log(r.N + 1))
            out.append(CorollaryCheck("K/(g ln(N+1)) in band", r.N, ratio, BAND[1],
                                      ratio <= BAND[1], note="lower K over registered g"))
    return out
