"""Greedy orderings, greedy sets, projections and N-term errors."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .lorentz import CoefVec
from .spaces import SpaceModel

__all__ = [
    "GreedyOutcome",
    "Projection",
    "SigmaTilde",
    "EnumerationBudgetError",
    "greedy_order",
    "greedy_sets",
    "is_greedy_set",
    "project",
    "greedy_residual",
    "sigma_tilde",
    "sigma_upper",
]

MAX_GREEDY_SETS = 10_000
SIGMA_BUDGET = 2_000_000


class EnumerationBudgetError(RuntimeError):
    pass


def greedy_order(x: CoefVec, tie: str = "lowest-index"):
    """Greedy bijection onto the support: moduli non-increasing.

    With ``tie="lowest-index"`` equal moduli keep ascending index order and a
    single permutation is returned.  ``tie="enumerate-all"`` returns every
    greedy bijection (at most ``MAX_GREEDY_SETS``).
    """
    mods = x.moduli()
    order = np.lexsort((x.indices, -mods))
    base = tuple(int(n) for n in x.indices[order])
    if tie == "lowest-index":
        return base
    if tie != "enumerate-all":
        raise ValueError(f"unknown tie policy {tie!r}")
    groups = []
    sorted_mods = mods[order]
    start = 0
    for i in range(1, len(base) + 1):
        if i == len(base) or sorted_mods[i] != sorted_mods[start]:
            groups.append(base[start:i])
            start = i
    count = 1
    for g in groups:
        count *= math.factorial(len(g))
        if count > MAX_GREEDY_SETS:
            raise EnumerationBudgetError("too many greedy bijections to enumerate")
    return [sum(p, ()) for p in itertools.product(*(itertools.permutations(g) for g in groups))]


def _padded(x: CoefVec, chosen: Sequence[int], N: int) -> frozenset:
    """Complete ``chosen`` to ``N`` indices with the smallest unused ones."""
    A = set(chosen)
    n = 1
    while len(A) < N:
        if n not in A and x[n] == 0:
            A.add(n)
        n += 1
    return frozenset(A)


def greedy_sets(x: CoefVec, N: int, tie: str = "lowest-index") -> List[frozenset]:
    """Greedy sets of order ``N``.

    When the support has fewer than ``N`` elements the set is completed with
    the smallest indices outside the support (zero coefficients).
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    order = greedy_order(x, "lowest-index")
    if N == 0:
        return [frozenset()]
    if N >= len(order):
        return [_padded(x, order, N)]
    if tie == "lowest-index":
        return [frozenset(order[:N])]
    if tie != "enumerate-all":
        raise ValueError(f"unknown tie policy {tie!r}")
    mods = x.moduli()
    thr = np.sort(mods)[::-1][N - 1]
    above = [int(n) for n, m in zip(x.indices, mods) if m > thr]
    tied = [int(n) for n, m in zip(x.indices, mods) if m == thr]
    k = N - len(above)
    if math.comb(len(tied), k) > MAX_GREEDY_SETS:
        raise EnumerationBudgetError("too many greedy sets to enumerate")
    return [frozenset(above) | frozenset(c) for c in itertools.combinations(tied, k)]


def is_greedy_set(x: CoefVec, A: Iterable[int], N: Optional[int] = None) -> bool:
    A = frozenset(int(a) for a in A)
    if N is not None and len(A) != N:
        return False
    inside = [abs(x[n]) for n in A]
    outside = [abs(v) for n, v in x.items() if n not in A]
    if not inside or not outside:
        return True
    return min(inside) >= max(outside)


@dataclass(frozen=True)
class Projection:
    vector: CoefVec
    norm: float


def project(space: SpaceModel, x: CoefVec, A: Iterable[int], eps=None) -> Projection:
    """``P_A x`` or the sign-twisted ``P_{eps A} x`` with its norm."""
    A = frozenset(int(a) for a in A)
    v = x.restrict(A)
    if eps is not None:
        v = v.twisted(eps)
    return Projection(v, space.norm(v))


@dataclass(frozen=True)
class GreedyOutcome:
    ordering: tuple
    set: frozenset
    all_sets_count: int
    approximant: CoefVec
    residual: CoefVec
    residual_norm: float


def greedy_residual(space: SpaceModel, x: CoefVec, N: int, tie: str = "lowest-index",
                    greedy_set: Optional[Iterable[int]] = None) -> GreedyOutcome:
    """``x - G_N x`` for a chosen greedy set.

    ``greedy_set`` fixes the set explicitly (it must be greedy for ``x``).
    Under ``tie="enumerate-all"`` the worst residual over all greedy sets is
    reported.
    """
    order = greedy_order(x)
    if greedy_set is not None:
        A = frozenset(int(a) for a in greedy_set)
        if len(A) != N or not is_greedy_set(x, A, N):
            raise ValueError("the supplied set is not a greedy set of order N")
        candidates = [A]
    else:
        candidates = greedy_sets(x, N, tie)
    best = None
    for A in candidates:
        approx = x.restrict(A)
        res = x - approx
        r = space.norm(res)
        if best is None or r > best[3]:
            best = (A, approx, res, r)
    A, approx, res, r = best
    return GreedyOutcome(order, A, len(candidates), approx, res, r)


@dataclass(frozen=True)
class SigmaTilde:
    value: float
    best_set: frozenset


def sigma_tilde(space: SpaceModel, x: CoefVec, N: int, budget: int = SIGMA_BUDGET) -> SigmaTilde:
    """Exact expansional error ``min_{|A| <= N} ||x - P_A x||``.

    Uses the space's dedicated solver when one is registered, otherwise full
    enumeration of subsets of the support.  Ties in the minimum go to the
    first set in enumeration order.
    """
    supp = [int(n) for n in x.indices]
    k_max = min(N, len(supp))
    if k_max == len(supp):
        return SigmaTilde(0.0, frozenset(supp))
    if space.sigma_tilde_solver is not None:
        value, A = space.sigma_tilde_solver(x, N)
        return SigmaTilde(value, A)
    total = sum(math.comb(len(supp), k) for k in range(k_max + 1))
    if total > budget:
        raise EnumerationBudgetError(
            f"{total} subsets exceed the budget {budget}; use sigma_upper instead")
    M = x.max_index
    base = x.to_dense(M)
    best_val, best_set = math.inf, frozenset()
    chunk = []

    def flush():
        nonlocal best_val, best_set
        R = np.repeat(base[None, :], len(chunk), axis=0)
        for r, A in enumerate(chunk):
            if A:
                R[r, np.array(A) - 1] = 0
        vals = space.norm_batch(R)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val, best_set = float(vals[i]), frozenset(chunk[i])
        chunk.clear()

    for k in range(k_max + 1):
        for A in itertools.combinations(supp, k):
            chunk.append(A)
            if len(chunk) >= 4096:
                flush()
    if chunk:
        flush()
    return SigmaTilde(best_val, best_set)


def sigma_upper(space: SpaceModel, x: CoefVec, N: int,
                competitors: Sequence[CoefVec] = (), budget: int = SIGMA_BUDGET) -> float:
    """Certified upper bound for the best ``N``-term error.

    Minimum of ``||x - z||`` over the competitors, of the exact expansional
    error when affordable, and of ``||x||`` (the zero approximant).
    """
    for z in competitors:
        if len(z) > N:
            raise ValueError("competitor supported on more than N indices")
    best = space.norm(x)
    for z in competitors:
        best = min(best, space.norm(x - z))
    try:
        best = min(best, sigma_tilde(space, x, N, budget).value)
    except EnumerationBudgetError:
        pass
    return best
