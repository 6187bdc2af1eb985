"""Extremal vectors that certify lower bounds in the registered examples."""

from __future__ import annotations

import numpy as np

from .constants import LebesgueWitness, Probe
from .lorentz import CoefVec

__all__ = [
    "difference_lebesgue_tilde",
    "difference_lebesgue",
    "difference_conditionality",
    "difference_flat",
    "difference_spread",
    "lindenstrauss_spread",
    "kt_conditionality",
    "kt_alternating_functional",
    "kt1_greedy",
    "blocks_greedy",
    "kt_bp_norm",
]


def difference_lebesgue_tilde(N: int) -> LebesgueWitness:
    """``x = sum_{j<=2N+1} x_j + sum_{2N+1<=j<=3N} x_{2j}`` with ``G_N x = sum_{j<=N} x_{2j}``.

    Residual norm ``4N+1`` while removing the tail gives ``sigma~ <= 1``.
    """
    coef = {j: 1.0 for j in range(1, 2 * N + 2)}
    for j in range(2 * N + 1, 3 * N + 1):
        coef[2 * j] = coef.get(2 * j, 0.0) + 1.0
    G = frozenset(2 * j for j in range(1, N + 1))
    return LebesgueWitness(CoefVec(coef), N, G, (), f"diff-Ltilde N={N}")


def difference_lebesgue(N: int) -> LebesgueWitness:
    """``x = x_1 + sum (x_{4j-2} + x_{4j-1} - x_{4j} + x_{4j+1})``.

    ``G_N x = sum x_{4j-2}`` leaves a residual of norm ``1+6N``; the
    competitor ``z = -2 sum x_{4j}`` gives ``||x - z|| = 1``.
    """
    coef = {1: 1.0}
    for j in range(1, N + 1):
        coef[4 * j - 2] = 1.0
        coef[4 * j - 1] = 1.0
        coef[4 * j] = -1.0
        coef[4 * j + 1] = 1.0
    G = frozenset(4 * j - 2 for j in range(1, N + 1))
    z = CoefVec({4 * j: -2.0 for j in range(1, N + 1)})
    return LebesgueWitness(CoefVec(coef), N, G, (z,), f"diff-L N={N}")


def difference_conditionality(N: int) -> Probe:
    """Ones on ``1..2N+1`` projected onto the even indices: ratio ``2N``."""
    x = CoefVec({j: 1.0 for j in range(1, 2 * N + 2)})
    A = frozenset(range(2, 2 * N + 1, 2))
    return Probe(x, f"diff-K N={N}", subsets=(A,))


def difference_flat(N: int) -> CoefVec:
    return CoefVec({j: 1.0 for j in range(1, N + 1)})


def difference_spread(N: int) -> CoefVec:
    return CoefVec({2 * j: 1.0 for j in range(1, N + 1)})


def lindenstrauss_spread(N: int) -> CoefVec:
    """``sum_{n<=N} x_{3^n}``: disjoint ambient supports, norm ``2N``."""
    return CoefVec({3**n: 1.0 for n in range(1, N + 1)})


def kt_conditionality(p: float, N: int) -> Probe:
    """``x = sum_{n<=2N} (-1)^n n^{-1/p} e_n`` projected onto the even indices."""
    n = np.arange(1, 2 * N + 1, dtype=float)
    x = CoefVec.from_dense((-1.0) ** n * n ** (-1.0 / p))
    A = frozenset(range(2, 2 * N + 1, 2))
    return Probe(x, f"kt-K N={N}", subsets=(A,))


def kt_alternating_functional(N: int):
    """Functional ``sum_{n<=N} (-1)^n e_n*`` and the matching probe
    ``sum (-1)^n/n e_n``."""
    n = np.arange(1, N + 1, dtype=float)
    f = CoefVec.from_dense((-1.0) ** n)
    x = CoefVec.from_dense((-1.0) ** n / n)
    return f, x


def kt1_greedy(n: int):
    """Vector with ``||x||_{b_1} = 1`` and ``||G_N x||_{b_1} = n+1``, ``N = 2^{n+1}-1``.

    Blocks ``k = 0..n``: ``2^k`` entries ``2^{-k}`` then ``2^{n+k}`` entries
    ``-2^{-(n+k)}``.  The greedy set (all positive entries) is returned
    explicitly because the smallest positive value ties with the first
    negative block.
    """
    vals, pos = [], []
    idx = 1
    for k in range(n + 1):
        m = 1 << k
        vals.extend([2.0**-k] * m)
        pos.extend(range(idx, idx + m))
        idx += m
        m2 = 1 << (n + k)
        vals.extend([-(2.0 ** -(n + k))] * m2)
        idx += m2
    x = CoefVec.from_dense(np.array(vals))
    N = (1 << (n + 1)) - 1
    return x, N, frozenset(pos)


def blocks_greedy(N: int):
    """``x = sum_{j<2N} (-1)^j e_{2^N+j}`` on ``Delta_N`` with ``G_N`` on even offsets."""
    base = 1 << N
    x = CoefVec({base + j: (-1.0) ** j for j in range(2 * N)})
    G = frozenset(base + 2 * l for l in range(N))
    return Probe(x, f"blocks N={N}", greedy={N: G})


def kt_bp_norm(x: CoefVec, p: float) -> float:
    """``sup_N |sum_{n<=N} x_n n^{-1/p'}|``, the second part of the KT norm."""
    d = x.to_dense()
    n = np.arange(1, d.size + 1, dtype=float)
    return float(np.abs(np.cumsum(d / n ** (1.0 - 1.0 / p))).max()) if d.size else 0.0
