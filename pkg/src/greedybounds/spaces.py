"""Norm oracles for concrete biorthogonal systems.

Every space works on coefficient sequences: a vector ``x = sum_n a_n e_n``
is represented by its coefficients ``a``, and a functional
``f = sum_n c_n e_n*`` by ``c``.  Pairing is the bilinear sum
``sum_n c_n a_n``.

Norm oracles are batched: they take a dense array of shape ``(K, M)``
(coefficients ``1..M`` in each row) and return ``K`` norms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .lorentz import CoefVec
from .weights import WeightSeq, classify, parse_weight

__all__ = [
    "ClosedForm",
    "SpaceModel",
    "DualNormResult",
    "make_space",
    "norm",
    "dual_pairing",
    "dual_norm",
    "dual_probe_rows",
    "lindenstrauss_primal_vector",
    "lindenstrauss_dual_vector",
    "lindenstrauss_dual_c0_democracy",
    "trig_frequency",
    "trig_index",
    "conjugate_exponent",
]

_ROW_BUDGET = 1 << 21


def conjugate_exponent(p: float) -> float:
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _inv(p: float) -> float:
    return 0.0 if math.isinf(p) else 1.0 / p


# -- closed forms -------------------------------------------------------------

@dataclass(frozen=True)
class ClosedForm:
    """Known bounds for a democracy-type quantity as functions of ``N``.

    Either side may be ``None``.  ``provenance`` is ``literature``,
    ``trivial`` or ``derived``; ``anchor`` says where the value comes from.
    """

    lower: Optional[Callable[[int], float]]
    upper: Optional[Callable[[int], float]]
    provenance: str
    anchor: str

    def bounds(self, N: int) -> Tuple[Optional[float], Optional[float]]:
        lo = None if self.lower is None else float(self.lower(N))
        up = None if self.upper is None else float(self.upper(N))
        return lo, up

    @property
    def exact(self) -> bool:
        return self.lower is not None and self.lower is self.upper


def _exact(fn, provenance, anchor):
    return ClosedForm(fn, fn, provenance, anchor)


@dataclass(frozen=True, eq=False)
class SpaceModel:
    """A named norm oracle on coefficient sequences.

    ``dual_batch`` computes the exact dual norm when it is known;
    ``dual_upper_batch`` an upper bound when only that is known.
    ``c1``/``c2`` are ``sup ||e_n||`` and ``sup ||e_n*||_*`` (upper values).
    """

    name: str
    descriptor: str
    field: str
    batch_norm: Callable[[np.ndarray], np.ndarray]
    params: Dict = field(default_factory=dict)
    dual_batch: Optional[Callable[[np.ndarray], np.ndarray]] = None
    dual_upper_batch: Optional[Callable[[np.ndarray], np.ndarray]] = None
    closed_forms: Dict[str, ClosedForm] = field(default_factory=dict)
    c1: float = 1.0
    c2: float = 1.0
    approximate: bool = False
    facts: Dict[str, float] = field(default_factory=dict)
    sigma_tilde_solver: Optional[Callable] = None
    row_cost: int = 1
    max_index: Optional[int] = None
    notes: Tuple[str, ...] = ()

    @property
    def is_complex(self) -> bool:
        return self.field == "complex"

    def _prepare(self, X) -> np.ndarray:
        X = np.asarray(X)
        if X.ndim == 1:
            X = X[None, :]
        if np.iscomplexobj(X):
            if not self.is_complex:
                if np.any(X.imag != 0):
                    raise ValueError(f"space {self.descriptor} has real scalars")
                X = X.real
        elif self.is_complex:
            X = X.astype(complex)
        else:
            X = X.astype(float)
        if self.max_index is not None and X.shape[-1] > self.max_index:
            if np.any(X[..., self.max_index:] != 0):
                raise ValueError(
                    f"space {self.descriptor} resolves indices up to {self.max_index} only")
            X = X[..., : self.max_index]
        return X

    def _chunked(self, fn, X) -> np.ndarray:
        X = self._prepare(X)
        lead = X.shape[:-1]
        X = X.reshape(-1, X.shape[-1])
        if X.shape[-1] == 0:
            return np.zeros(lead)
        step = max(1, _ROW_BUDGET // max(self.row_cost, X.shape[-1]))
        out = np.concatenate([fn(X[i: i + step]) for i in range(0, max(X.shape[0], 1), step)]) \
            if X.shape[0] else np.zeros(0)
        return out.reshape(lead)

    def norm_batch(self, X) -> np.ndarray:
        return self._chunked(self.batch_norm, X)

    def dual_batch_exact(self, C) -> Optional[np.ndarray]:
        return None if self.dual_batch is None else self._chunked(self.dual_batch, C)

    def dual_batch_upper(self, C) -> Optional[np.ndarray]:
        if self.dual_batch is not None:
            return self._chunked(self.dual_batch, C)
        if self.dual_upper_batch is not None:
            return self._chunked(self.dual_upper_batch, C)
        return None

    def norm(self, x: CoefVec) -> float:
        return float(self.norm_batch(_dense(x))[0])

    def closed_bounds(self, quantity: str, N: int):
        cf = self.closed_forms.get(quantity)
        return (None, None) if cf is None else cf.bounds(N)

    def __repr__(self):
        return f"SpaceModel({self.descriptor!r})"


def _dense(x: CoefVec, M: Optional[int] = None) -> np.ndarray:
    M = max(x.max_index, 1) if M is None else M
    return x.to_dense(M)[None, :]


# -- batched norms ------------------------------------------------------------

def _lp_batch(p):
    def f(X):
        A = np.abs(X)
        if math.isinf(p):
            return A.max(axis=-1)
        return (A**p).sum(axis=-1) ** (1.0 / p)
    return f


def _lorentz_batch(p, r):
    """``l^{p,r}`` norm ``(sum (j^{1/p} x*_j)^r / j)^{1/r}``."""
    ip = _inv(p)

    def f(X):
        A = -np.sort(-np.abs(X), axis=-1)
        j = np.arange(1, A.shape[-1] + 1, dtype=float)
        t = A * j**ip
        if math.isinf(r):
            return t.max(axis=-1)
        return (t**r / j).sum(axis=-1) ** (1.0 / r)
    return f


def _difference_batch(X):
    nxt = np.concatenate([X[..., 1:], np.zeros(X.shape[:-1] + (1,))], axis=-1)
    return np.abs(X - nxt).sum(axis=-1)


def _summing_batch(X):
    return np.abs(np.cumsum(X, axis=-1)).max(axis=-1)


def _lindenstrauss_batch(X):
    K, M = X.shape
    amb = np.zeros((K, 2 * M + 2), dtype=X.dtype)
    amb[:, :M] = X
    m = np.arange(3, 2 * M + 3)
    parent = (m - 1) // 2
    amb[:, m - 1] -= 0.5 * X[:, parent - 1]
    return np.abs(amb).sum(axis=-1)


def _tree_levels(M):
    """Index ranges ``[2^k - 1, 2^{k+1} - 2]`` of the binary tree with
    children ``2n+1, 2n+2``, deepest first."""
    levels = []
    k = 1
    while (1 << k) - 1 <= M:
        levels.append(((1 << k) - 1, min((1 << (k + 1)) - 2, M)))
        k += 1
    return levels[::-1]


def _lindenstrauss_dual_coords(C):
    """Ambient ``c0`` coordinates of ``sum_n c_n y_n``.

    ``v(m) = c_m + (v(2m+1) + v(2m+2))/2``, evaluated level by level.
    """
    K, M = C.shape
    V = np.zeros((K, 2 * M + 3), dtype=C.dtype)
    V[:, 1: M + 1] = C
    for lo, hi in _tree_levels(M):
        m = np.arange(lo, hi + 1)
        V[:, m] += 0.5 * (V[:, 2 * m + 1] + V[:, 2 * m + 2])
    return V[:, 1: M + 1]


def _c0_batch(C):
    return np.abs(_lindenstrauss_dual_coords(C)).max(axis=-1)


def _blocks_batch(omega: np.ndarray):
    def f(X):
        K, M = X.shape
        best = np.abs(X).max(axis=-1)
        j = 1
        while (1 << j) <= M:
            lo = (1 << j) - 1
            hi = min(lo + 2 * j, M)
            part = np.abs(np.cumsum(X[:, lo:hi], axis=-1)).max(axis=-1)
            best = np.maximum(best, omega[j - 1] / j * part)
            j += 1
        return best
    return f


def _kt_batch(p, r):
    lor = _lorentz_batch(p, r)
    ipp = 1.0 - 1.0 / p

    def f(X):
        n = np.arange(1, X.shape[-1] + 1, dtype=float)
        bp = np.abs(np.cumsum(X / n**ipp, axis=-1)).max(axis=-1)
        return np.maximum(lor(X), bp)
    return f


# -- trigonometric system ---------------------------------------------------

def _zig(n):
    n = np.asarray(n)
    return np.where(n % 2 == 0, n // 2, -((n - 1) // 2))


def trig_frequency(n, d: int = 1):
    """Frequency of the ``n``-th trigonometric basis element (1-based).

    ``d = 1``: ``1 -> 0, 2 -> 1, 3 -> -1, 4 -> 2, ...``.  ``d = 2``: Cantor
    unpairing of ``n - 1`` followed by the one-dimensional ordering in each
    coordinate.
    """
    n = np.asarray(n, dtype=np.int64)
    if d == 1:
        return _zig(n)
    m = n - 1
    w = ((np.sqrt(8 * m.astype(float) + 1) - 1) // 2).astype(np.int64)
    # guard against rounding in the square root
    w = np.where(w * (w + 1) // 2 > m, w - 1, w)
    w = np.where((w + 1) * (w + 2) // 2 <= m, w + 1, w)
    b = m - w * (w + 1) // 2
    a = w - b
    return np.stack([_zig(a + 1), _zig(b + 1)], axis=-1)


def trig_index(freq) -> int:
    """Inverse of :func:`trig_frequency`."""
    def one(k):
        k = int(k)
        return 2 * k if k > 0 else 2 * (-k) + 1
    if np.ndim(freq) == 0:
        return one(freq)
    a, b = (one(k) - 1 for k in freq)
    w = a + b
    return w * (w + 1) // 2 + b + 1


def _trig_batch(p, d, grid, M_max):
    freqs = trig_frequency(np.arange(1, M_max + 1), d)
    pos = np.mod(freqs, grid)

    def values(X):
        K, M = X.shape
        if d == 1:
            F = np.zeros((K, grid), dtype=complex)
            F[:, pos[:M]] = X
            return np.fft.ifft(F, axis=-1) * grid
        F = np.zeros((K, grid, grid), dtype=complex)
        F[:, pos[:M, 0], pos[:M, 1]] = X
        return (np.fft.ifft2(F, axes=(-2, -1)) * grid * grid).reshape(K, -1)

    def f(X):
        A = np.abs(values(X))
        if math.isinf(p):
            return A.max(axis=-1)
        return np.mean(A**p, axis=-1) ** (1.0 / p)
    return f


# -- ambient vectors ----------------------------------------------------------

def lindenstrauss_primal_vector(n: int) -> CoefVec:
    """Ambient ``l1`` vector ``e_n - e_{2n+1}/2 - e_{2n+2}/2``."""
    return CoefVec({n: 1.0, 2 * n + 1: -0.5, 2 * n + 2: -0.5})


def lindenstrauss_dual_vector(n: int) -> CoefVec:
    """Ambient ``c0`` vector ``y_n = sum_j 2^{-j} e_{gamma_j(n)}``.

    ``gamma_0 = n`` and ``gamma_{j+1} = floor((gamma_j - 1)/2)``; the sum stops
    at the first ``gamma <= 0``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    out, g, w = {}, n, 1.0
    while g > 0:
        out[g] = w
        g = (g - 1) // 2
        w *= 0.5
    return CoefVec(out)


def lindenstrauss_dual_c0_democracy(N: int) -> float:
    """Largest ``c0`` norm of ``sum_{n in A} eps_n y_n`` over ``|A| = N``.

    Fill the top ``k`` tree levels below a root (each level adds 1) and put
    the remaining ``N - 2^k + 1`` indices one level deeper (each adds ``2^-k``).
    """
    k = int(math.floor(math.log2(N + 1)))
    while (1 << (k + 1)) <= N + 1:
        k += 1
    while (1 << k) > N + 1:
        k -= 1
    return k + (N - (1 << k) + 1) / (1 << k)


# -- the difference-space expansional error -----------------------------------

def _difference_sigma_tilde(x: CoefVec, N: int):
    """Exact ``min_{|A|<=N} ||x - P_A x||`` for the difference norm.

    Dynamic program along the index line; the state is the number of removed
    indices and whether the previous coefficient was removed.
    """
    if np.iscomplexobj(x.values):
        raise ValueError("difference space has real scalars")
    L = x.max_index
    b = x.to_dense(L) if L else np.zeros(0)
    N = min(N, len(x))
    INF = math.inf
    # cost[k][z]: best partial sum with k removals, z = previous removed
    cost = np.full((N + 1, 2), INF)
    cost[0, 1] = 0.0
    back = []
    prev_val = lambda pos, z: 0.0 if (z or pos == 0) else b[pos - 1]
    for pos in range(1, L + 1):
        new = np.full((N + 1, 2), INF)
        arg = np.full((N + 1, 2), -1, dtype=np.int64)
        removable = b[pos - 1] != 0
        for k in range(N + 1):
            for z in (0, 1):
                c = cost[k, z]
                if c == INF:
                    continue
                # the norm has no edge before the first coefficient
                pv = prev_val(pos - 1, z)
                edge = pos > 1
                keep = c + (abs(pv - b[pos - 1]) if edge else 0.0)
                if keep < new[k, 0]:
                    new[k, 0], arg[k, 0] = keep, z
                if removable and k < N:
                    rem = c + (abs(pv) if edge else 0.0)
                    if rem < new[k + 1, 1]:
                        new[k + 1, 1], arg[k + 1, 1] = rem, 2 + z
        back.append(arg)
        cost = new
    best, bk, bz = INF, 0, 0
    for k in range(N + 1):
        for z in (0, 1):
            c = cost[k, z]
            if c == INF:
                continue
            total = c + abs(prev_val(L, z))
            if total < best - 1e-15:
                best, bk, bz = total, k, z
    removed = []
    k, z = bk, bz
    for pos in range(L, 0, -1):
        a = back[pos - 1][k, z]
        if z == 1:
            removed.append(pos)
            k -= 1
        z = a % 2
    return float(best), frozenset(removed)


# -- registry -----------------------------------------------------------------

def _harmonic_pow(N, s):
    j = np.arange(1, N + 1, dtype=float)
    return math.fsum(j**s)


def _holder_dual(p, r):
    """Upper bound for the dual norm through ``l^{p,r}``: ``l^{p',r'}`` norm."""
    return _lorentz_batch(conjugate_exponent(p), conjugate_exponent(r))


def _lp_space(p):
    pp = conjugate_exponent(p)
    ip, ipp = _inv(p), _inv(pp)
    cfs = {
        "D": _exact(lambda N: N**ip, "trivial", "symmetric norm of a flat vector"),
        "d": _exact(lambda N: N**ip, "trivial", "symmetric norm of a flat vector"),
        "Dstar": _exact(lambda N: N**ipp, "trivial", "conjugate exponent"),
        "dstar": _exact(lambda N: N**ipp, "trivial", "conjugate exponent"),
    }
    return dict(batch_norm=_lp_batch(p), dual_batch=_lp_batch(pp), closed_forms=cfs,
                facts={"g": 1.0, "gc": 1.0, "ghat": 1.0, "K": 1.0}, params={"p": p})


def _lorentz_space(p, r):
    pp, rp = conjugate_exponent(p), conjugate_exponent(r)
    ip, ipp = _inv(p), _inv(pp)

    def flat(N):
        if math.isinf(r):
            return N**ip
        return _harmonic_pow(N, r * ip - 1) ** (1 / r)

    def holder(N):
        if math.isinf(rp):
            return N**ipp
        return _harmonic_pow(N, rp * ipp - 1) ** (1 / rp)

    cfs = {
        "D": _exact(flat, "trivial", "symmetric norm of a flat vector"),
        "d": _exact(flat, "trivial", "symmetric norm of a flat vector"),
        "Dstar": ClosedForm(lambda N: N / flat(N), holder, "trivial", "pairing and Hölder bounds"),
        "dstar": ClosedForm(lambda N: N / flat(N), holder, "trivial", "pairing and Hölder bounds"),
    }
    return dict(batch_norm=_lorentz_batch(p, r), dual_upper_batch=_holder_dual(p, r),
                closed_forms=cfs, facts={"K": 1.0}, params={"p": p, "r": r})


def _difference_space():
    lit = "difference basis democracy"
    cfs = {
        "D": _exact(lambda N: 2.0 * N, "literature", lit),
        "d": _exact(lambda N: 1.0, "literature", lit),
        "Dstar": _exact(lambda N: float(N), "literature", lit),
        "dstar": _exact(lambda N: 1.0, "literature", lit),
    }
    return dict(batch_norm=_difference_batch, dual_batch=_summing_batch, closed_forms=cfs,
                c1=2.0, c2=1.0, sigma_tilde_solver=_difference_sigma_tilde, field="real")


def _summing_space():
    lit = "summing basis democracy"
    cfs = {
        "D": _exact(lambda N: float(N), "literature", lit),
        "d": _exact(lambda N: 1.0, "literature", lit),
        "Dstar": _exact(lambda N: 2.0 * N, "literature", lit),
        "dstar": _exact(lambda N: 1.0, "literature", lit),
    }
    return dict(batch_norm=_summing_batch, dual_batch=_difference_batch, closed_forms=cfs,
                c1=1.0, c2=2.0, field="real")


def _lindenstrauss_space():
    cfs = {
        "D": _exact(lambda N: 2.0 * N, "literature", "Lindenstrauss basis upper democracy"),
        "d": ClosedForm(lambda N: N / 2.0, lambda N: 2.0 * N, "literature",
                        "Lindenstrauss basis lower democracy band"),
        "Dstar": ClosedForm(None, lindenstrauss_dual_c0_democracy, "derived",
                            "c0 surrogate of the dual norm, filled binary-tree levels"),
        "dstar": ClosedForm(None, lambda N: 1.0, "literature", "alternating dual sum in c0"),
    }
    return dict(batch_norm=_lindenstrauss_batch, dual_upper_batch=_c0_batch, closed_forms=cfs,
                c1=2.0, c2=1.0, facts={"g": 3.0}, field="real",
                notes=("dual norm represented by its c0 surrogate, an upper bound",))


def _lindenstrauss_dual_space():
    cfs = {
        "D": _exact(lindenstrauss_dual_c0_democracy, "derived",
                    "filled binary-tree levels in c0"),
        "d": _exact(lambda N: 1.0, "literature", "lower democracy of the dual system in c0"),
        "Dstar": _exact(lambda N: 2.0 * N, "literature", "Lindenstrauss basis upper democracy"),
        "dstar": ClosedForm(lambda N: N / 2.0, lambda N: 2.0 * N, "literature",
                            "Lindenstrauss basis lower democracy band"),
    }
    return dict(batch_norm=_c0_batch, dual_batch=_lindenstrauss_batch, closed_forms=cfs,
                c1=1.0, c2=2.0, field="real",
                notes=("norm is the c0 surrogate of the dual space norm",))


def _blocks_space(omega: WeightSeq):
    w = omega.values
    lit = "flat vectors against the block structure"
    cfs = {
        "D": ClosedForm(lambda N: 1.0, lambda N: 2.0 * float(omega(N)), "literature", lit),
        "d": ClosedForm(lambda N: 1.0, lambda N: 2.0 * float(omega(N)), "literature", lit),
        "Dstar": ClosedForm(lambda N: 1.0, lambda N: float(N), "trivial", "triangle inequality"),
        "dstar": ClosedForm(lambda N: 1.0, lambda N: float(N), "trivial", "triangle inequality"),
    }
    # Delta_j needs omega(j) for 2^j <= index, so the largest usable index
    # is below 2^(M+1)
    max_index = (1 << min(omega.M + 1, 62)) - 1
    return dict(batch_norm=_blocks_batch(w), dual_upper_batch=_lp_batch(1.0), closed_forms=cfs,
                field="real", params={"omega": omega}, max_index=max_index)


def _kt_space(p, r):
    pp, rp = conjugate_exponent(p), conjugate_exponent(r)
    ip, ipp = _inv(p), _inv(pp)

    def d_upper(N):
        return _harmonic_pow(N, -ipp)

    def flat(N):
        if math.isinf(r):
            return N**ip
        return _harmonic_pow(N, r * ip - 1) ** (1 / r)

    def holder(N):
        if math.isinf(rp):
            return N**ipp
        return _harmonic_pow(N, rp * ipp - 1) ** (1 / rp)

    lit = "flat vectors in the KT norm"
    cfs = {
        "D": ClosedForm(flat, d_upper, "literature", lit),
        "d": ClosedForm(flat, d_upper, "literature", lit),
        "Dstar": ClosedForm(lambda N: N / d_upper(N), holder, "literature",
                            "pairing lower bound and Hölder upper bound"),
        "dstar": ClosedForm(lambda N: N / d_upper(N),
                            (lambda N: 1.0) if p == 1 else holder, "literature",
                            "pairing lower bound; first-N functional for p = 1"),
    }
    return dict(batch_norm=_kt_batch(p, r), dual_upper_batch=_holder_dual(p, r),
                closed_forms=cfs, field="real", params={"p": p, "r": r})


def _trig_space(p, d, grid):
    if d not in (1, 2):
        raise ValueError("trigonometric systems are supported for d in {1, 2}")
    if grid < 8 or grid & (grid - 1):
        raise ValueError("grid must be a power of two >= 8")
    pp = conjugate_exponent(p)
    ip, ipp = _inv(p), _inv(pp)
    # largest index whose frequencies satisfy grid >= 8 * |k|
    kmax = grid // 8
    M_max = 2 * kmax + 1 if d == 1 else trig_index((-kmax, -kmax))
    freqs = trig_frequency(np.arange(1, M_max + 1), d)
    ok = np.abs(freqs).reshape(M_max, -1).max(axis=1) <= kmax
    M_max = int(np.argmin(ok)) if not ok.all() else M_max
    primal = _trig_batch(p, d, grid, M_max)
    dual = _trig_batch(pp, d, grid, M_max)
    hy = "Hausdorff-Young band"
    cfs = {
        "D": ClosedForm(lambda N: N ** min(0.5, ipp), lambda N: N ** max(0.5, ipp), "literature", hy),
        "d": ClosedForm(lambda N: N ** min(0.5, ipp), lambda N: N ** max(0.5, ipp), "literature", hy),
        "Dstar": ClosedForm(lambda N: N ** min(0.5, ip), lambda N: N ** max(0.5, ip), "literature", hy),
        "dstar": ClosedForm(lambda N: N ** min(0.5, ip), lambda N: N ** max(0.5, ip), "literature", hy),
    }
    return dict(batch_norm=primal, dual_batch=lambda C: dual(np.conj(C)), closed_forms=cfs,
                field="complex", approximate=True, row_cost=grid**d, max_index=M_max,
                params={"p": p, "d": d, "grid": grid},
                notes=("norms by uniform-grid quadrature",))


def _num(s: str) -> float:
    s = s.strip().lower()
    if s in ("inf", "infty", "infinity"):
        return math.inf
    return float(s)


def make_space(descriptor: str) -> SpaceModel:
    """Build a space from a descriptor string.

    ``lp:p``, ``lorentz:p:r``, ``difference``, ``summing``, ``lindenstrauss``,
    ``lindenstrauss_dual``, ``blocks:<weight>``, ``kt:p:r``, ``trig:p:d:grid``.
    The weight in ``blocks`` is a weight literal (``pow:0.5``,
    ``onepluslog``, or an explicit list) generated with 64 entries.
    """
    head, _, rest = descriptor.strip().partition(":")
    args = rest.split(":") if rest else []

    def need(n):
        if len(args) != n:
            raise ValueError(f"{head!r} takes {n} parameter(s): {descriptor!r}")

    if head == "lp":
        need(1)
        p = _num(args[0])
        if not p >= 1:
            raise ValueError("lp needs p >= 1")
        kw = _lp_space(p)
    elif head == "lorentz":
        need(2)
        p, r = _num(args[0]), _num(args[1])
        if not (1 <= p < math.inf and r >= 1):
            raise ValueError("lorentz needs 1 <= p < inf and r >= 1")
        kw = _lorentz_space(p, r)
    elif head == "difference":
        need(0)
        kw = _difference_space()
    elif head == "summing":
        need(0)
        kw = _summing_space()
    elif head == "lindenstrauss":
        need(0)
        kw = _lindenstrauss_space()
    elif head == "lindenstrauss_dual":
        need(0)
        kw = _lindenstrauss_dual_space()
    elif head == "blocks":
        if not rest:
            raise ValueError("blocks needs a weight literal")
        omega = parse_weight(rest, M=None if "," in rest else 64)
        rep = classify(omega)
        if not rep.is_quasiconcave:
            raise ValueError("blocks needs a quasi-concave weight")
        if abs(omega(1) - 1.0) > 1e-12:
            raise ValueError("blocks needs omega(1) = 1")
        kw = _blocks_space(omega)
    elif head == "kt":
        need(2)
        p, r = _num(args[0]), _num(args[1])
        if not (1 <= p < math.inf and r >= 1):
            raise ValueError("kt needs 1 <= p < inf and r >= 1")
        kw = _kt_space(p, r)
    elif head == "trig":
        need(3)
        p, d, grid = _num(args[0]), int(args[1]), int(args[2])
        if not p >= 1:
            raise ValueError("trig needs p >= 1")
        kw = _trig_space(p, d, grid)
    else:
        raise ValueError(f"unknown space {head!r}")
    kw.setdefault("field", "real")
    return SpaceModel(name=head, descriptor=descriptor.strip(), **kw)


# -- module-level helpers -----------------------------------------------------

def norm(space: SpaceModel, x: CoefVec) -> float:
    return space.norm(x)


def dual_pairing(f: CoefVec, x: CoefVec):
    """Bilinear pairing ``sum_n f_n x_n`` (no conjugation)."""
    common = np.intersect1d(f.indices, x.indices)
    if common.size == 0:
        return 0.0
    fv = f.values[np.searchsorted(f.indices, common)]
    xv = x.values[np.searchsorted(x.indices, common)]
    s = np.sum(fv * xv)
    return s.item() if np.iscomplexobj(s) and s.imag != 0 else float(np.real(s))


@dataclass(frozen=True)
class DualNormResult:
    exact: Optional[float]
    lower: float
    upper: Optional[float]
    witness: Optional[CoefVec]


def _unit(v):
    a = np.abs(v)
    return np.where(a > 0, v / np.where(a > 0, a, 1), 0)


def dual_probe_rows(f: CoefVec, M: int, n_random: int, rng, complex_field: bool):
    """Dense probe vectors for the dual lower bound."""
    idx = f.indices
    sgn = np.conj(_unit(f.values))
    by_mod = np.argsort(-np.abs(f.values), kind="stable")
    rows = []
    for k in range(1, idx.size + 1):
        r = np.zeros(M, dtype=sgn.dtype)
        sel = by_mod[:k]
        r[idx[sel] - 1] = sgn[sel]
        rows.append(r)
    for s in (0.25, 0.5, 1.0, 2.0):
        for order in (np.arange(idx.size), by_mod):
            r = np.zeros(M, dtype=sgn.dtype)
            rank = np.empty(idx.size)
            rank[order] = np.arange(1, idx.size + 1)
            r[idx - 1] = sgn * rank**-s
            rows.append(r)
    if n_random:
        if complex_field:
            ph = np.exp(2j * np.pi * rng.integers(0, 16, size=(n_random, idx.size)) / 16)
        else:
            ph = rng.choice([-1.0, 1.0], size=(n_random, idx.size))
        mags = rng.random((n_random, idx.size)) ** rng.uniform(0, 3, size=(n_random, 1))
        R = np.zeros((n_random, M), dtype=ph.dtype)
        R[:, idx - 1] = ph * mags
        rows.extend(R)
    return np.array(rows)


def dual_norm(space: SpaceModel, f: CoefVec, n_random: int = 10_000,
              rng: Optional[np.random.Generator] = None, M: Optional[int] = None) -> DualNormResult:
    """Dual norm of ``f = sum c_n e_n*``: exact when known, always a lower bound.

    The lower bound is ``max |<f, x>| / ||x||`` over sign-matched flat
    prefixes, sign-matched power decays and ``n_random`` random probes.
    """
    if len(f) == 0:
        return DualNormResult(0.0 if space.dual_batch else None, 0.0, 0.0, None)
    rng = np.random.default_rng(0) if rng is None else rng
    M = max(f.max_index, 1) if M is None else M
    row = f.to_dense(M)[None, :]
    exact = space.dual_batch_exact(row)
    exact = None if exact is None else float(exact[0])
    upper = space.dual_batch_upper(row)
    upper = None if upper is None else float(upper[0])
    P = dual_probe_rows(f, M, n_random, rng, space.is_complex)
    nums = np.abs(P @ f.to_dense(M))
    dens = space.norm_batch(P)
    ratios = np.where(dens > 0, nums / np.where(dens > 0, dens, 1), 0)
    i = int(np.argmax(ratios))
    return DualNormResult(exact, float(ratios[i]), upper, CoefVec.from_dense(P[i]))


def iter_sign_patterns(N: int, complex_field: bool = False):
    """Sign patterns with the first sign fixed to +1 (global sign symmetry)."""
    for tail in itertools.product((1.0, -1.0), repeat=max(N - 1, 0)):
        yield (1.0,) + tail
