"""Coefficient vectors, decreasing rearrangement and discrete Lorentz norms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

import numpy as np

from .weights import REL_TOL, WeightSeq, delta, dual, summing

__all__ = [
    "CoefVec",
    "parse_coefvec",
    "format_coefvec",
    "rearrange",
    "norm_l1",
    "norm_l1_hat",
    "norm_lr",
    "norm_m",
    "linf_to_m_constant",
    "summing_saturates",
    "EmbedResult",
    "embed_const",
    "DualCheck",
    "dual_norm_check",
    "random_decreasing",
]


class CoefVec:
    """Finitely supported coefficient vector ``{n: a_n}`` with ``n >= 1``.

    Explicit zeros are dropped on construction.  Indices are kept sorted.
    """

    __slots__ = ("indices", "values")

    def __init__(self, entries: Union[Mapping, Iterable, None] = None):
        if entries is None:
            items = []
        elif isinstance(entries, Mapping):
            items = list(entries.items())
        else:
            items = list(entries)
        idx = np.array([int(k) for k, _ in items], dtype=np.int64)
        vals = np.array([v for _, v in items])
        self._set(idx, vals)

    def _set(self, idx, vals):
        idx = np.asarray(idx, dtype=np.int64).ravel()
        vals = np.asarray(vals).ravel()
        if vals.size == 0:
            vals = np.zeros(0)
        if not (np.iscomplexobj(vals) and np.any(vals.imag != 0)):
            vals = np.real(vals).astype(float)
        else:
            vals = vals.astype(complex)
        if idx.size and idx.min() < 1:
            raise ValueError("coefficient indices start at 1")
        if np.unique(idx).size != idx.size:
            raise ValueError("duplicate coefficient index")
        keep = vals != 0
        idx, vals = idx[keep], vals[keep]
        order = np.argsort(idx, kind="stable")
        idx, vals = idx[order], vals[order]
        idx.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", vals)

    def __setattr__(self, name, value):
        raise AttributeError("CoefVec is immutable")

    @classmethod
    def from_arrays(cls, indices, values) -> "CoefVec":
        out = cls.__new__(cls)
        out._set(indices, values)
        return out

    @classmethod
    def from_dense(cls, arr, offset: int = 1) -> "CoefVec":
        arr = np.asarray(arr)
        return cls.from_arrays(np.arange(offset, offset + arr.size), arr)

    @classmethod
    def indicator(cls, A, signs=None) -> "CoefVec":
        A = np.asarray(sorted(A), dtype=np.int64)
        s = np.ones(A.size) if signs is None else np.asarray(signs)
        if s.size != A.size:
            raise ValueError("one sign per index is required")
        return cls.from_arrays(A, s)

    @property
    def support(self) -> frozenset:
        return frozenset(self.indices.tolist())

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    @property
    def max_index(self) -> int:
        return int(self.indices[-1]) if self.indices.size else 0

    def __len__(self):
        return self.indices.size

    def __getitem__(self, n):
        pos = np.searchsorted(self.indices, n)
        if pos < self.indices.size and self.indices[pos] == n:
            return self.values[pos].item()
        return 0.0

    def items(self):
        return zip(self.indices.tolist(), self.values.tolist())

    def moduli(self) -> np.ndarray:
        return np.abs(self.values)

    def to_dense(self, M: Optional[int] = None, dtype=None) -> np.ndarray:
        M = self.max_index if M is None else M
        if self.max_index > M:
            raise ValueError(f"support reaches index {self.max_index} > {M}")
        out = np.zeros(M, dtype=dtype or self.values.dtype)
        out[self.indices - 1] = self.values
        return out

    def restrict(self, A) -> "CoefVec":
        mask = np.isin(self.indices, np.fromiter(A, dtype=np.int64))
        return CoefVec.from_arrays(self.indices[mask], self.values[mask])

    def without(self, A) -> "CoefVec":
        mask = ~np.isin(self.indices, np.fromiter(A, dtype=np.int64))
        return CoefVec.from_arrays(self.indices[mask], self.values[mask])

    def twisted(self, signs: Mapping) -> "CoefVec":
        """Multiply the coefficient at ``n`` by ``signs[n]`` (missing keys: 1)."""
        s = np.array([signs.get(int(n), 1) for n in self.indices])
        return CoefVec.from_arrays(self.indices, self.values * s)

    def _combine(self, other, op):
        idx = np.union1d(self.indices, other.indices)
        M = int(idx[-1]) if idx.size else 0
        dt = np.result_type(self.values, other.values)
        a = self.to_dense(M, dt)
        b = other.to_dense(M, dt)
        return CoefVec.from_arrays(idx, op(a, b)[idx - 1])

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __neg__(self):
        return CoefVec.from_arrays(self.indices, -self.values)

    def __mul__(self, c):
        return CoefVec.from_arrays(self.indices, c * self.values)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, CoefVec):
            return NotImplemented
        return np.array_equal(self.indices, other.indices) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.indices.tobytes(), self.values.tobytes()))

    def __repr__(self):
        body = ", ".join(f"{n}: {v:g}" for n, v in list(self.items())[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"CoefVec({{{body}{more}}})"


def parse_coefvec(text: str) -> CoefVec:
    """Parse ``index:value`` pairs (``index:re:im`` for complex values).

    Pairs may be separated by whitespace or commas.

    >>> parse_coefvec("1:-3, 5:1 9:2")
    CoefVec({1: -3, 5: 1, 9: 2})
    """
    entries = []
    for tok in text.replace(",", " ").split():
        parts = tok.split(":")
        if len(parts) == 2:
            entries.append((int(parts[0]), float(parts[1])))
        elif len(parts) == 3:
            entries.append((int(parts[0]), complex(float(parts[1]), float(parts[2]))))
        else:
            raise ValueError(f"bad coefficient literal {tok!r}")
    return CoefVec(entries)


def format_coefvec(x: CoefVec) -> str:
    out = []
    for n, v in x.items():
        if isinstance(v, complex):
            out.append(f"{n}:{v.real:.17g}:{v.imag:.17g}")
        else:
            out.append(f"{n}:{v:.17g}")
    return " ".join(out)


def _moduli(s) -> np.ndarray:
    if isinstance(s, CoefVec):
        return s.moduli()
    a = np.abs(np.asarray(s)).ravel()
    return a[a != 0]


def rearrange(s) -> np.ndarray:
    """Non-increasing rearrangement of the moduli of ``s`` (zeros dropped)."""
    return np.sort(_moduli(s))[::-1]


def _rearranged(s, eta: WeightSeq) -> np.ndarray:
    r = rearrange(s)
    if r.size > eta.M:
        raise ValueError(f"support size {r.size} exceeds weight truncation {eta.M}")
    return r


def norm_l1(s, eta: WeightSeq) -> float:
    """``sum_j s*_j eta(j)/j``."""
    r = _rearranged(s, eta)
    j = np.arange(1, r.size + 1)
    return math.fsum(r * eta.values[: r.size] / j)


def norm_l1_hat(s, eta: WeightSeq) -> float:
    """``sum_j s*_j (eta(j) - eta(j-1))``; ``eta`` must be non-decreasing."""
    r = _rearranged(s, eta)
    d = delta(eta)[: r.size]
    if np.any(d < -REL_TOL * eta.values.max()):
        raise ValueError("norm_l1_hat needs a non-decreasing weight")
    return math.fsum(r * d)


def norm_lr(s, eta: WeightSeq, r: float) -> float:
    """``(sum_j [s*_j eta(j)]^r / j)^(1/r)``, or ``max_j s*_j eta(j)`` for ``r = inf``."""
    if not r >= 1:
        raise ValueError("norm_lr needs r >= 1")
    x = _rearranged(s, eta)
    if x.size == 0:
        return 0.0
    t = x * eta.values[: x.size]
    if math.isinf(r):
        return float(t.max())
    j = np.arange(1, x.size + 1)
    return math.fsum(t**r / j) ** (1.0 / r)


def norm_m(s, eta: WeightSeq) -> float:
    """Marcinkiewicz norm ``max_k (eta(k)/k) sum_{j<=k} s*_j``."""
    x = _rearranged(s, eta)
    if x.size == 0:
        return 0.0
    k = np.arange(1, x.size + 1)
    return float(np.max(eta.values[: x.size] / k * np.cumsum(x)))


def linf_to_m_constant(eta: WeightSeq) -> float:
    """Best ``c`` with ``sum_{j<=N} 1/eta(j) <= c N / eta(N)`` on the truncation."""
    if np.any(eta.values <= 0):
        raise ValueError("needs a positive weight")
    N = np.arange(1, eta.M + 1)
    return float(np.max(eta.values / N * np.cumsum(1.0 / eta.values)))


def summing_saturates(eta: WeightSeq, rel: float = 1e-9) -> bool:
    """True when the summing weight is flat over the second half of the truncation.

    A bounded summing weight makes ``l1_eta`` coincide with ``c0``; at finite
    truncation this is only reported as a note.
    """
    t = summing(eta).values
    return bool(t[-1] - t[(eta.M - 1) // 2] <= rel * t[-1])


def random_decreasing(rng: np.random.Generator, size: int) -> np.ndarray:
    """Random non-increasing positive vector with geometric-type decay."""
    steps = rng.uniform(0.0, 1.0, size) ** rng.uniform(0.2, 3.0)
    return np.cumprod(np.maximum(steps, 1e-3))


@dataclass(frozen=True)
class EmbedResult:
    claimed: bool
    worst_ratio: float
    witness: CoefVec


def embed_const(nu: WeightSeq, xi: WeightSeq, trials: int = 1000,
                rng: Optional[np.random.Generator] = None) -> EmbedResult:
    """Compare ``l1_nu`` and ``l1_xi`` norms on probe vectors.

    ``claimed`` is the summing-weight comparison ``nu~ <= xi~``.  The probe
    family is the flat indicators ``1_{1..k}`` followed by ``trials`` random
    decreasing vectors; when the claim fails the witness is the first flat
    indicator with ratio above 1.
    """
    if nu.M != xi.M:
        raise ValueError("weights must share a truncation")
    rng = np.random.default_rng(0) if rng is None else rng
    tn, tx = summing(nu).values, summing(xi).values
    claimed = bool(np.all(tn <= tx + REL_TOL * np.maximum(np.abs(tx), np.abs(tn))))

    worst, witness = -np.inf, CoefVec()
    first_bad = None
    for k in range(1, nu.M + 1):
        s = np.ones(k)
        den = norm_l1(s, xi)
        ratio = norm_l1(s, nu) / den if den > 0 else np.inf
        if first_bad is None and ratio > 1 + REL_TOL:
            first_bad = (ratio, CoefVec.from_dense(s))
        if ratio > worst:
            worst, witness = ratio, CoefVec.from_dense(s)
    for _ in range(trials):
        size = int(rng.integers(1, nu.M + 1))
        s = random_decreasing(rng, size)
        den = norm_l1(s, xi)
        ratio = norm_l1(s, nu) / den if den > 0 else np.inf
        if ratio > worst:
            worst, witness = ratio, CoefVec.from_dense(s)
    if not claimed and first_bad is not None:
        witness = first_bad[1]
    return EmbedResult(claimed, float(worst), witness)


@dataclass(frozen=True)
class DualCheck:
    m_norm: float
    functional_norm_lb: float
    holder_ub_ok: bool
    worst_holder_ratio: float
    inf_ratio_truncated: float


def dual_norm_check(b, eta: WeightSeq, M_trunc: int, trials: int = 1000,
                    rng: Optional[np.random.Generator] = None) -> DualCheck:
    """Pairing of ``b`` against ``l1_eta_hat`` versus the ``m(eta')`` norm.

    The functional lower bound pairs ``b`` with the sign-matched indicators
    of its top-``k`` sets and divides by their ``l1_eta_hat`` norms.  The
    Hölder side checks ``sum |a_j b_j| <= ||b||_m ||a||`` on random ``a``.
    ``inf_ratio_truncated`` is ``min_N eta(N)/N`` over the truncation.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    b = b if isinstance(b, CoefVec) else CoefVec.from_dense(b)
    if b.max_index > M_trunc or M_trunc > eta.M:
        raise ValueError("b must live inside the truncation, which must fit the weight")
    m_norm = norm_m(b, dual(eta))

    order = b.indices[np.argsort(-b.moduli(), kind="stable")]
    lb = 0.0
    for k in range(1, order.size + 1):
        A = order[:k]
        sgn = np.array([b[n] for n in A])
        sgn = np.conj(sgn / np.abs(sgn))
        probe = CoefVec.from_arrays(A, sgn)
        pairing = abs(sum(b[n] * probe[n] for n in A.tolist()))
        lb = max(lb, pairing / norm_l1_hat(probe, eta))

    bd = np.abs(b.to_dense(M_trunc))
    worst = 0.0
    for _ in range(trials):
        a = rng.standard_normal(M_trunc) * (rng.random(M_trunc) < rng.uniform(0.1, 1.0))
        na = norm_l1_hat(a, eta)
        if na == 0:
            continue
        worst = max(worst, math.fsum(np.abs(a) * bd) / (m_norm * na) if m_norm > 0 else 0.0)
    j = np.arange(1, eta.M + 1)
    return DualCheck(
        m_norm=float(m_norm),
        functional_norm_lb=float(lb),
        holder_ub_ok=bool(worst <= 1 + 1e-12),
        worst_holder_ratio=float(worst),
        inf_ratio_truncated=float(np.min(eta.values / j)),
    )
