"""Weight sequences, their classes and transforms.

A weight is stored as a finite truncation ``eta(1), ..., eta(M)``; every
transform applies the convention ``eta(0) = 0``.  All "for every N" checks
are therefore statements about ``1..M`` only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "WeightSeq",
    "WeightClassReport",
    "DilationReport",
    "ComboRecord",
    "ComboTable",
    "compensated_cumsum",
    "delta",
    "summing",
    "difference",
    "dual",
    "classify",
    "concave_majorant",
    "quasi_concave_envelope",
    "prefix_concave_length",
    "dilation",
    "combos",
    "combo_table",
    "power",
    "logarithmic",
    "powlog",
    "constant",
    "one_plus_log",
    "parse_weight",
]

REL_TOL = 1e-12


def compensated_cumsum(values) -> np.ndarray:
    """Cumulative sum with Neumaier compensation."""
    vals = np.asarray(values, dtype=float).ravel()
    out = np.empty(vals.size)
    s = 0.0
    c = 0.0
    for i, v in enumerate(vals.tolist()):
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i] = s + c
    return out


@dataclass(frozen=True, eq=False)
class WeightSeq:
    """Finite truncation of a non-negative weight.

    ``values[0]`` holds ``eta(1)``.  Calling the weight with a 1-based index
    returns ``eta(j)``; index 0 returns 0.
    """

    values: np.ndarray
    label: str = ""
    # exact first differences when known at construction (summing weights);
    # avoids cancellation in ``delta`` for slowly growing partial sums
    increments: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.increments is not None:
            inc = np.array(self.increments, dtype=float).ravel()
            inc.setflags(write=False)
            object.__setattr__(self, "increments", inc)
        v = np.array(self.values, dtype=float).ravel()
        if v.size == 0:
            raise ValueError("a weight needs at least one entry")
        if not np.all(np.isfinite(v)):
            raise ValueError("weight entries must be finite")
        if np.any(v < 0):
            raise ValueError("weight entries must be non-negative")
        if v[0] <= 0:
            raise ValueError("a weight must satisfy eta(1) > 0")
        if self.increments is not None and self.increments.size != v.size:
            raise ValueError("increments must match the weight length")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def M(self) -> int:
        return self.values.size

    def __len__(self):
        return self.values.size

    def __call__(self, j):
        j = np.asarray(j)
        out = self.padded()[j]
        return float(out) if out.ndim == 0 else out

    def __repr__(self):
        head = ", ".join(f"{v:.6g}" for v in self.values[:4])
        more = ", ..." if self.M > 4 else ""
        return f"WeightSeq([{head}{more}], M={self.M}, label={self.label!r})"

    def padded(self) -> np.ndarray:
        """Values with ``eta(0) = 0`` prepended."""
        return np.concatenate(([0.0], self.values))

    def head(self, N: int) -> "WeightSeq":
        if not 1 <= N <= self.M:
            raise ValueError(f"cannot truncate a weight of length {self.M} to {N}")
        inc = None if self.increments is None else self.increments[:N]
        return WeightSeq(self.values[:N], self.label, inc)

    def scaled(self, c: float) -> "WeightSeq":
        inc = None if self.increments is None else c * self.increments
        return WeightSeq(c * self.values, self.label, inc)

    @classmethod
    def from_function(cls, f: Callable[[np.ndarray], np.ndarray], M: int, label: str = ""):
        j = np.arange(1, M + 1, dtype=float)
        return cls(np.asarray(f(j), dtype=float), label)

    def allclose(self, other: "WeightSeq", rtol: float = REL_TOL) -> bool:
        return self.M == other.M and bool(
            np.all(np.abs(self.values - other.values) <= rtol * np.maximum(np.abs(other.values), 1e-300))
        )


def _idx(M: int) -> np.ndarray:
    return np.arange(1, M + 1, dtype=float)


def delta(eta: WeightSeq) -> np.ndarray:
    """First differences ``eta(j) - eta(j-1)`` with ``eta(0) = 0``.

    Returns a plain array because the differences of a non-monotone weight
    may be negative.  Summing weights return their exact increments.
    """
    if eta.increments is not None:
        return np.array(eta.increments)
    return np.diff(eta.padded())


def summing(eta: WeightSeq) -> WeightSeq:
    """Summing weight ``sum_{j<=N} eta(j)/j``."""
    inc = eta.values / _idx(eta.M)
    return WeightSeq(compensated_cumsum(inc), _tag(eta, "summing"), inc)


def difference(eta: WeightSeq) -> WeightSeq:
    """Difference weight ``j * (eta(j) - eta(j-1))``.

    Raises
    ------
    ValueError
        If ``eta`` is not non-decreasing.
    """
    d = delta(eta)
    if np.any(d < -REL_TOL * np.abs(eta.values)):
        raise ValueError("difference weight needs a non-decreasing weight")
    return WeightSeq(_idx(eta.M) * np.maximum(d, 0.0), _tag(eta, "difference"))


def dual(eta: WeightSeq) -> WeightSeq:
    """Dual weight ``j / eta(j)``."""
    if np.any(eta.values <= 0):
        raise ValueError("dual weight needs a positive weight")
    return WeightSeq(_idx(eta.M) / eta.values, _tag(eta, "dual"))


def _tag(eta, what):
    return f"{what}({eta.label})" if eta.label else what


def _le(a, b, scale) -> np.ndarray:
    return a <= b + REL_TOL * scale


@dataclass(frozen=True)
class WeightClassReport:
    is_positive: bool
    is_nondecreasing: bool
    doubling_constant: Optional[float]
    is_quasiconcave: bool
    is_concave: bool
    regularity: Optional[tuple]
    concave_majorant: WeightSeq

    @property
    def is_doubling(self) -> bool:
        return self.is_nondecreasing and self.doubling_constant is not None


def classify(eta: WeightSeq) -> WeightClassReport:
    """Class membership of ``eta`` over its truncation.

    Flags are computed with a relative tolerance of ``1e-12`` so that exact
    equalities (e.g. ``eta(j) = j``) do not flip under rounding.
    """
    v = eta.values
    j = _idx(eta.M)
    scale = np.abs(v).max()
    positive = bool(np.all(v > 0))
    nondecr = bool(np.all(_le(v[:-1], v[1:], scale)))

    doubling = None
    if positive and eta.M >= 2:
        half = np.arange(1, eta.M // 2 + 1)
        doubling = float(np.max(v[2 * half - 1] / v[half - 1]))

    ratio = v / j
    qc = nondecr and bool(np.all(_le(ratio[1:], ratio[:-1], ratio.max())))
    d = delta(eta)
    concave = nondecr and bool(np.all(_le(d[1:], d[:-1], scale)))

    regularity = None
    if positive:
        r = summing(eta).values / v
        regularity = (float(r.min()), float(r.max()))

    return WeightClassReport(
        is_positive=positive,
        is_nondecreasing=nondecr,
        doubling_constant=doubling,
        is_quasiconcave=qc,
        is_concave=concave,
        regularity=regularity,
        concave_majorant=concave_majorant(eta),
    )


def concave_majorant(eta: WeightSeq) -> WeightSeq:
    """Least concave majorant through ``(0, 0), (1, eta(1)), ..., (M, eta(M))``.

    Upper hull by a monotone chain; collinear vertices are dropped so the
    earlier index is kept.
    """
    pts = eta.padded()
    hull = [0]
    for k in range(1, pts.size):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b when it lies on or below the chord a -> k
            cross = (b - a) * (pts[k] - pts[a]) - (k - a) * (pts[b] - pts[a])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(k)
    xs = np.array(hull, dtype=float)
    vals = np.interp(np.arange(1, pts.size, dtype=float), xs, pts[hull])
    return WeightSeq(np.maximum(vals, eta.values), _tag(eta, "concave-majorant"))


def quasi_concave_envelope(eta: WeightSeq) -> WeightSeq:
    """Least quasi-concave majorant over the truncation.

    ``env(N) = max_k eta(k) * min(1, N/k)``, computed with a prefix max and a
    suffix max of ``eta(k)/k``.
    """
    v = eta.values
    j = _idx(eta.M)
    prefix = np.maximum.accumulate(v)
    suffix = np.maximum.accumulate((v / j)[::-1])[::-1]
    return WeightSeq(np.maximum(prefix, j * suffix), _tag(eta, "qc-envelope"))


def prefix_concave_length(eta: WeightSeq) -> int:
    """Largest ``N`` such that ``eta`` restricted to ``1..N`` is concave."""
    v = eta.values
    scale = np.abs(v).max()
    bad = ~_le(v[:-1], v[1:], scale)
    d = delta(eta)
    bad |= ~_le(d[1:], d[:-1], scale)
    hits = np.flatnonzero(bad)
    return int(hits[0] + 1) if hits.size else eta.M


@dataclass(frozen=True)
class DilationReport:
    phi: np.ndarray
    Phi: np.ndarray
    i_lower_est: Optional[float]
    I_upper_est: Optional[float]
    truncated: bool = True


def dilation(eta: WeightSeq, M_cap: int) -> DilationReport:
    """Truncated dilation sequences and index estimates.

    ``phi[M'-1]`` is the min over ``k`` with ``M'k <= M`` of
    ``eta(M'k)/eta(k)``; ``Phi`` is the max.  Index estimates are the max of
    ``ln phi(M')/ln M'`` (resp. min of ``ln Phi(M')/ln M'``) over
    ``M' = 2..M_cap``.  With ``M_cap < 2`` only the sequences are returned.
    """
    if np.any(eta.values <= 0):
        raise ValueError("dilation sequences need a positive weight")
    if M_cap < 1 or M_cap > eta.M:
        raise ValueError("need 1 <= M_cap <= M")
    v = eta.values
    phi = np.empty(M_cap)
    Phi = np.empty(M_cap)
    for m in range(1, M_cap + 1):
        k = np.arange(1, eta.M // m + 1)
        r = v[m * k - 1] / v[k - 1]
        phi[m - 1] = r.min()
        Phi[m - 1] = r.max()
    if M_cap < 2:
        return DilationReport(phi, Phi, None, None)
    logs = np.log(np.arange(2, M_cap + 1, dtype=float))
    i_est = float(np.max(np.log(phi[1:]) / logs))
    I_est = float(np.min(np.log(Phi[1:]) / logs))
    return DilationReport(phi, Phi, i_est, I_est)


@dataclass(frozen=True)
class ComboRecord:
    N: int
    S: float
    T12: float
    T21: float
    OT: float
    U: float


@dataclass(frozen=True)
class ComboTable:
    """``S_N, T_N(eta1, eta2), T_N(eta2, eta1), min T, U_N`` for ``N = 1..len``."""

    S: np.ndarray
    T12: np.ndarray
    T21: np.ndarray
    OT: np.ndarray
    U: np.ndarray

    def at(self, N: int) -> ComboRecord:
        i = N - 1
        return ComboRecord(N, float(self.S[i]), float(self.T12[i]), float(self.T21[i]),
                           float(self.OT[i]), float(self.U[i]))


def _check_pair(eta1, eta2, N):
    if N < 1 or N > min(eta1.M, eta2.M):
        raise ValueError(f"N={N} exceeds the truncation of the weights")
    for e in (eta1, eta2):
        if np.any(delta(e)[: N] < -REL_TOL * np.abs(e.values[:N]).max()):
            raise ValueError("combined quantities need non-decreasing weights")


def combos(eta1: WeightSeq, eta2: WeightSeq, N: int) -> ComboRecord:
    """The four combined quantities at a single ``N`` (exactly rounded sums)."""
    _check_pair(eta1, eta2, N)
    j = _idx(N)
    d1, d2 = delta(eta1)[:N], delta(eta2)[:N]
    v1, v2 = eta1.values[:N], eta2.values[:N]
    S = math.fsum(d1 * d2)
    T12 = math.fsum(v1 / j * d2)
    T21 = math.fsum(v2 / j * d1)
    U = math.fsum(v1 * v2 / j**2)
    return ComboRecord(N, S, T12, T21, min(T12, T21), U)


def combo_table(eta1: WeightSeq, eta2: WeightSeq, N: Optional[int] = None) -> ComboTable:
    N = min(eta1.M, eta2.M) if N is None else N
    _check_pair(eta1, eta2, N)
    j = _idx(N)
    d1, d2 = delta(eta1)[:N], delta(eta2)[:N]
    v1, v2 = eta1.values[:N], eta2.values[:N]
    T12 = compensated_cumsum(v1 / j * d2)
    T21 = compensated_cumsum(v2 / j * d1)
    return ComboTable(
        S=compensated_cumsum(d1 * d2),
        T12=T12,
        T21=T21,
        OT=np.minimum(T12, T21),
        U=compensated_cumsum(v1 * v2 / j**2),
    )


# -- generators -------------------------------------------------------------

def power(alpha: float, M: int) -> WeightSeq:
    return WeightSeq.from_function(lambda j: j**alpha, M, f"pow:{alpha:g}")


def logarithmic(gamma: float, c: float, M: int) -> WeightSeq:
    return WeightSeq.from_function(lambda j: np.log(j + c) ** gamma, M, f"log:{gamma:g}:{c:g}")


def powlog(alpha: float, gamma: float, c: float, M: int) -> WeightSeq:
    return WeightSeq.from_function(
        lambda j: j**alpha * np.log(j + c) ** gamma, M, f"powlog:{alpha:g}:{gamma:g}:{c:g}"
    )


def constant(M: int) -> WeightSeq:
    return WeightSeq(np.ones(M), "const")


def one_plus_log(M: int) -> WeightSeq:
    return WeightSeq.from_function(lambda j: 1.0 + np.log(j), M, "onepluslog")


def parse_weight(text: str, M: Optional[int] = None) -> WeightSeq:
    """Parse a weight literal.

    Accepted forms: an explicit comma-separated list, or one of
    ``pow:alpha``, ``log:gamma:c``, ``powlog:alpha:gamma:c``, ``const``,
    ``onepluslog``.  Named generators need the truncation length ``M``.

    >>> parse_weight("1,2,3").values.tolist()
    [1.0, 2.0, 3.0]
    >>> parse_weight("pow:0.5", M=4)(4)
    2.0
    """
    text = text.strip()
    head, *args = text.split(":")
    named = {"pow", "log", "powlog", "const", "onepluslog"}
    if head not in named:
        vals = [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
        w = WeightSeq(np.array(vals), "list")
        if M is not None and M != w.M:
            raise ValueError(f"explicit weight has length {w.M}, expected {M}")
        return w
    if M is None:
        raise ValueError(f"weight generator {head!r} needs a truncation length M")
    nargs = {"pow": 1, "log": 2, "powlog": 3, "const": 0, "onepluslog": 0}[head]
    if len(args) != nargs:
        raise ValueError(f"{head!r} takes {nargs} parameter(s), got {len(args)}")
    a = [float(t) for t in args]
    if head == "pow":
        return power(a[0], M)
    if head == "log":
        return logarithmic(a[0], a[1], M)
    if head == "powlog":
        return powlog(a[0], a[1], a[2], M)
    if head == "onepluslog":
        return one_plus_log(M)
    return constant(M)
