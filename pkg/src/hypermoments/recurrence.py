"""Limiting moments of sparse random q-hypergraph adjacency spectra.

The limiting moment ``m_k`` is the total weight of closed ``k``-step walks
whose skeleton is a hypertree.  Grouping those walks by length ``l`` and by
the number ``r`` of steps leaving the root gives ``S(l, r)``, and

    m_k = sum_{r=0}^{floor(k/2)} S(k, r).

``S`` is computed by splitting off the first hyperedge: the walk inside it
is counted by ``K`` (a pure combinatorial count, independent of ``q``), the
sub-walks hanging off its visited vertices recurse into ``S``, and binomial
factors count the interleavings.  All values are exact rationals.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from .params import ModelParams, ParameterError, WeightMomentSeq, as_moment_seq, binom

__all__ = [
    "k_count",
    "s_value",
    "limiting_moments",
    "ms_r_crosscheck",
    "carleman_diagnostic",
    "SRecurrence",
    "compositions",
]


def compositions(total: int, parts: int, minimum: int = 0) -> Iterator[tuple[int, ...]]:
    """All tuples of ``parts`` integers ``>= minimum`` summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= minimum:
            yield (total,)
        return
    for first in range(minimum, total - minimum * (parts - 1) + 1):
        for rest in compositions(total - first, parts - 1, minimum):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# within-hyperedge walk counts


def k_count(kappa: int, j: int, f: Sequence[int]) -> int:
    """Number of minimal walks inside one hyperedge.

    Counts walks that start at vertex 1, end at vertex ``j``, visit exactly
    the vertices ``1..kappa`` (labelled in order of first visit) and leave
    vertex ``i`` exactly ``f[i-1]`` times.

    Raises
    ------
    ValueError
        If ``len(f) != kappa``, ``j`` is outside ``1..kappa`` or an entry of
        ``f`` is negative.
    """
    f = tuple(int(x) for x in f)
    if kappa < 1:
        raise ValueError(f"kappa must be >= 1, got {kappa}")
    if len(f) != kappa:
        raise ValueError(f"edge vector has length {len(f)}, expected kappa={kappa}")
    if not 1 <= j <= kappa:
        raise ValueError(f"end vertex j={j} outside 1..{kappa}")
    if any(x < 0 for x in f):
        raise ValueError(f"edge vector entries must be nonnegative: {f}")
    return _k_count(kappa, j, f)


@lru_cache(maxsize=None)
def _k_count(kappa: int, j: int, f: tuple[int, ...]) -> int:
    if kappa == 1:
        return int(j == 1 and f[0] == 0)
    total = 0
    # last step a -> j, everything already visited
    for a in range(1, kappa + 1):
        if a != j and f[a - 1] > 0:
            g = f[:a - 1] + (f[a - 1] - 1,) + f[a:]
            total += _k_count(kappa, a, g)
    # last step a -> kappa is the first visit of kappa, so nothing leaves kappa
    if j == kappa and f[-1] == 0:
        for a in range(1, kappa):
            if f[a - 1] > 0:
                g = f[:a - 1] + (f[a - 1] - 1,) + f[a:kappa - 1]
                total += _k_count(kappa - 1, a, g)
    return total


# ---------------------------------------------------------------------------
# S(l, r) via the first-hyperedge split


class SRecurrence:
    """Memoized table of ``S(l, r)`` for one ``(params, X)`` pair.

    The table is filled lazily; once a value is stored it never changes, so
    a table may be shared between readers.
    """

    def __init__(self, params: ModelParams, X: WeightMomentSeq):
        self.params = params
        self.X = X
        self._table: dict[tuple[int, int], Fraction] = {}
        self._inv_fact = [Fraction(1, math.factorial(params.q - kappa)) for kappa in range(params.q + 1)]

    def __call__(self, l: int, r: int) -> Fraction:
        if l < 0 or r < 0:
            raise ValueError(f"S(l, r) needs l, r >= 0, got ({l}, {r})")
        if r > l:
            raise ValueError(f"S(l, r) needs r <= l, got ({l}, {r})")
        self.X.require(l)
        return self._S(l, r)

    def _S(self, l: int, r: int) -> Fraction:
        if r == 0:
            return Fraction(int(l == 0))
        if 2 * r > l:
            return Fraction(0)
        key = (l, r)
        val = self._table.get(key)
        if val is None:
            val = self._split(l, r)
            self._table[key] = val
        return val

    def _branch_weights(self, f_i: int, length: int) -> list[Fraction]:
        """``g(u) = sum_v C(f_i + v - 1, f_i - 1) S(u, v)`` for ``u <= length``."""
        return [
            sum(
                (binom(f_i + v - 1, f_i - 1) * self._S(u, v) for v in range(u // 2 + 1)),
                Fraction(0),
            )
            for u in range(length + 1)
        ]

    def _split(self, l: int, r: int) -> Fraction:
        p, q = self.params.p, self.params.q
        total = Fraction(0)
        for kappa in range(2, q + 1):
            # every visited vertex of the first edge is left at least once
            for F in range(kappa, l + 1):
                rest = l - F
                for f in compositions(F, kappa, minimum=1):
                    if f[0] > r:
                        continue
                    K = _k_count(kappa, 1, f)
                    if K == 0:
                        continue
                    v1 = r - f[0]
                    # root branch: fixed v_1, u_1 free; the other branches sum over v_i
                    conv = [binom(r - 1, f[0] - 1) * self._S(u, v1) if v1 <= u else Fraction(0)
                            for u in range(rest + 1)]
                    for f_i in f[1:]:
                        conv = _convolve(conv, self._branch_weights(f_i, rest), rest)
                    if conv[rest]:
                        total += p * self.X[F] * self._inv_fact[kappa] * K * conv[rest]
        return total


def _convolve(a: list[Fraction], b: list[Fraction], n: int) -> list[Fraction]:
    out = [Fraction(0)] * (n + 1)
    for i, ai in enumerate(a):
        if ai:
            for j in range(n + 1 - i):
                if b[j]:
                    out[i + j] += ai * b[j]
    return out


@lru_cache(maxsize=64)
def _recurrence(params: ModelParams, X: WeightMomentSeq) -> SRecurrence:
    return SRecurrence(params, X)


def s_value(l: int, r: int, params: ModelParams, X: WeightMomentSeq | Sequence) -> Fraction:
    """Total weight ``S(l, r)`` of hypertree walks of length ``l`` leaving the root ``r`` times."""
    return _recurrence(params, as_moment_seq(X))(l, r)


def limiting_moments(k_max: int, params: ModelParams, X: WeightMomentSeq | Sequence) -> list[Fraction]:
    """Exact limiting moments ``m_0, ..., m_{k_max}``.

    Examples
    --------
    >>> from hypermoments import ModelParams, WeightMomentSeq
    >>> [str(m) for m in limiting_moments(4, ModelParams(1, 2), WeightMomentSeq.constant(1, 4))]
    ['1', '0', '1', '0', '3']
    """
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    X = as_moment_seq(X)
    X.require(k_max)
    S = _recurrence(params, X)
    return [sum((S(k, r) for r in range(k // 2 + 1)), Fraction(0)) for k in range(k_max + 1)]


# ---------------------------------------------------------------------------
# collapsed recurrence, literal nested sums


def ms_r_crosscheck(
    l: int,
    r: int,
    params: ModelParams,
    X: WeightMomentSeq | Sequence,
    reading: str = "closed",
) -> Fraction:
    """Evaluate the collapsed one-line recurrence for ``S(l, r)`` by nested loops.

    The printed form sums ``u_1`` up to ``l - F`` and each later ``u_i`` up
    to what is left, without saying that the branch lengths must add up to
    ``l - F``.  ``reading="closed"`` imposes that (the last branch takes the
    remainder) and agrees with :func:`s_value`; ``reading="open"`` drops it
    and overcounts by walks shorter than ``l``.  The recursion is
    self-contained and shares no table with :func:`s_value`.
    """
    if reading not in ("closed", "open"):
        raise ValueError(f"unknown reading {reading!r}")
    if l < 0 or not 0 <= r <= l:
        raise ValueError(f"need 0 <= r <= l, got ({l}, {r})")
    X = as_moment_seq(X)
    X.require(l)
    memo: dict[tuple[int, int], Fraction] = {}
    p, q = params.p, params.q

    def S(l: int, r: int) -> Fraction:
        if r == 0:
            return Fraction(int(l == 0))
        if (l, r) in memo:
            return memo[l, r]
        total = Fraction(0)
        for F in range(1, l + 1):
            for kappa in range(1, q + 1):
                for f in compositions(F, kappa):
                    if f[0] > r:
                        continue
                    K = _k_count(kappa, 1, f)
                    if K == 0:
                        continue
                    coef = p * X[F] * Fraction(K, math.factorial(q - kappa))
                    inner = Fraction(0)
                    for u1 in range(l - F + 1):
                        head = binom(r - 1, f[0] - 1) * S(u1, r - f[0]) if r - f[0] <= u1 else 0
                        if head:
                            inner += head * branches(f[1:], l - F - u1)
                    total += coef * inner
        memo[l, r] = total
        return total

    def branches(fs: tuple[int, ...], budget: int) -> Fraction:
        if not fs:
            return Fraction(int(budget == 0 or reading == "open"))
        out = Fraction(0)
        for u in range(budget + 1):
            w = sum((binom(fs[0] + v - 1, fs[0] - 1) * S(u, v) for v in range(u // 2 + 1)), Fraction(0))
            if w:
                out += w * branches(fs[1:], budget - u)
        return out

    return S(l, r)


# ---------------------------------------------------------------------------


def carleman_diagnostic(m: Sequence) -> list[tuple[int, float]]:
    """Roots ``(k, m_{2k} ** (1/(2k)))`` for every even moment available.

    Bounded growth of ``root / k`` is what makes the moment problem
    determinate; this only reports the numbers.

    Raises
    ------
    ParameterError
        If an even moment is negative.
    """
    out = []
    for k in range(1, (len(m) - 1) // 2 + 1):
        m2k = m[2 * k]
        if m2k < 0:
            raise ParameterError(f"even moment m_{2 * k} = {m2k} is negative")
        out.append((k, _root(Fraction(m2k), 2 * k)))
    return out


def _root(x: Fraction, n: int) -> float:
    if x == 0:
        return 0.0
    # log-space keeps huge numerators from overflowing float
    return math.exp((math.log(x.numerator) - math.log(x.denominator)) / n)
