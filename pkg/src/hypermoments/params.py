"""Ensemble parameters and weight-moment sequences.

Everything here is exact: ``p`` and the weight moments are held as
:class:`fractions.Fraction` so that the recurrence and the walk oracle can be
compared with ``==``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction, str]


class ParameterError(ValueError):
    """Invalid model parameters or weight moments."""


def as_fraction(value: Rational) -> Fraction:
    # floats go through their exact binary value
    return Fraction(value)


@dataclass(frozen=True)
class ModelParams:
    """Sparsity ``p > 0`` and hyperedge size ``q >= 2``.

    Each q-subset of ``[N]`` is present with probability ``p / N**(q-1)``,
    so a vertex lies in ``(q-1)! * p`` hyperedges on average.
    """

    p: Fraction
    q: int

    def __init__(self, p: Rational, q: int):
        p = as_fraction(p)
        if p <= 0:
            raise ParameterError(f"p must be positive, got {p}")
        if int(q) != q or q < 2:
            raise ParameterError(f"q must be an integer >= 2, got {q}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", int(q))

    def edge_probability(self, N: int) -> Fraction:
        return self.p / Fraction(N) ** (self.q - 1)


@dataclass(frozen=True)
class WeightMomentSeq:
    """Moments ``X_1, X_2, ...`` of the hyperedge weight law (``X_0 = 1``).

    Parameters
    ----------
    moments : sequence of rationals
        ``moments[k-1]`` is ``E a**k``.
    carleman_constant : rational, optional
        When given, ``X_{2m} <= (C m)**(2m)`` is checked for every even
        moment present.
    """

    moments: tuple[Fraction, ...]
    carleman_constant: Fraction | None = field(default=None)

    def __init__(self, moments: Iterable[Rational], carleman_constant: Rational | None = None):
        ms = tuple(as_fraction(x) for x in moments)
        object.__setattr__(self, "moments", ms)
        object.__setattr__(
            self,
            "carleman_constant",
            None if carleman_constant is None else as_fraction(carleman_constant),
        )
        self.validate()

    def validate(self) -> None:
        ms = self.moments
        for k in range(2, len(ms) + 1, 2):
            if ms[k - 1] < 0:
                raise ParameterError(f"even moment X_{k} = {ms[k - 1]} is negative")
        if len(ms) >= 2 and ms[1] < ms[0] ** 2:
            raise ParameterError(f"X_2 = {ms[1]} < X_1^2 = {ms[0] ** 2}")
        C = self.carleman_constant
        if C is not None:
            for k in range(2, len(ms) + 1, 2):
                m = k // 2
                if ms[k - 1] > (C * m) ** k:
                    raise ParameterError(f"X_{k} exceeds the growth bound (C*m)^(2m) with C={C}")

    @property
    def k_max(self) -> int:
        return len(self.moments)

    def __getitem__(self, k: int) -> Fraction:
        if k == 0:
            return Fraction(1)
        if k < 0 or k > len(self.moments):
            raise ParameterError(f"weight moment X_{k} requested, only X_1..X_{len(self.moments)} known")
        return self.moments[k - 1]

    def require(self, k: int) -> None:
        if k > len(self.moments):
            raise ParameterError(f"need weight moments up to X_{k}, have {len(self.moments)}")

    def scaled(self, c: Rational) -> "WeightMomentSeq":
        """Moments of ``c * a``."""
        c = as_fraction(c)
        return WeightMomentSeq(c ** (k + 1) * x for k, x in enumerate(self.moments))

    @classmethod
    def constant(cls, c: Rational, k_max: int) -> "WeightMomentSeq":
        c = as_fraction(c)
        return cls(c**k for k in range(1, k_max + 1))


def falling_factorial(n: int, k: int) -> int:
    """``n (n-1) ... (n-k+1)``; zero once a factor hits zero."""
    out = 1
    for i in range(k):
        out *= n - i
        if out == 0:
            return 0
    return out


def binom(n: int, k: int) -> int:
    """Binomial coefficient, zero outside ``0 <= k <= n``."""
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)


def as_moment_seq(X: WeightMomentSeq | Sequence[Rational]) -> WeightMomentSeq:
    if isinstance(X, WeightMomentSeq):
        return X
    return WeightMomentSeq(X)
