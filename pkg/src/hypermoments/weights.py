"""Hyperedge weight laws with exact moments and sampling."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .params import ParameterError, WeightMomentSeq, as_fraction


class WeightDistribution:
    """Base class: ``exact_moment(k)`` and ``sample(rng, size)``."""

    def exact_moment(self, k: int) -> Fraction:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def moments(self, k_max: int) -> WeightMomentSeq:
        return WeightMomentSeq(self.exact_moment(k) for k in range(1, k_max + 1))

    @property
    def spec(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(WeightDistribution):
    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c", as_fraction(self.c))

    def exact_moment(self, k: int) -> Fraction:
        return self.c**k

    def sample(self, rng, size):
        return np.full(size, float(self.c))

    @property
    def spec(self) -> str:
        return f"const:{self.c}"


@dataclass(frozen=True)
class TwoPoint(WeightDistribution):
    """``a`` with probability ``pi``, else ``b``."""

    a: Fraction
    b: Fraction
    pi: Fraction

    def __post_init__(self):
        for name in ("a", "b", "pi"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if not 0 <= self.pi <= 1:
            raise ParameterError(f"two-point probability {self.pi} outside [0, 1]")

    def exact_moment(self, k: int) -> Fraction:
        return self.pi * self.a**k + (1 - self.pi) * self.b**k

    def sample(self, rng, size):
        return np.where(rng.random(size) < float(self.pi), float(self.a), float(self.b))

    @property
    def spec(self) -> str:
        return f"twopoint:{self.a},{self.b},{self.pi}"


@dataclass(frozen=True)
class Sign(WeightDistribution):
    """``+1`` or ``-1`` with probability 1/2 each."""

    def exact_moment(self, k: int) -> Fraction:
        return Fraction(1 - k % 2)

    def sample(self, rng, size):
        return rng.integers(0, 2, size=size) * 2.0 - 1.0

    @property
    def spec(self) -> str:
        return "sign"


@dataclass(frozen=True)
class Gaussian(WeightDistribution):
    """Centred normal with standard deviation ``sigma``.

    The moments ``sigma**k (k-1)!!`` are rational whenever ``sigma`` is.
    """

    sigma: Fraction

    def __post_init__(self):
        object.__setattr__(self, "sigma", as_fraction(self.sigma))
        if self.sigma < 0:
            raise ParameterError(f"sigma must be nonnegative, got {self.sigma}")

    def exact_moment(self, k: int) -> Fraction:
        if k % 2:
            return Fraction(0)
        double_fact = 1
        for i in range(k - 1, 0, -2):
            double_fact *= i
        return self.sigma**k * double_fact

    def sample(self, rng, size):
        return rng.normal(0.0, float(self.sigma), size=size)

    @property
    def spec(self) -> str:
        return f"gauss:{self.sigma}"


def parse_distribution(text: str) -> WeightDistribution:
    """Parse ``const:c``, ``sign``, ``twopoint:a,b,pi`` or ``gauss:sigma``.

    >>> parse_distribution("twopoint:2,-1,1/2").exact_moment(2)
    Fraction(5, 2)
    """
    name, _, args = text.strip().partition(":")
    try:
        if name == "sign" and not args:
            return Sign()
        if name == "const":
            return Constant(as_fraction(args))
        if name == "twopoint":
            a, b, pi = args.split(",")
            return TwoPoint(as_fraction(a), as_fraction(b), as_fraction(pi))
        if name == "gauss":
            return Gaussian(as_fraction(args))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"bad distribution spec {text!r}: {exc}") from None
    raise ParameterError(f"unknown distribution spec {text!r}")
