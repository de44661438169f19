"""Finitely supported multi-indices alpha = (alpha_1, alpha_2, ...).

alpha_k counts the variables that appear with multiplicity k, so the weight
n(alpha) = sum k alpha_k is the tensor degree and |alpha| = sum alpha_k the
number of free variables.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .orthopoly import JacobiMatrix


@dataclass(frozen=True, order=True)
class AlphaIndex:
    counts: tuple[int, ...] = ()

    def __post_init__(self):
        c = tuple(int(x) for x in self.counts)
        if any(x < 0 for x in c):
            raise ValueError(f"negative count in {c}")
        while c and c[-1] == 0:
            c = c[:-1]
        object.__setattr__(self, "counts", c)

    def __getitem__(self, k: int) -> int:
        """alpha_k, 1-based; zero outside the support."""
        if k < 1:
            raise IndexError("alpha is indexed from 1")
        return self.counts[k - 1] if k <= len(self.counts) else 0

    @property
    def weight(self) -> int:
        return sum(k * c for k, c in enumerate(self.counts, start=1))

    @property
    def size(self) -> int:
        return sum(self.counts)

    @property
    def max_multiplicity(self) -> int:
        return len(self.counts)

    def shift(self, k: int, sign: int) -> "AlphaIndex":
        """alpha +/- 1_k."""
        if k < 1 or sign not in (1, -1):
            raise ValueError("shift needs k >= 1 and sign +/-1")
        c = list(self.counts) + [0] * max(0, k - len(self.counts))
        c[k - 1] += sign
        if c[k - 1] < 0:
            raise ValueError(f"invalid shift: alpha_{k} = 0 in {self.counts}")
        return AlphaIndex(tuple(c))

    def __repr__(self) -> str:
        return f"AlphaIndex{self.counts}"


def _partitions(n: int, max_part: int) -> Iterator[list[int]]:
    if n == 0:
        yield []
        return
    for p in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - p, p):
            yield [p] + rest


def enumerate_alpha(n: int) -> list[AlphaIndex]:
    """All alpha of weight n (integer partitions of n), in descending lexicographic order of counts."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = []
    for parts in _partitions(n, n):
        c = [0] * n
        for p in parts:
            c[p - 1] += 1
        out.append(AlphaIndex(tuple(c)))
    pad = max(n, 1)
    out.sort(key=lambda a: a.counts + (0,) * (pad - len(a.counts)), reverse=True)
    return out


def k_alpha(alpha: AlphaIndex, J: JacobiMatrix) -> float:
    """n(alpha)!/prod alpha_k! * prod_{k>=2} (b_1...b_{k-1}/k!)^{2 alpha_k}."""
    val = Fraction(math.factorial(alpha.weight))
    for c in alpha.counts:
        val /= math.factorial(c)
    out = float(val)
    bprod = 1.0
    for k in range(2, alpha.max_multiplicity + 1):
        bprod *= J.b_at(k - 1)
        if alpha[k]:
            out *= (bprod / math.factorial(k)) ** (2 * alpha[k])
    return out


def k_alpha_exact(alpha: AlphaIndex, J: JacobiMatrix) -> Fraction:
    """Same as :func:`k_alpha` using the exact b_n^2 of a rational moment pipeline."""
    if J.b2_exact is None:
        raise ValueError("Jacobi matrix carries no exact coefficients")
    val = Fraction(math.factorial(alpha.weight))
    for c in alpha.counts:
        val /= math.factorial(c)
    b2prod = Fraction(1)
    for k in range(2, alpha.max_multiplicity + 1):
        i = k - 1
        if i - 1 < len(J.b2_exact):
            b2prod *= J.b2_exact[i - 1]
        elif J.terminal:
            b2prod = Fraction(0)
        else:
            raise ValueError(f"l2 truncation too small: b_{i} needed")
        if alpha[k]:
            val *= (b2prod / math.factorial(k) ** 2) ** alpha[k]
    return val
