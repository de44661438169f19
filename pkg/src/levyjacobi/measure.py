"""Jump measures: the Levy measure nu and its square-weighted companion nu~(ds) = s^2 nu(ds).

Atom measures keep their sizes and masses as given; when every entry is a
``Fraction`` all moment computations stay exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Optional, Sequence


class MeasureError(ValueError):
    pass


def _factorial_shift(k: int) -> int:
    return math.factorial(k + 1)


# Named moment families: name -> (moment rule m_k, human description)
FAMILIES: dict[str, tuple[Callable[[int], int | Fraction], str]] = {
    "gamma2": (_factorial_shift, "density s*exp(-s) on (0, inf); m_k = (k+1)!"),
}


def as_number(x):
    """Parse a config scalar: ints and "p/q" strings become Fractions, floats stay floats."""
    if isinstance(x, bool):
        raise MeasureError(f"not a number: {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise MeasureError(f"not a number: {x!r}") from exc
    return float(x)


@dataclass(frozen=True)
class JumpMeasure:
    """Either a finite list of atoms (s, w) or a named family with a moment rule.

    ``c`` records the total mass the measure had before normalization.
    """

    atoms: tuple[tuple[object, object], ...] = ()
    family: Optional[str] = None
    c: object = 1

    def __post_init__(self):
        if self.family is None:
            if not self.atoms:
                raise MeasureError("atom measure needs at least one atom")
            for s, w in self.atoms:
                if s == 0:
                    raise MeasureError("Levy measure charges zero")
                if w <= 0:
                    raise MeasureError(f"atom mass must be positive, got {w}")
        elif self.family not in FAMILIES:
            raise MeasureError(f"unknown family {self.family!r}")

    @classmethod
    def from_atoms(cls, pairs: Sequence[Sequence], c=1) -> "JumpMeasure":
        return cls(atoms=tuple((as_number(s), as_number(w)) for s, w in pairs), c=c)

    @property
    def is_atomic(self) -> bool:
        return self.family is None

    @property
    def exact(self) -> bool:
        return self.is_atomic and all(
            isinstance(s, Rational) and isinstance(w, Rational) for s, w in self.atoms
        )

    @property
    def sizes(self) -> list:
        return [s for s, _ in self.atoms]

    @property
    def masses(self) -> list:
        return [w for _, w in self.atoms]

    def total_mass(self):
        if not self.is_atomic:
            return FAMILIES[self.family][0](0)
        return sum(self.masses, Fraction(0) if self.exact else 0.0)


def normalize(raw: JumpMeasure) -> tuple[JumpMeasure, object]:
    """Rescale to a probability measure.

    Returns the normalized measure and the original mass ``c``. The caller
    compensates by scaling the base-space weights by ``c``.
    """
    if not raw.is_atomic:
        return raw, raw.c
    c = raw.total_mass()
    if c <= 0:
        raise MeasureError("degenerate measure")
    if c == 1:
        return raw, raw.c
    atoms = tuple((s, w / c) for s, w in raw.atoms)
    return JumpMeasure(atoms=atoms, c=c), c


def moments(m: JumpMeasure, K: int) -> list:
    """m_0..m_K. Exact Fractions for rational atoms and for integer moment rules."""
    if K < 0:
        raise MeasureError("K must be nonnegative")
    if not m.is_atomic:
        rule = FAMILIES[m.family][0]
        return [Fraction(rule(k)) for k in range(K + 1)]
    zero = Fraction(0) if m.exact else 0.0
    out = []
    for k in range(K + 1):
        out.append(sum((w * s**k for s, w in m.atoms), zero))
    return out


def nu_from_tilde(m: JumpMeasure) -> JumpMeasure:
    """Map nu~ atoms (s, w) to nu atoms (s, w/s^2)."""
    if not m.is_atomic:
        raise MeasureError("nu_from_tilde needs an atom measure")
    return JumpMeasure(atoms=tuple((s, w / (s * s)) for s, w in m.atoms), c=m.c)


def tilde_from_nu(m: JumpMeasure) -> JumpMeasure:
    """Inverse of :func:`nu_from_tilde`: (s, u) -> (s, u s^2)."""
    if not m.is_atomic:
        raise MeasureError("tilde_from_nu needs an atom measure")
    return JumpMeasure(atoms=tuple((s, u * s * s) for s, u in m.atoms), c=m.c)


def hankel(mom: Sequence, size: int) -> list[list]:
    return [[mom[i + j] for j in range(size)] for i in range(size)]


def standard_two_point() -> JumpMeasure:
    """nu~ = (delta_{-1} + delta_{1}) / 2, so a = (0, 0), b_1 = 1."""
    return JumpMeasure.from_atoms([(-1, Fraction(1, 2)), (1, Fraction(1, 2))])


def three_atom() -> JumpMeasure:
    """Asymmetric rational 3-atom nu~ used by the equivalence checks."""
    return JumpMeasure.from_atoms(
        [(-1, Fraction(1, 4)), (1, Fraction(1, 2)), (2, Fraction(1, 4))]
    )
