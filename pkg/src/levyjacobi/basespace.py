"""Finite weighted point set standing in for (X, sigma).

Test functions are plain real vectors of grid values. Every identity checked
downstream is a polynomial in (a_n, b_n) and the joint sigma-moments
int prod(phi_i) dsigma; such an identity holding for all non-atomic sigma
holds identically, so it also holds for the atomic sigma used here.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DimensionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Grid:
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise DimensionError("grid weights must be a nonempty vector")
        if np.any(w <= 0):
            raise ValueError("grid weights must be strictly positive")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.weights.size

    def scaled(self, c: float) -> "Grid":
        """sigma' = c sigma, the compensation for normalizing nu~."""
        return Grid(self.weights * float(c))

    def check(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.shape != (self.size,):
            raise DimensionError(f"dimension error: expected {self.size} values, got {f.shape}")
        return f

    def integrate(self, f) -> float:
        return float(self.check(f) @ self.weights)

    def inner(self, f, g) -> float:
        # same reduction as integrate(f * g), so the two agree bit for bit
        return float((self.check(f) * self.check(g)) @ self.weights)

    def moment(self, *fs) -> float:
        """int prod_i f_i dsigma."""
        prod = np.ones(self.size)
        for f in fs:
            prod = prod * self.check(f)
        return float(prod @ self.weights)


def pointwise_product(f, g) -> np.ndarray:
    f, g = np.asarray(f, dtype=float), np.asarray(g, dtype=float)
    if f.shape != g.shape:
        raise DimensionError("dimension error: pointwise product of mismatched vectors")
    return f * g


def standard_grid() -> Grid:
    return Grid(np.array([0.5, 0.5]))
