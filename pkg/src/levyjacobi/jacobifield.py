"""Creation, neutral and annihilation parts of J(phi) acting on extended Fock coordinates.

Every part is a sum over grid points j of phi(x_j) times a fixed sparse
pattern, so the patterns are built once per space and scaled per phi.

Coordinate formulas (block variables x of class k appear k times in D_alpha):

* plus, output at alpha' of weight n+1:
  (1/(n+1)) sum over class-1 slots  phi(x) f_{alpha'-1_1}(rest)
  + (k/(n+1)) sum over class-k slots phi(x) f_{alpha'-1_k+1_{k-1}}(x demoted to class k-1)
* zero, at alpha:  sum_k a_{k-1} sum over class-k slots phi(x) f_alpha
* minus, output at alpha of weight n-1:
  n int phi(x) f_{alpha+1_1}(x, ...) dsigma(x)
  + (n/k) b_{k-1}^2 sum over class-(k-1) slots phi(x) f_{alpha-1_{k-1}+1_k}(x promoted to class k)

Summing over the slots of a class is alpha_k times S_alpha applied to the
single-slot expression. In the annihilation term the multiplier sits on the
promoted variable; that is the last class-k variable of the input index.
"""
from __future__ import annotations

import warnings
from collections import Counter
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .extfock import ExtSpace, ExtVector, trim_key
from .orthopoly import TruncationError

PARTS = ("plus", "zero", "minus")


class TruncationFlag(UserWarning):
    pass


def _remove(ms: tuple, x: int) -> tuple:
    lst = list(ms)
    lst.remove(x)
    return tuple(lst)


def _add(ms: tuple, x: int) -> tuple:
    return tuple(sorted(ms + (x,)))


def _pad(key: tuple, length: int) -> list:
    return list(key) + [()] * (length - len(key))


class _Pattern:
    """rows, cols, grid points and coefficients of sum_j phi_j E_j."""

    def __init__(self, dim: int):
        self.dim = dim
        self.rows: list[int] = []
        self.cols: list[int] = []
        self.pts: list[int] = []
        self.coef: list[float] = []

    def add(self, r: int, c: int, j: int, v: float):
        if v != 0.0:
            self.rows.append(r)
            self.cols.append(c)
            self.pts.append(j)
            self.coef.append(v)

    def freeze(self):
        self.rows = np.asarray(self.rows, dtype=np.int64)
        self.cols = np.asarray(self.cols, dtype=np.int64)
        self.pts = np.asarray(self.pts, dtype=np.int64)
        self.coef = np.asarray(self.coef, dtype=float)
        return self

    def matrix(self, phi: np.ndarray) -> sp.csr_matrix:
        data = self.coef * phi[self.pts]
        return sp.csr_matrix((data, (self.rows, self.cols)), shape=(self.dim, self.dim))


def _check_coefficients(space: ExtSpace):
    for k in range(1, space.N + 1):
        space.J.a_at(k - 1)
        if k >= 2:
            space.J.b_at(k - 1)


def _build_patterns(space: ExtSpace) -> dict[str, _Pattern]:
    _check_coefficients(space)
    J, w = space.J, space.grid.weights
    pats = {p: _Pattern(space.dim) for p in PARTS}
    idx = space.index
    for alpha in space.alphas:
        n = alpha.weight
        L = alpha.max_multiplicity
        for key in space.bases[alpha]:
            row = idx[(alpha, key)]
            blocks = _pad(key, L + 1)
            # plus: this alpha is the output (weight n >= 1)
            if n >= 1:
                for k in range(1, L + 1):
                    if not alpha[k]:
                        continue
                    src = alpha.shift(k, -1)
                    if k >= 2:
                        src = src.shift(k - 1, +1)
                    for x, mu in Counter(blocks[k - 1]).items():
                        nb = list(blocks)
                        nb[k - 1] = _remove(nb[k - 1], x)
                        if k >= 2:
                            nb[k - 2] = _add(nb[k - 2], x)
                        col = idx[(src, trim_key(nb))]
                        pats["plus"].add(row, col, x, k * mu / n)
            # zero
            for k in range(1, L + 1):
                if not alpha[k]:
                    continue
                ak = J.a_at(k - 1)
                for x, mu in Counter(blocks[k - 1]).items():
                    pats["zero"].add(row, row, x, ak * mu)
            # minus: this alpha is the output (weight n), input weight n+1
            if n + 1 <= space.N:
                nin = n + 1
                src = alpha.shift(1, +1)
                for x in range(space.m):
                    nb = list(blocks)
                    nb[0] = _add(nb[0], x)
                    col = idx[(src, trim_key(nb))]
                    pats["minus"].add(row, col, x, nin * w[x])
                for k in range(2, L + 2):
                    if not alpha[k - 1]:
                        continue
                    src = alpha.shift(k - 1, -1).shift(k, +1)
                    b2 = J.b_at(k - 1) ** 2
                    nb0 = _pad(blocks, k)
                    for x, mu in Counter(blocks[k - 2]).items():
                        nb = list(nb0)
                        nb[k - 2] = _remove(nb[k - 2], x)
                        nb[k - 1] = _add(nb[k - 1], x)
                        col = idx[(src, trim_key(nb))]
                        pats["minus"].add(row, col, x, nin / k * b2 * mu)
    return {p: pat.freeze() for p, pat in pats.items()}


class JacobiField:
    """J+(phi), J0(phi), J-(phi) and J(phi) on a truncated extended Fock space."""

    def __init__(self, space: ExtSpace):
        self.space = space
        self.patterns = _build_patterns(space)
        self._cache: dict[tuple, sp.csr_matrix] = {}
        self._top = space.weight_of == space.N

    def matrix(self, part: str, phi) -> sp.csr_matrix:
        phi = self.space.grid.check(phi)
        key = (part, phi.tobytes())
        if key not in self._cache:
            if part == "full":
                mat = sum(self.matrix(p, phi) for p in PARTS)
            elif part in PARTS:
                mat = self.patterns[part].matrix(phi)
            else:
                raise ValueError(f"unknown part {part!r}")
            self._cache[key] = mat.tocsr()
        return self._cache[key]

    def apply(self, part: str, phi, v: ExtVector) -> ExtVector:
        if v.space is not self.space and not self.space.compatible(v.space):
            raise ValueError("incompatible spaces")
        flag = v.truncated
        if part in ("plus", "full") and np.any(v.coeffs[self._top] != 0.0):
            flag = True
            warnings.warn("creation from top weight dropped", TruncationFlag, stacklevel=2)
        return ExtVector(self.space, self.matrix(part, phi) @ v.coeffs, flag)

    def j_plus(self, phi, v: ExtVector) -> ExtVector:
        return self.apply("plus", phi, v)

    def j_zero(self, phi, v: ExtVector) -> ExtVector:
        return self.apply("zero", phi, v)

    def j_minus(self, phi, v: ExtVector) -> ExtVector:
        return self.apply("minus", phi, v)

    def j_full(self, phi, v: ExtVector) -> ExtVector:
        return self.apply("full", phi, v)

    def vacuum(self) -> ExtVector:
        return self.space.vacuum()

    def apply_word(self, word: Sequence, parts: Iterable[str] | None = None) -> ExtVector:
        """J(word[0]) ... J(word[-1]) Omega, optionally with a part per letter."""
        parts = list(parts) if parts is not None else ["full"] * len(word)
        if len(parts) != len(word):
            raise ValueError("part pattern length must match word length")
        v = self.vacuum()
        for phi, part in zip(reversed(list(word)), reversed(parts)):
            v = self.apply(part, phi, v)
        return v

    def vacuum_moment(self, word: Sequence) -> float:
        v = self.apply_word(word)
        if v.truncated:
            raise TruncationError("word longer than the truncation allows")
        return float(v.coeffs[0] * self.space.metric[0])
