"""Symmetric Fock space over l2(M) (x) L^2(grid) and the operators A+/A0/A-/A.

One-particle index q = l * m + j for level l < M and grid point j. A degree-n
vector is a symmetric function of n one-particle arguments, stored by its
values on multisets; the Fock norm carries the grading weight n!.
"""
from __future__ import annotations

import itertools
import math
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .basespace import Grid
from .jacobifield import TruncationFlag
from .orthopoly import JacobiMatrix, TruncationError, split


def dense_guard(M: int, m: int, N: int) -> bool:
    """Whether dense operator assembly is allowed: C(Mm+N-1, N) <= 2e4."""
    return math.comb(M * m + N - 1, N) <= 20_000


class FockSpace:
    def __init__(self, grid: Grid, M: int, N: int):
        self.grid, self.M, self.N = grid, M, N
        self.m = grid.size
        self.d = M * self.m
        # one-particle metric in function-value coordinates
        self.w1 = np.tile(grid.weights, M)
        self.keys: list[tuple[int, ...]] = []
        for n in range(N + 1):
            self.keys.extend(itertools.combinations_with_replacement(range(self.d), n))
        self.index = {k: i for i, k in enumerate(self.keys)}
        self.dim = len(self.keys)
        self.degree = np.array([len(k) for k in self.keys])
        metric = np.empty(self.dim)
        for i, k in enumerate(self.keys):
            n = len(k)
            orderings = math.factorial(n)
            for c in Counter(k).values():
                orderings //= math.factorial(c)
            metric[i] = math.factorial(n) * orderings * math.prod(self.w1[q] for q in k)
        self.metric = metric
        self._build_tables()

    def _build_tables(self):
        # removal records: Z, q in Z (distinct), multiplicity of q, index of Z - q
        out, qs, mus, subs = [], [], [], []
        for i, k in enumerate(self.keys):
            for q, mu in Counter(k).items():
                lst = list(k)
                lst.remove(q)
                out.append(i)
                qs.append(q)
                mus.append(mu)
                subs.append(self.index[tuple(lst)])
        self.rem_out = np.array(out, dtype=np.int64)
        self.rem_q = np.array(qs, dtype=np.int64)
        self.rem_mu = np.array(mus, dtype=float)
        self.rem_sub = np.array(subs, dtype=np.int64)
        # insertion table: S (degree < N) + q
        low = [i for i, k in enumerate(self.keys) if len(k) < self.N]
        self.ins_rows = np.array(low, dtype=np.int64)
        ins = np.empty((len(low), self.d), dtype=np.int64)
        for r, i in enumerate(low):
            k = self.keys[i]
            for q in range(self.d):
                ins[r, q] = self.index[tuple(sorted(k + (q,)))]
        self.ins = ins
        self._ins_pos = np.full(self.dim, -1, dtype=np.int64)
        self._ins_pos[self.ins_rows] = np.arange(len(low))

    def level_of(self, q: int) -> int:
        return q // self.m

    def vacuum(self) -> "FockVector":
        c = np.zeros(self.dim)
        c[0] = 1.0
        return FockVector(self, c)

    def one_particle(self, level_vec, phi) -> np.ndarray:
        """xi (x) phi as a one-particle coefficient vector."""
        return np.kron(np.asarray(level_vec, float), self.grid.check(phi))

    def one_particle_inner(self, h, g) -> float:
        return float(np.sum(self.w1 * np.asarray(h) * np.asarray(g)))

    def from_function(self, n: int, fn) -> "FockVector":
        """Degree-n vector whose value at a multiset of one-particle indices is fn(*indices)."""
        c = np.zeros(self.dim)
        for i, k in enumerate(self.keys):
            if len(k) == n:
                c[i] = fn(*k)
        return FockVector(self, c)

    def product_vector(self, hs: Sequence[np.ndarray]) -> "FockVector":
        """h_1 (x)^ ... (x)^ h_n via the permanent formula (independent of a_plus)."""
        n = len(hs)
        hs = [np.asarray(h, float) for h in hs]
        perms = list(itertools.permutations(range(n)))

        def value(*zs):
            return sum(math.prod(hs[p[i]][zs[i]] for i in range(n)) for p in perms) / len(perms)

        return self.from_function(n, value)

    # ---- standard operators -------------------------------------------------

    def a_plus_matrix(self, h) -> sp.csr_matrix:
        h = np.asarray(h, float)
        deg = self.degree[self.rem_out]
        data = self.rem_mu / deg * h[self.rem_q]
        return sp.csr_matrix((data, (self.rem_out, self.rem_sub)), shape=(self.dim, self.dim))

    def a_minus_matrix(self, h) -> sp.csr_matrix:
        h = np.asarray(h, float)
        nrow, d = self.ins.shape
        rows = np.repeat(self.ins_rows, d)
        cols = self.ins.ravel()
        coef = (self.degree[self.ins_rows] + 1)[:, None] * (self.w1 * h)[None, :]
        return sp.csr_matrix((coef.ravel(), (rows, cols)), shape=(self.dim, self.dim))

    def a_zero_matrix(self, T) -> sp.csr_matrix:
        """Differential second quantization dGamma(T), T acting on coefficient vectors."""
        T = sp.csr_matrix(np.asarray(T, float) if not sp.issparse(T) else T)
        T.eliminate_zeros()
        counts = np.diff(T.indptr)[self.rem_q]
        total = int(counts.sum())
        rec = np.repeat(np.arange(self.rem_q.size), counts)
        starts = T.indptr[self.rem_q]
        offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        ent = np.repeat(starts, counts) + offs
        qprime = T.indices[ent]
        vals = T.data[ent] * self.rem_mu[rec]
        sub = self.rem_sub[rec]
        pos = self._ins_pos[sub]
        cols = self.ins[pos, qprime]
        rows = self.rem_out[rec]
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim))

    def a_plus(self, h, F: "FockVector") -> "FockVector":
        return F._apply(self.a_plus_matrix(h), raises_degree=True)

    def a_minus(self, h, F: "FockVector") -> "FockVector":
        return F._apply(self.a_minus_matrix(h))

    def a_zero(self, T, F: "FockVector") -> "FockVector":
        return F._apply(self.a_zero_matrix(T))


@dataclass(eq=False)
class FockVector:
    space: FockSpace
    coeffs: np.ndarray
    truncated: bool = False

    def _apply(self, mat, raises_degree=False) -> "FockVector":
        flag = self.truncated
        sp_ = self.space
        if raises_degree and np.any(self.coeffs[sp_.degree == sp_.N] != 0.0):
            flag = True
            warnings.warn("creation from top degree dropped", TruncationFlag, stacklevel=3)
        return FockVector(sp_, mat @ self.coeffs, flag)

    def degree_part(self, n: int) -> "FockVector":
        return FockVector(self.space, np.where(self.space.degree == n, self.coeffs, 0.0))

    def __add__(self, other):
        return FockVector(self.space, self.coeffs + other.coeffs, self.truncated or other.truncated)

    def __sub__(self, other):
        return FockVector(self.space, self.coeffs - other.coeffs, self.truncated or other.truncated)

    def __mul__(self, c):
        return FockVector(self.space, self.coeffs * c, self.truncated)

    __rmul__ = __mul__

    def norm(self) -> float:
        return math.sqrt(max(inner_fock(self, self), 0.0))


def inner_fock(F: FockVector, G: FockVector) -> float:
    if F.space is not G.space:
        raise ValueError("dimension mismatch")
    return float(np.sum(F.space.metric * F.coeffs * G.coeffs))


class AField:
    """A+(phi) = a+(e0 (x) phi) + dGamma(J+ (x) phi), A0(phi) = dGamma(J0 (x) phi),
    A-(phi) = a-(e0 (x) phi) + dGamma(J- (x) phi)."""

    def __init__(self, space: FockSpace, J: JacobiMatrix):
        if J.size != space.M:
            raise ValueError("Fock level count must equal the Jacobi matrix size")
        self.space, self.J = space, J
        self.jp, self.j0, self.jm = split(J)
        self.e0 = np.zeros(space.M)
        self.e0[0] = 1.0
        self._cache: dict[tuple, sp.csr_matrix] = {}
        top = np.array([any(space.level_of(q) == space.M - 1 for q in k) for k in space.keys])
        self._top_level = top

    def one_particle_op(self, jpart: np.ndarray, phi) -> np.ndarray:
        return np.kron(jpart, np.diag(self.space.grid.check(phi)))

    def matrix(self, part: str, phi) -> sp.csr_matrix:
        phi = self.space.grid.check(phi)
        key = (part, phi.tobytes())
        if key in self._cache:
            return self._cache[key]
        S = self.space
        h0 = S.one_particle(self.e0, phi)
        if part == "plus":
            mat = S.a_plus_matrix(h0) + S.a_zero_matrix(self.one_particle_op(self.jp, phi))
        elif part == "zero":
            mat = S.a_zero_matrix(self.one_particle_op(self.j0, phi))
        elif part == "minus":
            mat = S.a_minus_matrix(h0) + S.a_zero_matrix(self.one_particle_op(self.jm, phi))
        elif part == "full":
            mat = (
                S.a_plus_matrix(h0)
                + S.a_zero_matrix(self.one_particle_op(self.J.dense(), phi))
                + S.a_minus_matrix(h0)
            )
        else:
            raise ValueError(f"unknown part {part!r}")
        self._cache[key] = mat.tocsr()
        return self._cache[key]

    def apply(self, part: str, phi, F: FockVector) -> FockVector:
        S = self.space
        flag = F.truncated
        if part in ("plus", "full"):
            if np.any(F.coeffs[S.degree == S.N] != 0.0):
                flag = True
                warnings.warn("creation from top degree dropped", TruncationFlag, stacklevel=2)
            if not self.J.terminal and np.any(F.coeffs[self._top_level] != 0.0):
                flag = True
                warnings.warn("level raise beyond l2 truncation dropped", TruncationFlag, stacklevel=2)
        return FockVector(S, self.matrix(part, phi) @ F.coeffs, flag)

    def A_part(self, part: str, phi, F: FockVector) -> FockVector:
        return self.apply(part, phi, F)

    def vacuum(self) -> FockVector:
        return self.space.vacuum()

    def apply_word(self, word: Sequence, parts: Iterable[str] | None = None) -> FockVector:
        parts = list(parts) if parts is not None else ["full"] * len(word)
        F = self.vacuum()
        for phi, part in zip(reversed(list(word)), reversed(parts)):
            F = self.apply(part, phi, F)
        return F

    def vacuum_moment(self, word: Sequence) -> float:
        F = self.apply_word(word)
        if F.truncated:
            raise TruncationError("word longer than the truncation allows")
        return float(F.coeffs[0])


def product_formula_crosscheck(
    field: AField, xi, psi, phi, n: int, part: str, reading: str = "psi"
) -> float:
    """Residual between the product-vector formulas for A^part(phi)(xi (x) psi)^{(x)n}
    and the second-quantized operators.

    ``reading="psi"`` uses (xi (x) psi)^{(x)(n-1)} for the power factors on the
    right-hand side; ``reading="phi"`` uses (xi (x) phi)^{(x)(n-1)}, which only
    agrees for n <= 1.
    """
    S = field.space
    xi = np.asarray(xi, float)
    h = S.one_particle(xi, psi)
    rest = S.one_particle(xi, psi if reading == "psi" else phi)
    if n == 0:
        lhs = field.apply(part, phi, S.vacuum())
    else:
        lhs = field.apply(part, phi, S.product_vector([h] * n))
    e0 = field.e0
    phipsi = S.grid.check(phi) * S.grid.check(psi)
    rhs = FockVector(S, np.zeros(S.dim))
    if part == "plus":
        rhs = rhs + S.product_vector([S.one_particle(e0, phi)] + [h] * n)
        if n >= 1:
            rhs = rhs + n * S.product_vector([S.one_particle(field.jp @ xi, phipsi)] + [rest] * (n - 1))
    elif part == "zero":
        if n >= 1:
            rhs = rhs + n * S.product_vector([S.one_particle(field.j0 @ xi, phipsi)] + [rest] * (n - 1))
    elif part == "minus":
        if n >= 1:
            c = n * xi[0] * S.grid.inner(phi, psi)
            rhs = rhs + c * S.product_vector([rest] * (n - 1))
            rhs = rhs + n * S.product_vector([S.one_particle(field.jm @ xi, phipsi)] + [rest] * (n - 1))
    else:
        raise ValueError(f"unknown part {part!r}")
    return (lhs - rhs).norm()
