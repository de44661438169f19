"""Equivalence of the two representations, checked through vacuum word moments.

Three independent evaluations of E[prod_i <omega, phi_i>]:

* the Jacobi field on extended Fock coordinates,
* the A-field on the symmetric Fock space,
* the set-partition cumulant formula: a block B of word positions has joint
  cumulant int s^{|B|} nu(ds) * int prod_{i in B} phi_i dsigma
  = m_{|B|-2}(nu~) * int prod phi_i dsigma, and singletons vanish.

The intertwiner is built from cyclic word vectors: equal Gram matrices on both
sides give a well-defined isometry between the two cyclic spans.
"""
from __future__ import annotations

import itertools
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.linalg import qr

from .basespace import Grid
from .extfock import ExtVector
from .fockrep import AField, FockVector
from .jacobifield import JacobiField, TruncationFlag
from .measure import JumpMeasure, MeasureError, nu_from_tilde


class EquivalenceViolation(RuntimeError):
    pass


class DegenerateBasis(RuntimeError):
    pass


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """All set partitions of ``items`` (Bell-number many)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def oracle_moment(word: Sequence, nu_moments: Sequence, grid: Grid, absolute: bool = False) -> float:
    """E[prod <omega, phi_i>] from the joint cumulants of the centered Levy noise.

    ``absolute=True`` sums absolute values of all terms; used as a cancellation-aware scale.
    """
    word = [grid.check(phi) for phi in word]
    if len(word) - 2 >= len(nu_moments):
        raise ValueError("not enough moments of nu~ for this word length")
    total = 0.0
    cache: dict[tuple, float] = {}
    for part in set_partitions(range(len(word))):
        if any(len(b) < 2 for b in part):
            continue
        term = 1.0
        for b in part:
            key = tuple(b)
            if key not in cache:
                m = float(nu_moments[len(b) - 2])
                if absolute:
                    cache[key] = abs(m) * grid.moment(*[np.abs(word[i]) for i in b])
                else:
                    cache[key] = m * grid.moment(*[word[i] for i in b])
            term *= cache[key]
        total += term
    return total


def relative_deviation(x: float, y: float, scale: float = 0.0) -> float:
    """|x - y| / max(|x|, |y|, scale, 1e-300)."""
    return abs(x - y) / max(abs(x), abs(y), scale, 1e-300)


@dataclass
class WordMomentReport:
    word: tuple[int, ...]
    value_J: float
    value_A: float
    value_oracle: float
    scale: float
    dev_JA: float = field(init=False)
    dev_JO: float = field(init=False)
    dev_AO: float = field(init=False)

    def __post_init__(self):
        self.dev_JA = relative_deviation(self.value_J, self.value_A, self.scale)
        self.dev_JO = relative_deviation(self.value_J, self.value_oracle, self.scale)
        self.dev_AO = relative_deviation(self.value_A, self.value_oracle, self.scale)

    @property
    def max_dev(self) -> float:
        return max(self.dev_JA, self.dev_JO, self.dev_AO)


def all_words(n_letters: int, max_len: int) -> list[tuple[int, ...]]:
    return [w for L in range(max_len + 1) for w in itertools.product(range(n_letters), repeat=L)]


def word_vectors(field_, letters: Sequence, max_len: int) -> dict[tuple[int, ...], object]:
    """Vectors W Omega for every word over ``letters`` up to ``max_len``; W = X(w_0)...X(w_last).

    Each vector is obtained from a shorter one by one more operator on the left.
    """
    out = {(): field_.vacuum()}
    frontier = [()]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            v = out[w]
            for i, phi in enumerate(letters):
                out[(i,) + w] = field_.apply("full", phi, v)
                nxt.append((i,) + w)
        frontier = nxt
    return out


def compare_moments(
    jfield: JacobiField,
    afield: AField,
    letters: Sequence,
    nu_moments: Sequence,
    words: Sequence[tuple[int, ...]],
) -> list[WordMomentReport]:
    """Three-way comparison; entries whose evaluation hit a truncation flag raise."""
    grid = jfield.space.grid
    max_len = max((len(w) for w in words), default=0)
    vj = word_vectors(jfield, letters, max_len)
    va = word_vectors(afield, letters, max_len)
    reports = []
    for w in words:
        if vj[w].truncated or va[w].truncated:
            raise ValueError(f"truncation flag raised while evaluating word {w}")
        phis = [letters[i] for i in w]
        reports.append(
            WordMomentReport(
                word=tuple(w),
                value_J=float(vj[w].coeffs[0] * jfield.space.metric[0]),
                value_A=float(va[w].coeffs[0]),
                value_oracle=oracle_moment(phis, nu_moments, grid),
                scale=oracle_moment(phis, nu_moments, grid, absolute=True),
            )
        )
    return reports


Word = tuple  # tuple of (letter index, part) pairs


@dataclass
class Intertwiner:
    """I on the cyclic span: I v = left @ (right @ v) with right including the ext metric.

    ``words`` are sequences of (letter, part); part "full" everywhere gives the
    plain word basis, mixed parts give the span generated by the separate
    creation/neutral/annihilation operators.
    """

    words: list[Word]
    XJ: np.ndarray
    XA: np.ndarray
    GJ: np.ndarray
    GA: np.ndarray
    left: np.ndarray
    right: np.ndarray
    rank: int
    gram_deviation: float
    jfield: JacobiField
    afield: AField

    def __call__(self, v: ExtVector) -> FockVector:
        return FockVector(self.afield.space, self.left @ (self.right @ v.coeffs))

    def isometry_defect(self) -> float:
        """max |<I x_w, I x_v> - <x_w, x_v>| / max|G| over basis words."""
        IX = self.left @ (self.right @ self.XJ)
        G = IX.T @ (self.afield.space.metric[:, None] * IX)
        return float(np.max(np.abs(G - self.GJ)) / np.max(np.abs(self.GJ)))

    def grading_spread(self, v: ExtVector) -> dict[int, float]:
        """Fock-degree distribution of ||I v||^2; I does not preserve the extended grading."""
        F = self(v)
        S = self.afield.space
        return {
            int(n): float(np.sum((S.metric * F.coeffs**2)[S.degree == n]))
            for n in np.unique(S.degree)
        }


def _independent(Y: np.ndarray, tol: float) -> np.ndarray:
    """Column indices of a maximal well-conditioned independent subset (pivoted QR)."""
    if Y.shape[1] == 0:
        return np.array([], dtype=int)
    _, R, piv = qr(Y, mode="economic", pivoting=True)
    d = np.abs(np.diag(R))
    if d.size == 0 or d[0] == 0:
        return np.array([], dtype=int)
    return np.sort(piv[: int(np.sum(d > tol * d[0]))])


def _generate_words(jfield, afield, letters, K, parts, rank_tol):
    """Words up to length K. For split parts the set is pruned level by level to a
    J-side independent subset before extending, which keeps it at most dim-sized."""
    if parts == ("full",):
        words = [tuple((i, "full") for i in w) for w in all_words(len(letters), K)]
        vj = word_vectors(jfield, letters, K)
        va = word_vectors(afield, letters, K)
        XJ = np.stack([vj[tuple(i for i, _ in w)].coeffs for w in words], axis=1)
        XA = np.stack([va[tuple(i for i, _ in w)].coeffs for w in words], axis=1)
        return words, XJ, XA
    sqrt_g = np.sqrt(jfield.space.metric)
    words = [()]
    cols_j = [jfield.vacuum().coeffs]
    cols_a = [afield.vacuum().coeffs]
    frontier = [(w, cols_j[0], cols_a[0]) for w in words]
    for _ in range(K):
        cand = []
        for w, xj, xa in frontier:
            vj = ExtVector(jfield.space, xj)
            va = FockVector(afield.space, xa)
            for i, phi in enumerate(letters):
                for p in parts:
                    cand.append((((i, p),) + w, jfield.apply(p, phi, vj).coeffs, afield.apply(p, phi, va).coeffs))
        for w, xj, xa in cand:
            words.append(w)
            cols_j.append(xj)
            cols_a.append(xa)
        keep = _independent(np.stack([sqrt_g * c[1] for c in cand], axis=1), rank_tol)
        frontier = [cand[k] for k in keep]
    return words, np.stack(cols_j, axis=1), np.stack(cols_a, axis=1)


def build_intertwiner(
    jfield: JacobiField,
    afield: AField,
    letters: Sequence,
    K: int,
    parts: Sequence[str] = ("full",),
    gram_tol: float = 1e-9,
    rank_tol: float = 1e-10,
) -> Intertwiner:
    """Map J-side word vectors to A-side word vectors through the shared Gram matrix.

    Symmetric orthogonalization: G_J = V diag(lam) V^T with eigenvalues below
    rank_tol * max dropped, I = X_A V lam^{-1} V^T X_J^T G_ext.
    """
    words, XJ, XA = _generate_words(jfield, afield, letters, K, tuple(parts), rank_tol)
    GJ = XJ.T @ (jfield.space.metric[:, None] * XJ)
    GA = XA.T @ (afield.space.metric[:, None] * XA)
    dev = float(np.linalg.norm(GJ - GA) / np.linalg.norm(GJ))
    if dev > gram_tol:
        raise EquivalenceViolation(f"equivalence violation: relative Gram deviation {dev:.3e}")
    lam, V = np.linalg.eigh((GJ + GJ.T) / 2)
    keep = lam > rank_tol * lam.max()
    rank = int(keep.sum())
    if rank == 0:
        raise DegenerateBasis("cyclic basis degenerate, enlarge test-function set")
    V, lam = V[:, keep], lam[keep]
    left = XA @ (V / np.sqrt(lam))
    right = (V / np.sqrt(lam)).T @ (XJ.T * jfield.space.metric[None, :])
    return Intertwiner(list(words), XJ, XA, GJ, GA, left, right, rank, dev, jfield, afield)


def intertwine_residual(I: Intertwiner, part: str, phi, max_len: int) -> float:
    """max over basis words of length <= max_len of ||I J^part v - A^part I v|| / ||v||."""
    worst = 0.0
    for col, w in enumerate(I.words):
        if len(w) > max_len:
            continue
        v = ExtVector(I.jfield.space, I.XJ[:, col])
        nv = v.norm()
        if nv <= 1e-14:
            continue
        lhs = I(I.jfield.apply(part, phi, v))
        # I v carries round-off at the top Fock degree; dropping it is harmless
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationFlag)
            rhs = I.afield.apply(part, phi, I(v))
        worst = max(worst, (lhs - rhs).norm() / nv)
    return worst


def diagonal_intertwiner(jfield: JacobiField, afield: AField):
    """Closed-form ambient isometry: the alpha-block coordinate goes to the Fock
    component with alpha_k particles on level k-1, scaled by
    c_alpha = n!/|alpha|! * prod_k (b_1...b_{k-1}/k!)^{alpha_k}.

    Returns a sparse (fock dim x ext dim) matrix.
    """
    es, fs, J = jfield.space, afield.space, jfield.space.J
    rows, cols, vals = [], [], []
    for alpha in es.alphas:
        if alpha.max_multiplicity > fs.M:
            continue
        c = math.factorial(alpha.weight) / math.factorial(alpha.size)
        bprod = 1.0
        for k in range(1, alpha.max_multiplicity + 1):
            if k >= 2:
                bprod *= J.b_at(k - 1)
            c *= (bprod / math.factorial(k)) ** alpha[k]
        if c == 0.0:
            continue
        for key in es.bases[alpha]:
            z = tuple(sorted((k - 1) * fs.m + x for k, ms in enumerate(key, start=1) for x in ms))
            if len(z) > fs.N:
                continue
            rows.append(fs.index[z])
            cols.append(es.index[(alpha, key)])
            vals.append(c)
    return sp.csr_matrix((vals, (rows, cols)), shape=(fs.dim, es.dim))


# ---- Monte Carlo ------------------------------------------------------------


@dataclass
class MCResult:
    samples: np.ndarray  # (n_samples, n_letters) values of <omega, phi_l>
    words: list[tuple[int, ...]]
    mean: np.ndarray
    se: np.ndarray
    seed: int
    chunk: int


def _mc_chunk(i, seed, n_i, lam, coef, comp, words):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(i,))))
    counts = rng.poisson(lam, size=(n_i, lam.size))
    X = counts @ coef - comp
    sums, sqs = [], []
    for w in words:
        p = np.prod(X[:, list(w)], axis=1) if w else np.ones(n_i)
        sums.append(p.sum())
        sqs.append((p * p).sum())
    return X, np.array(sums), np.array(sqs)


def mc_sample(
    nu_tilde: JumpMeasure,
    grid: Grid,
    letters: Sequence,
    n_samples: int,
    seed: int,
    max_order: int = 4,
    threads: int = 1,
    chunk: int = 1 << 16,
) -> MCResult:
    """Compensated compound-Poisson samples of <omega, phi_l>.

    For every atom s_i of nu (mass u_i) and grid point x_j (weight w_j) the
    jump count is Poisson(u_i w_j); the sample is sum c_ij s_i phi(x_j) minus
    its mean. Chunks use their own seeded streams, so results do not depend
    on ``threads``.
    """
    if not nu_tilde.is_atomic:
        raise MeasureError("sampler requires finite activity")
    nu = nu_from_tilde(nu_tilde)
    s = np.array([float(x) for x in nu.sizes])
    u = np.array([float(x) for x in nu.masses])
    w = grid.weights
    lam = np.outer(u, w).ravel()
    phis = np.stack([grid.check(p) for p in letters], axis=1)  # (m, L)
    coef = (s[:, None, None] * phis[None, :, :]).reshape(-1, phis.shape[1])
    comp = lam @ coef
    words = [
        wd
        for r in range(1, max_order + 1)
        for wd in itertools.combinations_with_replacement(range(len(letters)), r)
    ]
    sizes = [min(chunk, n_samples - k) for k in range(0, n_samples, chunk)]
    args = [(i, seed, n_i, lam, coef, comp, words) for i, n_i in enumerate(sizes)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda a: _mc_chunk(*a), args))
    else:
        parts = [_mc_chunk(*a) for a in args]
    X = np.concatenate([p[0] for p in parts], axis=0)
    sums = np.zeros(len(words))
    sqs = np.zeros(len(words))
    for _, s_, q_ in parts:
        sums += s_
        sqs += q_
    mean = sums / n_samples
    var = np.maximum(sqs / n_samples - mean**2, 0.0) * n_samples / max(n_samples - 1, 1)
    se = np.sqrt(var / n_samples)
    return MCResult(X, words, mean, se, seed, chunk)
