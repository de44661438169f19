"""Truncated ambient extended Fock space  (+)_alpha L^2_alpha K_alpha n(alpha)!.

Coordinates of a vector are function values, one block per alpha of weight
<= N. A block-symmetric function on X^{|alpha|} is stored by its values on a
tuple of multisets, one multiset of grid points per multiplicity class k.
The L^2_alpha inner product counts every multiset with its number of
orderings so that it equals the plain sigma^{|alpha|} integral.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .alphaidx import AlphaIndex, enumerate_alpha, k_alpha
from .basespace import Grid
from .orthopoly import JacobiMatrix

Multiset = tuple[int, ...]
BlockKey = tuple[Multiset, ...]


class IncompatibleSpaces(ValueError):
    pass


def multisets(m: int, r: int) -> list[Multiset]:
    """Size-r multisets of {0..m-1} as sorted tuples, colexicographic order."""
    return sorted(itertools.combinations_with_replacement(range(m), r), key=lambda t: t[::-1])


def multiset_orderings(ms: Multiset) -> int:
    out = math.factorial(len(ms))
    for c in Counter(ms).values():
        out //= math.factorial(c)
    return out


def block_basis(m: int, alpha: AlphaIndex) -> list[BlockKey]:
    """Ordered basis of L^2_alpha: one multiset per class k = 1..max, class 1 varying slowest."""
    per_class = [multisets(m, c) for c in alpha.counts]
    return [tuple(key) for key in itertools.product(*per_class)]


def block_dimension(m: int, alpha: AlphaIndex) -> int:
    return math.prod(math.comb(m + c - 1, c) for c in alpha.counts)


def expand_key(key: BlockKey) -> tuple[int, ...]:
    """Argument list of D_alpha: points of class k repeated k times, as a sorted multiset."""
    return tuple(sorted(x for k, ms in enumerate(key, start=1) for x in ms for _ in range(k)))


def trim_key(blocks: Sequence[Multiset]) -> BlockKey:
    blocks = list(blocks)
    while blocks and not blocks[-1]:
        blocks.pop()
    return tuple(blocks)


@dataclass(frozen=True, eq=False)
class SymTensor:
    """Symmetric function on X^n, keyed by sorted point tuples (multisets)."""

    degree: int
    m: int
    values: dict = field(default_factory=dict)

    def __call__(self, *xs: int) -> float:
        return self.values.get(tuple(sorted(xs)), 0.0)

    @classmethod
    def from_function(cls, m: int, n: int, fn: Callable[..., float]) -> "SymTensor":
        return cls(n, m, {ms: float(fn(*ms)) for ms in multisets(m, n)})

    @classmethod
    def random(cls, m: int, n: int, rng: np.random.Generator) -> "SymTensor":
        return cls(n, m, {ms: float(rng.standard_normal()) for ms in multisets(m, n)})

    @classmethod
    def vacuum(cls, m: int) -> "SymTensor":
        return cls(0, m, {(): 1.0})

    def dense(self) -> np.ndarray:
        out = np.zeros((self.m,) * self.degree)
        for idx in itertools.product(range(self.m), repeat=self.degree):
            out[idx] = self(*idx)
        return out


def sym_product(phi: np.ndarray, f: SymTensor) -> SymTensor:
    """phi (x)^ f: (1/(n+1)) sum_i phi(x_i) f(x without x_i)."""
    n = f.degree
    vals = {}
    for ms in multisets(f.m, n + 1):
        acc = 0.0
        for i in range(n + 1):
            acc += phi[ms[i]] * f(*(ms[:i] + ms[i + 1:]))
        vals[ms] = acc / (n + 1)
    return SymTensor(n + 1, f.m, vals)


def tensor_power(phis: Sequence[np.ndarray], m: int) -> SymTensor:
    """phi_1 (x)^ ... (x)^ phi_n built by repeated symmetric products."""
    t = SymTensor.vacuum(m)
    for phi in reversed(list(phis)):
        t = sym_product(np.asarray(phi, float), t)
    return t


def symmetric_l2(f: SymTensor, g: SymTensor, grid: Grid) -> float:
    """int f g dsigma^n."""
    w = grid.weights
    return sum(
        multiset_orderings(ms) * math.prod(w[x] for x in ms) * v * g(*ms)
        for ms, v in f.values.items()
    )


def _class_slices(alpha: AlphaIndex) -> list[tuple[int, int, int]]:
    """(k, start, stop) variable ranges of each multiplicity class."""
    out, pos = [], 0
    for k, c in enumerate(alpha.counts, start=1):
        out.append((k, pos, pos + c))
        pos += c
    return out


def d_alpha_dense(f: SymTensor, alpha: AlphaIndex) -> np.ndarray:
    """(D_alpha f)(x_1..x_|alpha|) as a dense array over X^{|alpha|}."""
    if alpha.weight != f.degree:
        raise ValueError("degree/weight error")
    slices = _class_slices(alpha)
    out = np.zeros((f.m,) * alpha.size)
    for idx in itertools.product(range(f.m), repeat=alpha.size):
        args = [idx[i] for k, a, b in slices for i in range(a, b) for _ in range(k)]
        out[idx] = f(*args)
    return out


def s_alpha(g: np.ndarray, alpha: AlphaIndex) -> np.ndarray:
    """Orthogonal projection onto L^2_alpha: average over permutations inside each class."""
    if g.ndim != alpha.size:
        raise ValueError("array rank must equal |alpha|")
    groups = [list(itertools.permutations(range(a, b))) for _, a, b in _class_slices(alpha)]
    total = np.zeros_like(g, dtype=float)
    count = 0
    for choice in itertools.product(*groups):
        axes = [ax for perm in choice for ax in perm]
        total += np.transpose(g, axes)
        count += 1
    return total / count if count else g.astype(float)


def dense_l2(g: np.ndarray, h: np.ndarray, grid: Grid) -> float:
    """int g h dsigma^{ndim} for dense arrays over X^r."""
    prod = g * h
    for _ in range(g.ndim):
        prod = prod @ grid.weights
    return float(prod)


class ExtSpace:
    """Index bookkeeping and metric for the truncated ambient space, weights 0..N."""

    def __init__(self, grid: Grid, J: JacobiMatrix, N: int):
        self.grid, self.J, self.N = grid, J, N
        self.m = grid.size
        self.alphas: list[AlphaIndex] = [a for n in range(N + 1) for a in enumerate_alpha(n)]
        self.bases: dict[AlphaIndex, list[BlockKey]] = {}
        self.offsets: dict[AlphaIndex, int] = {}
        self.index: dict[tuple[AlphaIndex, BlockKey], int] = {}
        self.k: dict[AlphaIndex, float] = {}
        metric = []
        w = grid.weights
        pos = 0
        for a in self.alphas:
            basis = block_basis(self.m, a)
            self.bases[a], self.offsets[a] = basis, pos
            self.k[a] = k_alpha(a, J)
            scale = self.k[a] * math.factorial(a.weight)
            for key in basis:
                self.index[(a, key)] = pos
                pos += 1
                mult = 1.0
                for ms in key:
                    mult *= multiset_orderings(ms) * math.prod(w[x] for x in ms)
                metric.append(scale * mult)
        self.dim = pos
        self.metric = np.array(metric)
        self.weight_of = np.concatenate(
            [np.full(len(self.bases[a]), a.weight) for a in self.alphas]
        )

    def block_slice(self, alpha: AlphaIndex) -> slice:
        start = self.offsets[alpha]
        return slice(start, start + len(self.bases[alpha]))

    def compatible(self, other: "ExtSpace") -> bool:
        return self is other or (
            self.N == other.N
            and self.m == other.m
            and np.array_equal(self.grid.weights, other.grid.weights)
            and self.J == other.J
        )

    def vacuum(self) -> "ExtVector":
        c = np.zeros(self.dim)
        c[0] = 1.0
        return ExtVector(self, c)

    def zero(self) -> "ExtVector":
        return ExtVector(self, np.zeros(self.dim))


@dataclass(eq=False)
class ExtVector:
    space: ExtSpace
    coeffs: np.ndarray
    truncated: bool = False

    def block(self, alpha: AlphaIndex) -> np.ndarray:
        alpha = alpha if isinstance(alpha, AlphaIndex) else AlphaIndex(tuple(alpha))
        return self.coeffs[self.space.block_slice(alpha)]

    def value(self, alpha, key: BlockKey) -> float:
        alpha = alpha if isinstance(alpha, AlphaIndex) else AlphaIndex(tuple(alpha))
        return float(self.coeffs[self.space.index[(alpha, trim_key(key))]])

    def _other(self, other: "ExtVector") -> "ExtVector":
        if not self.space.compatible(other.space):
            raise IncompatibleSpaces("incompatible spaces")
        return other

    def __add__(self, other: "ExtVector") -> "ExtVector":
        o = self._other(other)
        return ExtVector(self.space, self.coeffs + o.coeffs, self.truncated or o.truncated)

    def __sub__(self, other: "ExtVector") -> "ExtVector":
        o = self._other(other)
        return ExtVector(self.space, self.coeffs - o.coeffs, self.truncated or o.truncated)

    def __mul__(self, c: float) -> "ExtVector":
        return ExtVector(self.space, self.coeffs * c, self.truncated)

    __rmul__ = __mul__

    def norm(self) -> float:
        return math.sqrt(max(inner_ext(self, self), 0.0))


def inner_ext(u: ExtVector, v: ExtVector) -> float:
    """sum_alpha K_alpha n(alpha)! <u_alpha, v_alpha>_{L^2_alpha}."""
    if not u.space.compatible(v.space):
        raise IncompatibleSpaces("incompatible spaces")
    return float(np.sum(u.space.metric * u.coeffs * v.coeffs))


def d_alpha(f: SymTensor, alpha: AlphaIndex, space: ExtSpace) -> np.ndarray:
    """Block coordinates of D_alpha f over the canonical block basis."""
    if alpha.weight != f.degree:
        raise ValueError("degree/weight error")
    return np.array([f(*expand_key(key)) for key in space.bases[alpha]])


def u_n(f: SymTensor, space: ExtSpace) -> ExtVector:
    """Coordinate map f -> (D_alpha f)_alpha, supported on weight deg(f)."""
    if f.degree > space.N:
        raise ValueError(f"degree {f.degree} exceeds truncation {space.N}")
    c = np.zeros(space.dim)
    for a in enumerate_alpha(f.degree):
        c[space.block_slice(a)] = d_alpha(f, a, space)
    return ExtVector(space, c)


def dense_k_alpha_inner(f: SymTensor, g: SymTensor, grid: Grid, J: JacobiMatrix) -> float:
    """(f, g)_{F_n} = sum_alpha K_alpha int D_alpha f D_alpha g dsigma^{|alpha|}, dense evaluation."""
    if f.degree != g.degree:
        return 0.0
    total = 0.0
    for a in enumerate_alpha(f.degree):
        total += k_alpha(a, J) * dense_l2(d_alpha_dense(f, a), d_alpha_dense(g, a), grid)
    return total


def block_to_dense(coords: np.ndarray, alpha: AlphaIndex, space: ExtSpace) -> np.ndarray:
    """Expand block coordinates to the block-symmetric dense array over X^{|alpha|}."""
    lookup = dict(zip(space.bases[alpha], coords))
    slices = _class_slices(alpha)
    out = np.zeros((space.m,) * alpha.size)
    for idx in itertools.product(range(space.m), repeat=alpha.size):
        key = tuple(tuple(sorted(idx[a:b])) for _, a, b in slices)
        out[idx] = lookup[key]
    return out


def dense_to_block(g: np.ndarray, alpha: AlphaIndex, space: ExtSpace) -> np.ndarray:
    """Read block coordinates off a block-symmetric dense array."""
    out = []
    for key in space.bases[alpha]:
        idx = tuple(x for ms in key for x in ms)
        out.append(g[idx] if idx else g[()])
    return np.array(out, dtype=float)
