"""Jacobi matrix of nu~ from its moments, the +/0/- split, and the finite spectral transform.

The moment -> recurrence step is the classical Stieltjes procedure run on the
moment functional. With Fraction moments it is exact (a_n and b_n^2 come out
as rationals); the float path exists for comparison and is badly conditioned
for large sizes.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .measure import JumpMeasure, moments


class TruncationError(ValueError):
    pass


class TruncationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class JacobiMatrix:
    """Recurrence coefficients a_0..a_{M-1}, b_1..b_{M-1} (``b[0]`` is b_1).

    ``terminal`` marks a matrix that is the complete Jacobi matrix of a
    finitely supported measure, so b_M = b_{M+1} = ... = 0 exactly and the
    coefficient sequences may be padded with zeros.
    """

    a: tuple
    b: tuple
    a_exact: Optional[tuple] = None
    b2_exact: Optional[tuple] = None
    terminal: bool = False

    def __post_init__(self):
        if len(self.b) != len(self.a) - 1:
            raise ValueError("need len(b) == len(a) - 1")
        if any(not (x > 0) for x in self.b):
            raise ValueError("off-diagonal entries must be strictly positive")

    @property
    def size(self) -> int:
        return len(self.a)

    def dense(self) -> np.ndarray:
        return np.diag(self.a) + np.diag(self.b, 1) + np.diag(self.b, -1)

    def a_at(self, n: int) -> float:
        if n < self.size:
            return float(self.a[n])
        if self.terminal:
            return 0.0
        raise TruncationError(f"l2 truncation too small: a_{n} needed, size {self.size}")

    def b_at(self, n: int) -> float:
        """b_n for n >= 1."""
        if n < 1:
            raise ValueError("b_n is defined for n >= 1")
        if n < self.size:
            return float(self.b[n - 1])
        if self.terminal:
            return 0.0
        raise TruncationError(f"l2 truncation too small: b_{n} needed, size {self.size}")

    def truncated(self, M: int) -> "JacobiMatrix":
        if M >= self.size:
            return self
        return JacobiMatrix(
            a=self.a[:M],
            b=self.b[: M - 1],
            a_exact=None if self.a_exact is None else self.a_exact[:M],
            b2_exact=None if self.b2_exact is None else self.b2_exact[: M - 1],
        )


@dataclass(frozen=True)
class Quadrature:
    nodes: np.ndarray
    weights: np.ndarray

    def moment(self, k: int) -> float:
        return float(np.sum(self.weights * self.nodes**k))


def _functional(coeffs: Sequence, mom: Sequence):
    """L(p) = sum_i c_i m_i for p = sum_i c_i s^i; also returns sum |c_i m_i|."""
    val = 0
    scale = 0
    for i, c in enumerate(coeffs):
        if c:
            t = c * mom[i]
            val += t
            scale += abs(t)
    return val, scale


def _polymul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        if x:
            for j, y in enumerate(q):
                out[i + j] += x * y
    return out


def jacobi_from_moments(mom: Sequence, M: int, rtol: float = 1e-10) -> JacobiMatrix:
    """Stieltjes procedure on monic orthogonal polynomials using the moment functional.

    Needs m_0..m_{2M-1}. If the Hankel form degenerates at size k <= M (the
    measure has only k support points), returns the k x k matrix with
    ``terminal=True`` and issues a TruncationWarning.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    if len(mom) < 2 * M:
        raise ValueError(f"need {2 * M} moments for size {M}, got {len(mom)}")
    exact = all(isinstance(x, (int, Fraction)) for x in mom)
    if exact:
        mom = [Fraction(x) for x in mom]
        one, zero = Fraction(1), Fraction(0)
    else:
        mom = [float(x) for x in mom]
        one, zero = 1.0, 0.0

    a, b2 = [], []
    prev, cur = None, [one]
    prev_norm = None
    terminal = False
    for k in range(M):
        norm, scale = _functional(_polymul(cur, cur), mom)
        degenerate = norm == 0 if exact else abs(norm) <= rtol * scale
        if degenerate:
            terminal = True
            warnings.warn(
                f"support smaller than requested size; returned matrix truncated to {k}",
                TruncationWarning,
                stacklevel=2,
            )
            break
        if not norm > 0:
            raise ValueError("moment sequence is not positive definite")
        if prev_norm is not None:
            b2.append(norm / prev_norm)
        xcur = [zero] + cur
        ak = _functional(_polymul(xcur, cur), mom)[0] / norm
        a.append(ak)
        # pi_{k+1} = (s - a_k) pi_k - b_k^2 pi_{k-1}
        nxt = list(xcur)
        for i, c in enumerate(cur):
            nxt[i] -= ak * c
        if prev is not None:
            for i, c in enumerate(prev):
                nxt[i] -= b2[-1] * c
        prev, cur, prev_norm = cur, nxt, norm

    if not terminal and len(mom) > 2 * M:
        # One more norm tells whether b_M vanishes (measure with exactly M atoms).
        norm, scale = _functional(_polymul(cur, cur), mom)
        terminal = norm == 0 if exact else abs(norm) <= rtol * scale

    return JacobiMatrix(
        a=tuple(float(x) for x in a),
        b=tuple(math.sqrt(x) for x in b2),
        a_exact=tuple(a) if exact else None,
        b2_exact=tuple(b2) if exact else None,
        terminal=terminal,
    )


def jacobi_matrix(measure: JumpMeasure, M: int) -> JacobiMatrix:
    """Jacobi matrix of a (normalized) measure, capped at #atoms for atom measures."""
    if measure.is_atomic and M > len(measure.atoms):
        warnings.warn(
            f"ell2_dim {M} exceeds the {len(measure.atoms)} atoms of nu~; capped",
            TruncationWarning,
            stacklevel=2,
        )
        M = len(measure.atoms)
    # one extra pair of moments so an exactly-M-atom measure is detected as terminal
    mom = moments(measure, 2 * M + 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        return jacobi_from_moments(mom, M)


def split(J: JacobiMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Creation, neutral and annihilation parts: J+ e_n = b_{n+1} e_{n+1}, J0 e_n = a_n e_n,
    J- e_n = b_n e_{n-1}, J- e_0 = 0."""
    M = J.size
    jp = np.zeros((M, M))
    for n in range(M - 1):
        jp[n + 1, n] = J.b[n]
    return jp, np.diag(np.asarray(J.a, dtype=float)), jp.T.copy()


def golub_welsch(J: JacobiMatrix) -> tuple[Quadrature, np.ndarray]:
    """Gauss quadrature of J; also returns the sign-fixed eigenvector matrix (columns)."""
    try:
        lam, V = eigh_tridiagonal(np.asarray(J.a, float), np.asarray(J.b, float))
    except np.linalg.LinAlgError as exc:
        raise RuntimeError("spectral failure") from exc
    V = V * np.where(V[0] < 0, -1.0, 1.0)
    return Quadrature(nodes=lam, weights=V[0] ** 2), V


def u3_transform(J: JacobiMatrix) -> np.ndarray:
    """Orthogonal P with P[i, n] = p_n(lambda_i) sqrt(tau_i); P.T @ diag(lambda) @ P = J."""
    _, V = golub_welsch(J)
    return V.T.copy()


def orthonormal_polys(J: JacobiMatrix, x: np.ndarray) -> np.ndarray:
    """Values p_0..p_{M-1} at points x via the three-term recurrence; shape (len(x), M)."""
    x = np.asarray(x, dtype=float)
    M = J.size
    out = np.zeros((x.size, M))
    out[:, 0] = 1.0
    if M > 1:
        out[:, 1] = (x - J.a[0]) / J.b[0]
    for n in range(1, M - 1):
        out[:, n + 1] = ((x - J.a[n]) * out[:, n] - J.b[n - 1] * out[:, n - 1]) / J.b[n]
    return out


def u2_multiplier(measure: JumpMeasure) -> np.ndarray:
    """diag(1/s_i): the map f(s) -> f(s)/s at the atoms."""
    if not measure.is_atomic:
        raise ValueError("u2_multiplier needs an atom measure")
    return np.diag([1.0 / float(s) for s in measure.sizes])
