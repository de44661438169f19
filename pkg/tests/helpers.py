"""Dense reference implementations used to cross-check the sparse coordinate operators."""
import itertools

import numpy as np

from levyjacobi.extfock import _class_slices, block_to_dense, s_alpha


def dense_blocks(space, coeffs):
    return {a: block_to_dense(coeffs[space.block_slice(a)], a, space) for a in space.alphas}


def _classes(alpha, idx):
    return [[idx[i] for i in range(a, b)] for _, a, b in _class_slices(alpha)]


def _flatten(cls):
    while cls and not cls[-1]:
        cls = cls[:-1]
    return tuple(x for c in cls for x in c)


def _slot(alpha, k, where):
    _, a, b = _class_slices(alpha)[k - 1]
    return b - 1 if where == "last" else a


def ref_plus(space, phi, V, alpha, where="last"):
    """S_alpha[(k alpha_k/n) phi(x_slot) v_src(slot demoted)] summed over k."""
    n, m = alpha.weight, space.m
    out = np.zeros((m,) * alpha.size)
    for k in range(1, alpha.max_multiplicity + 1):
        if not alpha[k]:
            continue
        src = alpha.shift(k, -1)
        if k >= 2:
            src = src.shift(k - 1, +1)
        s = _slot(alpha, k, where)
        pos_in_class = s - _class_slices(alpha)[k - 1][1]
        g = np.zeros_like(out)
        for idx in itertools.product(range(m), repeat=alpha.size):
            cls = _classes(alpha, idx)
            x = cls[k - 1].pop(pos_in_class)
            if k >= 2:
                cls[k - 2].append(x)
            g[idx] = phi[x] * V[src][_flatten(cls)]
        out += k * alpha[k] / n * s_alpha(g, alpha)
    return out


def ref_zero(space, phi, V, alpha, where="last"):
    out = np.zeros((space.m,) * alpha.size)
    for k in range(1, alpha.max_multiplicity + 1):
        if not alpha[k]:
            continue
        s = _slot(alpha, k, where)
        shape = [1] * alpha.size
        shape[s] = space.m
        g = V[alpha] * np.reshape(phi, shape)
        out += alpha[k] * space.J.a_at(k - 1) * s_alpha(g, alpha)
    return out


def ref_minus(space, phi, V, alpha, where="last"):
    """Output at alpha from the weight n = n(alpha)+1 input."""
    m, w = space.m, space.grid.weights
    n = alpha.weight + 1
    out = np.zeros((m,) * alpha.size)
    src = alpha.shift(1, +1)
    g = np.zeros_like(out)
    for idx in itertools.product(range(m), repeat=alpha.size):
        cls = _classes(alpha, idx)
        acc = 0.0
        for x in range(m):
            c2 = [list(c) for c in cls] or [[]]
            c2[0] = [x] + c2[0]
            acc += w[x] * phi[x] * V[src][_flatten(c2)]
        g[idx] = acc
    out += n * s_alpha(g, alpha)
    for k in range(2, alpha.max_multiplicity + 2):
        if not alpha[k - 1]:
            continue
        src = alpha.shift(k - 1, -1).shift(k, +1)
        s = _slot(alpha, k - 1, where)
        pos_in_class = s - _class_slices(alpha)[k - 2][1]
        g = np.zeros_like(out)
        for idx in itertools.product(range(m), repeat=alpha.size):
            cls = _classes(alpha, idx) + [[]]
            x = cls[k - 2].pop(pos_in_class)
            cls[k - 1].append(x)
            g[idx] = phi[x] * V[src][_flatten(cls)]
        b2 = space.J.b_at(k - 1) ** 2
        out += n / k * alpha[k - 1] * b2 * s_alpha(g, alpha)
    return out
