"""Verification suites behind ``levyjacobi verify``.

Each suite returns a list of checks ``{check, value, tolerance, pass}`` where
``value`` is a residual (pass iff value <= tolerance) unless noted.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .equivalence import (
    all_words,
    word_vectors,
    build_intertwiner,
    compare_moments,
    diagonal_intertwiner,
    intertwine_residual,
    mc_sample,
    oracle_moment,
    relative_deviation,
)
from .extfock import SymTensor, dense_k_alpha_inner, inner_ext, multisets, u_n
from .fockrep import FockVector, inner_fock
from .instance import Instance
from .measure import moments
from .orthopoly import golub_welsch, u3_transform


def check(name: str, value: float, tol: float, ok: bool | None = None) -> dict:
    value = float(value)
    return {
        "check": name,
        "value": value,
        "tolerance": float(tol),
        "pass": bool(value <= tol if ok is None else ok),
    }


def _rng(inst: Instance, salt: int) -> np.random.Generator:
    return np.random.default_rng([inst.config.mc.seed, salt])


def suite_isometry(inst: Instance) -> list[dict]:
    es, J, grid = inst.ext_space, inst.J, inst.grid
    rng = _rng(inst, 1)
    out = []
    worst = 0.0
    for n in range(min(inst.N, 3) + 1):
        for _ in range(3):
            f, g = SymTensor.random(grid.size, n, rng), SymTensor.random(grid.size, n, rng)
            lhs = inner_ext(u_n(f, es), u_n(g, es)) / math.factorial(n)
            rhs = dense_k_alpha_inner(f, g, grid, J)
            worst = max(worst, relative_deviation(lhs, rhs))
    out.append(check("u_n matches the K_alpha inner product (dense path)", worst, 1e-12))
    min_eig = np.inf
    for n in range(min(inst.N, 3) + 1):
        basis = [SymTensor(n, grid.size, {ms: 1.0}) for ms in multisets(grid.size, n)]
        vecs = [u_n(b, es) for b in basis]
        G = np.array([[inner_ext(a, b) for b in vecs] for a in vecs])
        lam = np.linalg.eigvalsh(G)
        min_eig = min(min_eig, lam[0] / lam[-1])
    out.append(check("u_n injective (min relative Gram eigenvalue > 0)", min_eig, 0.0, ok=min_eig > 1e-12))
    P = u3_transform(J)
    lam = golub_welsch(J)[0].nodes
    out.append(check("U3 orthogonality ||P^T P - I||", np.linalg.norm(P.T @ P - np.eye(J.size)), 1e-12))
    out.append(check("U3 spectral ||P^T diag P - J||_F", np.linalg.norm(P.T @ np.diag(lam) @ P - J.dense()), 1e-10))
    jf, af = inst.fields_for(min(inst.N, 4))
    D = diagonal_intertwiner(jf, af)
    G_pull = (D.T @ (af.space.metric[:, None] * D.toarray()))
    defect = np.max(np.abs(G_pull - np.diag(jf.space.metric))) / np.max(jf.space.metric)
    out.append(check("closed-form intertwiner is an ambient isometry", defect, 1e-12))
    I = build_intertwiner(jf, af, inst.letters, min(inst.K, 4), rank_tol=inst.config.tolerances.rank,
                          gram_tol=inst.config.tolerances.gram)
    out.append(check("cyclic intertwiner isometry on word span", I.isometry_defect(), 1e-8))
    omega = I(jf.vacuum())
    out.append(check("I maps vacuum to vacuum", (omega - af.vacuum()).norm(), 1e-10))
    return out


def suite_adjoint(inst: Instance) -> list[dict]:
    es, grid = inst.ext_space, inst.grid
    jf = inst.jfield
    rng = _rng(inst, 2)
    worst = 0.0
    for n in range(min(inst.N - 1, 3) + 1):
        for phi in inst.letters:
            f = SymTensor.random(grid.size, n, rng)
            g = SymTensor.random(grid.size, n + 1, rng)
            uf, ug = u_n(f, es), u_n(g, es)
            lhs = inner_ext(jf.j_plus(phi, uf), ug)
            rhs = inner_ext(uf, jf.j_minus(phi, ug))
            worst = max(worst, relative_deviation(lhs, rhs))
    out = [check("<J+ u_n f, u_n+1 g> = <u_n f, J- u_n+1 g>", worst, 1e-10)]

    S = inst.fock_space
    d = S.d
    low = S.degree < S.N
    worst_pair = worst_ccr = 0.0
    for _ in range(3):
        h, k = rng.standard_normal(d), rng.standard_normal(d)
        F = FockVector(S, np.where(low, rng.standard_normal(S.dim), 0.0))
        G = FockVector(S, rng.standard_normal(S.dim))
        a = inner_fock(S.a_plus(h, F), G)
        b = inner_fock(F, S.a_minus(h, G))
        worst_pair = max(worst_pair, relative_deviation(a, b))
        inner_deg = S.degree < S.N - 1
        G2 = FockVector(S, np.where(inner_deg, G.coeffs, 0.0))
        F2 = FockVector(S, np.where(inner_deg, F.coeffs, 0.0))
        comm = S.a_minus(k, S.a_plus(h, G2)) - S.a_plus(h, S.a_minus(k, G2))
        lhs = inner_fock(F2, comm)
        rhs = S.one_particle_inner(k, h) * inner_fock(F2, G2)
        worst_ccr = max(worst_ccr, relative_deviation(lhs, rhs))
    out.append(check("<a+(h) F, G> = <F, a-(h) G> (Fock grading)", worst_pair, 1e-12))
    out.append(check("[a-(k), a+(h)] = <k, h> on degree < N-1", worst_ccr, 1e-12))
    return out


def suite_commute(inst: Instance) -> list[dict]:
    L = min(inst.K, 5)
    letters = inst.letters
    jf, af = inst.jfield, inst.afield
    scale_words = [w for r in range(2, L + 1)
                   for w in itertools.combinations_with_replacement(range(len(letters)), r)]
    out = []
    for name, fld in (("J", jf), ("A", af)):
        worst = 0.0
        for w in scale_words:
            vals = {}
            for p in set(itertools.permutations(w)):
                vals[p] = fld.vacuum_moment([letters[i] for i in p])
            scale = oracle_moment([letters[i] for i in w], inst.nu_moments, inst.grid, absolute=True)
            vs = list(vals.values())
            worst = max(worst, (max(vs) - min(vs)) / max(scale, 1e-300))
        out.append(check(f"{name}-side vacuum moments invariant under letter permutation", worst, 1e-10))
    # symmetry of J(phi) on cyclic vectors of length <= N-1
    Lc = min(inst.N - 1, 3)
    vecs = word_vectors(jf, letters, Lc)
    words = list(vecs)
    worst = 0.0
    for phi in letters:
        Jv = {w: jf.j_full(phi, vecs[w]) for w in words}
        for u in words:
            for v in words:
                a = inner_ext(Jv[u], vecs[v])
                b = inner_ext(vecs[u], Jv[v])
                worst = max(worst, abs(a - b) / max(vecs[u].norm() * vecs[v].norm(), 1e-300))
    out.append(check("J(phi) symmetric on cyclic vectors", worst, 1e-10))
    return out


def suite_equivalence(inst: Instance) -> list[dict]:
    tol = inst.config.tolerances
    words = all_words(len(inst.letters), inst.K)
    reports = compare_moments(inst.jfield, inst.afield, inst.letters, inst.nu_moments, words)
    worst = max(r.max_dev for r in reports)
    out = [check(f"three-way word moments J = A = oracle ({len(words)} words, length <= {inst.K})",
                 worst, tol.rel)]
    phi = inst.letters[0]
    g = inst.grid
    m2 = float(inst.nu_moments[2])
    anchor = 3 * g.moment(phi, phi) ** 2 + m2 * g.moment(phi, phi, phi, phi)
    if inst.K >= 4:
        vJ = inst.jfield.vacuum_moment([phi] * 4)
        vA = inst.afield.vacuum_moment([phi] * 4)
        dev = max(relative_deviation(vJ, anchor), relative_deviation(vA, anchor))
        out.append(check("anchor <Omega, J(phi)^4 Omega> = 3(int phi^2)^2 + (a0^2+b1^2) int phi^4", dev, tol.rel))
    K = min(inst.K, 4)
    jf, af = inst.fields_for(max(K, 1))
    I_full = build_intertwiner(jf, af, inst.letters, K, gram_tol=np.inf, rank_tol=tol.rank)
    out.append(check(f"Gram equality G_J = G_A, words <= {K}", I_full.gram_deviation, tol.gram))
    I_split = build_intertwiner(jf, af, inst.letters, K, parts=("plus", "zero", "minus"),
                                gram_tol=np.inf, rank_tol=tol.rank)
    out.append(check(f"Gram equality on creation/neutral/annihilation words <= {K}",
                     I_split.gram_deviation, tol.gram))
    for part in ("plus", "zero", "minus", "full"):
        res = max(intertwine_residual(I_split, part, p, K - 1) for p in inst.letters)
        out.append(check(f"intertwining residual, part={part}", res, tol.gram))
    return out


def suite_oracle(inst: Instance) -> list[dict]:
    rng = _rng(inst, 3)
    g = inst.grid
    letters = inst.letters
    out = []
    worst = 0.0
    for L in range(1, min(inst.K, 4) + 1):
        base = [letters[i % len(letters)] for i in range(L)]
        pos = int(rng.integers(L))
        f1, f2 = rng.standard_normal(g.size), rng.standard_normal(g.size)
        c1, c2 = rng.standard_normal(2)
        mix = list(base)
        mix[pos] = c1 * f1 + c2 * f2
        w1, w2 = list(base), list(base)
        w1[pos], w2[pos] = f1, f2
        lhs = oracle_moment(mix, inst.nu_moments, g)
        rhs = c1 * oracle_moment(w1, inst.nu_moments, g) + c2 * oracle_moment(w2, inst.nu_moments, g)
        scale = oracle_moment([np.abs(x) for x in mix], inst.nu_moments, g, absolute=True) + 1.0
        worst = max(worst, abs(lhs - rhs) / scale)
    out.append(check("oracle is multilinear in the word letters", worst, 1e-12))
    q = golub_welsch(inst.J)[0]
    mom = moments(inst.nu_tilde, 2 * inst.J.size - 1)
    dev = max(relative_deviation(q.moment(k), float(mom[k]), 1.0) for k in range(len(mom)))
    out.append(check("Golub-Welsch quadrature reproduces moments of nu~", dev, 1e-10))
    worst = 0.0
    for w in all_words(len(letters), min(inst.K, 4)):
        phis = [letters[i] for i in w]
        o = oracle_moment(phis, inst.nu_moments, g)
        j = inst.jfield.vacuum_moment(phis)
        worst = max(worst, relative_deviation(o, j, oracle_moment(phis, inst.nu_moments, g, absolute=True)))
    out.append(check("oracle agrees with the Jacobi field", worst, inst.config.tolerances.rel))
    return out


def suite_mc(inst: Instance, threads: int = 1, seed: int | None = None) -> list[dict]:
    if not inst.nu_tilde.is_atomic:
        return [check("mc skipped: family measure has no finite-activity sampler", 0.0, 0.0)]
    seed = inst.config.mc.seed if seed is None else seed
    n = inst.config.mc.samples
    res = mc_sample(inst.nu_tilde, inst.grid, inst.letters, n, seed, threads=threads)
    out = []
    worst = 0.0
    for w, mean, se in zip(res.words, res.mean, res.se):
        oracle = oracle_moment([inst.letters[i] for i in w], inst.nu_moments, inst.grid)
        z = abs(mean - oracle) / se if se > 0 else (0.0 if mean == oracle else np.inf)
        worst = max(worst, z)
    out.append(check(f"MC moments (order <= 4, {n} samples) within 4 SE of oracle", worst, 4.0))
    other = 1 if threads > 1 else 4
    res2 = mc_sample(inst.nu_tilde, inst.grid, inst.letters, n, seed, threads=other)
    same = bool(np.array_equal(res.samples, res2.samples) and np.array_equal(res.mean, res2.mean))
    out.append(check("MC bit-identical across thread counts", 0.0 if same else 1.0, 0.0))
    return out


SUITES = {
    "isometry": suite_isometry,
    "adjoint": suite_adjoint,
    "commute": suite_commute,
    "equivalence": suite_equivalence,
    "oracle": suite_oracle,
    "mc": suite_mc,
}


def run_suite(name: str, inst: Instance, threads: int = 1, seed: int | None = None) -> list[dict]:
    names = list(SUITES) if name == "all" else [name]
    out = []
    for n in names:
        if n == "mc":
            out.extend(suite_mc(inst, threads=threads, seed=seed))
        else:
            out.extend(SUITES[n](inst))
    return out
