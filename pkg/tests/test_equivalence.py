import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levyjacobi.basespace import Grid
from levyjacobi.equivalence import (
    EquivalenceViolation,
    all_words,
    build_intertwiner,
    compare_moments,
    diagonal_intertwiner,
    intertwine_residual,
    mc_sample,
    oracle_moment,
    relative_deviation,
    set_partitions,
    word_vectors,
)
from levyjacobi.extfock import SymTensor, u_n
from levyjacobi.fockrep import AField, FockSpace
from levyjacobi.measure import JumpMeasure, MeasureError
from levyjacobi.orthopoly import JacobiMatrix

BELL = [1, 1, 2, 5, 15, 52, 203, 877]
PHI, PSI = np.array([1.0, -1.0]), np.array([1.0, 1.0])


@pytest.mark.parametrize("n", range(8))
def test_set_partitions_bell(n):
    parts = list(set_partitions(range(n)))
    assert len(parts) == BELL[n]
    canon = {tuple(sorted(tuple(sorted(b)) for b in p)) for p in parts}
    assert len(canon) == BELL[n]


def test_oracle_examples(std, tri):
    g, mom = tri.grid, tri.nu_moments
    phi, psi, _ = tri.letters
    assert oracle_moment([phi], mom, g) == 0.0
    assert oracle_moment([phi, psi], mom, g) == pytest.approx(g.moment(phi, psi), rel=1e-15)
    assert oracle_moment([phi] * 3, mom, g) == pytest.approx(tri.J.a[0] * g.moment(phi, phi, phi), rel=1e-13)
    m2 = float(mom[2])
    assert m2 == pytest.approx(tri.J.a[0] ** 2 + tri.J.b[0] ** 2, rel=1e-14)
    anchor = 3 * g.moment(phi, phi) ** 2 + m2 * g.moment(phi, phi, phi, phi)
    assert oracle_moment([phi] * 4, mom, g) == pytest.approx(anchor, rel=1e-14)
    assert oracle_moment([PHI] * 4, std.nu_moments, std.grid) == 4.0


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_oracle_multilinear(L, seed):
    r = np.random.default_rng(seed)
    g = Grid(r.uniform(0.1, 1.0, 3))
    mom = [1.0] + list(r.uniform(-1, 2, 5))
    word = [r.standard_normal(3) for _ in range(L)]
    pos = int(r.integers(L))
    f1, f2 = r.standard_normal(3), r.standard_normal(3)
    c1, c2 = r.standard_normal(2)
    w1, w2, wm = list(word), list(word), list(word)
    w1[pos], w2[pos], wm[pos] = f1, f2, c1 * f1 + c2 * f2
    lhs = oracle_moment(wm, mom, g)
    rhs = c1 * oracle_moment(w1, mom, g) + c2 * oracle_moment(w2, mom, g)
    scale = abs(c1) * oracle_moment(w1, mom, g, absolute=True) + abs(c2) * oracle_moment(w2, mom, g, absolute=True)
    assert abs(lhs - rhs) <= 1e-12 * max(scale, 1e-300)


def test_relative_deviation_floor():
    assert relative_deviation(0.0, 0.0) == 0.0
    assert relative_deviation(1e-310, 0.0) <= 1e-9
    assert relative_deviation(1.0, 1.0 + 1e-12) == pytest.approx(1e-12, rel=1e-3)
    assert relative_deviation(1e-3, 0.0, scale=1.0) == 1e-3


def test_compare_examples(tri):
    phi = tri.letters[0]
    reps = compare_moments(tri.jfield, tri.afield, tri.letters, tri.nu_moments, [(0,), (0, 0)])
    assert all(abs(v) <= 1e-15 for v in (reps[0].value_J, reps[0].value_A, reps[0].value_oracle))
    for v in (reps[1].value_J, reps[1].value_A, reps[1].value_oracle):
        assert v == pytest.approx(tri.grid.moment(phi, phi), rel=1e-13)


def test_three_way_std(std):
    reps = compare_moments(std.jfield, std.afield, std.letters, std.nu_moments, all_words(2, std.K))
    assert max(r.max_dev for r in reps) <= 1e-9
    four = [r for r in reps if r.word == (0, 0, 0, 0)][0]
    assert four.value_J == four.value_A == four.value_oracle == 4.0


def test_gram_of_small_basis(std):
    """G for {(), (phi), (psi), (phi, psi)} equals the oracle moment matrix on both sides."""
    basis = [(), (0,), (1,), (0, 1)]
    vj = word_vectors(std.jfield, std.letters, 2)
    va = word_vectors(std.afield, std.letters, 2)
    GJ = np.array([[np.sum(std.ext_space.metric * vj[u].coeffs * vj[v].coeffs) for v in basis] for u in basis])
    GA = np.array([[np.sum(std.fock_space.metric * va[u].coeffs * va[v].coeffs) for v in basis] for u in basis])
    GO = np.array([
        [oracle_moment([std.letters[i] for i in u[::-1] + v], std.nu_moments, std.grid) for v in basis]
        for u in basis
    ])
    assert np.allclose(GJ, GO, atol=1e-14) and np.allclose(GA, GO, atol=1e-14)
    # <phi psi, phi psi> = int phi^2 int psi^2 + 2 (int phi psi)^2 + m_2 int phi^2 psi^2 = 2
    assert GO.tolist() == [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 2]]


def test_intertwiner_examples(std):
    I = build_intertwiner(std.jfield, std.afield, std.letters, std.K, parts=("plus", "zero", "minus"))
    omega = I(std.ext_space.vacuum())
    assert (omega - std.fock_space.vacuum()).norm() <= 1e-12
    v = I(std.jfield.j_plus(PHI, std.ext_space.vacuum()))
    target = std.afield.apply("plus", PHI, std.fock_space.vacuum())
    assert (v - target).norm() <= 1e-12
    assert I.isometry_defect() <= 1e-8
    for part in ("plus", "zero", "minus", "full"):
        for phi in std.letters:
            assert intertwine_residual(I, part, phi, std.K - 1) <= 1e-8


def test_split_intertwiner_three_atom(tri_small, tri):
    jf, af = tri_small
    I = build_intertwiner(jf, af, tri.letters, 4, parts=("plus", "zero", "minus"))
    assert I.gram_deviation <= 1e-9
    for part in ("plus", "zero", "minus", "full"):
        assert max(intertwine_residual(I, part, phi, 3) for phi in tri.letters) <= 1e-8


def test_full_word_span_is_not_part_invariant(tri_small, tri):
    """On an atomic grid the span of plain words is not invariant under J+ alone,
    so the Gram-based map built on it does not intertwine the separate parts."""
    jf, af = tri_small
    I = build_intertwiner(jf, af, tri.letters, 4)
    assert I.gram_deviation <= 1e-9
    assert max(intertwine_residual(I, "full", phi, 3) for phi in tri.letters) <= 1e-8
    assert max(intertwine_residual(I, "plus", phi, 3) for phi in tri.letters) > 1e-3


def test_diagonal_intertwiner(tri_small, tri):
    jf, af = tri_small
    D = diagonal_intertwiner(jf, af)
    es, fs = jf.space, af.space
    pulled = (D.T @ (fs.metric[:, None] * D.toarray()))
    assert np.allclose(pulled, np.diag(es.metric), rtol=0, atol=1e-13 * es.metric.max())
    vj = word_vectors(jf, tri.letters, 4)
    va = word_vectors(af, tri.letters, 4)
    for w in vj:
        assert np.allclose(D @ vj[w].coeffs, va[w].coeffs, atol=1e-12 * max(1.0, np.abs(va[w].coeffs).max()))
    I = build_intertwiner(jf, af, tri.letters, 3, parts=("plus", "zero", "minus"))
    XJ = I.XJ
    assert np.allclose(I.left @ (I.right @ XJ), D @ XJ, atol=1e-10)


def test_grading_spread(tri_small, tri):
    jf, af = tri_small
    I = build_intertwiner(jf, af, tri.letters, 3, parts=("plus", "zero", "minus"))
    rng = np.random.default_rng(0)
    v = u_n(SymTensor.random(3, 2, rng), jf.space)
    spread = I.grading_spread(v)
    assert sum(spread.values()) == pytest.approx(I(v).norm() ** 2, rel=1e-12)


def test_gram_violation_detected(tri_small, tri):
    jf, af = tri_small
    J = af.J
    bad = JacobiMatrix(a=tuple(x + 0.1 for x in J.a), b=J.b, terminal=J.terminal)
    af_bad = AField(FockSpace(af.space.grid, J.size, af.space.N), bad)
    with pytest.raises(EquivalenceViolation, match="equivalence violation"):
        build_intertwiner(jf, af_bad, tri.letters, 3)


# ---- Monte Carlo ------------------------------------------------------------


def test_mc_standard(std):
    res = mc_sample(std.nu_tilde, std.grid, std.letters, 10**6, std.config.mc.seed)
    table = dict(zip(res.words, zip(res.mean, res.se)))
    assert abs(table[(0,)][0]) <= 4 * table[(0,)][1]
    assert abs(table[(0, 0)][0] - 1.0) <= 4 * table[(0, 0)][1]
    assert abs(table[(0, 0, 0, 0)][0] - 4.0) <= 4 * table[(0, 0, 0, 0)][1]


def test_mc_deterministic_across_threads(tri):
    a = mc_sample(tri.nu_tilde, tri.grid, tri.letters, 150_000, 11, threads=1, chunk=1 << 14)
    b = mc_sample(tri.nu_tilde, tri.grid, tri.letters, 150_000, 11, threads=4, chunk=1 << 14)
    assert np.array_equal(a.samples, b.samples)
    assert np.array_equal(a.mean, b.mean) and np.array_equal(a.se, b.se)
    c = mc_sample(tri.nu_tilde, tri.grid, tri.letters, 150_000, 12, chunk=1 << 14)
    assert not np.array_equal(a.samples, c.samples)


def test_mc_rate(tri):
    small = mc_sample(tri.nu_tilde, tri.grid, tri.letters, 50_000, 3)
    big = mc_sample(tri.nu_tilde, tri.grid, tri.letters, 200_000, 3)
    ratio = big.se / small.se
    assert np.all((ratio > 0.35) & (ratio < 0.65))
    assert np.median(ratio) == pytest.approx(0.5, abs=0.05)


def test_mc_matches_oracle(tri):
    res = mc_sample(tri.nu_tilde, tri.grid, tri.letters, tri.config.mc.samples, tri.config.mc.seed)
    for w, mean, se in zip(res.words, res.mean, res.se):
        oracle = oracle_moment([tri.letters[i] for i in w], tri.nu_moments, tri.grid)
        assert abs(mean - oracle) <= 4 * se


def test_mc_requires_finite_activity(std):
    with pytest.raises(MeasureError, match="sampler requires finite activity"):
        mc_sample(JumpMeasure(family="gamma2"), std.grid, std.letters, 10, 0)


def test_permutation_invariance_all_sides(tri_small, tri):
    jf, af = tri_small
    letters = tri.letters
    for w in itertools.combinations_with_replacement(range(3), 4):
        vals = []
        for p in set(itertools.permutations(w)):
            phis = [letters[i] for i in p]
            vals += [jf.vacuum_moment(phis), af.vacuum_moment(phis), oracle_moment(phis, tri.nu_moments, tri.grid)]
        scale = oracle_moment([letters[i] for i in w], tri.nu_moments, tri.grid, absolute=True)
        assert (max(vals) - min(vals)) <= 1e-10 * scale
