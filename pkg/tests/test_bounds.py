from functools import reduce
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from prodbasis import catalog
from prodbasis.basis import make_basis, product_state
from prodbasis.bounds import (RoundOperators, accumulated_elements, binary_entropy,
                              deficit_bound, info_ceiling, max_overlap, weak_round_bound)
from prodbasis.linalg import DimensionError, NotHermitianError
from prodbasis.measurement import LocalOperator, apply_local

from oracles import binary_entropy_prec, exact_posteriors, expand

# mpmath at 40 digits: 2/9 * h(1/2 - sqrt(0.99)/2)
DEFICIT_9_0_01 = 0.005614695050471083585


def test_binary_entropy_examples():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.11) == pytest.approx(0.499916, abs=1e-5)
    assert binary_entropy(0.11) == pytest.approx(float(binary_entropy_prec("0.11")), abs=1e-14)
    with pytest.raises(ValueError):
        binary_entropy(1.5)


def test_binary_entropy_symmetric_on_grid():
    for x in np.linspace(0, 1, 1001):
        assert abs(binary_entropy(x) - binary_entropy(1 - x)) < 1e-12


@given(st.floats(0, 1))
def test_binary_entropy_matches_high_precision(x):
    assert binary_entropy(x) == pytest.approx(float(binary_entropy_prec(x)), abs=1e-12)


def test_max_overlap_examples(tiles):
    assert max_overlap(tiles.states) < 1e-9
    s = product_state([1, 0], [1, 1j])
    assert max_overlap([s, s]) == pytest.approx(1)
    with pytest.raises(ValueError):
        max_overlap([s])


def test_max_overlap_tiles_survivors_against_tensor(tiles):
    out = apply_local(LocalOperator(0, np.diag([1.0, 1.0, 0.0])), tiles)
    survivors = [s for s, alive in out if alive]
    u, v = (expand(out[k][0].factors) for k in (3, 4))
    expected = abs(np.vdot(u, v)) / (np.linalg.norm(u) * np.linalg.norm(v))
    assert max_overlap(survivors) == pytest.approx(expected, abs=1e-12)


def test_deficit_examples():
    assert deficit_bound(2, 0.0, 1.0) == 1.0
    for n in (2, 5, 9):
        assert deficit_bound(n, 0.01, 0.0) == 0.0
    assert deficit_bound(9, 0.0, 0.1) == pytest.approx(DEFICIT_9_0_01, abs=1e-9)
    mp.mp.dps = 40
    x = mp.mpf(1) / 2 - mp.sqrt(mp.mpf("0.99")) / 2
    assert DEFICIT_9_0_01 == pytest.approx(float(2 * binary_entropy_prec(x) / 9), rel=1e-15)


@pytest.mark.parametrize("args", [(1, 0, 0.5), (3, -0.1, 0.5), (3, 0, 1.5), (3, 0, -0.1)])
def test_deficit_rejects_bad_input(args):
    with pytest.raises(ValueError):
        deficit_bound(*args)


@given(st.integers(2, 30), st.floats(0, 1),
       st.one_of(st.just(0.0), st.floats(1e-100, 1)))
def test_deficit_monotone_in_delta(n, frac, delta):
    eps = frac / (n * (n - 1))
    lo, hi = sorted((delta, min(1.0, delta + 0.01)))
    assert deficit_bound(n, eps, lo) <= deficit_bound(n, eps, hi) + 1e-12
    if delta > 0 and frac < 1:
        assert deficit_bound(n, eps, delta) > 0


def test_info_ceiling_examples():
    assert info_ceiling(9, [0.3, 0.7], [0.0, 0.0]) == math.log2(9)
    assert info_ceiling(4, [1.0], [0.25]) == pytest.approx(1.75)
    d = deficit_bound(9, 0, 0.1)
    assert info_ceiling(9, [0.5, 0.5], [d, 0]) == pytest.approx(math.log2(9) - 0.5 * d)
    assert info_ceiling(9, [0.5, 0.5], [d, 0]) < math.log2(9)


@pytest.mark.parametrize("args", [(4, [0.5], [0.1, 0.2]), (4, [0.5, 0.4], [0, 0]),
                                  (4, [1.0], [-0.1])])
def test_info_ceiling_rejects_bad_input(args):
    with pytest.raises(ValueError):
        info_ceiling(*args)


# -- weak rounds --------------------------------------------------------------

def pad(ops, dims, p):
    mats = [np.eye(d) for d in dims]
    mats[p] = ops
    return reduce(np.kron, mats)


def tensor_reference(rounds, basis):
    """M_N, c_N, epsilon and delta from full tensor-product matrices."""
    dims = basis.dims
    big = sum(pad(a, dims, p) for r in rounds.rounds for p, a in enumerate(r) if a is not None)
    vecs = [expand(s.factors) for s in basis.states]
    g = np.array([[np.vdot(u, big @ v) for v in vecs] for u in vecs])
    g = g / np.abs(g).max()
    n = len(vecs)
    a = np.real(np.diag(g))
    m_n = max(a.sum() / n ** 2 + a / n)
    c_n = max(abs(g[j, k]) for j in range(n) for k in range(n) if j != k)
    locals_ = []
    for p, d in enumerate(dims):
        m = np.eye(d, dtype=complex)
        for r in rounds.rounds:
            if r[p] is not None:
                m = (np.eye(d) + rounds.delta_prime * r[p]) @ m
        locals_.append(m)
    post = exact_posteriors(basis, locals_)
    s = reduce(np.kron, locals_)
    after = [s @ v for v in vecs]
    delta = max(abs(np.vdot(after[j], after[k])) / np.linalg.norm(after[j]) /
                np.linalg.norm(after[k]) for j in range(n) for k in range(j + 1, n))
    return m_n, c_n, post.max() - 1 / n, delta


def random_positive(rng, d):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return z @ z.conj().T / d


@pytest.mark.parametrize("name", ["tiles-3x3", "domino-3x3", "shifts-2x2x2"])
def test_weak_round_matches_tensor_reference(name):
    b = catalog.builtin(name).basis
    rng = np.random.default_rng(5)
    for n_rounds in (1, 2, 3):
        rounds = RoundOperators(tuple(tuple(random_positive(rng, d) for d in b.dims)
                                      for _ in range(n_rounds)), 1e-3)
        r = weak_round_bound(rounds, b)
        m_n, c_n, eps, delta = tensor_reference(rounds, b)
        assert r.status == "ok"
        assert r.M_N == pytest.approx(m_n, abs=1e-12)
        assert r.c_N == pytest.approx(c_n, abs=1e-12)
        assert r.epsilon_observed == pytest.approx(eps, abs=1e-12)
        assert r.delta == pytest.approx(delta, abs=1e-12)
        assert r.epsilon_bound == pytest.approx(delta * m_n / c_n, rel=1e-9)
        assert 0 <= r.delta <= 1 and r.deficit >= 0
        assert r.info_ceiling <= math.log2(len(b))


def test_no_bound_when_perturbation_vanishes(std2):
    r = weak_round_bound(RoundOperators(((np.zeros((2, 2)), np.zeros((2, 2))),), 1e-3), std2)
    assert r.status == "no_bound" and r.epsilon_bound is None
    assert r.epsilon_observed == 0


@pytest.mark.parametrize("name", catalog.NAMES)
def test_no_bound_when_perturbation_is_identity(name):
    b = catalog.builtin(name).basis
    rounds = RoundOperators(((np.eye(b.dims[0]),) + (None,) * (b.n_parties - 1),), 1e-3)
    r = weak_round_bound(rounds, b)
    assert r.status == "no_bound"
    assert r.epsilon_observed < 1e-12


def test_std_diagonal_perturbation(std2):
    """diag(1,0) is diagonal in the product basis: information without overlap."""
    dp = 1e-3
    r = weak_round_bound(RoundOperators(((np.diag([1.0, 0.0]), None),), dp), std2)
    assert r.status == "no_bound" and r.delta < 1e-12
    e = np.diag([1 + dp, 1.0])
    exact = exact_posteriors(std2, [e, np.eye(2)])
    assert r.epsilon_observed == pytest.approx(exact.max() - 0.25, abs=1e-14)
    assert r.epsilon_observed <= r.epsilon_first_order + 10 * dp ** 2


def test_ratio_is_scale_invariant(tiles):
    rng = np.random.default_rng(1)
    a = (random_positive(rng, 3), random_positive(rng, 3))
    r1 = weak_round_bound(RoundOperators((a,), 1e-4), tiles)
    r2 = weak_round_bound(RoundOperators(((a[0] * 7, a[1] * 7),), 1e-4 / 7), tiles)
    assert r1.M_N == pytest.approx(r2.M_N, rel=1e-12)
    assert r1.c_N == pytest.approx(r2.c_N, rel=1e-12)
    assert r1.epsilon_bound == pytest.approx(r2.epsilon_bound, rel=1e-6)


def test_round_operator_validation(std2):
    with pytest.raises(NotHermitianError):
        RoundOperators((([[0, 1], [0, 0]], None),), 1e-3)
    with pytest.raises(ValueError):
        RoundOperators(((None, None),), 0.0)
    with pytest.raises(DimensionError):
        weak_round_bound(RoundOperators(((np.eye(3), None),), 1e-3), std2)
    with pytest.raises(DimensionError):
        weak_round_bound(RoundOperators(((np.eye(2),),), 1e-3), std2)


def test_multiparty_matches_three_term_operator(shifts):
    rng = np.random.default_rng(8)
    rounds = RoundOperators(((random_positive(rng, 2), None, random_positive(rng, 2)),
                             (None, random_positive(rng, 2), None)), 1e-3)
    r = weak_round_bound(rounds, shifts)
    m_n, c_n, _, _ = tensor_reference(rounds, shifts)
    assert (r.M_N, r.c_N) == pytest.approx((m_n, c_n), abs=1e-12)


def test_unnormalized_input_states():
    b = make_basis([2, 2], [([2, 0], [0, 3]), ([0, 1], [1, 1]), ([0, 1], [1, -1])])
    rng = np.random.default_rng(3)
    r = weak_round_bound(RoundOperators(((random_positive(rng, 2), random_positive(rng, 2)),),
                                        1e-3), b)
    assert abs(sum(r.posteriors) - 1) < 1e-12


def test_indefinite_perturbation_needs_identity_shift(std2):
    """With a_j < 0 the bound fails at first order; shifting A by cI repairs it.

    The shift rescales E = I + d'A up to O(d'^2), so posteriors and overlaps agree
    to relative order d'.
    """
    a = np.array([[-1.0, 0.4], [0.4, -0.2]])
    shift = np.eye(2) * 1.5
    for dp in (1e-2, 1e-3, 1e-4):
        raw = weak_round_bound(RoundOperators(((a, a),), dp), std2)
        assert not raw.positive_gauge and raw.M_N < 0
        assert raw.epsilon_observed - raw.epsilon_bound > 0.1 * dp
        fixed = weak_round_bound(RoundOperators(((a + shift, a + shift),), dp), std2)
        assert fixed.positive_gauge
        assert fixed.c_N * (np.abs(accumulated(std2, a + shift)).max()) == \
            pytest.approx(raw.c_N * np.abs(accumulated(std2, a)).max(), rel=1e-12)
        assert fixed.epsilon_observed == pytest.approx(raw.epsilon_observed, rel=5 * dp)
        assert fixed.delta == pytest.approx(raw.delta, rel=5 * dp)
        assert fixed.epsilon_observed <= fixed.epsilon_bound + 10 * dp ** 2


def accumulated(basis, a):
    return accumulated_elements(basis, [a, a])
