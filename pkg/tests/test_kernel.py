import math
import random
from fractions import Fraction

import pytest

from linftyr.kernel import (
    GradedBasis,
    bernoulli,
    compositions,
    koszul_sign,
    shuffles,
    sort_word,
    vec,
    vec_add,
    vec_scale,
    vec_sub,
    words_of_weight,
)


def test_koszul_sign_basic():
    assert koszul_sign([1, 1], [1, 0]) == -1
    assert koszul_sign([0, 3], [1, 0]) == 1
    # output order x3, x1, x2 on degrees [1,2,1]
    assert koszul_sign([1, 2, 1], [2, 0, 1]) == -1


def test_koszul_sign_identity_and_errors():
    assert koszul_sign([5, 7, 2], [0, 1, 2]) == 1
    with pytest.raises(ValueError):
        koszul_sign([1, 1], [0, 0])
    with pytest.raises(ValueError):
        koszul_sign([1], [0, 1])


def test_koszul_sign_multiplicative():
    rng = random.Random(7)
    for _ in range(60):
        n = rng.randint(1, 5)
        degs = [rng.randint(-2, 3) for _ in range(n)]
        sigma = list(range(n))
        tau = list(range(n))
        rng.shuffle(sigma)
        rng.shuffle(tau)
        comp = [tau[sigma[i]] for i in range(n)]
        # sign(tau.sigma) = sign(sigma on tau-permuted degrees) * sign(tau)
        degs_tau = [degs[tau[i]] for i in range(n)]
        assert koszul_sign(degs, comp) == koszul_sign(degs_tau, sigma) * koszul_sign(degs, tau)


def test_shuffles_counts_and_order():
    assert shuffles((1, 1)) == ((0, 1), (1, 0))
    assert len(shuffles((2, 1))) == 3
    assert len(shuffles((1, 1, 1))) == 6
    assert shuffles((2, 1)) == ((0, 1, 2), (0, 2, 1), (1, 2, 0))
    for p, q in [(1, 3), (2, 2), (3, 2)]:
        assert len(shuffles((p, q))) == math.comb(p + q, p)
    with pytest.raises(ValueError):
        shuffles(())
    with pytest.raises(ValueError):
        shuffles((2, 0))


def test_shuffles_increase_within_blocks():
    for blocks in [(2, 3), (1, 2, 2), (3, 1, 1)]:
        n = sum(blocks)
        for sigma in shuffles(blocks):
            assert sorted(sigma) == list(range(n))
            off = 0
            for b in blocks:
                seg = sigma[off : off + b]
                assert list(seg) == sorted(seg)
                off += b


def test_compositions():
    assert compositions(3, 2) == ((1, 2), (2, 1))
    assert len(compositions(5, 3)) == math.comb(4, 2)
    assert compositions(2, 3) == ()


def test_bernoulli():
    assert bernoulli(0) == 1
    assert bernoulli(1) == Fraction(-1, 2)
    assert bernoulli(2) == Fraction(1, 6)
    assert bernoulli(3) == 0
    assert bernoulli(4) == Fraction(-1, 30)
    assert bernoulli(12) == Fraction(-691, 2730)


def test_sort_word():
    degs = [1, 2, 1]
    assert sort_word((0, 1, 2), degs) == (1, (0, 1, 2))
    # swapping the two odd elements flips the sign
    assert sort_word((2, 1, 0), degs) == (-1, (0, 1, 2))
    # repeated odd index kills the word
    assert sort_word((0, 0), degs) is None
    # repeated even index is fine
    assert sort_word((1, 1), degs) == (1, (1, 1))
    # idempotent on sorted input
    s, w = sort_word((0, 2), degs)
    assert sort_word(w, degs) == (1, w)


def test_sort_word_matches_koszul_sign():
    rng = random.Random(3)
    degs = [0, 1, 1, 2, 3]
    for _ in range(40):
        word = tuple(rng.sample(range(5), rng.randint(1, 5)))
        res = sort_word(word, degs)
        assert res is not None
        sign, sw = res
        perm = sorted(range(len(word)), key=lambda i: word[i])
        assert sw == tuple(word[i] for i in perm)
        assert sign == koszul_sign([degs[i] for i in word], perm)


def test_words_of_weight():
    degs = [0, 1]
    # weight 2 over {0,1}: (0,0), (0,1); (1,1) dies (odd square)
    assert words_of_weight(2, degs, 2) == [(0, 0), (0, 1)]
    assert len(words_of_weight(3, [0, 0, 0], 2)) == 6


def test_graded_basis():
    b = GradedBasis(["x", "y"], [0, 1])
    assert b.dim == 2
    assert b.index("y") == 1
    assert b.degree(1) == 1
    assert b.degree_of_vec({0: Fraction(2)}) == 0
    assert b.degree_of_vec({}) is None
    with pytest.raises(ValueError):
        b.degree_of_vec({0: Fraction(1), 1: Fraction(1)})
    with pytest.raises(ValueError):
        GradedBasis(["x", "x"], [0, 1])


def test_vec_helpers():
    a = vec((0, 1), (1, Fraction(1, 2)))
    b = vec((1, Fraction(-1, 2)), (2, 3))
    assert vec_add(a, b) == {0: 1, 2: 3}
    assert vec_sub(a, a) == {}
    assert vec_scale(0, a) == {}
    assert vec_scale(2, a) == {0: 2, 1: 1}
