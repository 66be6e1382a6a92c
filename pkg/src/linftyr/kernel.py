"""Combinatorial substrate: exact rational scalars, graded bases, Koszul
signs, shuffle enumeration, Bernoulli numbers and normalized symmetric words.

Everything here is pure and deterministic.  Scalars are `fractions.Fraction`
(arbitrary precision, canonical reduced form), so all downstream identity
checks are exact equalities.  Sparse linear combinations are plain dicts
``{basis_index: Fraction}`` with zero entries never stored.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence

Scalar = Fraction
ZERO = Fraction(0)
ONE = Fraction(1)

# ---------------------------------------------------------------------------
# sparse vectors over the rationals
# ---------------------------------------------------------------------------

Vec = dict  # {key: Fraction}; keys are basis indices or richer hashables


def vec(*pairs) -> Vec:
    """Build a sparse vector from (key, coefficient) pairs, dropping zeros."""
    out = {}
    for k, c in pairs:
        c = Fraction(c)
        if c:
            out[k] = out.get(k, ZERO) + c
            if not out[k]:
                del out[k]
    return out


def vec_add(a: Vec, b: Vec) -> Vec:
    out = dict(a)
    for k, c in b.items():
        s = out.get(k, ZERO) + c
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def vec_sub(a: Vec, b: Vec) -> Vec:
    out = dict(a)
    for k, c in b.items():
        s = out.get(k, ZERO) - c
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def vec_scale(c, a: Vec) -> Vec:
    c = Fraction(c)
    if not c:
        return {}
    return {k: c * v for k, v in a.items()}


def vec_axpy(dst: Vec, c, src: Vec) -> None:
    """In-place dst += c * src."""
    if not c:
        return
    for k, v in src.items():
        s = dst.get(k, ZERO) + c * v
        if s:
            dst[k] = s
        else:
            dst.pop(k, None)


def vec_eq(a: Vec, b: Vec) -> bool:
    return a == b


def vec_str(a: Vec, name=str) -> str:
    if not a:
        return "0"
    terms = []
    for k in sorted(a, key=repr):
        terms.append("%s*%s" % (a[k], name(k)))
    return " + ".join(terms)


# ---------------------------------------------------------------------------
# graded bases
# ---------------------------------------------------------------------------


class GradedBasis:
    """Ordered list of distinct labels, each with an integer degree."""

    def __init__(self, labels: Sequence[str], degrees: Sequence[int]):
        labels = list(labels)
        degrees = [int(d) for d in degrees]
        if len(labels) != len(degrees):
            raise ValueError("labels and degrees must have equal length")
        if len(set(labels)) != len(labels):
            raise ValueError("basis labels must be distinct")
        self.labels = labels
        self.degrees = degrees
        self._index = {lab: i for i, lab in enumerate(labels)}

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self._index[label]

    def degree(self, i: int) -> int:
        return self.degrees[i]

    def indices_of_degree(self, d: int):
        return [i for i, deg in enumerate(self.degrees) if deg == d]

    def degree_of_vec(self, v: Vec) -> Optional[int]:
        """Common degree of a homogeneous vector, None for the zero vector.

        Raises ValueError on inhomogeneous input.
        """
        degs = {self.degrees[k] for k in v}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("inhomogeneous vector: degrees %s" % sorted(degs))
        return degs.pop()

    def __repr__(self):
        return "GradedBasis(%s)" % ", ".join(
            "%s:%d" % (l, d) for l, d in zip(self.labels, self.degrees)
        )


# ---------------------------------------------------------------------------
# Koszul signs and shuffles
# ---------------------------------------------------------------------------


def koszul_sign(degrees: Sequence[int], perm: Sequence[int]) -> int:
    """Sign epsilon with x_{perm(0)} (.) ... (.) x_{perm(n-1)} = epsilon * x_0 (.) ... (.) x_{n-1}.

    `perm` is one-line notation: position i holds original index perm[i].
    Each inverted pair contributes (-1)^(product of the two degrees).
    """
    n = len(perm)
    if len(degrees) != n:
        raise ValueError("degree list and permutation length mismatch")
    if sorted(perm) != list(range(n)):
        raise ValueError("not a permutation of 0..n-1: %r" % (tuple(perm),))
    sign = 1
    for i in range(n):
        for j in range(i + 1, n):
            if perm[i] > perm[j] and (degrees[perm[i]] * degrees[perm[j]]) % 2:
                sign = -sign
    return sign


@lru_cache(maxsize=None)
def shuffles(block_sizes: tuple) -> tuple:
    """All permutations increasing within each consecutive block, lex order.

    blocks (i1,...,ik) with i1+...+ik = n yield the multinomial-coefficient
    many one-line tuples sigma with sigma increasing on each block of
    positions.  Entries are 0-based.
    """
    blocks = tuple(int(b) for b in block_sizes)
    if not blocks:
        raise ValueError("empty block list")
    if any(b <= 0 for b in blocks):
        raise ValueError("zero or negative block size in %r" % (blocks,))
    n = sum(blocks)
    results = []

    def rec(remaining: tuple, blocks_left: tuple, acc: tuple):
        if not blocks_left:
            results.append(acc)
            return
        b = blocks_left[0]
        if len(blocks_left) == 1:
            results.append(acc + remaining)
            return
        for chosen in itertools.combinations(remaining, b):
            rest = tuple(x for x in remaining if x not in chosen)
            rec(rest, blocks_left[1:], acc + chosen)

    rec(tuple(range(n)), blocks, ())
    results.sort()
    return tuple(results)


@lru_cache(maxsize=None)
def compositions(n: int, k: int) -> tuple:
    """Ordered tuples of k positive integers summing to n."""
    if k <= 0 or n < k:
        return ()
    if k == 1:
        return ((n,),)
    out = []
    for first in range(1, n - k + 2):
        for rest in compositions(n - first, k - 1):
            out.append((first,) + rest)
    return tuple(out)


# ---------------------------------------------------------------------------
# Bernoulli numbers
# ---------------------------------------------------------------------------

_bernoulli_cache = [ONE]


def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n in the convention B_1 = -1/2.

    Computed from sum_{k=0}^{n} C(n+1,k) B_k = 0 with B_0 = 1.
    """
    if n < 0:
        raise ValueError("bernoulli index must be nonnegative")
    while len(_bernoulli_cache) <= n:
        m = len(_bernoulli_cache)
        acc = ZERO
        for k in range(m):
            acc += math.comb(m + 1, k) * _bernoulli_cache[k]
        _bernoulli_cache.append(-acc / (m + 1))
    return _bernoulli_cache[n]


# ---------------------------------------------------------------------------
# normalized symmetric words
# ---------------------------------------------------------------------------


def sort_word(word: Sequence[int], degrees: Sequence[int]):
    """Normalize a word of basis indices into canonical sorted order.

    Returns (sign, sorted_tuple), or None when the word is zero because it
    repeats an odd-degree index.  The sign is the Koszul sign of the sorting
    permutation.
    """
    w = list(word)
    sign = 1
    # insertion sort accumulating (-1)^(|a||b|) per adjacent transposition
    for i in range(1, len(w)):
        j = i
        while j > 0 and w[j - 1] > w[j]:
            if (degrees[w[j - 1]] * degrees[w[j]]) % 2:
                sign = -sign
            w[j - 1], w[j] = w[j], w[j - 1]
            j -= 1
    for a, b in zip(w, w[1:]):
        if a == b and degrees[a] % 2:
            return None
    return sign, tuple(w)


def words_of_weight(dim: int, degrees: Sequence[int], n: int):
    """All canonical sorted words of length n over indices 0..dim-1.

    Words repeating an odd-degree index are excluded (they normalize to 0).
    Lexicographic order.
    """
    out = []
    for w in itertools.combinations_with_replacement(range(dim), n):
        ok = True
        for a, b in zip(w, w[1:]):
            if a == b and degrees[a] % 2:
                ok = False
                break
        if ok:
            out.append(w)
    return out


def word_degree(word: Sequence[int], degrees: Sequence[int]) -> int:
    return sum(degrees[i] for i in word)
