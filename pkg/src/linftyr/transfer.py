"""Homotopy transfer across a base-linear contraction: the transferred
multibrackets, the extensions of both contraction maps, and the symmetrized
tensor-trick homotopy.

All recursions memoize lower arities; coefficient tables live on canonical
sorted basis words, so base-multilinearity of the output is validated by the
structure constructors rather than assumed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional

from .dgca import AxiomError
from .dgmod import Contraction, DgModule, Table, table_eval
from .kernel import ONE, ZERO, Vec, koszul_sign, shuffles, vec_axpy
from .linfty import (
    LInftyMorphism,
    LInftyStructure,
    corolla_sum,
    make_linfty,
    make_morphism,
    shuffle_pairs,
)

WordCombo = dict  # {sorted word: Fraction}


def word_combo_from_slots(m: DgModule, slot_vecs) -> WordCombo:
    """Multilinear expansion of a (.)-product of vectors into sorted words."""
    out: WordCombo = {}
    items = [list(v.items()) for v in slot_vecs]
    for combo in itertools.product(*items):
        coeff = ONE
        word = []
        for idx, c in combo:
            coeff *= c
            word.append(idx)
        res = m.sort(tuple(word))
        if res is None:
            continue
        sgn, w = res
        s = out.get(w, ZERO) + coeff * sgn
        if s:
            out[w] = s
        else:
            out.pop(w, None)
    return out


def tensor_trick_H(c: Contraction, word) -> WordCombo:
    """The symmetrized one-slot homotopy on a weight-n word of the big module."""
    L = c.big
    n = len(word)
    if n == 0:
        return {}
    degs = [L.degree(i) for i in word]
    fg = {i: c.f.apply(c.g.apply({i: ONE})) for i in set(word)}
    h = {i: c.h.apply({i: ONE}) for i in set(word)}
    out: WordCombo = {}
    coef = Fraction(1, math.factorial(n))
    for sigma in itertools.permutations(range(n)):
        sgn = koszul_sign(degs, sigma)
        prefix_deg = 0
        for i in range(1, n + 1):
            slots = []
            dead = False
            for p in range(i - 1):
                v = fg[word[sigma[p]]]
                if not v:
                    dead = True
                    break
                slots.append(v)
            if not dead:
                hv = h[word[sigma[i - 1]]]
                if not hv:
                    dead = True
                else:
                    slots.append(hv)
                    for p in range(i, n):
                        slots.append({word[sigma[p]]: ONE})
            if not dead:
                sgn_i = -ONE if prefix_deg % 2 else ONE
                piece = word_combo_from_slots(L, slots)
                for w, cw in piece.items():
                    s = out.get(w, ZERO) + coef * sgn * sgn_i * cw
                    if s:
                        out[w] = s
                    else:
                        out.pop(w, None)
            prefix_deg += degs[sigma[i - 1]]
    return out


def coderivation_block(s: LInftyStructure, word, k: int) -> WordCombo:
    """The weight-k component of the bracket coderivation on a weight-n word."""
    m = s.module
    n = len(word)
    i = n - k + 1
    if i < 2 or i > n:
        return {}
    degs = [m.degree(x) for x in word]
    out: WordCombo = {}
    for sigma in shuffle_pairs(i, n):
        sgn = koszul_sign(degs, sigma)
        head = tuple(word[sigma[p]] for p in range(i))
        rest = tuple(word[sigma[p]] for p in range(i, n))
        val = s.q(i, head)
        if not val:
            continue
        piece = word_combo_from_slots(m, [val] + [{x: ONE} for x in rest])
        for w, cw in piece.items():
            t = out.get(w, ZERO) + sgn * cw
            if t:
                out[w] = t
            else:
                out.pop(w, None)
    return out


@dataclass
class TransferResult:
    transferred: LInftyStructure
    into_big: LInftyMorphism    # extends f: small -> big
    onto_small: LInftyMorphism  # extends g: big -> small
    contraction: Contraction


def homotopy_transfer(s: LInftyStructure, c: Contraction, arity_cap: int) -> TransferResult:
    """Transferred structure and both extended quasi-isomorphisms, by the
    recursive shuffle formulas with exact 1/k! weights."""
    L, M = c.big, c.small
    if L is not s.module and not _same_module(L, s.module):
        raise AxiomError("transfer_endpoints")
    f_tables: Dict[int, Table] = {1: {(i,): c.f.matrix.get(i, {}) for i in range(M.dim)}}
    f_tables[1] = {w: v for w, v in f_tables[1].items() if v}
    r_tables: Dict[int, Table] = {}
    g_tables: Dict[int, Table] = {1: {(i,): c.g.matrix.get(i, {}) for i in range(L.dim)}}
    g_tables[1] = {w: v for w, v in g_tables[1].items() if v}

    def f_eval(i, sub):
        return table_eval(M, f_tables.get(i, {}), sub)

    for n in range(2, arity_cap + 1):
        f_n: Table = {}
        r_n: Table = {}
        for w in M.words(n):
            degs = [M.degree(i) for i in w]
            inner = corolla_sum(lambda k, vals: s.q_vecs(k, vals), f_eval,
                                degs, w, k_min=2)
            if inner:
                hv = c.h.apply(inner)
                if hv:
                    f_n[w] = hv
                gv = c.g.apply(inner)
                if gv:
                    r_n[w] = gv
        if f_n:
            f_tables[n] = f_n
        if r_n:
            r_tables[n] = r_n
        g_n: Table = {}
        for w in L.words(n):
            hw = tensor_trick_H(c, w)
            if not hw:
                continue
            acc: Vec = {}
            for k in range(1, n):
                gk = g_tables.get(k, {})
                if not gk:
                    continue
                for w2, c2 in hw.items():
                    block = coderivation_block(s, w2, k)
                    for w3, c3 in block.items():
                        val = gk.get(w3)
                        if val:
                            vec_axpy(acc, c2 * c3, val)
            if acc:
                g_n[w] = acc
        if g_n:
            g_tables[n] = g_n

    transferred = make_linfty(M, r_tables, arity_cap)
    F = make_morphism(transferred, s, f_tables)
    G = make_morphism(s, transferred, g_tables)
    return TransferResult(transferred, F, G, c)


def _same_module(a: DgModule, b: DgModule) -> bool:
    return (a.basis.degrees == b.basis.degrees and a.action == b.action
            and a.diff == b.diff and a.base.same_as(b.base))
