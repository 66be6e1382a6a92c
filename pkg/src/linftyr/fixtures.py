"""Shared example objects: small Lie algebras, DG Lie algebras over small
base rings, and the degreewise-finite polynomial base-change example.

These back both the test suite and the shipped CLI fixture files.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Optional, Tuple

from .dgca import Dgca, ce_dgca, exterior_dgca, field_dgca, make_dgca_morphism, truncated_poly_dgca
from .dglie import DgLieAlgebra, make_dg_lie
from .dgmod import DgModule, make_module
from .kernel import ONE, ZERO, GradedBasis, Vec
from .linfty import LInftyStructure, decalage, make_linfty

# structure constants as {(i, j): {k: c}} for i < j
SL2 = {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}}      # basis h, e, f
SL2_LABELS = ["h", "e", "f"]
AFF1 = {(0, 1): {1: 1}}                                       # [e1, e2] = e2
HEIS3 = {(0, 1): {2: 1}}                                      # [x, y] = z, z central


def abelian_constants(n: int) -> Dict:
    return {}


def lie_dgla(structure: Dict, dim: int, labels=None, diff: Optional[Dict] = None) -> DgLieAlgebra:
    """A Lie algebra in degree 0 as a DG Lie algebra over the ground field,
    with an optional degree-shifting differential given on a graded basis."""
    kk = field_dgca()
    if labels is None:
        labels = ["e%d" % (i + 1) for i in range(dim)]
    basis = GradedBasis(labels, [0] * dim)
    m = make_module(kk, basis, {}, diff or {}, generators=tuple(range(dim)))
    bracket = {}
    for (i, j), v in structure.items():
        bracket[(i, j)] = dict(v)
        sgn = -ONE
        bracket[(j, i)] = {k: sgn * Fraction(c) for k, c in v.items()}
    return make_dg_lie(m, bracket)


def graded_dgla(labels, degrees, structure: Dict, diff: Optional[Dict] = None,
                base: Optional[Dgca] = None, action: Optional[Dict] = None,
                generators=None) -> DgLieAlgebra:
    """General small DG Lie algebra from explicit tables."""
    if base is None:
        base = field_dgca()
        if generators is None:
            generators = tuple(range(len(labels)))
    basis = GradedBasis(labels, degrees)
    m = make_module(base, basis, action or {}, diff or {}, generators=generators)
    bracket = {}
    for (i, j), v in structure.items():
        bracket[(i, j)] = {k: Fraction(c) for k, c in v.items()}
    for (i, j), v in list(bracket.items()):
        if (j, i) not in bracket and i != j:
            sgn = ONE if (degrees[i] * degrees[j]) % 2 else -ONE
            bracket[(j, i)] = {k: sgn * c for k, c in v.items()}
    return make_dg_lie(m, bracket)


def tensor_dgla(base: Dgca, structure: Dict, dim: int, labels=None) -> DgLieAlgebra:
    """The free base extension of a degree-0 Lie algebra, with differential
    d_R (x) id; a DG Lie algebra over `base`."""
    if labels is None:
        labels = ["e%d" % (i + 1) for i in range(dim)]
    pair_labels = []
    degrees = []
    index = {}
    for g in range(dim):
        for r in range(base.dim):
            index[(r, g)] = len(pair_labels)
            rl = base.basis.labels[r]
            pair_labels.append(("%s*%s" % (rl, labels[g])) if rl != "1" else labels[g])
            degrees.append(base.degree(r))
    basis = GradedBasis(pair_labels, degrees)
    action = {}
    for r2 in range(base.dim):
        for (r, g), idx in index.items():
            prod = base.product({r2: ONE}, {r: ONE})
            row = {index[(rr, g)]: c for rr, c in prod.items()}
            if row:
                action[(r2, idx)] = row
    diff = {}
    for (r, g), idx in index.items():
        row = {index[(rr, g)]: c for rr, c in base.d({r: ONE}).items()}
        if row:
            diff[idx] = row
    generators = tuple(index[(base.unit, g)] for g in range(dim))
    m = make_module(base, basis, action, diff, generators=generators)

    def constants(i, j):
        if i == j:
            return {}
        if i < j:
            return structure.get((i, j), {})
        return {k: -Fraction(c) for k, c in structure.get((j, i), {}).items()}

    bracket = {}
    for (r, g), idx in index.items():
        for (r2, g2), idx2 in index.items():
            prod = base.product({r: ONE}, {r2: ONE})
            if not prod:
                continue
            val: Vec = {}
            for k, c in constants(g, g2).items():
                for rr, cr in prod.items():
                    tgt = index[(rr, k)]
                    val[tgt] = val.get(tgt, ZERO) + Fraction(c) * cr
            val = {k: c for k, c in val.items() if c}
            if val:
                bracket[(idx, idx2)] = val
    return make_dg_lie(m, bracket)


def sl2_decalage(arity_cap: int = 4) -> LInftyStructure:
    return decalage(lie_dgla(SL2, 3, SL2_LABELS), arity_cap)


def sl2_decalage_tampered(arity_cap: int = 4) -> LInftyStructure:
    """sl2 decalage with one bracket entry perturbed by +1; fails the
    arity-3 identity."""
    s = sl2_decalage(arity_cap)
    table = {w: dict(v) for w, v in s.brackets[2].items()}
    w = (0, 1)
    bumped = dict(table.get(w, {}))
    bumped[1] = bumped.get(1, ZERO) + 1
    table[w] = bumped
    return LInftyStructure(s.module, {2: table}, arity_cap)


def two_term_acyclic_dgla() -> DgLieAlgebra:
    """Abelian DG Lie algebra u -> v with d(u) = v, degrees 0 and 1."""
    return graded_dgla(["u", "v"], [0, 1], {}, diff={0: {1: 1}})


def sl2_plus_acyclic() -> Tuple[DgLieAlgebra, DgLieAlgebra]:
    """sl2 with an abelian acyclic summand, and sl2 itself."""
    big = graded_dgla(
        SL2_LABELS + ["u", "v"], [0, 0, 0, 0, 1],
        {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}},
        diff={3: {4: 1}})
    return big, lie_dgla(SL2, 3, SL2_LABELS)


def polynomial_base_change(cap: int = 6):
    """The quotient map K[x] -> K[x]/(x^2) with the two-term module given by
    multiplication by x^2 and its quotient quasi-isomorphism, all modelled
    degreewise-finitely below the polynomial-degree cap.

    Returns (phi, L, M, g_matrix, weights_R) where L and M carry polynomial
    weights chosen so their differentials are weight-preserving.
    """
    S = truncated_poly_dgca(cap + 1)          # x^(cap+1) = 0, degrees 0
    R = truncated_poly_dgca(2)
    # phi: S -> R, x -> x
    phi_matrix = {0: {0: ONE}, 1: {1: ONE}}
    phi = make_dgca_morphism(S, R, phi_matrix)
    # L: free rank-1 in degrees -1 and 0 with d = multiplication by x^2
    labels = ["s%d" % p for p in range(cap + 1)] + ["t%d" % p for p in range(cap + 1)]
    degrees = [-1] * (cap + 1) + [0] * (cap + 1)
    weights = [p + 2 for p in range(cap + 1)] + [p for p in range(cap + 1)]
    n1 = cap + 1
    action = {}
    for r in range(1, cap + 1):  # x^r acting
        for p in range(cap + 1):
            if p + r <= cap:
                action[(r, p)] = {p + r: ONE}
                action[(r, n1 + p)] = {n1 + p + r: ONE}
    diff = {p: {n1 + p + 2: ONE} for p in range(cap - 1)}
    basisL = GradedBasis(labels, degrees)
    L = make_module(S, basisL, action, diff, weights=weights)
    # M: K[x]/(x^2) in degree 0
    basisM = GradedBasis(["m0", "m1"], [0, 0])
    actM = {(1, 0): {1: ONE}}
    M = make_module(S, basisM, actM, {}, weights=[0, 1])
    # g: quotient map, t_p -> x^p mod x^2, s_p -> 0
    g_matrix = {n1 + 0: {0: ONE}, n1 + 1: {1: ONE}}
    r_weights = [0, 1]
    return phi, L, M, g_matrix, r_weights
