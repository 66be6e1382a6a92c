"""Mapping cones of DG Lie algebra morphisms with Bernoulli-weighted
brackets, the explicit cone contraction induced by a splitting, higher
derived brackets in both the transfer and closed-form presentations, and
the isomorphism onto the abelian structure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .dgca import AxiomError
from .dglie import DgLieAlgebra, DgLieMorphism, make_dg_lie, make_dg_lie_morphism
from .dgmod import Contraction, DgModule, ModuleMap, Table, make_contraction, make_module
from .kernel import (
    ONE,
    ZERO,
    GradedBasis,
    Vec,
    bernoulli,
    koszul_sign,
    vec_axpy,
    vec_scale,
    vec_sub,
)
from .linfty import LInftyMorphism, LInftyStructure, compose, make_linfty
from .transfer import TransferResult, homotopy_transfer


# ---------------------------------------------------------------------------
# mapping cone
# ---------------------------------------------------------------------------


def cone_module(f: DgLieMorphism) -> DgModule:
    """The shifted cone complex of the underlying chain map, with the base
    action twisted by (-1)^|r| on the shifted summand."""
    L, M = f.source.module, f.target.module
    base = L.base
    nl = L.dim
    labels = ["s-" + lab for lab in L.basis.labels] + list(M.basis.labels)
    degrees = [d - 1 for d in L.basis.degrees] + list(M.basis.degrees)
    basis = GradedBasis(labels, degrees)
    action = {}
    for (r, v), row in L.action.items():
        sgn = -ONE if base.degree(r) % 2 else ONE
        action[(r, v)] = {k: sgn * c for k, c in row.items()}
    for (r, v), row in M.action.items():
        action[(r, v + nl)] = {k + nl: c for k, c in row.items()}
    diff = {}
    for i in range(nl):
        row: Vec = {}
        for k, c in L.d({i: ONE}).items():
            row[k] = -c
        for k, c in f.apply({i: ONE}).items():
            row[k + nl] = row.get(k + nl, ZERO) - c
        row = {k: c for k, c in row.items() if c}
        if row:
            diff[i] = row
    for j in range(M.dim):
        row = {k + nl: c for k, c in M.d({j: ONE}).items()}
        if row:
            diff[j + nl] = row
    generators = None
    if L.generators is not None and M.generators is not None:
        generators = tuple(L.generators) + tuple(g + nl for g in M.generators)
    return make_module(base, basis, action, diff, generators=generators)


def cone_structure(f: DgLieMorphism, arity_cap: int) -> LInftyStructure:
    """The shifted-cone multibrackets: the shifted source bracket, the mixed
    half-bracket, and nested-bracket higher terms weighted by Bernoulli
    numbers; the all-target component vanishes in arity two and above."""
    L, M = f.source, f.target
    nl = L.module.dim
    cm = cone_module(f)
    brackets: Dict[int, Table] = {}
    table2: Table = {}
    for i in range(nl):
        for j in range(i, nl):
            if cm.sort((i, j)) is None:
                continue
            orig = L.module.degree(i)
            val = L.br_basis(i, j)
            if not val:
                continue
            coef = -ONE if orig % 2 else ONE
            table2[(i, j)] = {k: coef * c for k, c in val.items()}
    for i in range(nl):
        for j in range(M.module.dim):
            val = M.br(f.apply({i: ONE}), {j: ONE})
            if not val:
                continue
            table2[(i, j + nl)] = {k + nl: Fraction(1, 2) * c for k, c in val.items()}
    if table2:
        brackets[2] = table2
    for n in range(3, arity_cap + 1):
        coef = -bernoulli(n - 1) / Fraction(math.factorial(n - 1))
        if not coef:
            continue
        table: Table = {}
        for i in range(nl):
            fx = f.apply({i: ONE})
            if not fx:
                continue
            for yw in M.module.words(n - 1):
                degs = [M.module.degree(y) for y in yw]
                acc: Vec = {}
                for sigma in itertools.permutations(range(n - 1)):
                    sgn = koszul_sign(degs, sigma)
                    v = fx
                    for p in sigma:
                        v = M.br(v, {yw[p]: ONE})
                        if not v:
                            break
                    if v:
                        vec_axpy(acc, sgn, v)
                if acc:
                    word = (i,) + tuple(y + nl for y in yw)
                    table[word] = {k + nl: coef * c for k, c in acc.items()}
        if table:
            brackets[n] = table
    return make_linfty(cm, brackets, arity_cap)


# ---------------------------------------------------------------------------
# quotient setup and splittings
# ---------------------------------------------------------------------------


@dataclass
class QuotientSetup:
    """A DG Lie subalgebra spanned by basis indices, with the quotient module
    and the canonical projection."""

    ambient: DgLieAlgebra
    sub_indices: Tuple[int, ...]
    sub: DgLieAlgebra
    inclusion: DgLieMorphism
    quotient: DgModule
    complement: Tuple[int, ...]
    projection: ModuleMap  # ambient -> quotient


def quotient_setup(M: DgLieAlgebra, sub_indices: Sequence[int]) -> QuotientSetup:
    sub_indices = tuple(sub_indices)
    mod = M.module
    base = mod.base
    sub_set = set(sub_indices)
    for i in sub_indices:
        for j in sub_indices:
            for k in M.br_basis(i, j):
                if k not in sub_set:
                    raise AxiomError("subalgebra_bracket", (i, j, k))
        for k in mod.d({i: ONE}):
            if k not in sub_set:
                raise AxiomError("subalgebra_differential", (i, k))
        for r in range(base.dim):
            for k in mod.act_basis(r, i):
                if k not in sub_set:
                    raise AxiomError("subalgebra_action", (r, i, k))
    complement = tuple(i for i in range(mod.dim) if i not in sub_set)
    reindex = {i: p for p, i in enumerate(complement)}
    labels = [mod.basis.labels[i] + "~" for i in complement]
    degrees = [mod.degree(i) for i in complement]
    basis = GradedBasis(labels, degrees)

    def project(v: Vec) -> Vec:
        return {reindex[k]: c for k, c in v.items() if k in reindex}

    action = {}
    for r in range(base.dim):
        for p, i in enumerate(complement):
            row = project(mod.act_basis(r, i))
            if row:
                action[(r, p)] = row
    diff = {}
    for p, i in enumerate(complement):
        row = project(mod.d({i: ONE}))
        if row:
            diff[p] = row
    generators = None
    if mod.generators is not None:
        gens = [reindex[g] for g in mod.generators if g in reindex]
        if len(gens) * base.dim == len(complement):
            generators = tuple(gens)
    quotient = make_module(base, basis, action, diff, generators=generators)
    sub_labels = [mod.basis.labels[i] for i in sub_indices]
    sub_degrees = [mod.degree(i) for i in sub_indices]
    sub_reindex = {i: p for p, i in enumerate(sub_indices)}
    sub_action = {}
    for r in range(base.dim):
        for p, i in enumerate(sub_indices):
            row = {sub_reindex[k]: c for k, c in mod.act_basis(r, i).items()}
            if row:
                sub_action[(r, p)] = row
    sub_diff = {}
    for p, i in enumerate(sub_indices):
        row = {sub_reindex[k]: c for k, c in mod.d({i: ONE}).items()}
        if row:
            sub_diff[p] = row
    sub_gens = None
    if mod.generators is not None:
        sg = [sub_reindex[g] for g in mod.generators if g in sub_set]
        if len(sg) * base.dim == len(sub_indices):
            sub_gens = tuple(sg)
    sub_mod = make_module(base, GradedBasis(sub_labels, sub_degrees),
                          sub_action, sub_diff, generators=sub_gens)
    sub_bracket = {}
    for p, i in enumerate(sub_indices):
        for q, j in enumerate(sub_indices):
            row = {sub_reindex[k]: c for k, c in M.br_basis(i, j).items()}
            if row:
                sub_bracket[(p, q)] = row
    sub = make_dg_lie(sub_mod, sub_bracket)
    inclusion = make_dg_lie_morphism(sub, M, {p: {i: ONE} for p, i in enumerate(sub_indices)})
    projection = ModuleMap(mod, quotient, 0,
                           {i: {reindex[i]: ONE} for i in complement})
    return QuotientSetup(M, sub_indices, sub, inclusion, quotient, complement, projection)


@dataclass
class SplittingData:
    setup: QuotientSetup
    section: ModuleMap  # quotient -> ambient
    is_chain_map: bool
    image_abelian: bool


def make_splitting(qs: QuotientSetup, matrix: Optional[Dict] = None) -> SplittingData:
    """Validate a degree-0 base-linear section of the projection; the default
    matrix sends each class to its complement basis vector."""
    if matrix is None:
        matrix = {p: {i: ONE} for p, i in enumerate(qs.complement)}
    sigma = ModuleMap(qs.quotient, qs.ambient.module, 0, matrix)
    if not sigma.is_r_linear():
        raise AxiomError("splitting_not_base_linear")
    for p in range(qs.quotient.dim):
        if qs.projection.apply(sigma.apply({p: ONE})) != {p: ONE}:
            raise AxiomError("splitting_not_section", (p,))
    chain = all(
        sigma.apply(qs.quotient.d({p: ONE})) == qs.ambient.module.d(sigma.apply({p: ONE}))
        for p in range(qs.quotient.dim))
    abelian = True
    for p in range(qs.quotient.dim):
        for q in range(qs.quotient.dim):
            if qs.ambient.br(sigma.apply({p: ONE}), sigma.apply({q: ONE})):
                abelian = False
    return SplittingData(qs, sigma, chain, abelian)


def cone_contraction(qs: QuotientSetup, sd: SplittingData,
                     cone: Optional[LInftyStructure] = None) -> Tuple[Contraction, LInftyStructure]:
    """The explicit base-linear contraction of the inclusion cone onto the
    quotient, together with the cone structure it contracts."""
    if cone is None:
        cone = cone_structure(qs.inclusion, 2)
    cm = cone.module
    M = qs.ambient.module
    A = qs.quotient
    nl = qs.sub.module.dim
    sigma = sd.section
    sub_reindex = {i: p for p, i in enumerate(qs.sub_indices)}

    def p_perp(v: Vec) -> Vec:
        # id - sigma.projection, expressed over subalgebra coordinates
        w = vec_sub(v, sigma.apply(qs.projection.apply(v)))
        out = {}
        for k, c in w.items():
            out[sub_reindex[k]] = c
        return out

    f_matrix = {}
    for p in range(A.dim):
        sv = sigma.apply({p: ONE})
        row = {k + nl: c for k, c in sv.items()}
        for k, c in p_perp(M.d(sv)).items():
            row[k] = c
        f_matrix[p] = row
    g_matrix = {}
    for j in range(M.dim):
        row = qs.projection.apply({j: ONE})
        if row:
            g_matrix[j + nl] = row
    h_matrix = {}
    for j in range(M.dim):
        row = p_perp({j: ONE})
        if row:
            h_matrix[j + nl] = row
    f = ModuleMap(A, cm, 0, f_matrix)
    g = ModuleMap(cm, A, 0, g_matrix)
    h = ModuleMap(cm, cm, -1, h_matrix)
    return make_contraction(f, g, h), cone


@dataclass
class DerivedBrackets:
    structure: LInftyStructure
    transfer: TransferResult
    closed_form: Optional[Dict[int, Table]]
    branches_agree: Optional[bool]


def derived_brackets(M: DgLieAlgebra, sub_indices: Sequence[int],
                     sigma_matrix: Optional[Dict], arity_cap: int,
                     validate_lie: bool = True) -> DerivedBrackets:
    """Higher derived brackets of a splitting: the transfer of the inclusion
    cone along the explicit contraction, compared against the nested-bracket
    closed form whenever the image of the splitting is abelian."""
    qs = quotient_setup(M, sub_indices)
    sd = make_splitting(qs, sigma_matrix)
    cone = cone_structure(qs.inclusion, arity_cap)
    contraction, _ = cone_contraction(qs, sd, cone)
    res = homotopy_transfer(cone, contraction, arity_cap)
    closed = None
    agree = None
    if sd.image_abelian:
        closed = closed_form_brackets(qs, sd, arity_cap)
        agree = all(res.transferred.bracket_table(n) == closed.get(n, {})
                    for n in range(2, arity_cap + 1))
    return DerivedBrackets(res.transferred, res, closed, agree)


def closed_form_brackets(qs: QuotientSetup, sd: SplittingData, arity_cap: int) -> Dict[int, Table]:
    """pi([...[[D sigma(a1), sigma(a2)], sigma(a3)], ..., sigma(an)])."""
    A = qs.quotient
    M = qs.ambient
    sigma = sd.section
    out: Dict[int, Table] = {}
    for n in range(2, arity_cap + 1):
        table: Table = {}
        for w in A.words(n):
            v = M.module.d(sigma.apply({w[0]: ONE}))
            for p in w[1:]:
                v = M.br(v, sigma.apply({p: ONE}))
                if not v:
                    break
            if not v:
                continue
            val = qs.projection.apply(v)
            if val:
                table[w] = val
        if table:
            out[n] = table
    return out


def abelianization_iso(M: DgLieAlgebra, sub_indices: Sequence[int],
                       sigma_ab: Optional[Dict], sigma_cm: Optional[Dict],
                       arity_cap: int) -> Tuple[LInftyMorphism, LInftyStructure, LInftyStructure]:
    """Composite of the two transferred quasi-isomorphisms attached to an
    abelian-image splitting and a chain-map splitting: an isomorphism with
    identity linear coefficient onto the abelian structure."""
    qs = quotient_setup(M, sub_indices)
    sd1 = make_splitting(qs, sigma_ab)
    sd2 = make_splitting(qs, sigma_cm)
    if not sd1.image_abelian:
        raise AxiomError("splitting_image_not_abelian")
    if not sd2.is_chain_map:
        raise AxiomError("splitting_not_chain_map")
    cone = cone_structure(qs.inclusion, arity_cap)
    c1, _ = cone_contraction(qs, sd1, cone)
    c2, _ = cone_contraction(qs, sd2, cone)
    r1 = homotopy_transfer(cone, c1, arity_cap)
    r2 = homotopy_transfer(cone, c2, arity_cap)
    if not r2.transferred.is_abelian():
        raise AxiomError("chain_splitting_not_abelianizing")
    iso = compose(r2.onto_small, r1.into_big, arity_cap)
    return iso, r1.transferred, r2.transferred
