"""DG Lie algebras over a Dgca: bracket-carrying DG modules with exact
validation, plus their morphisms.  Used by the mapping-cone construction,
derived brackets, and as the point-base case of Lie-Rinehart algebras.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Mapping, Tuple

from .dgca import AxiomError
from .dgmod import DgModule, ModuleMap
from .kernel import ONE, Vec, vec_axpy, vec_scale


class DgLieAlgebra:
    """DG module with a degree-0 base-bilinear graded Lie bracket."""

    def __init__(self, module: DgModule, bracket: Dict[Tuple[int, int], Vec]):
        self.module = module
        self.bracket = bracket

    @property
    def dim(self):
        return self.module.dim

    def degree(self, i):
        return self.module.degree(i)

    def br_basis(self, i: int, j: int) -> Vec:
        return self.bracket.get((i, j), {})

    def br(self, a: Vec, b: Vec) -> Vec:
        out: Vec = {}
        for i, ci in a.items():
            for j, cj in b.items():
                entry = self.bracket.get((i, j))
                if entry:
                    vec_axpy(out, ci * cj, entry)
        return out

    def d(self, a: Vec) -> Vec:
        return self.module.d(a)


def make_dg_lie(module: DgModule, bracket: Mapping) -> DgLieAlgebra:
    """Validate graded antisymmetry, Jacobi, base-bilinearity and the
    derivation property of the differential, on all basis tuples."""
    bracket = {(int(i), int(j)): {int(k): Fraction(c) for k, c in v.items() if Fraction(c)}
               for (i, j), v in bracket.items()}
    bracket = {k: v for k, v in bracket.items() if v}
    m = module
    for (i, j), v in bracket.items():
        want = m.degree(i) + m.degree(j)
        for k in v:
            if m.degree(k) != want:
                raise AxiomError("bracket_degree", (i, j, k))
    g = DgLieAlgebra(m, bracket)
    n = m.dim
    for i in range(n):
        for j in range(n):
            sgn = ONE if (m.degree(i) * m.degree(j)) % 2 else -ONE
            if g.br_basis(i, j) != vec_scale(sgn, g.br_basis(j, i)):
                raise AxiomError("bracket_antisymmetry", (i, j))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                # [x,[y,z]] = [[x,y],z] + (-1)^{|x||y|} [y,[x,z]]
                lhs = g.br({i: ONE}, g.br_basis(j, k))
                rhs = g.br(g.br_basis(i, j), {k: ONE})
                sgn = -ONE if (m.degree(i) * m.degree(j)) % 2 else ONE
                vec_axpy(rhs, sgn, g.br({j: ONE}, g.br({i: ONE}, {k: ONE})))
                if lhs != rhs:
                    raise AxiomError("bracket_jacobi", (i, j, k))
    base = m.base
    for r in range(base.dim):
        for i in range(n):
            for j in range(n):
                # [r.x, y] = r.[x, y]
                lhs = g.br(m.act_basis(r, i), {j: ONE})
                rhs = m.act({r: ONE}, g.br_basis(i, j))
                if lhs != rhs:
                    raise AxiomError("bracket_left_linear", (r, i, j))
                # [x, r.y] = (-1)^{|r||x|} r.[x, y]
                lhs = g.br({i: ONE}, m.act_basis(r, j))
                sgn = -ONE if (base.degree(r) * m.degree(i)) % 2 else ONE
                if lhs != vec_scale(sgn, rhs):
                    raise AxiomError("bracket_right_linear", (r, i, j))
    for i in range(n):
        for j in range(n):
            lhs = m.d(g.br_basis(i, j))
            rhs = g.br(m.d({i: ONE}), {j: ONE})
            sgn = -ONE if m.degree(i) % 2 else ONE
            vec_axpy(rhs, sgn, g.br({i: ONE}, m.d({j: ONE})))
            if lhs != rhs:
                raise AxiomError("bracket_derivation", (i, j))
    return g


class DgLieMorphism:
    """Base-linear chain map preserving brackets."""

    def __init__(self, source: DgLieAlgebra, target: DgLieAlgebra, f: ModuleMap):
        self.source = source
        self.target = target
        self.map = f

    def apply(self, v: Vec) -> Vec:
        return self.map.apply(v)


def make_dg_lie_morphism(source: DgLieAlgebra, target: DgLieAlgebra, matrix: Mapping) -> DgLieMorphism:
    f = ModuleMap(source.module, target.module, 0, matrix)
    if not f.is_chain_map():
        raise AxiomError("lie_morphism_chain")
    if not f.is_r_linear():
        raise AxiomError("lie_morphism_base_linear")
    for i in range(source.dim):
        for j in range(source.dim):
            lhs = f.apply(source.br_basis(i, j))
            rhs = target.br(f.apply({i: ONE}), f.apply({j: ONE}))
            if lhs != rhs:
                raise AxiomError("lie_morphism_bracket", (i, j))
    return DgLieMorphism(source, target, f)


def dg_lie_inclusion(sub_indices, ambient: DgLieAlgebra, sub: DgLieAlgebra) -> DgLieMorphism:
    """Inclusion of a sub-DG-Lie-algebra given by a basis-index list."""
    matrix = {p: {i: ONE} for p, i in enumerate(sub_indices)}
    return make_dg_lie_morphism(sub, ambient, matrix)
