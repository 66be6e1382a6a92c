"""Finite-dimensional differential graded commutative algebras with unit.

A Dgca is stored as a graded basis, a sparse multiplication table and a
sparse differential table; missing entries are zero.  `make_dgca` validates
every axiom on basis tuples and names the first violation with a witness.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence, Tuple

from .kernel import ONE, ZERO, GradedBasis, Vec, vec_axpy, vec_scale, words_of_weight


class AxiomError(ValueError):
    """A validation failure, carrying the axiom name and a witness tuple."""

    def __init__(self, axiom: str, witness=None, detail: str = ""):
        self.axiom = axiom
        self.witness = witness
        msg = "axiom violated: %s" % axiom
        if witness is not None:
            msg += " at %r" % (witness,)
        if detail:
            msg += " (%s)" % detail
        super().__init__(msg)


class Dgca:
    """Unital DGCA over the rationals; immutable after validation."""

    def __init__(self, basis: GradedBasis, unit: int, mul: Dict[Tuple[int, int], Vec], diff: Dict[int, Vec]):
        self.basis = basis
        self.unit = unit
        self.mul = mul
        self.diff = diff

    @property
    def dim(self) -> int:
        return self.basis.dim

    def degree(self, i: int) -> int:
        return self.basis.degree(i)

    def unit_vec(self) -> Vec:
        return {self.unit: ONE}

    def product_basis(self, i: int, j: int) -> Vec:
        return self.mul.get((i, j), {})

    def product(self, a: Vec, b: Vec) -> Vec:
        out: Vec = {}
        for i, ca in a.items():
            for j, cb in b.items():
                entry = self.mul.get((i, j))
                if entry:
                    vec_axpy(out, ca * cb, entry)
        return out

    def d(self, a: Vec) -> Vec:
        out: Vec = {}
        for i, c in a.items():
            entry = self.diff.get(i)
            if entry:
                vec_axpy(out, c, entry)
        return out

    def __repr__(self):
        return "Dgca(dim=%d, unit=%r)" % (self.dim, self.basis.labels[self.unit])

    def same_as(self, other: "Dgca") -> bool:
        """Structural equality of the underlying tables (labels ignored)."""
        return (self.basis.degrees == other.basis.degrees
                and self.unit == other.unit
                and self.mul == other.mul
                and self.diff == other.diff)


def _check_table_degrees(basis: GradedBasis, mul, diff):
    for (i, j), v in mul.items():
        if not (0 <= i < basis.dim and 0 <= j < basis.dim):
            raise AxiomError("table_index", (i, j), "multiplication entry out of range")
        want = basis.degree(i) + basis.degree(j)
        for k in v:
            if basis.degree(k) != want:
                raise AxiomError("product_degree", (i, j, k))
    for i, v in diff.items():
        if not 0 <= i < basis.dim:
            raise AxiomError("table_index", (i,), "differential entry out of range")
        for k in v:
            if basis.degree(k) != basis.degree(i) + 1:
                raise AxiomError("differential_degree", (i, k))


def make_dgca(basis: GradedBasis, unit_label: str, mul: Mapping, diff: Mapping) -> Dgca:
    """Validate and build a Dgca; raises AxiomError naming the first violation.

    `mul` maps (i, j) index pairs to sparse vectors, `diff` maps i to sparse
    vectors; both may use label pairs instead of indices.
    """
    def idx(x):
        return basis.index(x) if isinstance(x, str) else int(x)

    mul = {(idx(i), idx(j)): {idx(k): Fraction(c) for k, c in v.items() if Fraction(c)} for (i, j), v in mul.items()}
    mul = {k: v for k, v in mul.items() if v}
    diff = {idx(i): {idx(k): Fraction(c) for k, c in v.items() if Fraction(c)} for i, v in diff.items()}
    diff = {k: v for k, v in diff.items() if v}
    try:
        unit = basis.index(unit_label) if isinstance(unit_label, str) else int(unit_label)
    except KeyError:
        raise AxiomError("unit_missing", unit_label)
    _check_table_degrees(basis, mul, diff)

    alg = Dgca(basis, unit, mul, diff)
    n = basis.dim
    if basis.degree(unit) != 0:
        raise AxiomError("unit_degree", (unit,))
    for i in range(n):
        if alg.product_basis(unit, i) != {i: ONE}:
            raise AxiomError("unitality_left", (unit, i))
        if alg.product_basis(i, unit) != {i: ONE}:
            raise AxiomError("unitality_right", (i, unit))
    for i in range(n):
        for j in range(n):
            sign = -ONE if (basis.degree(i) * basis.degree(j)) % 2 else ONE
            if alg.product_basis(i, j) != vec_scale(sign, alg.product_basis(j, i)):
                raise AxiomError("graded_commutativity", (i, j))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                left = alg.product(alg.product_basis(i, j), {k: ONE})
                right = alg.product({i: ONE}, alg.product_basis(j, k))
                if left != right:
                    raise AxiomError("associativity", (i, j, k))
    if alg.d(alg.unit_vec()):
        raise AxiomError("unit_closed", (unit,))
    for i in range(n):
        if alg.d(alg.d({i: ONE})):
            raise AxiomError("differential_squares", (i,))
    for i in range(n):
        for j in range(n):
            lhs = alg.d(alg.product_basis(i, j))
            rhs = alg.product(alg.d({i: ONE}), {j: ONE})
            sgn = -ONE if basis.degree(i) % 2 else ONE
            vec_axpy(rhs, sgn, alg.product({i: ONE}, alg.d({j: ONE})))
            if lhs != rhs:
                raise AxiomError("leibniz", (i, j))
    return alg


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def field_dgca() -> Dgca:
    """The ground field as a one-dimensional DGCA concentrated in degree 0."""
    basis = GradedBasis(["1"], [0])
    return make_dgca(basis, "1", {(0, 0): {0: ONE}}, {})


def exterior_dgca(names: Sequence[str], degrees: Optional[Sequence[int]] = None,
                  diff_on_generators: Optional[Mapping] = None) -> Dgca:
    """Free graded commutative algebra on odd generators (default degree 1).

    Basis is indexed by subsets of the generators in lexicographic subset
    order; products carry the sign of the interleaving permutation.  An
    optional differential is given on generators (as maps subset-label ->
    coefficient) and extended by Leibniz.
    """
    m = len(names)
    if degrees is None:
        degrees = [1] * m
    if any(d % 2 == 0 for d in degrees):
        raise ValueError("exterior generators must have odd degree")
    subsets = []
    for r in range(m + 1):
        subsets.extend(itertools.combinations(range(m), r))
    label = lambda s: "1" if not s else "".join(names[i] for i in s)
    basis = GradedBasis([label(s) for s in subsets],
                        [sum(degrees[i] for i in s) for s in subsets])
    index_of = {s: basis.index(label(s)) for s in subsets}

    def wedge(s, t):
        if set(s) & set(t):
            return None
        merged = list(s) + list(t)
        sign = 1
        # insertion sort over generator positions; generators are odd
        for i in range(1, len(merged)):
            j = i
            while j > 0 and merged[j - 1] > merged[j]:
                if (degrees[merged[j - 1]] * degrees[merged[j]]) % 2:
                    sign = -sign
                merged[j - 1], merged[j] = merged[j], merged[j - 1]
                j -= 1
        return sign, tuple(merged)

    mul = {}
    for s in subsets:
        for t in subsets:
            w = wedge(s, t)
            if w is not None:
                sign, u = w
                mul[(index_of[s], index_of[t])] = {index_of[u]: Fraction(sign)}

    diff: Dict[int, Vec] = {}
    if diff_on_generators:
        gen_diff = {}
        for g, v in diff_on_generators.items():
            gi = names.index(g) if isinstance(g, str) else int(g)
            gen_diff[gi] = {basis.index(k) if isinstance(k, str) else int(k): Fraction(c)
                            for k, c in v.items()}
        alg0 = Dgca(basis, index_of[()], mul, {})
        for s in subsets:
            out: Vec = {}
            for pos, g in enumerate(s):
                if g not in gen_diff:
                    continue
                rest = s[:pos] + s[pos + 1 :]
                sgn = ONE
                for h in s[:pos]:
                    if degrees[h] % 2:
                        sgn = -sgn
                # d(g) wedged back into place
                partial = alg0.product(gen_diff[g], {index_of[rest]: ONE})
                vec_axpy(out, sgn, partial)
            if out:
                diff[index_of[s]] = out
    return make_dgca(basis, "1", mul, diff)


def ce_dgca(structure: Mapping, dim: int, names: Optional[Sequence[str]] = None) -> Dgca:
    """Chevalley-Eilenberg algebra of a finite-dimensional Lie algebra.

    `structure` maps (i, j) with i < j to the sparse vector of [e_i, e_j];
    the result is the exterior algebra on the dual basis xi^1..xi^dim in
    degree 1 with d(xi^k) = -1/2 c^k_ij xi^i xi^j.  Jacobi is enforced (it
    is exactly d^2 = 0).
    """
    c = _normalize_structure(structure, dim)
    _check_jacobi(c, dim)
    if names is None:
        names = ["x%d" % (i + 1) for i in range(dim)]
    # d(xi^k) = - sum_{i<j} c^k_ij xi^i xi^j
    gen_diff = {}
    for k in range(dim):
        v: Vec = {}
        for (i, j), br in c.items():
            coef = br.get(k)
            if coef:
                lbl = names[i] + names[j]
                v[lbl] = v.get(lbl, ZERO) - coef
        gen_diff[names[k]] = {kk: cc for kk, cc in v.items() if cc}
    return exterior_dgca(list(names), None, gen_diff)


def _normalize_structure(structure: Mapping, dim: int) -> Dict[Tuple[int, int], Vec]:
    c: Dict[Tuple[int, int], Vec] = {}
    for (i, j), v in structure.items():
        v = {int(k): Fraction(x) for k, x in v.items() if Fraction(x)}
        if i == j:
            if v:
                raise AxiomError("antisymmetry", (i, j))
            continue
        if i > j:
            i, j, v = j, i, {k: -x for k, x in v.items()}
        if (i, j) in c and c[(i, j)] != v:
            raise AxiomError("antisymmetry", (i, j))
        c[(i, j)] = v
    return c


def _bracket(c, i, j) -> Vec:
    if i == j:
        return {}
    if i < j:
        return c.get((i, j), {})
    return {k: -x for k, x in c.get((j, i), {}).items()}


def _check_jacobi(c, dim):
    for i in range(dim):
        for j in range(i + 1, dim):
            for k in range(j + 1, dim):
                acc: Vec = {}
                for (a, b, e) in ((i, j, k), (j, k, i), (k, i, j)):
                    inner = _bracket(c, a, b)
                    for m, coef in inner.items():
                        vec_axpy(acc, coef, _bracket(c, m, e))
                if acc:
                    raise AxiomError("jacobi", (i, j, k))


def truncated_poly_dgca(order: int, name: str = "x") -> Dgca:
    """K[x]/(x^order) with |x| = 0 and zero differential."""
    if order < 1:
        raise ValueError("truncation order must be >= 1")
    labels = ["1"] + [name if p == 1 else "%s^%d" % (name, p) for p in range(1, order)]
    basis = GradedBasis(labels, [0] * order)
    mul = {}
    for a in range(order):
        for b in range(order):
            if a + b < order:
                mul[(a, b)] = {a + b: ONE}
    return make_dgca(basis, "1", mul, {})


# ---------------------------------------------------------------------------
# DGCA morphisms
# ---------------------------------------------------------------------------


class DgcaMorphism:
    """Unit-, product- and differential-preserving map of DGCAs."""

    def __init__(self, source: Dgca, target: Dgca, matrix: Dict[int, Vec]):
        self.source = source
        self.target = target
        self.matrix = {i: dict(v) for i, v in matrix.items() if v}

    def apply(self, a: Vec) -> Vec:
        out: Vec = {}
        for i, c in a.items():
            entry = self.matrix.get(i)
            if entry:
                vec_axpy(out, c, entry)
        return out


def make_dgca_morphism(source: Dgca, target: Dgca, matrix: Mapping) -> DgcaMorphism:
    matrix = {int(i): {int(k): Fraction(c) for k, c in v.items() if Fraction(c)} for i, v in matrix.items()}
    phi = DgcaMorphism(source, target, matrix)
    for i in range(source.dim):
        img = phi.matrix.get(i, {})
        di = source.degree(i)
        for k in img:
            if target.degree(k) != di:
                raise AxiomError("morphism_degree", (i, k))
    if phi.apply(source.unit_vec()) != target.unit_vec():
        raise AxiomError("morphism_unit", (source.unit,))
    for i in range(source.dim):
        for j in range(source.dim):
            lhs = phi.apply(source.product_basis(i, j))
            rhs = target.product(phi.apply({i: ONE}), phi.apply({j: ONE}))
            if lhs != rhs:
                raise AxiomError("morphism_product", (i, j))
    for i in range(source.dim):
        if phi.apply(source.d({i: ONE})) != target.d(phi.apply({i: ONE})):
            raise AxiomError("morphism_differential", (i,))
    return phi


def identity_dgca_morphism(alg: Dgca) -> DgcaMorphism:
    return DgcaMorphism(alg, alg, {i: {i: ONE} for i in range(alg.dim)})


def unit_inclusion(alg: Dgca) -> DgcaMorphism:
    """The canonical map from the ground field sending 1 to the unit."""
    return make_dgca_morphism(field_dgca(), alg, {0: {alg.unit: ONE}})
