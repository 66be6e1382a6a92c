"""Shifted homotopy Lie structures over a Dgca: identity verification,
morphisms and their composition and inversion, the binary bracket class,
the induced bracket on cohomology, and base change along DGCA morphisms.

Brackets and Taylor coefficients are stored as value tables on canonical
sorted basis words; graded symmetry is a property of the storage and
base-multilinearity is enforced at validation time.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .dgca import AxiomError, Dgca, DgcaMorphism, field_dgca, unit_inclusion
from .dglie import DgLieAlgebra
from .dgmod import (
    DgModule,
    ModuleMap,
    Table,
    cohomology,
    hom_sym_complex,
    make_module,
    table_eval,
    table_eval_vecs,
    table_is_r_multilinear,
)
from .kernel import (
    ONE,
    ZERO,
    GradedBasis,
    Vec,
    compositions,
    koszul_sign,
    shuffles,
    vec_axpy,
    vec_scale,
    vec_sub,
)
from .linalg import LinearSystem, Quotient


def shuffle_pairs(i: int, n: int):
    """Sh(i, n-i), allowing the degenerate n = i case."""
    if n == i:
        return (tuple(range(n)),)
    return shuffles((i, n - i))


# ---------------------------------------------------------------------------
# structures
# ---------------------------------------------------------------------------


class LInftyStructure:
    """A DG module with graded-symmetric degree-(+1) multibrackets."""

    def __init__(self, module: DgModule, brackets: Dict[int, Table], arity_cap: int):
        self.module = module
        self.brackets = brackets
        self.arity_cap = arity_cap

    def bracket_table(self, n: int) -> Table:
        return self.brackets.get(n, {})

    def q(self, n: int, word: Tuple[int, ...]) -> Vec:
        """Evaluate the arity-n bracket on a basis word (q_1 = d)."""
        if n == 1:
            return self.module.d({word[0]: ONE})
        return table_eval(self.module, self.brackets.get(n, {}), word)

    def q_vecs(self, n: int, vecs: Sequence[Vec]) -> Vec:
        if n == 1:
            return self.module.d(vecs[0])
        return table_eval_vecs(self.module, self.brackets.get(n, {}), vecs)

    def is_abelian(self) -> bool:
        return all(not t for t in self.brackets.values())

    def __repr__(self):
        return "LInftyStructure(dim=%d, arities=%s)" % (
            self.module.dim, sorted(n for n, t in self.brackets.items() if t))


def _normalize_table(m: DgModule, table: Mapping, map_degree: int) -> Table:
    out: Table = {}
    for word, v in table.items():
        res = m.sort(tuple(word))
        if res is None:
            if any(Fraction(c) for c in v.values()):
                raise AxiomError("table_odd_square_word", tuple(word))
            continue
        sgn, w = res
        vv = {int(k): sgn * Fraction(c) for k, c in v.items() if Fraction(c)}
        if not vv:
            continue
        if w in out and out[w] != vv:
            raise AxiomError("table_symmetry", tuple(word))
        out[w] = vv
    return out


def make_linfty(module: DgModule, brackets: Mapping, arity_cap: Optional[int] = None) -> LInftyStructure:
    """Validate bracket tables: degree +1, homogeneous, base-multilinear."""
    tables: Dict[int, Table] = {}
    for n, t in brackets.items():
        n = int(n)
        if n < 2:
            raise AxiomError("bracket_arity", n)
        tables[n] = _normalize_table(module, t, 1)
    if arity_cap is None:
        arity_cap = max(tables, default=1)
    for n, t in tables.items():
        for w, v in t.items():
            want = sum(module.degree(i) for i in w) + 1
            for k in v:
                if module.degree(k) != want:
                    raise AxiomError("bracket_value_degree", (n, w, k))
        witness = table_is_r_multilinear(module, t, n, 1)
        if witness is not None:
            raise AxiomError("bracket_multilinearity", (n,) + witness)
    return LInftyStructure(module, tables, arity_cap)


def abelian_structure(module: DgModule, arity_cap: int = 1) -> LInftyStructure:
    return LInftyStructure(module, {}, arity_cap)


def decalage(g: DgLieAlgebra, arity_cap: int = 2) -> LInftyStructure:
    """View a DG Lie algebra as a shifted structure: degrees drop by one,
    action and differential tables carry over, and the binary bracket is
    q_2(x,y) = (-1)^(original degree of x) [x,y] on sorted shifted words."""
    m = g.module
    basis = GradedBasis(list(m.basis.labels), [d - 1 for d in m.basis.degrees])
    shifted = make_module(m.base, basis, dict(m.action), dict(m.diff),
                          generators=m.generators)
    table: Table = {}
    for i in range(m.dim):
        for j in range(i, m.dim):
            if shifted.sort((i, j)) is None:
                continue
            v = g.br_basis(i, j)
            if not v:
                continue
            coef = -ONE if m.degree(i) % 2 else ONE
            table[(i, j)] = vec_scale(coef, v)
    return make_linfty(shifted, {2: table}, arity_cap)


# ---------------------------------------------------------------------------
# identity checking
# ---------------------------------------------------------------------------


@dataclass
class CheckReport:
    ok: bool
    kind: str
    arity_cap: int
    first_failure: Optional[tuple] = None
    failure_count: int = 0
    scope: str = ""

    def __bool__(self):
        return self.ok


def linfty_defect(s: LInftyStructure, n: int, word: Tuple[int, ...]) -> Vec:
    """Left side of the arity-n generalized Jacobi identity on one word."""
    m = s.module
    degs = [m.degree(i) for i in word]
    out: Vec = {}
    for i in range(1, n + 1):
        for sigma in shuffle_pairs(i, n):
            sgn = koszul_sign(degs, sigma)
            head = tuple(word[sigma[p]] for p in range(i))
            rest = tuple(word[sigma[p]] for p in range(i, n))
            inner = s.q(i, head)
            if not inner:
                continue
            if n - i + 1 == 1:
                vec_axpy(out, sgn, m.d(inner))
            else:
                for b, c in inner.items():
                    vec_axpy(out, sgn * c, s.q(n - i + 1, (b,) + rest))
    return out


def check_linfty(s: LInftyStructure, arity_cap: Optional[int] = None,
                 exhaustive: bool = False) -> CheckReport:
    """Verify the generalized Jacobi identities for 2 <= n <= arity_cap on
    every canonical basis word, in deterministic (arity, word) order."""
    cap = arity_cap if arity_cap is not None else s.arity_cap
    m = s.module
    first = None
    count = 0
    for n in range(2, cap + 1):
        for w in m.words(n):
            defect = linfty_defect(s, n, w)
            if defect:
                count += 1
                if first is None:
                    first = (n, w, defect)
                if not exhaustive:
                    return CheckReport(False, "linfty", cap, first, count)
    return CheckReport(count == 0, "linfty", cap, first, count)


# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------


class LInftyMorphism:
    """Taylor coefficients f_n : S^n(source) -> target, degree 0."""

    def __init__(self, source: LInftyStructure, target: LInftyStructure,
                 taylor: Dict[int, Table]):
        self.source = source
        self.target = target
        self.taylor = taylor

    def f(self, n: int, word) -> Vec:
        return table_eval(self.source.module, self.taylor.get(n, {}), word)

    def f_vecs(self, n: int, vecs) -> Vec:
        return table_eval_vecs(self.source.module, self.taylor.get(n, {}), vecs)

    def linear_map(self) -> ModuleMap:
        matrix = {}
        for w, v in self.taylor.get(1, {}).items():
            matrix[w[0]] = v
        return ModuleMap(self.source.module, self.target.module, 0, matrix)

    def max_arity(self) -> int:
        return max((n for n, t in self.taylor.items() if t), default=1)


def make_morphism(source: LInftyStructure, target: LInftyStructure,
                  taylor: Mapping) -> LInftyMorphism:
    tables: Dict[int, Table] = {}
    for n, t in taylor.items():
        n = int(n)
        if n < 1:
            raise AxiomError("taylor_arity", n)
        tables[n] = _normalize_table(source.module, t, 0)
    for n, t in tables.items():
        for w, v in t.items():
            want = sum(source.module.degree(i) for i in w)
            for k in v:
                if target.module.degree(k) != want:
                    raise AxiomError("taylor_value_degree", (n, w, k))
        witness = _taylor_r_multilinear(source.module, target.module, t, n)
        if witness is not None:
            raise AxiomError("taylor_multilinearity", (n,) + witness)
    return LInftyMorphism(source, target, tables)


def _taylor_r_multilinear(src: DgModule, tgt: DgModule, table: Table, n: int):
    """Base-multilinearity of a degree-0 table valued in a second module."""
    base = src.base
    for w in src.words(n):
        val = table.get(w, {})
        wdegs = [src.degree(i) for i in w]
        for p in range(n):
            for r in range(base.dim):
                if r == base.unit:
                    continue
                lhs: Vec = {}
                for t2, c in src.act_basis(r, w[p]).items():
                    nw = w[:p] + (t2,) + w[p + 1 :]
                    vec_axpy(lhs, c, table_eval(src, table, nw))
                exp = sum(wdegs[:p])
                sgn = -ONE if (base.degree(r) * exp) % 2 else ONE
                rhs = vec_scale(sgn, tgt.act({r: ONE}, val))
                if lhs != rhs:
                    return (r, w, p)
    return None


def identity_morphism(s: LInftyStructure) -> LInftyMorphism:
    table = {(i,): {i: ONE} for i in range(s.module.dim)}
    return LInftyMorphism(s, s, {1: table})


def strict_morphism(source: LInftyStructure, target: LInftyStructure, matrix) -> LInftyMorphism:
    table = {(i,): dict(v) for i, v in matrix.items() if v}
    return make_morphism(source, target, {1: table})


def corolla_sum(outer: Callable[[int, List[Vec]], Vec],
                taylor: Callable[[int, tuple], Vec],
                degs: Sequence[int], word: Tuple[int, ...],
                k_min: int = 1, k_max: Optional[int] = None,
                skip_top_linear: bool = False) -> Vec:
    """sum_k 1/k! sum_{i1+..+ik=n} sum_{Sh(i1..ik)} sign * outer_k(taylor_{i1}(..),..).

    The workhorse shared by the morphism identity, composition, coalgebra
    morphism assembly and homotopy transfer.  `skip_top_linear` drops the
    single k = n term (all blocks of size one), used by morphism inversion.
    """
    n = len(word)
    out: Vec = {}
    top = k_max if k_max is not None else n
    for k in range(k_min, min(top, n) + 1):
        if skip_top_linear and k == n:
            continue
        coef = Fraction(1, math.factorial(k))
        for comp in compositions(n, k):
            for sigma in (shuffles(comp) if k > 1 else ((tuple(range(n)),))):
                sgn = koszul_sign(degs, sigma)
                vals = []
                off = 0
                dead = False
                for b in comp:
                    sub = tuple(word[sigma[off + t]] for t in range(b))
                    v = taylor(b, sub)
                    if not v:
                        dead = True
                        break
                    vals.append(v)
                    off += b
                if dead:
                    continue
                vec_axpy(out, coef * sgn, outer(k, vals))
    return out


def morphism_defect(F: LInftyMorphism, n: int, word: Tuple[int, ...]) -> Vec:
    """LHS minus RHS of the arity-n morphism identity on one word."""
    src, tgt = F.source, F.target
    m = src.module
    degs = [m.degree(i) for i in word]
    lhs = corolla_sum(lambda k, vals: tgt.q_vecs(k, vals),
                      lambda i, sub: F.f(i, sub), degs, word)
    rhs: Vec = {}
    for j in range(1, n + 1):
        for sigma in shuffle_pairs(j, n):
            sgn = koszul_sign(degs, sigma)
            head = tuple(word[sigma[p]] for p in range(j))
            rest = tuple(word[sigma[p]] for p in range(j, n))
            inner = src.q(j, head)
            if not inner:
                continue
            if n - j + 1 == 1:
                vec_axpy(rhs, sgn, F.f_vecs(1, [inner]))
            else:
                for b, c in inner.items():
                    vec_axpy(rhs, sgn * c, F.f(n - j + 1, (b,) + rest))
    return vec_sub(lhs, rhs)


def check_morphism(F: LInftyMorphism, arity_cap: int, exhaustive: bool = False) -> CheckReport:
    m = F.source.module
    first = None
    count = 0
    for n in range(1, arity_cap + 1):
        for w in m.words(n):
            defect = morphism_defect(F, n, w)
            if defect:
                count += 1
                if first is None:
                    first = (n, w, defect)
                if not exhaustive:
                    return CheckReport(False, "morphism", arity_cap, first, count)
    return CheckReport(count == 0, "morphism", arity_cap, first, count)


def compose(F: LInftyMorphism, G: LInftyMorphism, arity_cap: Optional[int] = None) -> LInftyMorphism:
    """F after G, by the shuffle composition of Taylor coefficients."""
    if G.target is not F.source:
        raise AxiomError("composition_endpoints")
    m = G.source.module
    cap = arity_cap
    if cap is None:
        fa, ga = F.max_arity(), G.max_arity()
        cap = max(fa * ga, fa, ga)
    taylor: Dict[int, Table] = {}
    for n in range(1, cap + 1):
        table: Table = {}
        for w in m.words(n):
            degs = [m.degree(i) for i in w]
            val = corolla_sum(lambda k, vals: F.f_vecs(k, vals),
                              lambda i, sub: G.f(i, sub), degs, w)
            if val:
                table[w] = val
        if table:
            taylor[n] = table
    return LInftyMorphism(G.source, F.target, taylor)


def invert_morphism(F: LInftyMorphism, arity_cap: int) -> LInftyMorphism:
    """Inverse of a morphism with invertible linear coefficient, up to the
    requested arity; the composite either way has coefficients (id, 0, ...)."""
    src, tgt = F.source, F.target
    f1 = F.linear_map()
    inv = _invert_linear(f1)
    g_tables: Dict[int, Table] = {1: {(i,): inv.matrix.get(i, {}) for i in range(tgt.module.dim)}}
    g_tables[1] = {w: v for w, v in g_tables[1].items() if v}
    G = LInftyMorphism(tgt, src, g_tables)
    for n in range(2, arity_cap + 1):
        table: Table = {}
        for w in tgt.module.words(n):
            vecs = [inv.apply({i: ONE}) for i in w]
            degs = [tgt.module.degree(i) for i in w]  # degrees preserved by inv
            val = _corolla_on_vecs(lambda k, vals: G.f_vecs(k, vals),
                                   lambda i, vs: F.f_vecs(i, vs),
                                   degs, vecs, skip_top_linear=True)
            val = vec_scale(-ONE, val)
            if val:
                table[w] = val
        if table:
            g_tables[n] = table
        G = LInftyMorphism(tgt, src, g_tables)
    return G


def _corolla_on_vecs(outer, taylor_vecs, degs, vecs, skip_top_linear=False) -> Vec:
    n = len(vecs)
    out: Vec = {}
    for k in range(1, n + 1):
        if skip_top_linear and k == n:
            continue
        coef = Fraction(1, math.factorial(k))
        for comp in compositions(n, k):
            for sigma in (shuffles(comp) if k > 1 else ((tuple(range(n)),))):
                sgn = koszul_sign(degs, sigma)
                vals = []
                off = 0
                dead = False
                for b in comp:
                    sub = [vecs[sigma[off + t]] for t in range(b)]
                    v = taylor_vecs(b, sub)
                    if not v:
                        dead = True
                        break
                    vals.append(v)
                    off += b
                if dead:
                    continue
                vec_axpy(out, coef * sgn, outer(k, vals))
    return out


def _invert_linear(f: ModuleMap) -> ModuleMap:
    src, tgt = f.source, f.target
    if src.dim != tgt.dim:
        raise AxiomError("linear_not_invertible")
    matrix = {}
    for e in range(tgt.dim):
        sys = LinearSystem()
        for i in range(src.dim):
            sys._seen.setdefault(i, len(sys._seen))
        for row_idx in range(tgt.dim):
            sys.add_equation({i: f.matrix.get(i, {}).get(row_idx, ZERO) for i in range(src.dim)},
                             ONE if row_idx == e else ZERO)
        sol = sys.solve()
        if sol is None:
            raise AxiomError("linear_not_invertible")
        matrix[e] = {k: c for k, c in sol.items() if c}
    return ModuleMap(tgt, src, 0, matrix)


def is_identity_morphism(F: LInftyMorphism, arity_cap: int) -> bool:
    ident = {(i,): {i: ONE} for i in range(F.source.module.dim)}
    if F.taylor.get(1, {}) != ident:
        return False
    for n in range(2, arity_cap + 1):
        if F.taylor.get(n, {}):
            return False
    return True


# ---------------------------------------------------------------------------
# binary class and cohomology bracket
# ---------------------------------------------------------------------------


@dataclass
class BinaryClassReport:
    vanishes: bool
    cocycle: Table
    primitive: Optional[Table]
    hom_dims: Dict[int, int] = field(default_factory=dict)


def binary_class(s: LInftyStructure, precheck_arity: int = 3) -> BinaryClassReport:
    """Decide whether the binary bracket is exact in the complex of symmetric
    bilinear base-linear maps, solving the coboundary equation exactly."""
    rep = check_linfty(s, precheck_arity)
    if not rep.ok:
        raise AxiomError("binary_class_precondition", rep.first_failure[:2])
    hc = hom_sym_complex(s.module, 2)
    q2 = s.bracket_table(2)
    assert hc.is_cocycle(q2, 1), "binary bracket is not a cocycle"
    primitive = hc.coboundary_solve(q2, 1)
    return BinaryClassReport(primitive is not None, q2, primitive)


@dataclass
class CohomologyBracketReport:
    bracket: Dict[tuple, Vec]
    well_defined: bool
    jacobiator_vanishes: bool
    dims: Dict[int, int]


def cohomology_bracket(s: LInftyStructure) -> CohomologyBracketReport:
    """The induced graded bracket on cohomology, with mechanical checks that
    it is representative-independent and satisfies Jacobi up to exactness."""
    rep = check_linfty(s, 3)
    if not rep.ok:
        raise AxiomError("cohomology_bracket_precondition", rep.first_failure[:2])
    m = s.module
    H = cohomology(m)
    q2 = s.bracket_table(2)
    reps = [(d, idx, v) for d in sorted(H.reps) for idx, v in enumerate(H.reps[d])]
    bracket: Dict[tuple, Vec] = {}
    well = True
    for (d1, i1, v1) in reps:
        for (d2, i2, v2) in reps:
            val = table_eval_vecs(m, q2, [v1, v2])
            cls = H.class_of(val, d1 + d2 + 1)
            if cls is None:
                well = False
                cls = {}
            if cls:
                bracket[((d1, i1), (d2, i2))] = cls
    # representative independence: q2(exact, cocycle) must be exact
    for d in sorted(set(m.basis.degrees)):
        for i in m.basis.indices_of_degree(d - 1):
            z = m.d({i: ONE})
            if not z:
                continue
            for (d2, i2, v2) in reps:
                cls = H.class_of(table_eval_vecs(m, q2, [z, v2]), d + d2 + 1)
                if cls is None or cls:
                    well = False
    jac = True
    for (d1, i1, a) in reps:
        for (d2, i2, b) in reps:
            for (d3, i3, c) in reps:
                t1 = table_eval_vecs(m, q2, [table_eval_vecs(m, q2, [a, b]), c])
                t2 = table_eval_vecs(m, q2, [table_eval_vecs(m, q2, [b, c]), a])
                t3 = table_eval_vecs(m, q2, [table_eval_vecs(m, q2, [c, a]), b])
                s1 = -ONE if (d1 * (d2 + d3)) % 2 else ONE
                s3 = -ONE if (d3 * (d1 + d2)) % 2 else ONE
                total = dict(t1)
                vec_axpy(total, s1, t2)
                vec_axpy(total, s3, t3)
                cls = H.class_of(total, d1 + d2 + d3 + 2)
                if cls is None or cls:
                    jac = False
    return CohomologyBracketReport(bracket, well, jac, dict(H.dims))


# ---------------------------------------------------------------------------
# base change
# ---------------------------------------------------------------------------


def restrict_module(m: DgModule, phi: DgcaMorphism) -> DgModule:
    """The same complex with the source ring of phi acting through phi."""
    S = phi.source
    action = {}
    for r in range(S.dim):
        img = phi.apply({r: ONE})
        for v in range(m.dim):
            row = m.act(img, {v: ONE})
            if row:
                action[(r, v)] = row
    return make_module(S, m.basis, action, dict(m.diff), weights=m.weights)


def restrict_scalars(s: LInftyStructure, phi: DgcaMorphism) -> LInftyStructure:
    if not phi.target.same_as(s.module.base):
        raise AxiomError("restriction_base_mismatch")
    module = restrict_module(s.module, phi)
    return make_linfty(module, {n: t for n, t in s.brackets.items()}, s.arity_cap)


def restrict_morphism(F: LInftyMorphism, phi: DgcaMorphism,
                      src: Optional[LInftyStructure] = None,
                      tgt: Optional[LInftyStructure] = None) -> LInftyMorphism:
    src = src if src is not None else restrict_scalars(F.source, phi)
    tgt = tgt if tgt is not None else restrict_scalars(F.target, phi)
    return make_morphism(src, tgt, {n: t for n, t in F.taylor.items()})


class ExtendedModule:
    """R tensor_S L as a finite quotient, with the reduction map."""

    def __init__(self, module: DgModule, quotient: Quotient, pair_index: Dict):
        self.module = module
        self.quotient = quotient
        self.pair_index = pair_index  # (r_idx, v_idx) -> new basis index, for survivors

    def reduce_pair_vec(self, pairs: Mapping) -> Vec:
        """Reduce a vector over ambient (r, v) keys into quotient coordinates."""
        red = self.quotient.reduce(dict(pairs))
        return {self.pair_index[k]: c for k, c in red.items()}


def extend_module(m: DgModule, phi: DgcaMorphism, r_weights=None) -> ExtendedModule:
    """Extension of scalars along phi: S -> R for a DG S-module."""
    S, R = phi.source, phi.target
    if not m.base.same_as(S):
        raise AxiomError("extension_base_mismatch")
    keys = [(r, v) for r in range(R.dim) for v in range(m.dim)]
    relations = []
    for r in range(R.dim):
        for sdx in range(S.dim):
            if sdx == S.unit:
                continue
            for v in range(m.dim):
                row: Dict = {}
                left = R.product({r: ONE}, phi.apply({sdx: ONE}))
                for r2, c in left.items():
                    row[(r2, v)] = row.get((r2, v), ZERO) + c
                right = m.act_basis(sdx, v)
                for v2, c in right.items():
                    row[(r, v2)] = row.get((r, v2), ZERO) - c
                row = {k: c for k, c in row.items() if c}
                if row:
                    relations.append(row)
    quot = Quotient(keys, relations)
    labels = []
    degrees = []
    weights = None
    if m.weights is not None and r_weights is not None:
        weights = []
    pair_index = {}
    for idx, (r, v) in enumerate(quot.basis):
        pair_index[(r, v)] = idx
        labels.append("%s(x)%s" % (R.basis.labels[r], m.basis.labels[v]))
        degrees.append(R.degree(r) + m.degree(v))
        if weights is not None:
            weights.append(r_weights[r] + m.weights[v])
    basis = GradedBasis(labels, degrees)

    def reduce_pairs(pairs):
        red = quot.reduce(pairs)
        return {pair_index[k]: c for k, c in red.items()}

    action = {}
    for r2 in range(R.dim):
        for idx, (r, v) in enumerate(quot.basis):
            prod = R.product({r2: ONE}, {r: ONE})
            row = reduce_pairs({(rr, v): c for rr, c in prod.items()})
            if row:
                action[(r2, idx)] = row
    diff = {}
    for idx, (r, v) in enumerate(quot.basis):
        row: Dict = {}
        for r2, c in R.d({r: ONE}).items():
            row[(r2, v)] = row.get((r2, v), ZERO) + c
        sgn = -ONE if R.degree(r) % 2 else ONE
        for v2, c in m.d({v: ONE}).items():
            row[(r, v2)] = row.get((r, v2), ZERO) + sgn * c
        red = reduce_pairs({k: c for k, c in row.items() if c})
        if red:
            diff[idx] = red
    module = make_module(R, basis, action, diff, weights=weights)
    return ExtendedModule(module, quot, pair_index)


def extend_scalars(s: LInftyStructure, phi: DgcaMorphism, r_weights=None,
                   arity_cap: Optional[int] = None) -> Tuple[LInftyStructure, ExtendedModule]:
    """Extension of scalars of a structure, with the sign rule
    (-1)^(sum |r_i| + sum_{i<j} |x_i||r_j|) r_1...r_n (x) q_n(x_1,...,x_n)."""
    ext = extend_module(s.module, phi, r_weights)
    R = phi.target
    m = s.module
    cap = arity_cap if arity_cap is not None else s.arity_cap
    brackets: Dict[int, Table] = {}
    for n, t in s.brackets.items():
        if not t or n > cap:
            continue
        table: Table = {}
        for w in ext.module.words(n):
            val = _extended_bracket_value(s, ext, R, w, n, map_degree=1)
            if val:
                table[w] = val
        if table:
            brackets[n] = table
    return make_linfty(ext.module, brackets, cap), ext


def _extended_bracket_value(s, ext, R, word, n, map_degree):
    m = s.module
    pairs = [ext.quotient.basis[i] for i in word]
    rs = [p[0] for p in pairs]
    vs = [p[1] for p in pairs]
    sign = 1
    if map_degree % 2:
        if sum(R.degree(r) for r in rs) % 2:
            sign = -sign
    exp = 0
    for j in range(n):
        if (R.degree(rs[j]) * sum(m.degree(vs[i]) for i in range(j))) % 2:
            sign = -sign
    rprod = {R.unit: ONE}
    for r in rs:
        rprod = R.product(rprod, {r: ONE})
        if not rprod:
            return {}
    qval = s.q(n, tuple(vs)) if n >= 2 else m.d({vs[0]: ONE})
    if not qval:
        return {}
    out_pairs: Dict = {}
    for r2, c2 in rprod.items():
        for v2, c3 in qval.items():
            out_pairs[(r2, v2)] = out_pairs.get((r2, v2), ZERO) + sign * c2 * c3
    return ext.reduce_pair_vec({k: c for k, c in out_pairs.items() if c})


def extend_morphism(F: LInftyMorphism, phi: DgcaMorphism,
                    ext_src: Tuple[LInftyStructure, ExtendedModule],
                    ext_tgt: Tuple[LInftyStructure, ExtendedModule],
                    arity_cap: Optional[int] = None) -> LInftyMorphism:
    """Extension of scalars of a morphism: no extra sign from the map degree."""
    s_ext, es = ext_src
    t_ext, et = ext_tgt
    R = phi.target
    m = F.source.module
    cap = arity_cap if arity_cap is not None else max(F.taylor, default=1)
    taylor: Dict[int, Table] = {}
    for n in range(1, cap + 1):
        t = F.taylor.get(n, {})
        if not t:
            continue
        table: Table = {}
        for w in es.module.words(n):
            pairs = [es.quotient.basis[i] for i in w]
            rs = [p[0] for p in pairs]
            vs = [p[1] for p in pairs]
            sign = 1
            for j in range(n):
                if (R.degree(rs[j]) * sum(m.degree(vs[i]) for i in range(j))) % 2:
                    sign = -sign
            rprod = {R.unit: ONE}
            for r in rs:
                rprod = R.product(rprod, {r: ONE})
                if not rprod:
                    break
            if not rprod:
                continue
            fval = F.f(n, tuple(vs))
            if not fval:
                continue
            out_pairs: Dict = {}
            for r2, c2 in rprod.items():
                for v2, c3 in fval.items():
                    out_pairs[(r2, v2)] = out_pairs.get((r2, v2), ZERO) + sign * c2 * c3
            val = et.reduce_pair_vec({k: c for k, c in out_pairs.items() if c})
            if val:
                table[w] = val
        if table:
            taylor[n] = table
    return make_morphism(s_ext, t_ext, taylor)


def adjunction_unit(s: LInftyStructure, phi: DgcaMorphism,
                    ext: Tuple[LInftyStructure, ExtendedModule]) -> LInftyMorphism:
    """x -> 1_R (x) x as a strict morphism into the restricted extension."""
    s_ext, es = ext
    restricted = restrict_scalars(s_ext, phi)
    R = phi.target
    matrix = {}
    for v in range(s.module.dim):
        matrix[v] = es.reduce_pair_vec({(R.unit, v): ONE})
    return strict_morphism(s, restricted, matrix)
