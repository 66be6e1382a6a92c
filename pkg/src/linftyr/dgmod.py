"""DG modules over a Dgca: validation, morphisms, contractions, exact
cohomology, and the complexes of graded-symmetric multilinear maps that
house binary bracket classes and Atiyah cocycles.

Modules are finite-dimensional over the rationals with an explicit base
action; they are not assumed free, but a free decomposition may be declared
(`generators`) and is then verified and used by faster code paths.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .dgca import AxiomError, Dgca, field_dgca
from .kernel import (
    ONE,
    ZERO,
    GradedBasis,
    Vec,
    koszul_sign,
    shuffles,
    sort_word,
    vec_axpy,
    vec_scale,
    vec_sub,
    word_degree,
    words_of_weight,
)
from .linalg import LinearSystem, in_span, rref_rows


class DgModule:
    """Finite-dimensional DG module over a Dgca."""

    def __init__(self, base: Dgca, basis: GradedBasis, action, diff,
                 generators: Optional[Tuple[int, ...]] = None,
                 weights: Optional[Sequence[int]] = None):
        self.base = base
        self.basis = basis
        self.action = action  # {(r_idx, v_idx): Vec}
        self.diff = diff      # {v_idx: Vec}
        self.generators = generators
        self.weights = list(weights) if weights is not None else None
        self.pairs_of_basis: Optional[List[Dict]] = None  # filled for free modules

    @property
    def dim(self) -> int:
        return self.basis.dim

    def degree(self, i: int) -> int:
        return self.basis.degree(i)

    @property
    def degrees(self):
        return self.basis.degrees

    def act_basis(self, r: int, v: int) -> Vec:
        return self.action.get((r, v), {})

    def act(self, r: Vec, v: Vec) -> Vec:
        out: Vec = {}
        for i, ci in r.items():
            for j, cj in v.items():
                entry = self.action.get((i, j))
                if entry:
                    vec_axpy(out, ci * cj, entry)
        return out

    def d(self, v: Vec) -> Vec:
        out: Vec = {}
        for i, c in v.items():
            entry = self.diff.get(i)
            if entry:
                vec_axpy(out, c, entry)
        return out

    def sort(self, word):
        return sort_word(word, self.basis.degrees)

    def words(self, n: int):
        return words_of_weight(self.dim, self.basis.degrees, n)

    def __repr__(self):
        return "DgModule(dim=%d over %r)" % (self.dim, self.base)


def make_module(base: Dgca, basis: GradedBasis, action: Mapping, diff: Mapping,
                generators=None, weights=None) -> DgModule:
    """Validate module axioms on all basis tuples; see AxiomError for failures.

    Missing action entries are zero, except the unit row which defaults to
    the identity.  When `generators` is given, the module is additionally
    checked to be free over the base on those basis vectors.
    """
    action = {(int(r), int(v)): {int(k): Fraction(c) for k, c in row.items() if Fraction(c)}
              for (r, v), row in action.items()}
    action = {k: v for k, v in action.items() if v}
    diff = {int(i): {int(k): Fraction(c) for k, c in row.items() if Fraction(c)}
            for i, row in diff.items()}
    diff = {k: v for k, v in diff.items() if v}
    for v in range(basis.dim):
        action.setdefault((base.unit, v), {v: ONE})

    for (r, v), row in action.items():
        want = base.degree(r) + basis.degree(v)
        for k in row:
            if basis.degree(k) != want:
                raise AxiomError("action_degree", (r, v, k))
    for i, row in diff.items():
        for k in row:
            if basis.degree(k) != basis.degree(i) + 1:
                raise AxiomError("module_differential_degree", (i, k))

    m = DgModule(base, basis, action, diff, tuple(generators) if generators else None, weights)
    for v in range(basis.dim):
        if m.act_basis(base.unit, v) != {v: ONE}:
            raise AxiomError("action_unital", (v,))
    for r in range(base.dim):
        for s in range(base.dim):
            for v in range(basis.dim):
                left = m.act(base.product_basis(r, s), {v: ONE})
                right = m.act({r: ONE}, m.act_basis(s, v))
                if left != right:
                    raise AxiomError("action_associative", (r, s, v))
    for v in range(basis.dim):
        if m.d(m.d({v: ONE})):
            raise AxiomError("module_differential_squares", (v,))
    for r in range(base.dim):
        for v in range(basis.dim):
            lhs = m.d(m.act_basis(r, v))
            rhs = m.act(base.d({r: ONE}), {v: ONE})
            sgn = -ONE if base.degree(r) % 2 else ONE
            vec_axpy(rhs, sgn, m.act({r: ONE}, m.d({v: ONE})))
            if lhs != rhs:
                raise AxiomError("module_leibniz", (r, v))
    if m.generators:
        _install_free_structure(m)
    return m


def _install_free_structure(m: DgModule) -> None:
    """Verify the declared generators give a free decomposition and cache
    the inverse change of basis (basis vector -> pairs (r_idx, gen_pos))."""
    pairs = [(r, p) for p in range(len(m.generators)) for r in range(m.base.dim)]
    if len(pairs) != m.dim:
        raise AxiomError("free_rank", m.generators,
                         "base dim * generator count != module dim")
    cols = {pair: m.act_basis(pair[0], m.generators[pair[1]]) for pair in pairs}
    m.pairs_of_basis = []
    for e in range(m.dim):
        sys = LinearSystem()
        for row_idx in range(m.dim):
            sys.add_equation({pair: cols[pair].get(row_idx, ZERO) for pair in pairs},
                             ONE if row_idx == e else ZERO)
        sol = sys.solve()
        if sol is None:
            raise AxiomError("free_decomposition", (e,), "basis vector not in span of r*g")
        m.pairs_of_basis.append({k: c for k, c in sol.items() if c})


def gen_degrees(m: DgModule) -> List[int]:
    return [m.degree(g) for g in m.generators]


# ---------------------------------------------------------------------------
# module maps and contractions
# ---------------------------------------------------------------------------


class ModuleMap:
    """Homogeneous rational-linear map between DG modules."""

    def __init__(self, source: DgModule, target: DgModule, degree: int, matrix: Mapping):
        self.source = source
        self.target = target
        self.degree = int(degree)
        self.matrix = {int(i): {int(k): Fraction(c) for k, c in row.items() if Fraction(c)}
                       for i, row in matrix.items()}
        self.matrix = {i: row for i, row in self.matrix.items() if row}
        for i, row in self.matrix.items():
            want = source.degree(i) + self.degree
            for k in row:
                if target.degree(k) != want:
                    raise AxiomError("map_degree", (i, k))

    def apply(self, v: Vec) -> Vec:
        out: Vec = {}
        for i, c in v.items():
            entry = self.matrix.get(i)
            if entry:
                vec_axpy(out, c, entry)
        return out

    def is_chain_map(self) -> bool:
        if self.degree != 0:
            return False
        for i in range(self.source.dim):
            if self.apply(self.source.d({i: ONE})) != self.target.d(self.apply({i: ONE})):
                return False
        return True

    def is_r_linear(self) -> bool:
        """Graded base-linearity: f(r.x) = (-1)^(|r| deg f) r.f(x)."""
        if not self.source.base.same_as(self.target.base):
            return False
        for r in range(self.source.base.dim):
            sgn = -ONE if (self.source.base.degree(r) * self.degree) % 2 else ONE
            for v in range(self.source.dim):
                lhs = self.apply(self.source.act_basis(r, v))
                rhs = vec_scale(sgn, self.target.act({r: ONE}, self.apply({v: ONE})))
                if lhs != rhs:
                    return False
        return True


def identity_map(m: DgModule) -> ModuleMap:
    return ModuleMap(m, m, 0, {i: {i: ONE} for i in range(m.dim)})


def zero_map(source: DgModule, target: DgModule, degree=0) -> ModuleMap:
    return ModuleMap(source, target, degree, {})


def compose_maps(f: ModuleMap, g: ModuleMap) -> ModuleMap:
    """f after g."""
    matrix = {i: f.apply(g.matrix.get(i, {})) for i in range(g.source.dim)}
    return ModuleMap(g.source, f.target, f.degree + g.degree, matrix)


class Contraction:
    """Chain maps f: M -> L, g: L -> M with gf = id, homotopy h on L,
    dh + hd = fg - id, and side conditions h^2 = gh = hf = 0."""

    def __init__(self, f: ModuleMap, g: ModuleMap, h: ModuleMap):
        self.f = f
        self.g = g
        self.h = h

    @property
    def big(self) -> DgModule:
        return self.f.target

    @property
    def small(self) -> DgModule:
        return self.f.source


def make_contraction(f: ModuleMap, g: ModuleMap, h: ModuleMap) -> Contraction:
    L, M = f.target, f.source
    if g.source is not L or g.target is not M or h.source is not L or h.target is not L:
        raise AxiomError("contraction_endpoints")
    if f.degree != 0 or g.degree != 0 or h.degree != -1:
        raise AxiomError("contraction_degrees")
    if not f.is_chain_map():
        raise AxiomError("contraction_f_chain")
    if not g.is_chain_map():
        raise AxiomError("contraction_g_chain")
    for name, mp in (("f", f), ("g", g), ("h", h)):
        if not mp.is_r_linear():
            raise AxiomError("contraction_%s_r_linear" % name)
    for i in range(M.dim):
        if g.apply(f.apply({i: ONE})) != {i: ONE}:
            raise AxiomError("contraction_gf_identity", (i,))
    for i in range(L.dim):
        e = {i: ONE}
        lhs = L.d(h.apply(e))
        vec_axpy(lhs, ONE, h.apply(L.d(e)))
        rhs = vec_sub(f.apply(g.apply(e)), e)
        if lhs != rhs:
            raise AxiomError("contraction_homotopy", (i,))
        if h.apply(h.apply(e)):
            raise AxiomError("contraction_h_squared", (i,))
        if g.apply(h.apply(e)):
            raise AxiomError("contraction_gh", (i,))
    for i in range(M.dim):
        if h.apply(f.apply({i: ONE})):
            raise AxiomError("contraction_hf", (i,))
    return Contraction(f, g, h)


def identity_contraction(m: DgModule) -> Contraction:
    return make_contraction(identity_map(m), identity_map(m), ModuleMap(m, m, -1, {}))


# ---------------------------------------------------------------------------
# cohomology
# ---------------------------------------------------------------------------


class Cohomology:
    """Exact per-degree cohomology with chosen echelon representatives."""

    def __init__(self, m: DgModule):
        self.module = m
        degs = sorted(set(m.basis.degrees))
        self.dims: Dict[int, int] = {}
        self.reps: Dict[int, List[Vec]] = {}
        self._image_rows: Dict[int, List[Vec]] = {}
        for d in degs:
            below = m.basis.indices_of_degree(d - 1)
            image = [m.d({i: ONE}) for i in below]
            image = [v for v in image if v]
            here = m.basis.indices_of_degree(d)
            # kernel of d restricted to degree d
            ker_sys = LinearSystem()
            for i in here:
                ker_sys._seen.setdefault(i, len(ker_sys._seen))
            targets = set()
            for i in here:
                targets.update(m.d({i: ONE}))
            for t in sorted(targets):
                ker_sys.add_equation({i: m.d({i: ONE}).get(t, ZERO) for i in here})
            kernel = ker_sys.nullspace() if here else []
            # representatives: kernel vectors independent modulo the image
            chosen: List[Vec] = []
            span = [dict(r) for r in image]
            base_rank = len(rref_rows(span))
            for v in kernel:
                if len(rref_rows(span + [v])) > base_rank:
                    span.append(v)
                    base_rank += 1
                    chosen.append(v)
            self.reps[d] = chosen
            self.dims[d] = len(chosen)
            self._image_rows[d] = image
        self.dims = {d: n for d, n in self.dims.items() if n}

    def dim(self, d: int) -> int:
        return self.dims.get(d, 0)

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def class_of(self, v: Vec, degree: Optional[int] = None) -> Optional[Vec]:
        """Coordinates of [v] over the chosen representatives, or None when v
        is not a cocycle.  The zero class is the empty dict."""
        if not v:
            return {}
        if degree is None:
            degree = self.module.basis.degree_of_vec(v)
        if self.module.d(v):
            return None
        reps = self.reps.get(degree, [])
        below = self.module.basis.indices_of_degree(degree - 1)
        sys = LinearSystem()
        keys = set(v)
        for r in reps:
            keys |= set(r)
        img = {i: self.module.d({i: ONE}) for i in below}
        for row in img.values():
            keys |= set(row)
        for k in sorted(keys):
            coeffs = {("rep", idx): r.get(k, ZERO) for idx, r in enumerate(reps)}
            for i, row in img.items():
                coeffs[("img", i)] = row.get(k, ZERO)
            sys.add_equation(coeffs, v.get(k, ZERO))
        sol = sys.solve()
        assert sol is not None, "cocycle not spanned by representatives + image"
        return {idx: c for (kind, idx), c in sol.items() if kind == "rep" and c}


def cohomology(m: DgModule) -> Cohomology:
    return Cohomology(m)


def is_quasi_iso(f: ModuleMap) -> bool:
    """Exact test: f induces isomorphisms on all cohomology groups."""
    if not f.is_chain_map():
        return False
    hs = Cohomology(f.source)
    ht = Cohomology(f.target)
    degs = set(hs.dims) | set(ht.dims)
    for d in degs:
        if hs.dim(d) != ht.dim(d):
            return False
        rows = []
        for r in hs.reps.get(d, []):
            cls = ht.class_of(f.apply(r), d)
            assert cls is not None
            rows.append(cls)
        if len(rref_rows(rows)) != hs.dim(d):
            return False
    return True


def weight_slice(m: DgModule, w: int) -> DgModule:
    """Subcomplex of basis vectors of one weight, over the ground field.

    Requires the differential to preserve the weight (an exactness window
    guard for degreewise-finite models of polynomial bases).
    """
    if m.weights is None:
        raise ValueError("module carries no weight grading")
    keep = [i for i in range(m.dim) if m.weights[i] == w]
    reindex = {i: p for p, i in enumerate(keep)}
    for i in keep:
        for k in m.d({i: ONE}):
            if m.weights[k] != w:
                raise AxiomError("weight_preservation", (i, k))
    basis = GradedBasis([m.basis.labels[i] for i in keep], [m.degree(i) for i in keep])
    diff = {}
    for i in keep:
        row = {reindex[k]: c for k, c in m.d({i: ONE}).items()}
        if row:
            diff[reindex[i]] = row
    kk = field_dgca()
    return make_module(kk, basis, {}, diff)


def weight_cohomology_dims(m: DgModule, weights: Sequence[int]) -> Dict[int, Dict[int, int]]:
    """Exact cohomology dimensions per (weight, degree)."""
    out = {}
    for w in weights:
        h = Cohomology(weight_slice(m, w))
        out[w] = dict(h.dims)
    return out


# ---------------------------------------------------------------------------
# symmetric multilinear value tables
# ---------------------------------------------------------------------------

Table = dict  # {sorted word: Vec}


def table_eval(m: DgModule, table: Table, word) -> Vec:
    res = m.sort(word)
    if res is None:
        return {}
    sign, w = res
    val = table.get(w)
    if not val:
        return {}
    return vec_scale(sign, val)


def table_eval_vecs(m: DgModule, table: Table, vecs: Sequence[Vec]) -> Vec:
    """Multilinear extension of a table to a tuple of vectors."""
    out: Vec = {}
    items = [list(v.items()) for v in vecs]
    for combo in itertools.product(*items):
        coeff = ONE
        word = []
        for idx, c in combo:
            coeff *= c
            word.append(idx)
        if coeff:
            vec_axpy(out, coeff, table_eval(m, table, tuple(word)))
    return out


def lifted_diff_word(m: DgModule, word) -> Dict[tuple, Fraction]:
    """One-shuffle differential of a weight-n word; result {word: coeff}."""
    degs = m.basis.degrees
    out: Dict[tuple, Fraction] = {}
    n = len(word)
    for sigma in shuffles((1, n - 1)) if n > 1 else ((tuple(range(n)),) if n else ()):
        sgn = koszul_sign([degs[i] for i in word], sigma)
        head = word[sigma[0]]
        rest = tuple(word[sigma[i]] for i in range(1, n))
        dv = m.d({head: ONE})
        for t, c in dv.items():
            res = m.sort((t,) + rest)
            if res is None:
                continue
            s2, w2 = res
            val = out.get(w2, ZERO) + sgn * s2 * c
            if val:
                out[w2] = val
            else:
                out.pop(w2, None)
    return out


def table_is_r_multilinear(m: DgModule, table: Table, n: int, map_degree: int) -> Optional[tuple]:
    """Return None if the table is base-multilinear, else a witness tuple."""
    base = m.base
    for w in m.words(n):
        val = table.get(w, {})
        wdegs = [m.degree(i) for i in w]
        for p in range(n):
            for r in range(base.dim):
                if r == base.unit:
                    continue
                rb = m.act_basis(r, w[p])
                lhs: Vec = {}
                for t, c in rb.items():
                    nw = w[:p] + (t,) + w[p + 1 :]
                    vec_axpy(lhs, c, table_eval(m, table, nw))
                exp = map_degree + sum(wdegs[:p])
                sgn = -ONE if (base.degree(r) * exp) % 2 else ONE
                rhs = vec_scale(sgn, m.act({r: ONE}, val))
                if lhs != rhs:
                    return (r, w, p)
    return None


def eval_free_rmap(m: DgModule, gen_values: Mapping, map_degree: int, word) -> Vec:
    """Evaluate the base-multilinear map with the given generator-word values
    on an arbitrary basis word of a free module."""
    assert m.pairs_of_basis is not None
    gdegs = gen_degrees(m)
    out: Vec = {}
    expansions = [list(m.pairs_of_basis[b].items()) for b in word]
    for combo in itertools.product(*expansions):
        coeff = ONE
        rs = []
        gens = []
        for (r, gpos), c in combo:
            coeff *= c
            rs.append(r)
            gens.append(gpos)
        if not coeff:
            continue
        sign = 1
        passed = map_degree
        for pos in range(len(word)):
            if (m.base.degree(rs[pos]) * passed) % 2:
                sign = -sign
            passed += gdegs[gens[pos]]
        res = sort_word(tuple(gens), gdegs)
        if res is None:
            continue
        s2, gw = res
        val = gen_values.get(gw)
        if not val:
            continue
        rprod = {m.base.unit: ONE}
        for r in rs:
            rprod = m.base.product(rprod, {r: ONE})
            if not rprod:
                break
        if not rprod:
            continue
        vec_axpy(out, coeff * sign * s2, m.act(rprod, val))
    return out


def table_from_gen_values(m: DgModule, gen_values: Mapping, map_degree: int, n: int) -> Table:
    """Full value table on basis words from generator-word values (free case)."""
    table: Table = {}
    for w in m.words(n):
        v = eval_free_rmap(m, gen_values, map_degree, w)
        if v:
            table[w] = v
    return table


def gen_words(m: DgModule, n: int):
    gdegs = gen_degrees(m)
    return words_of_weight(len(m.generators), gdegs, n)


# ---------------------------------------------------------------------------
# Hom complexes of graded-symmetric base-multilinear maps
# ---------------------------------------------------------------------------


class HomComplex:
    """The complex of graded-symmetric base-multilinear maps S^n L -> L.

    A finite rational basis per map degree, with the differential
    phi -> d_L . phi - (-1)^{|phi|} phi . (lifted d_L).
    """

    def __init__(self, m: DgModule, n: int):
        if n < 1:
            raise ValueError("arity must be >= 1")
        self.module = m
        self.arity = n
        self.basis: Dict[int, List[Table]] = {}
        if m.generators is not None:
            self._build_free()
        else:
            self._build_constrained()
        self._diff_cache: Dict[int, List[Optional[dict]]] = {}

    # -- basis construction

    def _build_free(self):
        m, n = self.module, self.arity
        gdegs = gen_degrees(m)
        per_degree: Dict[int, List[Table]] = {}
        for gw in gen_words(m, n):
            wdeg = sum(gdegs[g] for g in gw)
            for t in range(m.dim):
                d = m.degree(t) - wdeg
                table = table_from_gen_values(m, {gw: {t: ONE}}, d, n)
                per_degree.setdefault(d, []).append(table)
        self.basis = per_degree

    def _build_constrained(self):
        m, n = self.module, self.arity
        words = m.words(n)
        degrees_present = sorted({m.degree(t) - word_degree(w, m.basis.degrees)
                                  for w in words for t in range(m.dim)})
        for d in degrees_present:
            unknowns = []
            for w in words:
                wd = word_degree(w, m.basis.degrees)
                for t in m.basis.indices_of_degree(wd + d):
                    unknowns.append((w, t))
            if not unknowns:
                continue
            sys = LinearSystem()
            for u in unknowns:
                sys._seen.setdefault(u, len(sys._seen))
            base = m.base
            for w in words:
                wdegs = [m.degree(i) for i in w]
                for p in range(n):
                    for r in range(base.dim):
                        if r == base.unit:
                            continue
                        # phi(w with slot p replaced by r.w[p]), per component
                        lhs: Dict[Tuple, Fraction] = {}
                        for t2, c in m.act_basis(r, w[p]).items():
                            res = m.sort(w[:p] + (t2,) + w[p + 1 :])
                            if res is None:
                                continue
                            sgn, nw = res
                            for t in range(m.dim):
                                key = (nw, t)
                                if key in sys._seen:
                                    lhs[key] = lhs.get(key, ZERO) + c * sgn
                        exp = d + sum(wdegs[:p])
                        sgn_r = -ONE if (base.degree(r) * exp) % 2 else ONE
                        # += sgn_r * r.phi(w): component t2 of r.t per unknown (w, t)
                        rhs: Dict[Tuple, Dict] = {}
                        for t in range(m.dim):
                            key = (w, t)
                            if key not in sys._seen:
                                continue
                            for t2, c in m.act_basis(r, t).items():
                                rhs.setdefault(t2, {})[key] = c
                        targets = {t for (_nw, t) in lhs} | set(rhs)
                        for tgt in sorted(targets):
                            eq: Dict = {}
                            for (nw, t), c in lhs.items():
                                if t == tgt:
                                    eq[(nw, t)] = eq.get((nw, t), ZERO) + c
                            for key, c in rhs.get(tgt, {}).items():
                                eq[key] = eq.get(key, ZERO) - sgn_r * c
                            if eq:
                                sys.add_equation(eq)
            null = sys.nullspace()
            tables = []
            for vecsol in null:
                table: Table = {}
                for (w, t), c in vecsol.items():
                    if c:
                        table.setdefault(w, {})[t] = c
                tables.append(table)
            if tables:
                self.basis[d] = tables

    # -- structure maps

    def dim(self, degree: int) -> int:
        return len(self.basis.get(degree, []))

    def delta_table(self, table: Table, map_degree: int) -> Table:
        """d_L . phi - (-1)^{|phi|} phi . (lifted d_L), as a value table."""
        m = self.module
        out: Table = {}
        sgn = -ONE if map_degree % 2 else ONE
        for w in m.words(self.arity):
            val = m.d(table_eval(m, table, w))
            lower = lifted_diff_word(m, w)
            for w2, c in lower.items():
                vec_axpy(val, -sgn * c, table.get(w2, {}))
            if val:
                out[w] = val
        return out

    def express(self, table: Table, degree: int) -> Optional[Vec]:
        """Coordinates of a value table over the basis in one degree."""
        rows = []
        for b in self.basis.get(degree, []):
            rows.append({(w, t): c for w, v in b.items() for t, c in v.items()})
        target = {(w, t): c for w, v in table.items() for t, c in v.items()}
        if not target:
            return {}
        combo = in_span(rows, target)
        return combo

    def differential_matrix(self, degree: int) -> List[Vec]:
        """Images of the degree-`degree` basis in degree+1 coordinates."""
        out = []
        for b in self.basis.get(degree, []):
            img = self.delta_table(b, degree)
            coords = self.express(img, degree + 1)
            assert coords is not None, "differential leaves the multilinear subspace"
            out.append(coords)
        return out

    def is_cocycle(self, table: Table, degree: int) -> bool:
        return not self.delta_table(table, degree)

    def coboundary_solve(self, table: Table, degree: int) -> Optional[Table]:
        """Find psi of degree-1 lower with delta psi = table, or None."""
        prim_basis = self.basis.get(degree - 1, [])
        images = [self.delta_table(b, degree - 1) for b in prim_basis]
        rows = [{(w, t): c for w, v in img.items() for t, c in v.items()} for img in images]
        target = {(w, t): c for w, v in table.items() for t, c in v.items()}
        combo = in_span(rows, target)
        if combo is None:
            return None
        out: Table = {}
        for idx, c in combo.items():
            if not c:
                continue
            for w, v in prim_basis[idx].items():
                cur = out.setdefault(w, {})
                vec_axpy(cur, c, v)
        return {w: v for w, v in out.items() if v}

    def cohomology_dims(self) -> Dict[int, int]:
        degs = sorted(self.basis)
        dims = {}
        for d in degs:
            mat = self.differential_matrix(d)
            r = len(rref_rows([row for row in mat if row]))
            ker = self.dim(d) - r
            prev = self.differential_matrix(d - 1) if (d - 1) in self.basis else []
            rprev = len(rref_rows([row for row in prev if row]))
            dims[d] = ker - rprev
        return {d: n for d, n in dims.items() if n}


def hom_sym_complex(m: DgModule, n: int) -> HomComplex:
    return HomComplex(m, n)
