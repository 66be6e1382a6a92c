"""Exact rational linear algebra on sparse rows keyed by hashable unknowns.

Elimination is plain Gauss-Jordan over Fraction; at the sizes this engine
targets (desk-scale homological computations) exactness matters and speed
does not.  Solutions are deterministic: pivots are chosen in a fixed key
order and free unknowns are set to zero, so the emitted solution is the
echelon-minimal one.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, List, Mapping, Optional, Sequence

from .kernel import ONE, ZERO, Vec, vec_axpy

Row = dict  # {column_key: Fraction}


def _eliminate(rows: List[Row], key_order) -> List[tuple]:
    """Reduce rows to echelon form; returns list of (pivot_key, row).

    `key_order` maps a column key to a sortable token fixing pivot choice.
    Rows are fully reduced (each pivot column is cleared elsewhere).
    """
    pivots: List[tuple] = []
    for row in rows:
        row = dict(row)
        for pk, prow in pivots:
            c = row.get(pk)
            if c:
                vec_axpy(row, -c, prow)
        if not row:
            continue
        pk = min(row, key=key_order)
        inv = ONE / row[pk]
        row = {k: c * inv for k, c in row.items()}
        for i, (qk, qrow) in enumerate(pivots):
            c = qrow.get(pk)
            if c:
                newrow = dict(qrow)
                vec_axpy(newrow, -c, row)
                pivots[i] = (qk, newrow)
        pivots.append((pk, row))
    pivots.sort(key=lambda p: key_order(p[0]))
    return pivots


class LinearSystem:
    """Accumulates equations sum_k coeff[k] * x_k = rhs over hashable keys."""

    def __init__(self):
        self.rows: List[Row] = []
        self.rhs: List[Fraction] = []
        self._seen = {}

    def add_equation(self, coeffs: Mapping[Hashable, Fraction], rhs=ZERO) -> None:
        row = {k: Fraction(c) for k, c in coeffs.items() if c}
        rhs = Fraction(rhs)
        if not row:
            if rhs:
                # record an explicitly infeasible equation
                self.rows.append({})
                self.rhs.append(rhs)
            return
        for k in row:
            if k not in self._seen:
                self._seen[k] = len(self._seen)
        self.rows.append(row)
        self.rhs.append(rhs)

    def solve(self) -> Optional[dict]:
        """One exact solution with free unknowns zero, or None if infeasible."""
        order = self._seen
        key_order = lambda k: order[k]
        RHS = object()
        full_order = lambda k: (1, 0) if k is RHS else (0, order[k])
        aug = []
        for row, b in zip(self.rows, self.rhs):
            r = dict(row)
            if b:
                r[RHS] = -b
            aug.append(r)
        pivots = _eliminate(aug, full_order)
        sol = {}
        for pk, row in pivots:
            if pk is RHS:
                return None  # row reduced to 0 = nonzero
            # pivot variable equals -sum(free terms) + rhs; frees are zero
            sol[pk] = -row.get(RHS, ZERO)
        return sol

    def nullspace(self) -> List[dict]:
        """Basis of the homogeneous solution space (ignores right-hand sides)."""
        order = self._seen
        key_order = lambda k: order[k]
        pivots = _eliminate([dict(r) for r in self.rows], key_order)
        pivot_keys = {pk for pk, _ in pivots}
        frees = sorted((k for k in order if k not in pivot_keys), key=key_order)
        basis = []
        for f in frees:
            v = {f: ONE}
            for pk, row in pivots:
                c = row.get(f)
                if c:
                    v[pk] = -c
            basis.append(v)
        return basis


def rref_rows(rows: Sequence[Row], key_order=None) -> List[tuple]:
    """Echelon form of arbitrary sparse rows; returns (pivot_key, row) pairs."""
    keys = {}
    for r in rows:
        for k in r:
            if k not in keys:
                keys[k] = len(keys)
    if key_order is None:
        key_order = lambda k: keys[k]
    return _eliminate([dict(r) for r in rows], key_order)


def rank(rows: Sequence[Row]) -> int:
    return len(rref_rows(rows))


def in_span(rows: Sequence[Row], target: Row) -> Optional[dict]:
    """Express target as a combination of rows; returns {row_index: coeff} or None."""
    sys = LinearSystem()
    keys = set(target)
    for r in rows:
        keys |= set(r)
    for k in sorted(keys, key=repr):
        sys.add_equation({i: r.get(k, ZERO) for i, r in enumerate(rows)}, target.get(k, ZERO))
    return sys.solve()


class Quotient:
    """Quotient of a space with listed basis keys by a span of relation vectors.

    Picks the non-pivot keys as a basis of the quotient; `reduce` rewrites any
    vector into quotient coordinates.
    """

    def __init__(self, keys: Sequence[Hashable], relations: Iterable[Row]):
        self.keys = list(keys)
        order = {k: i for i, k in enumerate(self.keys)}
        self._pivots = _eliminate([dict(r) for r in relations], lambda k: order[k])
        pivot_keys = {pk for pk, _ in self._pivots}
        self.basis = [k for k in self.keys if k not in pivot_keys]
        self._basis_set = set(self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def reduce(self, v: Row) -> Row:
        out = dict(v)
        for pk, row in self._pivots:
            c = out.get(pk)
            if c:
                vec_axpy(out, -c, row)
        assert all(k in self._basis_set for k in out)
        return out
