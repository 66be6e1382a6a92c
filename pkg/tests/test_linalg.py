import random
from fractions import Fraction

from linftyr.linalg import LinearSystem, Quotient, in_span, rank, rref_rows


def test_solve_unique():
    sys = LinearSystem()
    sys.add_equation({"x": 1, "y": 1}, 3)
    sys.add_equation({"x": 1, "y": -1}, 1)
    sol = sys.solve()
    assert sol == {"x": 2, "y": 1}


def test_solve_underdetermined_sets_frees_to_zero():
    sys = LinearSystem()
    sys.add_equation({"x": 1, "y": 2}, 4)
    sol = sys.solve()
    assert sol == {"x": 4}


def test_solve_infeasible():
    sys = LinearSystem()
    sys.add_equation({"x": 1}, 1)
    sys.add_equation({"x": 1}, 2)
    assert sys.solve() is None
    sys2 = LinearSystem()
    sys2.add_equation({}, 5)
    assert sys2.solve() is None


def test_solve_exactness_random():
    rng = random.Random(11)
    for _ in range(20):
        n = rng.randint(1, 5)
        sol_true = {i: Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for i in range(n)}
        sys = LinearSystem()
        rows = []
        for _ in range(n + 2):
            row = {i: Fraction(rng.randint(-3, 3)) for i in range(n)}
            rhs = sum(row[i] * sol_true[i] for i in range(n))
            rows.append(row)
            sys.add_equation(row, rhs)
        sol = sys.solve()
        assert sol is not None
        for row in rows:
            assert sum(row.get(i, 0) * sol.get(i, 0) for i in range(n)) == sum(
                row.get(i, 0) * sol_true[i] for i in range(n)
            )


def test_nullspace():
    sys = LinearSystem()
    sys.add_equation({0: 1, 1: -1})
    sys.add_equation({1: 1, 2: -1})
    basis = sys.nullspace()
    assert len(basis) == 1
    v = basis[0]
    assert v[0] == v[1] == v[2]


def test_rank_and_rref():
    rows = [{0: 1, 1: 2}, {0: 2, 1: 4}, {1: 1}]
    assert rank(rows) == 2
    assert len(rref_rows(rows)) == 2


def test_in_span():
    rows = [{0: 1, 1: 1}, {1: 1}]
    combo = in_span(rows, {0: 2, 1: 5})
    assert combo is not None
    assert combo[0] == 2 and combo[1] == 3
    assert in_span(rows[:1], {0: 1}) is None


def test_quotient():
    # span(a, b, c) / (a - b) has dimension 2
    q = Quotient(["a", "b", "c"], [{"a": Fraction(1), "b": Fraction(-1)}])
    assert q.dim == 2
    r = q.reduce({"a": Fraction(1)})
    assert r == q.reduce({"b": Fraction(1)})
    assert q.reduce({"c": Fraction(2)}) == {"c": 2}
