import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy.functions.combinatorial.numbers import stirling

import gridclust as gc
from gridclust.cost import group_value_prior_term
from conftest import random_dataset

TOY_NULL_COST = 4 * math.log(2) + 2 * math.log(3)


def test_log_factorial_small_exact():
    assert gc.log_factorial(0) == 0.0
    assert abs(gc.log_factorial(2) - math.log(2)) < 1e-15
    for n in (1, 5, 10, 20, 50, 170):
        exact = math.log(math.factorial(n))
        assert abs(gc.log_factorial(n) - exact) <= 1e-12 * exact + 1e-15


def test_log_factorial_large():
    # against Stirling-series-quality lgamma
    assert abs(gc.log_factorial(10**7) - math.lgamma(10**7 + 1)) < 1e-6
    with pytest.raises(ValueError):
        gc.log_factorial(-1)


def test_log_binomial():
    assert gc.log_binomial(7, 0) == 0.0
    assert abs(gc.log_binomial(3, 1) - math.log(3)) < 1e-14
    assert abs(gc.log_binomial(5, 2) - math.log(10)) < 1e-13
    for n in range(12):
        for k in range(n + 1):
            exact = math.log(math.comb(n, k))
            assert abs(gc.log_binomial(n, k) - exact) < 1e-12 + 1e-12 * exact
    with pytest.raises(ValueError):
        gc.log_binomial(3, 4)


def _brute_force_b(v, j):
    """Count set partitions of v elements into at most j blocks."""
    def partitions(elems):
        if not elems:
            yield []
            return
        first, rest = elems[0], elems[1:]
        for smaller in partitions(rest):
            for i in range(len(smaller)):
                yield smaller[:i] + [[first] + smaller[i]] + smaller[i + 1:]
            yield [[first]] + smaller
    return sum(1 for p in partitions(list(range(v))) if len(p) <= j)


def test_log_b_brute_force():
    assert gc.log_B(3, 2) == pytest.approx(math.log(4), abs=1e-12)
    for v in range(1, 7):
        for j in range(1, v + 1):
            assert gc.log_B(v, j) == pytest.approx(
                math.log(_brute_force_b(v, j)), abs=1e-10)


def test_log_b_sympy_oracle():
    import sympy
    for v, j in [(10, 3), (15, 7), (30, 5), (50, 50), (40, 2)]:
        exact = sum(stirling(v, i) for i in range(1, min(j, v) + 1))
        assert gc.log_B(v, j) == pytest.approx(float(sympy.log(exact)),
                                               rel=1e-10)


def test_log_b_edge_cases():
    for v in (1, 2, 5, 100):
        assert gc.log_B(v, 1) == 0.0
    for j in (1, 3, 10):
        assert gc.log_B(1, j) == 0.0   # clamped to V
    assert gc.log_B(4, 9) == gc.log_B(4, 4)


@given(st.integers(2, 40), st.integers(1, 39))
@settings(max_examples=60, deadline=None)
def test_log_b_monotone_in_j(v, j):
    assert gc.log_B(v, min(j + 1, v)) >= gc.log_B(v, j) - 1e-12


def test_toy_null_cost_term_by_term(toy_cat2):
    bd = gc.cost(gc.null_model(toy_cat2))
    assert bd.prior_numerical_part_counts == 0.0
    assert bd.prior_categorical_group_counts == pytest.approx(2 * math.log(2),
                                                              abs=1e-12)
    assert bd.prior_partition_choice == 0.0
    assert bd.prior_cell_distribution == 0.0
    assert bd.prior_group_value_distribution == pytest.approx(
        2 * math.log(3), abs=1e-12)
    assert bd.likelihood_cells == 0.0
    assert bd.likelihood_within_parts == pytest.approx(2 * math.log(2),
                                                       abs=1e-12)
    assert bd.total == pytest.approx(TOY_NULL_COST, abs=1e-9)


def test_toy_finest_grid_costs_more(toy_cat2):
    m = gc.model_from_assignments(toy_cat2, [np.array([0, 1]),
                                             np.array([0, 1])])
    bd = gc.cost(m)
    assert bd.likelihood_cells == pytest.approx(math.log(2), abs=1e-12)
    assert bd.total > TOY_NULL_COST


def test_breakdown_sums_to_total():
    rng = np.random.default_rng(3)
    for _ in range(20):
        ds = random_dataset(rng, n_max=40, v_max=4)
        for mp in (1, 2, 3):
            bd = gc.cost(gc.initial_model(ds, mp))
            assert bd.total == pytest.approx(sum(bd.components()),
                                             rel=1e-12, abs=1e-12)
            assert bd.total >= 0.0  # a code length
            assert all(math.isfinite(c) for c in bd.components())


def test_null_cost_closed_form_exhaustive():
    """cost(M_null) for every tiny dataset matches a hand formula."""
    rng = np.random.default_rng(9)
    for _ in range(40):
        ds = random_dataset(rng, n_max=6, v_max=3)
        n = ds.n_records
        expected = 0.0
        for k in range(2):
            if ds.kind(k) == "numerical":
                expected += math.log(n)          # part-count prior
                expected += gc.log_factorial(n)  # within the single interval
            else:
                v = ds.n_atoms(k)
                expected += math.log(v)
                expected += gc.log_B(v, 1)
                expected += group_value_prior_term(n, v)
                expected += gc.log_factorial(n)
                expected -= sum(gc.log_factorial(int(c))
                                for c in ds.indexes[k].counts)
        # cell term: single cell of count N cancels log N!
        got = gc.cost(gc.null_model(ds)).total
        assert got == pytest.approx(expected, abs=1e-9)


def test_exhaustive_small_models_planted_minimum():
    """Enumerate every grid on a 2x2-planted dataset: the planted grouping
    has the lowest cost, and each model's breakdown is finite."""
    rows = (8 * [["a", "x"]] + 8 * [["b", "x"]]
            + 8 * [["c", "y"]] + 8 * [["d", "y"]])
    schema = gc.Schema((gc.Variable("u", "categorical"),
                        gc.Variable("w", "categorical")))
    ds = gc.from_rows(rows, schema)

    def assignments(v):
        # all partitions of v values as compact index vectors
        for labels in itertools.product(*[range(i + 1) for i in range(v)]):
            compact = []
            seen = {}
            ok = True
            for x in labels:
                if x not in seen:
                    if x != len(seen):
                        ok = False
                        break
                    seen[x] = len(seen)
                compact.append(seen[x])
            if ok:
                yield np.array(compact, dtype=np.int32)

    best = None
    for au in assignments(4):
        for aw in assignments(2):
            m = gc.model_from_assignments(ds, [au, aw])
            total = gc.cost(m).total
            if best is None or total < best[0]:
                best = (total, au.tolist(), aw.tolist())
    assert best[1] == [0, 0, 1, 1]  # {a,b} vs {c,d}
    assert best[2] == [0, 1]
