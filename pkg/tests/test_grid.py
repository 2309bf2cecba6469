import numpy as np
import pytest

import gridclust as gc
from gridclust.engine import GridEngine
from conftest import random_dataset


def test_null_model(toy_cat2):
    m = gc.null_model(toy_cat2)
    assert m.cells == {(0, 0): 2}
    assert m.G == 1
    assert all(int(t[0]) == 2 for t in m.part_totals)
    m.validate()


def test_initial_model_equal_frequency():
    rows = [[repr(float(i)), "a"] for i in range(100)]
    schema = gc.Schema((gc.Variable("n", "numerical"),
                        gc.Variable("c", "categorical")))
    ds = gc.from_rows(rows, schema)
    m = gc.initial_model(ds, 10)
    assert m.J(0) == 10
    assert all(int(t) == 10 for t in m.part_totals[0])
    m.validate()


def test_initial_model_caps_at_value_count():
    rows = [["v%d" % (i % 3), repr(float(i))] for i in range(30)]
    schema = gc.Schema((gc.Variable("c", "categorical"),
                        gc.Variable("n", "numerical")))
    ds = gc.from_rows(rows, schema)
    m = gc.initial_model(ds, 10)
    assert m.J(0) == 3
    assert all(p.n_values == 1 for p in m.partitions[0].parts)


def test_initial_model_default_sqrt_n():
    rng = np.random.default_rng(2)
    rows = [[repr(float(rng.random())), repr(float(rng.random()))]
            for _ in range(10000)]
    schema = gc.Schema((gc.Variable("a", "numerical"),
                        gc.Variable("b", "numerical")))
    ds = gc.from_rows(rows, schema)
    m = gc.initial_model(ds)
    assert m.J(0) <= 100 and m.J(1) <= 100


def test_merge_collapses_cells():
    schema = gc.Schema((gc.Variable("a", "categorical"),
                        gc.Variable("b", "categorical")))
    rows = [["p", "z"]] * 3 + [["q", "z"]] * 4
    ds = gc.from_rows(rows, schema)
    m = gc.model_from_assignments(ds, [np.array([0, 1]), np.array([0])])
    assert m.cells == {(0, 0): 3, (1, 0): 4}
    merged = gc.merge_parts(m, "a", 0, 1)
    assert merged.cells == {(0, 0): 7}
    assert merged.J(0) == 1
    # input untouched
    assert m.cells == {(0, 0): 3, (1, 0): 4}
    merged.validate()


def test_merge_preconditions():
    rows = [[repr(float(i)), "a"] for i in range(9)]
    schema = gc.Schema((gc.Variable("n", "numerical"),
                        gc.Variable("c", "categorical")))
    ds = gc.from_rows(rows, schema)
    m = gc.initial_model(ds, 3)
    with pytest.raises(ValueError):
        gc.merge_parts(m, "n", 0, 2)  # not adjacent
    with pytest.raises(ValueError):
        gc.merge_parts(m, "n", 1, 1)
    with pytest.raises(IndexError):
        gc.merge_parts(m, "n", 0, 7)


def test_move_value_deletes_emptied_group():
    schema = gc.Schema((gc.Variable("a", "categorical"),
                        gc.Variable("b", "categorical")))
    rows = [["p", "z"], ["q", "z"], ["r", "z"]]
    ds = gc.from_rows(rows, schema)
    m = gc.model_from_assignments(ds, [np.array([0, 1, 2]), np.array([0])])
    moved = gc.move_value(m, "a", 2, 2, 0)
    assert moved.J(0) == 2
    assert moved.part_of_value(0, 2) == 0
    moved.validate()
    with pytest.raises(ValueError):
        gc.move_value(m, "a", 2, 2, 2)  # from == to
    with pytest.raises(ValueError):
        gc.move_value(m, "a", 2, 0, 1)  # value not in from
    with pytest.raises(ValueError):
        gc.move_value(m, "b", 0, 0, 0)  # single-part target misuse


def test_move_boundary_shifts_one_tie_block():
    rows = [[repr(v), "a"] for v in (1.0, 1.0, 2.0, 3.0, 3.0, 4.0)]
    schema = gc.Schema((gc.Variable("n", "numerical"),
                        gc.Variable("c", "categorical")))
    ds = gc.from_rows(rows, schema)
    m = gc.model_from_assignments(ds, [np.array([0, 0, 1, 1]), np.array([0])])
    # boundary at rank 3 (start of value 2.0's block); move to rank 4
    moved = gc.move_boundary(m, "n", 0, 4)
    assert moved.part_totals[0].tolist() == [3, 3]
    assert sum(moved.cells.values()) == 6
    moved.validate()
    with pytest.raises(ValueError, match="tie-block"):
        gc.move_boundary(m, "n", 0, 2)  # splits the 1.0 block
    with pytest.raises(ValueError, match="empty"):
        gc.move_boundary(m, "n", 0, 1)


def test_edits_preserve_totals_random_sequences():
    rng = np.random.default_rng(5)
    for _ in range(10):
        ds = random_dataset(rng, n_max=200, v_max=5)
        model = gc.initial_model(ds, 4)
        for _ in range(6):
            k = int(rng.integers(0, 2))
            name = ds.schema.names[k]
            j = model.J(k)
            if j < 2:
                continue
            if ds.kind(k) == "numerical" or rng.random() < 0.5:
                a = int(rng.integers(0, j - 1))
                b = a + 1 if ds.kind(k) == "numerical" else int(
                    rng.integers(a + 1, j))
                model = gc.merge_parts(model, name, a, b)
            else:
                vid = int(rng.integers(0, ds.n_atoms(k)))
                fr = model.part_of_value(k, vid)
                to = int(rng.integers(0, j))
                if to == fr:
                    continue
                model = gc.move_value(model, name, vid, fr, to)
            assert sum(model.cells.values()) == ds.n_records
            assert len(model.cells) <= ds.n_records
            model.validate()


def test_incremental_engine_matches_rebuild():
    """build-from-scratch(cells after edit) == incremental edit result."""
    rng = np.random.default_rng(11)
    for _ in range(15):
        ds = random_dataset(rng, n_max=200, v_max=5,
                            kinds=["categorical", "numerical"])
        model = gc.initial_model(ds, 4)
        eng = GridEngine(ds, model.atom_to_part)
        for _ in range(8):
            k = int(rng.integers(0, 2))
            j = len(eng.order[k])
            if j < 2:
                continue
            name = ds.schema.names[k]
            if rng.random() < 0.5:
                pa = int(rng.integers(0, j - 1))
                ida, idb = eng.order[k][pa], eng.order[k][pa + 1]
                eng.apply_merge(k, ida, idb)
                model = gc.merge_parts(model, name, pa, pa + 1)
            elif ds.kind(k) == "categorical":
                vid = int(rng.integers(0, ds.n_atoms(k)))
                ida = int(eng.atom_part[k][vid])
                others = [x for x in eng.order[k] if x != ida]
                idb = others[int(rng.integers(0, len(others)))]
                fr, to = eng.order[k].index(ida), eng.order[k].index(idb)
                eng.apply_move(k, vid, ida, idb)
                model = gc.move_value(model, name, vid, fr, to)
            else:
                bi = int(rng.integers(0, j - 1))
                left, right = eng.order[k][bi], eng.order[k][bi + 1]
                if eng.part_sizes[k][left] <= 1:
                    continue
                atom = eng.members[k][left][1] - 1
                new_rank = int(ds.indexes[k].rank_edges[atom]) + 1
                eng.apply_move(k, atom, left, right)
                model = gc.move_boundary(model, name, bi, new_rank)
            assert eng.snapshot() == model
            assert eng.snapshot().cells == model.cells


def test_interval_bounds_reported_as_midpoints():
    rows = [[repr(v), "a"] for v in (1.0, 2.0, 3.0, 4.0)]
    schema = gc.Schema((gc.Variable("n", "numerical"),
                        gc.Variable("c", "categorical")))
    ds = gc.from_rows(rows, schema)
    m = gc.model_from_assignments(ds, [np.array([0, 0, 1, 1]), np.array([0])])
    assert m.interval_raw_bounds(0, 0) == (1.0, 2.5)
    assert m.interval_raw_bounds(0, 1) == (2.5, 4.0)
