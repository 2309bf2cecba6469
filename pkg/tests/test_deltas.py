"""Incremental deltas against the full-recompute oracle."""

import numpy as np
import pytest

import gridclust as gc
from conftest import legal_merges, legal_moves, random_dataset


def _models_under_test(rng, ds):
    yield gc.initial_model(ds, int(rng.integers(1, 4)))
    yield gc.null_model(ds)


def test_delta_merge_matches_full_recompute():
    rng = np.random.default_rng(17)
    checked = 0
    for _ in range(110):
        ds = random_dataset(rng)
        for model in _models_under_test(rng, ds):
            base = gc.cost(model).total
            for name, a, b in legal_merges(model):
                inc = gc.delta_merge(model, name, a, b)
                full = gc.cost(gc.merge_parts(model, name, a, b)).total - base
                assert inc == pytest.approx(full, abs=1e-9)
                checked += 1
    assert checked > 100


def test_delta_merge_symmetric():
    rng = np.random.default_rng(23)
    for _ in range(20):
        ds = random_dataset(rng)
        model = gc.initial_model(ds, 3)
        for name, a, b in legal_merges(model):
            assert gc.delta_merge(model, name, a, b) == pytest.approx(
                gc.delta_merge(model, name, b, a), abs=1e-12)


def test_delta_move_matches_full_recompute():
    rng = np.random.default_rng(31)
    checked = 0
    for _ in range(60):
        ds = random_dataset(rng, n_max=100)
        model = gc.initial_model(ds, int(rng.integers(2, 4)))
        base = gc.cost(model).total
        for name, vid, fr, to in legal_moves(model):
            inc = gc.delta_move(model, name, vid, fr, to)
            full = gc.cost(gc.move_value(model, name, vid, fr, to)).total - base
            assert inc == pytest.approx(full, abs=1e-9)
            checked += 1
    assert checked > 100


def test_delta_boundary_matches_full_recompute():
    rng = np.random.default_rng(37)
    checked = 0
    for _ in range(40):
        ds = random_dataset(rng, n_max=60,
                            kinds=["numerical", "categorical"])
        model = gc.initial_model(ds, 3)
        base = gc.cost(model).total
        k = 0
        edges = ds.indexes[k].rank_edges
        for bi in range(model.J(k) - 1):
            left = model.partitions[k].parts[bi]
            right = model.partitions[k].parts[bi + 1]
            for nb in range(left.lo_block + 1, right.hi_block):
                rank = int(edges[nb]) + 1
                inc = gc.delta_boundary(model, "x0", bi, rank)
                full = gc.cost(
                    gc.move_boundary(model, "x0", bi, rank)).total - base
                assert inc == pytest.approx(full, abs=1e-9)
                checked += 1
    assert checked > 50


def test_merge_favored_on_identical_independent_parts():
    """Two groups with identical conditional rows under an independent split
    should merge (negative delta)."""
    rows = []
    for u in ("a", "b"):          # same conditional over w
        for w, n in (("x", 30), ("y", 30)):
            rows += [[u, w]] * n
    schema = gc.Schema((gc.Variable("u", "categorical"),
                        gc.Variable("w", "categorical")))
    ds = gc.from_rows(rows, schema)
    m = gc.model_from_assignments(ds, [np.array([0, 1]), np.array([0, 1])])
    assert gc.delta_merge(m, "u", 0, 1) < 0
    full = gc.cost(gc.merge_parts(m, "u", 0, 1)).total - gc.cost(m).total
    assert gc.delta_merge(m, "u", 0, 1) == pytest.approx(full, abs=1e-9)


def test_delta_preconditions_propagate():
    rng = np.random.default_rng(41)
    ds = random_dataset(rng, n_max=8, kinds=["categorical", "numerical"])
    model = gc.initial_model(ds, 3)
    with pytest.raises(ValueError):
        gc.delta_merge(model, "x1", 0, 0)
    if model.J(1) >= 3:
        with pytest.raises(ValueError):
            gc.delta_merge(model, "x1", 0, 2)
    with pytest.raises(ValueError):
        gc.delta_move(model, "x1", 0, 0, 0)  # numerical variable
    if model.J(0) >= 2:
        fr = model.part_of_value(0, 0)
        with pytest.raises(ValueError):
            gc.delta_move(model, "x0", 0, fr, fr)
        wrong = (fr + 1) % model.J(0)
        with pytest.raises(ValueError):
            gc.delta_move(model, "x0", 0, wrong, fr)
