import pytest

import gridclust as gc


@pytest.fixture
def toy_cat2():
    """2 records, 2 categorical variables: (a,x), (b,y)."""
    schema = gc.Schema((gc.Variable("u", "categorical"),
                        gc.Variable("w", "categorical")))
    return gc.from_rows([["a", "x"], ["b", "y"]], schema)


def random_dataset(rng, n_max=8, v_max=3, kinds=None):
    """Small random dataset for exhaustive delta checks."""
    n = int(rng.integers(1, n_max + 1))
    if kinds is None:
        kinds = [str(rng.choice(["categorical", "numerical"]))
                 for _ in range(2)]
    rows = []
    for _ in range(n):
        row = []
        for kind in kinds:
            if kind == "categorical":
                row.append("v%d" % rng.integers(0, v_max))
            else:
                row.append(repr(float(rng.integers(0, v_max + 1))))
        rows.append(row)
    schema = gc.Schema(tuple(gc.Variable(f"x{i}", kind)
                             for i, kind in enumerate(kinds)))
    return gc.from_rows(rows, schema)


def legal_merges(model):
    for k, name in enumerate(model.dataset.schema.names):
        j = model.J(k)
        if model.dataset.kind(k) == "numerical":
            for a in range(j - 1):
                yield name, a, a + 1
        else:
            for a in range(j - 1):
                for b in range(a + 1, j):
                    yield name, a, b


def legal_moves(model):
    for k, name in enumerate(model.dataset.schema.names):
        if model.dataset.kind(k) != "categorical" or model.J(k) < 2:
            continue
        for vid in range(model.dataset.n_atoms(k)):
            fr = model.part_of_value(k, vid)
            for to in range(model.J(k)):
                if to != fr:
                    yield name, vid, fr, to


def planted_2d(n=5000, seed=42, eps=0.05, parts=3, vpp=4):
    spec = gc.PlantSpec(
        variables=(gc.PlantVariable("row", "categorical", parts, vpp),
                   gc.PlantVariable("col", "categorical", parts, vpp)),
        n_records=n, seed=seed, cells=("diagonal", eps))
    return gc.generate(spec)


def model_ari(model, dataset, truth, name):
    k = model.var_index(name)
    return gc.adjusted_rand_index(
        truth.record_labels(dataset, name),
        model.atom_to_part[k][dataset.atoms[:, k]])
