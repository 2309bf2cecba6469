"""Planted-structure dataset generation and partition-recovery scoring."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import CATEGORICAL, NUMERICAL, Dataset, Schema, Variable, from_rows


@dataclass(frozen=True)
class PlantVariable:
    name: str
    kind: str
    n_parts: int
    #: categorical: distinct values per part; numerical: distinct raw values
    #: per interval (None draws continuous uniforms, i.e. no tie-blocks).
    values_per_part: int | None = None

    def __post_init__(self):
        if self.kind not in (NUMERICAL, CATEGORICAL):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.n_parts < 1:
            raise ValueError("a variable needs at least one part")
        if self.kind == CATEGORICAL:
            if not self.values_per_part or self.values_per_part < 1:
                raise ValueError("categorical parts need values_per_part >= 1")


@dataclass(frozen=True)
class PlantSpec:
    """Recipe for a dataset whose joint distribution is a known grid.

    ``cells`` is either ``("diagonal", eps)`` (probability ``(1-eps)/D`` on
    each diagonal cell plus ``eps`` spread uniformly over all cells; requires
    equal part counts) or an explicit probability tensor with one axis per
    variable.
    """
    variables: tuple[PlantVariable, ...]
    n_records: int
    seed: int
    cells: object = ("diagonal", 0.0)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(self.variables) < 2:
            raise ValueError("need at least 2 variables")
        if self.n_records < 1:
            raise ValueError("n_records must be positive")

    def cell_tensor(self) -> np.ndarray:
        shape = tuple(v.n_parts for v in self.variables)
        if isinstance(self.cells, tuple) and self.cells[0] == "diagonal":
            eps = float(self.cells[1])
            if not 0.0 <= eps <= 1.0:
                raise ValueError("noise must be in [0, 1]")
            d = shape[0]
            if any(s != d for s in shape):
                raise ValueError("diagonal cells need equal part counts")
            t = np.full(shape, eps / math.prod(shape))
            for i in range(d):
                t[(i,) * len(shape)] += (1.0 - eps) / d
            return t
        t = np.asarray(self.cells, dtype=np.float64)
        if t.shape != shape:
            raise ValueError(f"cell tensor shape {t.shape} != {shape}")
        if np.any(t < 0) or abs(float(t.sum()) - 1.0) > 1e-9:
            raise ValueError("cell probabilities must be >= 0 and sum to 1")
        return t


@dataclass(frozen=True)
class GroundTruth:
    """Planted partition per variable: value-text -> part for categorical,
    ascending interior raw boundaries for numerical."""
    assignments: dict[str, dict[str, int] | list[float]]

    def record_labels(self, dataset: Dataset, variable: str) -> np.ndarray:
        k = dataset.schema.index_of(variable)
        planted = self.assignments[variable]
        idx = dataset.indexes[k]
        if dataset.kind(k) == CATEGORICAL:
            atom_label = np.array([planted[v] for v in idx.values],
                                  dtype=np.int64)
        else:
            atom_label = np.searchsorted(np.asarray(planted, dtype=np.float64),
                                         idx.block_values).astype(np.int64)
        return atom_label[dataset.atoms[:, k]]


def generate(spec: PlantSpec) -> tuple[Dataset, GroundTruth]:
    """Sample a dataset: draw a cell per record from the cell distribution,
    then a value (or raw numerical draw) uniformly within each part.
    Deterministic for a fixed seed."""
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
    tensor = spec.cell_tensor()
    shape = tensor.shape
    n = spec.n_records
    flat = rng.choice(tensor.size, size=n, p=tensor.ravel())
    part_idx = np.unravel_index(flat, shape)

    columns: list[list[str]] = []
    truth: dict[str, object] = {}
    for k, var in enumerate(spec.variables):
        parts = part_idx[k]
        if var.kind == CATEGORICAL:
            vpp = var.values_per_part
            if vpp * var.n_parts < var.n_parts:
                raise ValueError("more parts than values")
            within = rng.integers(0, vpp, size=n)
            names = [[f"{var.name}_p{p}v{i}" for i in range(vpp)]
                     for p in range(var.n_parts)]
            columns.append([names[p][w] for p, w in zip(parts.tolist(),
                                                        within.tolist())])
            truth[var.name] = {names[p][i]: p
                               for p in range(var.n_parts) for i in range(vpp)}
        else:
            u = rng.random(size=n)
            if var.values_per_part:
                g = var.values_per_part
                u = (np.floor(u * g) + 0.5) / g
            vals = parts + u
            columns.append([repr(float(x)) for x in vals])
            truth[var.name] = [float(p) for p in range(1, var.n_parts)]

    schema = Schema(tuple(Variable(v.name, v.kind) for v in spec.variables))
    rows = list(map(list, zip(*columns)))
    dataset = from_rows(rows, schema)
    return dataset, GroundTruth(truth)


def planted_model(dataset: Dataset, truth: GroundTruth):
    """Grid model carrying exactly the planted partitions."""
    from .grid import model_from_assignments
    assigns = []
    for k in range(dataset.K):
        name = dataset.schema.variables[k].name
        planted = truth.assignments[name]
        idx = dataset.indexes[k]
        if dataset.kind(k) == CATEGORICAL:
            raw = np.array([planted[v] for v in idx.values], dtype=np.int64)
        else:
            raw = np.searchsorted(np.asarray(planted, dtype=np.float64),
                                  idx.block_values)
        # compact away planted parts that received no data
        present = np.unique(raw)
        lut = np.zeros(int(raw.max()) + 1, dtype=np.int32)
        lut[present] = np.arange(len(present), dtype=np.int32)
        assigns.append(lut[raw])
    return model_from_assignments(dataset, assigns)


def adjusted_rand_index(labels_a, labels_b) -> float:
    """Chance-corrected partition agreement from the pair-count table."""
    a = np.asarray(labels_a).ravel()
    b = np.asarray(labels_b).ravel()
    if a.shape != b.shape:
        raise ValueError("partitions must cover the same elements")
    n = len(a)
    if n == 0:
        raise ValueError("empty partitions")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((int(ai.max()) + 1, int(bi.max()) + 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)

    def comb2(x):
        x = np.asarray(x, dtype=np.float64)
        return x * (x - 1.0) / 2.0

    sum_ij = float(comb2(table).sum())
    sum_a = float(comb2(table.sum(axis=1)).sum())
    sum_b = float(comb2(table.sum(axis=0)).sum())
    total = float(comb2(np.array([n])).sum())
    expected = sum_a * sum_b / total if total > 0 else 0.0
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        return 1.0
    return (sum_ij - expected) / (max_index - expected)
