"""Table ingestion: typed variables, rank indexes and value dictionaries.

Numerical variables are carried as tie-block indexes over the sorted raw
values (the rank representation everything downstream works with);
categorical variables are dictionary-coded in first-appearance order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

NUMERICAL = "numerical"
CATEGORICAL = "categorical"

#: Reserved category for empty categorical fields.
MISSING_CATEGORY = "⟨missing⟩"


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str

    def __post_init__(self):
        if self.kind not in (NUMERICAL, CATEGORICAL):
            raise ValueError(f"unknown variable kind {self.kind!r}")
        if not self.name:
            raise ValueError("variable name must be non-empty")


@dataclass(frozen=True)
class Schema:
    variables: tuple[Variable, ...]
    delimiter: str = "\t"
    has_header: bool = True

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        if len(names) < 2:
            raise ValueError("a schema needs at least 2 variables")
        if len(self.delimiter) != 1:
            raise ValueError("delimiter must be a single character")

    @property
    def names(self) -> list[str]:
        return [v.name for v in self.variables]

    @property
    def K(self) -> int:
        return len(self.variables)

    def index_of(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise KeyError(f"no variable named {name!r}")


class CategoricalIndex:
    """Dictionary coding of one categorical variable, first-appearance order."""

    def __init__(self, values: list[str], counts: np.ndarray):
        self.values = list(values)
        self.counts = np.asarray(counts, dtype=np.int64)
        self.id_of = {v: i for i, v in enumerate(self.values)}

    @property
    def n_values(self) -> int:
        return len(self.values)


class NumericalIndex:
    """Tie-block structure of one numerical variable.

    Block ``b`` holds all records with raw value ``block_values[b]`` and
    occupies the 1-based ranks ``[rank_lo(b)+1, rank_lo(b)+block_sizes[b]]``.
    """

    def __init__(self, block_values: np.ndarray, block_sizes: np.ndarray):
        self.block_values = np.asarray(block_values, dtype=np.float64)
        self.block_sizes = np.asarray(block_sizes, dtype=np.int64)
        # rank_edges[b] = number of records strictly before block b
        self.rank_edges = np.concatenate(
            ([0], np.cumsum(self.block_sizes))
        ).astype(np.int64)

    @property
    def n_blocks(self) -> int:
        return len(self.block_values)

    def block_of_rank_edge(self, rank: int) -> int:
        """Block index whose first rank is ``rank`` (1-based), or -1."""
        pos = int(np.searchsorted(self.rank_edges, rank - 1))
        if pos < len(self.rank_edges) and self.rank_edges[pos] == rank - 1:
            return pos
        return -1


class Dataset:
    """Immutable encoded table: one atom index per record per variable.

    Atoms are value ids for categorical variables and tie-block indexes for
    numerical ones. ``atoms`` has shape (N, K), int32.
    """

    def __init__(self, schema: Schema, atoms: np.ndarray,
                 indexes: list, n_dropped: int = 0, source: str | None = None):
        self.schema = schema
        self.atoms = np.asarray(atoms, dtype=np.int32)
        self.indexes = list(indexes)
        self.n_dropped = int(n_dropped)
        self.source = source
        self._atomic = None
        self._slices = {}
        if self.atoms.shape[0] < 1:
            raise ValueError("zero usable rows")
        if self.atoms.shape[1] != schema.K:
            raise ValueError("atoms width does not match schema")

    @property
    def n_records(self) -> int:
        return int(self.atoms.shape[0])

    @property
    def K(self) -> int:
        return self.schema.K

    def kind(self, k: int) -> str:
        return self.schema.variables[k].kind

    def n_atoms(self, k: int) -> int:
        idx = self.indexes[k]
        return idx.n_values if isinstance(idx, CategoricalIndex) else idx.n_blocks

    def atom_weights(self, k: int) -> np.ndarray:
        """Record count per atom of variable k."""
        idx = self.indexes[k]
        return idx.counts if isinstance(idx, CategoricalIndex) else idx.block_sizes

    def atomic_cells(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct atom tuples with multiplicities; at most N of them."""
        if self._atomic is None:
            cells, counts = np.unique(self.atoms, axis=0, return_counts=True)
            self._atomic = (cells.astype(np.int32), counts.astype(np.int64))
        return self._atomic

    def atom_slices(self, k: int):
        """Atomic cells grouped by their atom on variable ``k``.

        Returns (cells_sorted, counts_sorted, starts) where
        ``starts[a]:starts[a+1]`` are the atomic cells whose k-th atom is a.
        """
        if k not in self._slices:
            cells, counts = self.atomic_cells()
            order = np.argsort(cells[:, k], kind="stable")
            cs = cells[order]
            starts = np.searchsorted(cs[:, k], np.arange(self.n_atoms(k) + 1))
            self._slices[k] = (cs, counts[order], starts.astype(np.int64))
        return self._slices[k]


def _encode_rows(rows: list[list[str]], schema: Schema,
                 source: str | None = None) -> Dataset:
    """Dictionary-code and rank-index parsed text rows; drops rows whose
    numerical fields do not parse to a finite real."""
    K = schema.K
    num_cols = [k for k in range(K) if schema.variables[k].kind == NUMERICAL]
    cat_cols = [k for k in range(K) if schema.variables[k].kind == CATEGORICAL]

    kept: list[list] = []
    n_dropped = 0
    for row in rows:
        if len(row) != K:
            raise ValueError(
                f"row has {len(row)} fields, schema expects {K}: {row!r}")
        out = list(row)
        ok = True
        for k in num_cols:
            try:
                x = float(row[k])
            except ValueError:
                ok = False
                break
            if not math.isfinite(x):
                ok = False
                break
            out[k] = x
        if not ok:
            n_dropped += 1
            continue
        for k in cat_cols:
            if out[k] == "":
                out[k] = MISSING_CATEGORY
        kept.append(out)

    if not kept:
        raise ValueError("zero usable rows after ingestion")

    n = len(kept)
    atoms = np.empty((n, K), dtype=np.int32)
    indexes: list = [None] * K

    for k in cat_cols:
        id_of: dict[str, int] = {}
        col = np.empty(n, dtype=np.int32)
        for i, row in enumerate(kept):
            v = row[k]
            j = id_of.get(v)
            if j is None:
                j = len(id_of)
                id_of[v] = j
            col[i] = j
        counts = np.bincount(col, minlength=len(id_of))
        atoms[:, k] = col
        indexes[k] = CategoricalIndex(list(id_of.keys()), counts)

    for k in num_cols:
        vals = np.array([row[k] for row in kept], dtype=np.float64)
        block_values, inverse = np.unique(vals, return_inverse=True)
        sizes = np.bincount(inverse, minlength=len(block_values))
        atoms[:, k] = inverse.astype(np.int32)
        indexes[k] = NumericalIndex(block_values, sizes)

    return Dataset(schema, atoms, indexes, n_dropped=n_dropped, source=source)


def load_table(path, schema: Schema) -> Dataset:
    """Read a delimited UTF-8 table and encode it.

    Rows with an unparseable numerical field are dropped and counted in
    ``Dataset.n_dropped``; empty categorical fields become the reserved
    missing category.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=schema.delimiter)
        rows = list(reader)
    if schema.has_header:
        if not rows:
            raise ValueError("empty file")
        header = rows[0]
        if [h for h in header] != schema.names:
            raise ValueError(
                f"header {header!r} does not match schema {schema.names!r}")
        rows = rows[1:]
    rows = [r for r in rows if r]
    return _encode_rows(rows, schema, source=str(path))


def from_rows(rows: list[list[str]], schema: Schema) -> Dataset:
    """Encode already-split text rows (same semantics as load_table)."""
    return _encode_rows([list(r) for r in rows], schema)


def write_table(dataset: Dataset, path) -> None:
    """Write the dataset back as delimited text; reloading it reproduces
    identical dictionaries, ranks and N."""
    schema = dataset.schema
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=schema.delimiter, lineterminator="\n")
        if schema.has_header:
            writer.writerow(schema.names)
        for i in range(dataset.n_records):
            row = []
            for k in range(schema.K):
                a = int(dataset.atoms[i, k])
                idx = dataset.indexes[k]
                if isinstance(idx, CategoricalIndex):
                    row.append(idx.values[a])
                else:
                    row.append(repr(float(idx.block_values[a])))
            writer.writerow(row)


def value_counts(dataset: Dataset, variable: str) -> list[tuple[str, int]]:
    """(value, count) pairs, by descending count then value text."""
    k = dataset.schema.index_of(variable)
    idx = dataset.indexes[k]
    if not isinstance(idx, CategoricalIndex):
        raise ValueError(f"variable {variable!r} is not categorical")
    pairs = list(zip(idx.values, idx.counts.tolist()))
    pairs.sort(key=lambda p: (-p[1], p[0]))
    return pairs
