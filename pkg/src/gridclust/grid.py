"""Data grid models: per-variable partitions plus a sparse cell-count tensor.

A model partitions every variable (rank intervals for numerical variables,
value groups for categorical ones); the Cartesian product of the parts forms
cells whose record counts are stored sparsely (at most N are non-empty).
Edits return new models; inputs are never mutated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import CATEGORICAL, NUMERICAL, Dataset


@dataclass(frozen=True)
class Interval:
    """Half-open rank interval [lo_rank, hi_rank); block bounds likewise."""
    lo_rank: int
    hi_rank: int
    lo_block: int
    hi_block: int

    def __post_init__(self):
        if not (self.lo_rank < self.hi_rank and self.lo_block < self.hi_block):
            raise ValueError("empty interval")

    @property
    def n_blocks(self) -> int:
        return self.hi_block - self.lo_block


@dataclass(frozen=True)
class ValueGroup:
    value_ids: tuple[int, ...]

    def __post_init__(self):
        if not self.value_ids:
            raise ValueError("empty value group")
        object.__setattr__(self, "value_ids", tuple(sorted(self.value_ids)))

    @property
    def n_values(self) -> int:
        return len(self.value_ids)


Part = Interval | ValueGroup


@dataclass(frozen=True)
class VariablePartition:
    variable: str
    parts: tuple[Part, ...]

    @property
    def J(self) -> int:
        return len(self.parts)


class GridModel:
    """One partition per variable plus the sparse cell counts.

    Treat instances as immutable: every edit builds a new model. Construct
    through :func:`model_from_assignments` or the edit functions below.
    """

    def __init__(self, dataset: Dataset, partitions: tuple[VariablePartition, ...],
                 atom_to_part: tuple[np.ndarray, ...],
                 cells: dict[tuple[int, ...], int],
                 part_totals: tuple[np.ndarray, ...]):
        self.dataset = dataset
        self.partitions = partitions
        self.atom_to_part = atom_to_part
        self.cells = cells
        self.part_totals = part_totals
        self._engine = None  # lazily attached incremental evaluator

    @property
    def K(self) -> int:
        return self.dataset.K

    def J(self, k: int) -> int:
        return self.partitions[k].J

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(p.J for p in self.partitions)

    @property
    def G(self) -> int:
        return math.prod(self.shape)

    def var_index(self, name: str) -> int:
        return self.dataset.schema.index_of(name)

    def part_of_value(self, k: int, value_id: int) -> int:
        return int(self.atom_to_part[k][value_id])

    def interval_raw_bounds(self, k: int, j: int) -> tuple[float, float]:
        """User-facing bounds: midpoints between adjacent tie-blocks, the
        data min/max at the extremes."""
        part = self.partitions[k].parts[j]
        idx = self.dataset.indexes[k]
        vals = idx.block_values
        lo = (float(vals[0]) if part.lo_block == 0
              else float(vals[part.lo_block - 1] + vals[part.lo_block]) / 2.0)
        hi = (float(vals[-1]) if part.hi_block == len(vals)
              else float(vals[part.hi_block - 1] + vals[part.hi_block]) / 2.0)
        return lo, hi

    def part_label(self, k: int, j: int, max_values: int = 4) -> str:
        part = self.partitions[k].parts[j]
        if isinstance(part, Interval):
            lo, hi = self.interval_raw_bounds(k, j)
            return f"[{lo:.6g}; {hi:.6g}]"
        idx = self.dataset.indexes[k]
        names = sorted((idx.values[v] for v in part.value_ids),
                       key=lambda s: (-idx.counts[idx.id_of[s]], s))
        if len(names) > max_values:
            return ";".join(names[:max_values]) + f";…(+{len(names) - max_values})"
        return ";".join(names)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridModel):
            return NotImplemented
        return (self.dataset.schema.names == other.dataset.schema.names
                and self.partitions == other.partitions
                and self.cells == other.cells)

    def __hash__(self):
        return hash((self.partitions,))

    def validate(self) -> None:
        """Full invariant check (coverage, disjointness, count consistency);
        meant for tests and debugging."""
        ds = self.dataset
        n = ds.n_records
        if sum(self.cells.values()) != n:
            raise AssertionError("cell counts do not sum to N")
        if len(self.cells) > n:
            raise AssertionError("more than N non-empty cells")
        if any(c <= 0 for c in self.cells.values()):
            raise AssertionError("non-positive cell count")
        for k in range(self.K):
            part = self.partitions[k]
            assign = self.atom_to_part[k]
            if ds.kind(k) == NUMERICAL:
                blocks = 0
                for j, p in enumerate(part.parts):
                    if not isinstance(p, Interval):
                        raise AssertionError("numerical part is not an interval")
                    if p.lo_block != blocks:
                        raise AssertionError("intervals not contiguous")
                    blocks = p.hi_block
                    if not np.all(assign[p.lo_block:p.hi_block] == j):
                        raise AssertionError("atom assignment mismatch")
                if blocks != ds.n_atoms(k):
                    raise AssertionError("intervals do not cover all blocks")
                edges = ds.indexes[k].rank_edges
                for p in part.parts:
                    if (p.lo_rank != edges[p.lo_block] + 1
                            or p.hi_rank != edges[p.hi_block] + 1):
                        raise AssertionError("interval rank bounds inconsistent")
            else:
                seen: set[int] = set()
                for j, p in enumerate(part.parts):
                    if not isinstance(p, ValueGroup):
                        raise AssertionError("categorical part is not a group")
                    if seen & set(p.value_ids):
                        raise AssertionError("value groups overlap")
                    seen.update(p.value_ids)
                    if not all(assign[v] == j for v in p.value_ids):
                        raise AssertionError("atom assignment mismatch")
                if seen != set(range(ds.n_atoms(k))):
                    raise AssertionError("value groups do not cover all values")
            totals = np.zeros(part.J, dtype=np.int64)
            for key, c in self.cells.items():
                totals[key[k]] += c
            if not np.array_equal(totals, self.part_totals[k]):
                raise AssertionError("part totals inconsistent with cells")
        rebuilt = model_from_assignments(ds, self.atom_to_part)
        if rebuilt.cells != self.cells:
            raise AssertionError("cells inconsistent with atom assignments")


def _build_parts(dataset: Dataset, k: int, assign: np.ndarray) -> tuple[Part, ...]:
    nparts = int(assign.max()) + 1 if len(assign) else 0
    if dataset.kind(k) == NUMERICAL:
        if np.any(np.diff(assign) < 0) or assign[0] != 0:
            raise ValueError("numerical assignment must be 0..J-1, non-decreasing")
        edges = dataset.indexes[k].rank_edges
        parts = []
        lo = 0
        for j in range(nparts):
            hi = lo + int(np.count_nonzero(assign == j))
            if hi == lo:
                raise ValueError(f"interval {j} of variable {k} is empty")
            parts.append(Interval(int(edges[lo]) + 1, int(edges[hi]) + 1, lo, hi))
            lo = hi
        return tuple(parts)
    groups: list[list[int]] = [[] for _ in range(nparts)]
    for v, j in enumerate(assign.tolist()):
        groups[j].append(v)
    if any(not g for g in groups):
        raise ValueError("categorical assignment skips a part index")
    return tuple(ValueGroup(tuple(g)) for g in groups)


def model_from_assignments(dataset: Dataset,
                           atom_to_part) -> GridModel:
    """Build a model from per-variable atom-to-part index arrays.

    ``atom_to_part`` maps each variable (by schema position or name) to an
    array giving the part index of every atom (value id / tie-block). Part
    indices must be compact 0..J-1; numerical assignments non-decreasing.
    """
    if isinstance(atom_to_part, dict):
        assigns = [None] * dataset.K
        for name, arr in atom_to_part.items():
            assigns[dataset.schema.index_of(name)] = arr
        if any(a is None for a in assigns):
            raise ValueError("assignments must cover every variable")
    else:
        assigns = list(atom_to_part)
    assigns = [np.asarray(a, dtype=np.int32) for a in assigns]
    for k, a in enumerate(assigns):
        if len(a) != dataset.n_atoms(k):
            raise ValueError(f"assignment length mismatch on variable {k}")

    partitions = tuple(
        VariablePartition(dataset.schema.variables[k].name,
                          _build_parts(dataset, k, assigns[k]))
        for k in range(dataset.K)
    )
    shape = [p.J for p in partitions]

    acells, acounts = dataset.atomic_cells()
    code = assigns[0][acells[:, 0]].astype(np.int64)
    for k in range(1, dataset.K):
        code = code * shape[k] + assigns[k][acells[:, k]]
    ucode, inverse = np.unique(code, return_inverse=True)
    sums = np.zeros(len(ucode), dtype=np.int64)
    np.add.at(sums, inverse, acounts)

    keys = np.empty((len(ucode), dataset.K), dtype=np.int64)
    rem = ucode
    for k in range(dataset.K - 1, 0, -1):
        rem, keys[:, k] = np.divmod(rem, shape[k])
    keys[:, 0] = rem
    cells = {tuple(row): int(c) for row, c in zip(keys.tolist(), sums.tolist())}

    part_totals = []
    for k in range(dataset.K):
        tot = np.zeros(shape[k], dtype=np.int64)
        np.add.at(tot, assigns[k], dataset.atom_weights(k))
        part_totals.append(tot)

    return GridModel(dataset, partitions, tuple(assigns), cells,
                     tuple(part_totals))


def null_model(dataset: Dataset) -> GridModel:
    """The grid with a single cell: every variable in one part."""
    return model_from_assignments(
        dataset, [np.zeros(dataset.n_atoms(k), dtype=np.int32)
                  for k in range(dataset.K)])


def _equal_frequency_cuts(rank_edges: np.ndarray, n_parts: int,
                          jitter=None) -> np.ndarray:
    """Pick interior cut positions among tie-block rank edges, closest to the
    equal-frequency targets. Returns block indices of the cuts."""
    n = int(rank_edges[-1])
    interior = rank_edges[1:-1]  # candidate cut positions (records before cut)
    if len(interior) == 0 or n_parts <= 1:
        return np.empty(0, dtype=np.int64)
    step = n / n_parts
    cuts: list[int] = []
    prev = 0
    for p in range(1, n_parts):
        target = p * step
        if jitter is not None:
            target += float(jitter[p - 1]) * step
        pos = int(np.searchsorted(interior, target))
        best = None
        for cand in (pos - 1, pos):
            if 0 <= cand < len(interior) and int(interior[cand]) > prev:
                d = abs(float(interior[cand]) - target)
                if best is None or d < best[0]:
                    best = (d, cand)
        if best is None:
            # all remaining edges are at or before prev; try the next free one
            nxt = int(np.searchsorted(interior, prev, side="right"))
            if nxt >= len(interior):
                break
            best = (0.0, nxt)
        cuts.append(best[1])
        prev = int(interior[best[1]])
    return np.array(sorted(set(cuts)), dtype=np.int64) + 1  # block index of cut


def initial_model(dataset: Dataset, max_parts: int | None = None) -> GridModel:
    """Starting grid with at most max_parts parts per variable (default
    ceil(sqrt(N))): equal-frequency intervals respecting tie-blocks, and
    value groups dealt round-robin in descending count order."""
    n = dataset.n_records
    if max_parts is None:
        max_parts = math.isqrt(n) + (0 if math.isqrt(n) ** 2 == n else 1)
    if max_parts < 1:
        raise ValueError("max_parts must be >= 1")
    assigns = []
    for k in range(dataset.K):
        if dataset.kind(k) == NUMERICAL:
            idx = dataset.indexes[k]
            p = min(max_parts, idx.n_blocks)
            cut_blocks = _equal_frequency_cuts(idx.rank_edges, p)
            assign = np.zeros(idx.n_blocks, dtype=np.int32)
            for b in cut_blocks:
                assign[b:] += 1
        else:
            idx = dataset.indexes[k]
            v = idx.n_values
            p = min(max_parts, v)
            order = sorted(range(v), key=lambda i: (-idx.counts[i], idx.values[i]))
            assign = np.zeros(v, dtype=np.int32)
            for pos, vid in enumerate(order):
                assign[vid] = pos % p
        assigns.append(assign)
    return model_from_assignments(dataset, assigns)


def merge_parts(model: GridModel, variable: str, a: int, b: int) -> GridModel:
    """Merge two parts of one variable (adjacent, for intervals); the
    remaining parts are renumbered compactly in ascending old index."""
    k = model.var_index(variable)
    jmax = model.J(k)
    if not (0 <= a < jmax and 0 <= b < jmax):
        raise IndexError(f"part index out of range for {variable!r}")
    if a == b:
        raise ValueError("cannot merge a part with itself")
    if model.dataset.kind(k) == NUMERICAL and abs(a - b) != 1:
        raise ValueError("intervals must be adjacent to merge")
    lo, hi = min(a, b), max(a, b)
    old = model.atom_to_part[k]
    mapping = np.arange(jmax, dtype=np.int32)
    mapping[hi] = lo
    mapping[hi + 1:] -= 1
    assigns = list(model.atom_to_part)
    assigns[k] = mapping[old]
    return model_from_assignments(model.dataset, assigns)


def move_value(model: GridModel, variable: str, value_id: int,
               from_part: int, to_part: int) -> GridModel:
    """Reassign one categorical value to another group; an emptied group is
    deleted and the parts renumbered."""
    k = model.var_index(variable)
    if model.dataset.kind(k) != CATEGORICAL:
        raise ValueError(f"variable {variable!r} is not categorical")
    jmax = model.J(k)
    if not (0 <= from_part < jmax and 0 <= to_part < jmax):
        raise IndexError("part index out of range")
    if from_part == to_part:
        raise ValueError("from and to parts must differ")
    assign = model.atom_to_part[k].copy()
    if not (0 <= value_id < len(assign)) or assign[value_id] != from_part:
        raise ValueError(f"value {value_id} is not in part {from_part}")
    assign[value_id] = to_part
    if not np.any(assign == from_part):
        assign[assign > from_part] -= 1
    assigns = list(model.atom_to_part)
    assigns[k] = assign
    return model_from_assignments(model.dataset, assigns)


def move_boundary(model: GridModel, variable: str, boundary_index: int,
                  new_rank: int) -> GridModel:
    """Move the boundary between intervals ``boundary_index`` and
    ``boundary_index+1`` to ``new_rank`` (1-based first rank of the right
    interval). The new position must sit on a tie-block edge and leave both
    intervals non-empty."""
    k = model.var_index(variable)
    if model.dataset.kind(k) != NUMERICAL:
        raise ValueError(f"variable {variable!r} is not numerical")
    if not (0 <= boundary_index < model.J(k) - 1):
        raise IndexError("boundary index out of range")
    left = model.partitions[k].parts[boundary_index]
    right = model.partitions[k].parts[boundary_index + 1]
    nb = model.dataset.indexes[k].block_of_rank_edge(new_rank)
    if nb < 0:
        raise ValueError(f"rank {new_rank} splits a tie-block")
    if not (left.lo_block < nb < right.hi_block):
        raise ValueError("boundary move would empty an interval")
    assign = model.atom_to_part[k].copy()
    assign[left.lo_block:nb] = boundary_index
    assign[nb:right.hi_block] = boundary_index + 1
    assigns = list(model.atom_to_part)
    assigns[k] = assign
    return model_from_assignments(model.dataset, assigns)
