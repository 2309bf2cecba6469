"""The MAP model-selection criterion and its incremental deltas.

Everything is in natural log (nats). The total decomposes into seven terms:
three partition-prior terms, the cell-distribution prior, the per-group
value-distribution prior, and two likelihood terms (cell multinomial and
within-part arrangement). Empty cells contribute nothing (log 0! = 0).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .dataset import CATEGORICAL, NUMERICAL, Dataset

_lock = threading.Lock()

# log n! for n < len(_LF); grown geometrically, capped to bound memory.
_LF = gammaln(np.arange(1024, dtype=np.float64) + 1.0)
_LF_CAP = 1 << 22


def _ensure_lf(n: int) -> None:
    global _LF
    if n < len(_LF):
        return
    with _lock:
        if n < len(_LF):
            return
        size = len(_LF)
        while size <= n:
            size *= 2
        _LF = gammaln(np.arange(size, dtype=np.float64) + 1.0)


def log_factorial(n: int) -> float:
    """log n! in nats, via the log-gamma function (table-backed)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n < _LF_CAP:
        _ensure_lf(n)
        return float(_LF[n])
    return math.lgamma(n + 1.0)


def log_factorial_array(ns: np.ndarray) -> np.ndarray:
    ns = np.asarray(ns)
    if ns.size and int(ns.max()) < _LF_CAP:
        _ensure_lf(int(ns.max()) if ns.size else 0)
        return _LF[ns]
    return gammaln(ns.astype(np.float64) + 1.0)


def log_binomial(n: int, k: int) -> float:
    """log C(n, k); n may exceed the table range (cell-distribution prior)."""
    if k < 0 or k > n:
        raise ValueError(f"binomial out of range: C({n}, {k})")
    if n < _LF_CAP:
        return log_factorial(n) - log_factorial(k) - log_factorial(n - k)
    return (math.lgamma(n + 1.0) - math.lgamma(k + 1.0)
            - math.lgamma(n - k + 1.0))


# ---------------------------------------------------------------------------
# B(V, J): partitions of V values into at most J non-empty groups, i.e. the
# partial sum of Stirling numbers of the second kind, kept in log domain.

_log_s_rows: list[np.ndarray] = [np.array([0.0])]  # row n: log S(n, j), j=0..n
_log_b_cache: dict[tuple[int, int], float] = {}


def _ensure_stirling(v: int) -> None:
    with _lock:
        while len(_log_s_rows) <= v:
            n = len(_log_s_rows)
            prev = _log_s_rows[-1]
            row = np.full(n + 1, -np.inf)
            row[n] = 0.0  # S(n, n) = 1
            if n >= 1:
                row[1] = 0.0  # S(n, 1) = 1
            js = np.arange(2, n)
            if len(js):
                # S(n, j) = j S(n-1, j) + S(n-1, j-1)
                row[2:n] = np.logaddexp(np.log(js) + prev[2:n], prev[1:n - 1])
            _log_s_rows.append(row)


def log_B(v: int, j: int) -> float:
    """log of the number of partitions of ``v`` values into at most ``j``
    groups (j is clamped to v)."""
    if v < 1 or j < 1:
        raise ValueError("V and J must be positive")
    j = min(j, v)
    key = (v, j)
    got = _log_b_cache.get(key)
    if got is not None:
        return got
    _ensure_stirling(v)
    row = _log_s_rows[v]
    val = float(np.logaddexp.reduce(row[1:j + 1]))
    _log_b_cache[key] = val
    return val


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CostBreakdown:
    """Per-term decomposition of the criterion, all in nats."""
    prior_numerical_part_counts: float
    prior_categorical_group_counts: float
    prior_partition_choice: float
    prior_cell_distribution: float
    prior_group_value_distribution: float
    likelihood_cells: float
    likelihood_within_parts: float
    total: float

    def components(self) -> tuple[float, ...]:
        return (self.prior_numerical_part_counts,
                self.prior_categorical_group_counts,
                self.prior_partition_choice,
                self.prior_cell_distribution,
                self.prior_group_value_distribution,
                self.likelihood_cells,
                self.likelihood_within_parts)

    def as_dict(self) -> dict[str, float]:
        return {
            "prior_numerical_part_counts": self.prior_numerical_part_counts,
            "prior_categorical_group_counts": self.prior_categorical_group_counts,
            "prior_partition_choice": self.prior_partition_choice,
            "prior_cell_distribution": self.prior_cell_distribution,
            "prior_group_value_distribution": self.prior_group_value_distribution,
            "likelihood_cells": self.likelihood_cells,
            "likelihood_within_parts": self.likelihood_within_parts,
            "total": self.total,
        }


def group_value_prior_term(n_jk: int, m_jk: int) -> float:
    """log C(N_jk + m_jk - 1, m_jk - 1): distributing a group's points over
    its values."""
    return log_binomial(n_jk + m_jk - 1, m_jk - 1)


def cost(model) -> CostBreakdown:
    """Evaluate the criterion term by term on a full model."""
    ds: Dataset = model.dataset
    n = ds.n_records
    log_n = math.log(n)

    prior_num = 0.0
    prior_cat = 0.0
    prior_choice = 0.0
    prior_group_value = 0.0
    within = 0.0
    for k in range(ds.K):
        totals = model.part_totals[k]
        within += float(log_factorial_array(totals).sum())
        if ds.kind(k) == NUMERICAL:
            prior_num += log_n
        else:
            idx = ds.indexes[k]
            v = idx.n_values
            prior_cat += math.log(v)
            prior_choice += log_B(v, model.J(k))
            within -= float(log_factorial_array(idx.counts).sum())
            for j, part in enumerate(model.partitions[k].parts):
                prior_group_value += group_value_prior_term(
                    int(totals[j]), part.n_values)

    g = model.G
    prior_cells = log_binomial(n + g - 1, g - 1)

    counts = np.fromiter(model.cells.values(), dtype=np.int64,
                         count=len(model.cells))
    lk_cells = log_factorial(n) - float(log_factorial_array(counts).sum())

    total = (prior_num + prior_cat + prior_choice + prior_cells
             + prior_group_value + lk_cells + within)
    return CostBreakdown(prior_num, prior_cat, prior_choice, prior_cells,
                         prior_group_value, lk_cells, within, total)


def delta_merge(model, variable: str, a: int, b: int) -> float:
    """Cost change of merging parts a and b, computed incrementally (only
    the affected prior terms and the two parts' cell rows are touched)."""
    from .engine import engine_for
    k = model.var_index(variable)
    jmax = model.J(k)
    if not (0 <= a < jmax and 0 <= b < jmax):
        raise IndexError("part index out of range")
    if a == b:
        raise ValueError("cannot merge a part with itself")
    if model.dataset.kind(k) == NUMERICAL and abs(a - b) != 1:
        raise ValueError("intervals must be adjacent to merge")
    eng = engine_for(model)
    ida, idb = eng.part_id_at(k, a), eng.part_id_at(k, b)
    return eng.merge_delta_local(k, ida, idb) + eng.merge_delta_global(k)


def delta_move(model, variable: str, value_id: int, from_part: int,
               to_part: int) -> float:
    """Cost change of reassigning a categorical value between groups,
    computed incrementally."""
    from .engine import engine_for
    k = model.var_index(variable)
    if model.dataset.kind(k) != CATEGORICAL:
        raise ValueError(f"variable {variable!r} is not categorical")
    jmax = model.J(k)
    if not (0 <= from_part < jmax and 0 <= to_part < jmax):
        raise IndexError("part index out of range")
    if from_part == to_part:
        raise ValueError("from and to parts must differ")
    if model.part_of_value(k, value_id) != from_part:
        raise ValueError(f"value {value_id} is not in part {from_part}")
    eng = engine_for(model)
    return eng.move_delta(k, value_id, eng.part_id_at(k, from_part),
                          eng.part_id_at(k, to_part))


def delta_boundary(model, variable: str, boundary_index: int,
                   new_rank: int) -> float:
    """Cost change of a boundary move (incremental, block transfers)."""
    from .engine import engine_for
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
    eng = engine_for(model)
    ida = eng.part_id_at(k, boundary_index)
    idb = eng.part_id_at(k, boundary_index + 1)
    old = left.hi_block
    delta = 0.0
    # evaluate as a sequence of single-block transfers on a scratch engine
    if nb == old:
        return 0.0
    scratch = eng.copy() if nb < old - 1 or nb > old + 1 else eng
    if nb < old:
        for blk in range(old - 1, nb - 1, -1):
            d = scratch.move_delta(k, blk, ida, idb)
            if scratch is eng:
                return d
            delta += scratch.apply_move(k, blk, ida, idb)
    else:
        for blk in range(old, nb):
            d = scratch.move_delta(k, blk, idb, ida)
            if scratch is eng:
                return d
            delta += scratch.apply_move(k, blk, idb, ida)
    return delta
