"""Exploitation diagnostics: typicality rankings, contribution-to-mutual-
information matrices and contrast matrices over a grid model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import CATEGORICAL
from .engine import engine_for
from .grid import GridModel

FREQUENCY = "frequency"
CMI = "cmi"
CONTRAST = "contrast"


@dataclass(frozen=True)
class TypicalityRanking:
    variable: str
    cluster: int
    #: (value text, tau), descending tau, ties by value text
    entries: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class InsightMatrix:
    kind: str
    row_variable: str
    col_variable: str
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    values: np.ndarray
    total: float
    selection: tuple[tuple[str, int], ...] = ()
    target: tuple[str, int] | None = None

    def to_csv_text(self) -> str:
        lines = [",".join([""] + [_csv_quote(c) for c in self.col_labels])]
        for label, row in zip(self.row_labels, self.values):
            cells = [_csv_quote(label)]
            for x in row:
                cells.append(str(int(x)) if self.kind == FREQUENCY
                             else repr(float(x)))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def as_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "row_variable": self.row_variable,
            "col_variable": self.col_variable,
            "row_labels": list(self.row_labels),
            "col_labels": list(self.col_labels),
            "values": [[int(x) if self.kind == FREQUENCY else float(x)
                        for x in row] for row in self.values],
            "total": float(self.total),
        }
        if self.selection:
            d["selection"] = {name: part for name, part in self.selection}
        if self.target is not None:
            d["target"] = {"variable": self.target[0], "part": self.target[1]}
        return d


def _csv_quote(s: str) -> str:
    if any(c in s for c in ",\"\n"):
        return '"' + s.replace('"', '""') + '"'
    return s


def typicality(model: GridModel, variable: str, cluster: int) -> TypicalityRanking:
    """Rank a cluster's values by the average cost impact of reassigning
    each one to the other clusters, weighted by the clusters' empirical
    probabilities."""
    k = model.var_index(variable)
    if model.dataset.kind(k) != CATEGORICAL:
        raise ValueError(f"variable {variable!r} is not categorical")
    j = model.J(k)
    if j < 2:
        raise ValueError("typicality needs at least two clusters")
    if not 0 <= cluster < j:
        raise IndexError("cluster index out of range")
    eng = engine_for(model)
    n = model.dataset.n_records
    totals = model.part_totals[k]
    weights = totals / float(n)
    norm = 1.0 / (1.0 - float(weights[cluster]))
    idx = model.dataset.indexes[k]

    entries = []
    for value_id in model.partitions[k].parts[cluster].value_ids:
        prof = eng.atom_profile(k, value_id)
        s = 0.0
        for other in range(j):
            if other == cluster:
                continue
            d = eng.move_delta(k, value_id, cluster, other, prof=prof)
            s += float(weights[other]) * d
        entries.append((idx.values[value_id], norm * s))
    entries.sort(key=lambda e: (-e[1], e[0]))
    return TypicalityRanking(variable, cluster, tuple(entries))


def _slice_counts(model: GridModel, row_var: str, col_var: str,
                  selection: dict[str, int] | None) -> tuple[np.ndarray, int, int, tuple]:
    kr = model.var_index(row_var)
    kc = model.var_index(col_var)
    if kr == kc:
        raise ValueError("row and column variables must differ")
    selection = dict(selection or {})
    others = [k for k in range(model.K) if k not in (kr, kc)]
    names = model.dataset.schema.names
    expected = {names[k] for k in others}
    if set(selection) != expected:
        raise ValueError(
            f"selection must fix exactly the other variables {sorted(expected)}")
    fixed = {}
    for name, part in selection.items():
        k = model.var_index(name)
        if not 0 <= part < model.J(k):
            raise IndexError(f"part {part} out of range for {name!r}")
        fixed[k] = part
    counts = np.zeros((model.J(kr), model.J(kc)), dtype=np.int64)
    for key, c in model.cells.items():
        if all(key[k] == p for k, p in fixed.items()):
            counts[key[kr], key[kc]] += c
    sel = tuple(sorted(selection.items()))
    return counts, kr, kc, sel


def _labels(model: GridModel, k: int) -> tuple[str, ...]:
    return tuple(model.part_label(k, j) for j in range(model.J(k)))


def frequency_matrix(model: GridModel, row_var: str, col_var: str,
                     selection: dict[str, int] | None = None) -> InsightMatrix:
    """Slice counts of two partitioned variables, the other variables fixed
    to the selected parts."""
    counts, kr, kc, sel = _slice_counts(model, row_var, col_var, selection)
    total = int(counts.sum())
    if total == 0:
        raise ValueError("selected slice is empty")
    return InsightMatrix(FREQUENCY, row_var, col_var, _labels(model, kr),
                         _labels(model, kc), counts, float(total), sel)


def cmi_matrix(model: GridModel, row_var: str, col_var: str,
               selection: dict[str, int] | None = None) -> InsightMatrix:
    """Per-cell signed contributions to the mutual information of the two
    variables within the selected slice; 0 log 0 = 0. Positive entries are
    interaction excesses, negative ones deficits."""
    counts, kr, kc, sel = _slice_counts(model, row_var, col_var, selection)
    total = int(counts.sum())
    if total == 0:
        raise ValueError("selected slice is empty")
    p = counts / float(total)
    pr = p.sum(axis=1)
    pc = p.sum(axis=0)
    values = np.zeros_like(p)
    nz = p > 0
    denom = np.outer(pr, pc)
    values[nz] = p[nz] * np.log(p[nz] / denom[nz])
    return InsightMatrix(CMI, row_var, col_var, _labels(model, kr),
                         _labels(model, kc), values, float(values.sum()), sel)


def contrast_matrix(model: GridModel, target_var: str, target_part: int,
                    row_var: str, col_var: str) -> InsightMatrix:
    """How one target part's joint distribution over two other variables
    deviates from the global one; probabilities are over the full dataset
    and any remaining variables are marginalized out."""
    ks = model.var_index(target_var)
    kr = model.var_index(row_var)
    kc = model.var_index(col_var)
    if len({ks, kr, kc}) != 3:
        raise ValueError("target, row and column variables must be distinct")
    if not 0 <= target_part < model.J(ks):
        raise IndexError(f"part {target_part} out of range for {target_var!r}")
    n = model.dataset.n_records
    joint3 = np.zeros((model.J(ks), model.J(kr), model.J(kc)), dtype=np.int64)
    for key, c in model.cells.items():
        joint3[key[ks], key[kr], key[kc]] += c
    p3 = joint3 / float(n)
    p_rc = p3.sum(axis=0)
    p_s = float(model.part_totals[ks][target_part]) / float(n)
    sl = p3[target_part]
    values = np.zeros_like(sl)
    nz = sl > 0
    values[nz] = sl[nz] * np.log(sl[nz] / (p_rc[nz] * p_s))
    return InsightMatrix(CONTRAST, row_var, col_var, _labels(model, kr),
                         _labels(model, kc), values, float(values.sum()),
                         target=(target_var, target_part))
