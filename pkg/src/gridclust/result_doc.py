"""The coclustering result artifact: a self-contained JSON document.

The document carries the dataset summary, the optimal model (partitions with
human-readable labels plus the sparse cell counts), the cost breakdown, the
merge hierarchy, and the optimizer report. Merge records reference parts by
persistent ids (the optimum's parts are 0..J*-1 per variable; each merge
mints the next id), so any consumer can replay granularities without the
original table. Matrix subcommands additionally need the table.

Serialization is canonical: sorted keys, two-space indent, repr floats, one
trailing newline; reruns with the same seed are byte-identical.
"""

from __future__ import annotations

import json

import numpy as np

from .dataset import CATEGORICAL, Dataset, Schema, Variable, load_table
from .cost import cost
from .grid import GridModel, model_from_assignments
from .hierarchy import MergeHierarchy
from .insights import InsightMatrix, cmi_matrix, contrast_matrix, frequency_matrix, typicality
from .optimizer import OptimizationReport

FORMAT_VERSION = 1


def _partitions_section(model: GridModel) -> list[dict]:
    ds = model.dataset
    out = []
    for k in range(ds.K):
        part = model.partitions[k]
        kind = ds.kind(k)
        entry = {"variable": part.variable, "kind": kind, "parts": []}
        for j, p in enumerate(part.parts):
            item = {
                "id": j,
                "label": model.part_label(k, j),
                "count": int(model.part_totals[k][j]),
            }
            if kind == CATEGORICAL:
                idx = ds.indexes[k]
                item["values"] = [
                    {"value": idx.values[v], "count": int(idx.counts[v])}
                    for v in p.value_ids
                ]
            else:
                lo, hi = model.interval_raw_bounds(k, j)
                item.update(lo_rank=p.lo_rank, hi_rank=p.hi_rank,
                            lo_value=lo, hi_value=hi)
            entry["parts"].append(item)
        out.append(entry)
    return out


def build_document(dataset: Dataset, report: OptimizationReport,
                   hierarchy: MergeHierarchy,
                   embed_typicality: bool = False,
                   embed_matrices: bool = False) -> dict:
    model = report.best_model
    schema = dataset.schema
    breakdown = cost(model)
    doc = {
        "format_version": FORMAT_VERSION,
        "schema": {
            "variables": [{"name": v.name, "kind": v.kind}
                          for v in schema.variables],
            "delimiter": schema.delimiter,
            "has_header": schema.has_header,
        },
        "dataset": {
            "n_records": dataset.n_records,
            "n_dropped": dataset.n_dropped,
            "source": dataset.source,
            "variables": [
                {"name": v.name, "kind": v.kind,
                 "distinct": dataset.n_atoms(k)}
                for k, v in enumerate(schema.variables)
            ],
        },
        "model": {
            "shape": list(model.shape),
            "partitions": _partitions_section(model),
            "cells": [list(key) + [c] for key, c in sorted(model.cells.items())],
        },
        "cost": breakdown.as_dict() | {"cost_null": hierarchy.cost_null},
        "hierarchy": {
            "cost_opt": hierarchy.cost_opt,
            "cost_null": hierarchy.cost_null,
            "freeze": sorted(hierarchy.freeze),
            "records": [
                {"step": r.step, "variable": r.variable, "a": r.a, "b": r.b,
                 "new_id": r.new_id, "delta": r.delta,
                 "cost_after": r.cost_after,
                 "info_ratio": r.info_ratio_after}
                for r in hierarchy.records
            ],
        },
        "optimizer": {
            "config": {
                "seed": report.config.seed,
                "vns_rounds": report.config.vns_rounds,
                "max_initial_parts": report.config.max_initial_parts,
                "post_opt_sweeps": report.config.post_opt_sweeps,
                "freeze": sorted(report.config.freeze),
            },
            "best_round": report.best_round,
            "rounds": [
                {"round": r.round, "seed": r.seed,
                 "initial_cost": r.initial_cost, "final_cost": r.final_cost,
                 "merges": r.merges}
                for r in report.rounds
            ],
        },
    }
    if embed_typicality:
        section: dict[str, dict] = {}
        for k, v in enumerate(schema.variables):
            if v.kind != CATEGORICAL or model.J(k) < 2:
                continue
            section[v.name] = {
                str(j): [[val, tau] for val, tau in
                         typicality(model, v.name, j).entries]
                for j in range(model.J(k))
            }
        doc["typicality"] = section
    if embed_matrices:
        doc["matrices"] = [m.as_dict() | {"step": 0}
                           for m in default_matrices(model)]
    return doc


def default_matrices(model: GridModel) -> list[InsightMatrix]:
    """Frequency for every pair; CMI when K=2 (no selection needed);
    contrast for K=3 over each target part."""
    names = model.dataset.schema.names
    out = []
    for i in range(model.K):
        for j in range(i + 1, model.K):
            if model.K == 2:
                out.append(frequency_matrix(model, names[i], names[j]))
                out.append(cmi_matrix(model, names[i], names[j]))
    if model.K == 3:
        for ks in range(3):
            kr, kc = [k for k in range(3) if k != ks]
            for part in range(model.J(ks)):
                out.append(contrast_matrix(model, names[ks], part, names[kr],
                                           names[kc]))
    return out


def dumps_document(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_document(doc: dict, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps_document(doc))


def load_document(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported result format_version {version!r}")
    return doc


def schema_from_document(doc: dict) -> Schema:
    s = doc["schema"]
    return Schema(tuple(Variable(v["name"], v["kind"])
                        for v in s["variables"]),
                  delimiter=s["delimiter"], has_header=s["has_header"])


def dataset_from_document(doc: dict, table_path) -> Dataset:
    dataset = load_table(table_path, schema_from_document(doc))
    if dataset.n_records != doc["dataset"]["n_records"]:
        raise ValueError(
            f"table has {dataset.n_records} usable rows, result expects "
            f"{doc['dataset']['n_records']}")
    return dataset


class ReplayedPart:
    """One part during a document-level hierarchy replay."""

    def __init__(self, pid: int, values: list[str] | None,
                 lo_rank: int | None, hi_rank: int | None, count: int):
        self.id = pid
        self.values = values
        self.lo_rank = lo_rank
        self.hi_rank = hi_rank
        self.count = count


def replay_memberships(doc: dict, step: int) -> list[list[ReplayedPart]]:
    """Part memberships per variable after the first ``step`` merges, in the
    same order model_at produces (a merged part takes the lower position)."""
    records = doc["hierarchy"]["records"]
    if not 0 <= step <= len(records):
        raise ValueError(f"step {step} outside 0..{len(records)}")
    state: dict[str, list[ReplayedPart]] = {}
    for entry in doc["model"]["partitions"]:
        parts = []
        for p in entry["parts"]:
            if entry["kind"] == CATEGORICAL:
                parts.append(ReplayedPart(
                    p["id"], [v["value"] for v in p["values"]],
                    None, None, p["count"]))
            else:
                parts.append(ReplayedPart(p["id"], None, p["lo_rank"],
                                          p["hi_rank"], p["count"]))
        state[entry["variable"]] = parts
    for rec in records[:step]:
        parts = state[rec["variable"]]
        pa = next(i for i, p in enumerate(parts) if p.id == rec["a"])
        pb = next(i for i, p in enumerate(parts) if p.id == rec["b"])
        if pa > pb:
            pa, pb = pb, pa
        a, b = parts[pa], parts[pb]
        merged = ReplayedPart(
            rec["new_id"],
            None if a.values is None else a.values + b.values,
            None if a.lo_rank is None else min(a.lo_rank, b.lo_rank),
            None if a.hi_rank is None else max(a.hi_rank, b.hi_rank),
            a.count + b.count)
        parts[pa] = merged
        del parts[pb]
    return [state[entry["variable"]] for entry in doc["model"]["partitions"]]


def model_from_document(doc: dict, dataset: Dataset, step: int = 0) -> GridModel:
    """Reconstruct the grid model at a hierarchy step against a reloaded
    dataset."""
    memberships = replay_memberships(doc, step)
    assigns = []
    for k, parts in enumerate(memberships):
        idx = dataset.indexes[k]
        assign = np.full(dataset.n_atoms(k), -1, dtype=np.int32)
        for j, part in enumerate(parts):
            if part.values is not None:
                for val in part.values:
                    vid = idx.id_of.get(val)
                    if vid is None:
                        raise ValueError(
                            f"value {val!r} from the result is absent from "
                            f"the table")
                    assign[vid] = j
            else:
                lo = idx.block_of_rank_edge(part.lo_rank)
                hi = idx.block_of_rank_edge(part.hi_rank)
                if lo < 0 or hi < 0:
                    raise ValueError("interval bounds do not match the table")
                assign[lo:hi] = j
        if np.any(assign < 0):
            raise ValueError("result partitions do not cover the table")
        assigns.append(assign)
    return model_from_assignments(dataset, assigns)


def info_ratio_at(doc: dict, step: int) -> float:
    if step == 0:
        return 1.0
    return float(doc["hierarchy"]["records"][step - 1]["info_ratio"])
