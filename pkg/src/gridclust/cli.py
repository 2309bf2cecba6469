"""Command-line driver: train a grid, then explore it from the result JSON.

Subcommands: train, simplify, typicality, cmi, contrast, freq,
gen-synthetic. All outputs are deterministic for a fixed seed.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import result_doc
from .dataset import CATEGORICAL, NUMERICAL, Schema, Variable, load_table, write_table
from .hierarchy import build_hierarchy
from .insights import cmi_matrix, contrast_matrix, frequency_matrix, typicality
from .optimizer import OptimizerConfig, vns_optimize
from .synthetic import PlantSpec, PlantVariable, generate


def _parse_var(text: str) -> Variable:
    try:
        name, kind = text.rsplit(":", 1)
    except ValueError:
        raise ValueError(f"--var expects name:kind, got {text!r}")
    kind = {"num": NUMERICAL, "cat": CATEGORICAL}.get(kind, kind)
    return Variable(name, kind)


def _schema_from_args(args) -> Schema:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            conf = json.load(fh)
        variables = tuple(Variable(v["name"], v["kind"])
                          for v in conf["variables"])
        return Schema(variables,
                      delimiter=conf.get("delimiter", "\t"),
                      has_header=conf.get("has_header", True))
    if not args.var:
        raise ValueError("define the schema with --var name:kind or --config")
    return Schema(tuple(_parse_var(v) for v in args.var),
                  delimiter=args.delimiter,
                  has_header=not args.no_header)


def _parse_freeze(values) -> frozenset[str]:
    names = []
    for v in values or []:
        names.extend(x for x in v.split(",") if x)
    return frozenset(names)


def _write_text(path, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_train(args) -> int:
    schema = _schema_from_args(args)
    dataset = load_table(args.table, schema)
    config = OptimizerConfig(vns_rounds=args.vns_rounds, seed=args.seed,
                             max_initial_parts=args.max_initial_parts,
                             post_opt_sweeps=args.post_opt_sweeps,
                             freeze=_parse_freeze(args.freeze))
    report = vns_optimize(dataset, config, threads=args.threads)
    hierarchy = build_hierarchy(report.best_model, freeze=config.freeze)
    doc = result_doc.build_document(dataset, report, hierarchy,
                                    embed_typicality=args.embed_typicality,
                                    embed_matrices=args.embed_matrices)
    result_doc.write_document(doc, args.out)
    shape = "x".join(str(j) for j in report.best_model.shape)
    print(f"trained grid {shape} cost={report.best_cost!r} "
          f"null={hierarchy.cost_null!r} records={len(hierarchy.records)} "
          f"out={args.out}")
    return 0


def _simplify_step(doc: dict, args) -> int:
    records = doc["hierarchy"]["records"]
    shape = doc["model"]["shape"]
    if args.info_ratio is not None:
        r = args.info_ratio
        if not 0.0 <= r <= 1.0:
            raise ValueError("--info-ratio must be in [0, 1]")
        for i in range(len(records), 0, -1):
            if records[i - 1]["info_ratio"] >= r:
                return i
        return 0
    if args.clusters is not None:
        base = sum(shape)
        floor = base - len(records)
        if args.clusters < floor:
            raise ValueError(f"--clusters {args.clusters} unreachable "
                             f"(floor is {floor})")
        return max(0, base - args.clusters)
    targets = {}
    for item in args.per_var.split(","):
        name, _, num = item.partition("=")
        if not num:
            raise ValueError(f"--per-var expects name=count, got {item!r}")
        targets[name] = int(num)
    counts = {e["variable"]: len(e["parts"])
              for e in doc["model"]["partitions"]}
    for name, t in targets.items():
        if name not in counts:
            raise KeyError(f"no variable named {name!r}")
        if t < 1 or t > counts[name]:
            raise ValueError(f"target {t} for {name!r} unreachable")
    if all(counts[n] <= t for n, t in targets.items()):
        return 0
    for i, rec in enumerate(records, start=1):
        counts[rec["variable"]] -= 1
        if all(counts[n] <= t for n, t in targets.items()):
            return i
    raise ValueError(f"targets {targets} unreachable")


def _replayed_partitions(doc: dict, step: int) -> list[dict]:
    memberships = result_doc.replay_memberships(doc, step)
    out = []
    for entry, parts in zip(doc["model"]["partitions"], memberships):
        if entry["kind"] == CATEGORICAL:
            value_count = {v["value"]: v["count"]
                           for p in entry["parts"] for v in p["values"]}
            items = []
            for j, part in enumerate(parts):
                ordered = sorted(part.values,
                                 key=lambda v: (-value_count[v], v))
                label = ";".join(ordered[:4])
                if len(ordered) > 4:
                    label += f";…(+{len(ordered) - 4})"
                items.append({"id": part.id, "index": j, "label": label,
                              "count": part.count,
                              "values": [{"value": v,
                                          "count": value_count[v]}
                                         for v in ordered]})
        else:
            lo_vals = {p["lo_rank"]: p["lo_value"] for p in entry["parts"]}
            hi_vals = {p["hi_rank"]: p["hi_value"] for p in entry["parts"]}
            items = []
            for j, part in enumerate(parts):
                lo, hi = lo_vals[part.lo_rank], hi_vals[part.hi_rank]
                items.append({"id": part.id, "index": j,
                              "label": f"[{lo:.6g}; {hi:.6g}]",
                              "count": part.count,
                              "lo_rank": part.lo_rank,
                              "hi_rank": part.hi_rank,
                              "lo_value": lo, "hi_value": hi})
        out.append({"variable": entry["variable"], "kind": entry["kind"],
                    "parts": items})
    return out


def cmd_simplify(args) -> int:
    doc = result_doc.load_document(args.result)
    step = _simplify_step(doc, args)
    partitions = _replayed_partitions(doc, step)
    ir = result_doc.info_ratio_at(doc, step)
    records = doc["hierarchy"]["records"]
    cost_at = (doc["hierarchy"]["cost_opt"] if step == 0
               else records[step - 1]["cost_after"])
    report = {
        "format_version": result_doc.FORMAT_VERSION,
        "step": step,
        "info_ratio": ir,
        "cost": cost_at,
        "shape": [len(e["parts"]) for e in partitions],
        "total_parts": sum(len(e["parts"]) for e in partitions),
        "partitions": partitions,
    }
    if args.out:
        _write_text(args.out, json.dumps(report, indent=2, sort_keys=True,
                                         ensure_ascii=False) + "\n")
    if args.pareto_out:
        lines = ["step,total_parts,info_ratio,cost"]
        base = sum(doc["model"]["shape"])
        lines.append(f"0,{base},1.0,{doc['hierarchy']['cost_opt']!r}")
        for rec in records:
            lines.append(f"{rec['step']},{base - rec['step']},"
                         f"{rec['info_ratio']!r},{rec['cost_after']!r}")
        _write_text(args.pareto_out, "\n".join(lines) + "\n")
    shape = "x".join(str(len(e["parts"])) for e in partitions)
    print(f"simplified to step={step} shape={shape} info_ratio={ir!r}")
    if not args.out:
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=True,
                                    ensure_ascii=False) + "\n")
    return 0


def _load_model(args):
    doc = result_doc.load_document(args.result)
    dataset = result_doc.dataset_from_document(doc, args.table)
    model = result_doc.model_from_document(doc, dataset, step=args.step)
    return doc, dataset, model


def cmd_typicality(args) -> int:
    _, _, model = _load_model(args)
    ranking = typicality(model, args.variable, args.cluster)
    entries = ranking.entries
    if args.top is not None:
        entries = entries[:args.top]
    lines = ["value,typicality"]
    for value, tau in entries:
        quoted = '"' + value.replace('"', '""') + '"' if "," in value else value
        lines.append(f"{quoted},{tau!r}")
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def _selection_from_args(args) -> dict[str, int]:
    selection = {}
    for item in args.select or []:
        name, _, num = item.partition("=")
        if not num:
            raise ValueError(f"--select expects name=part, got {item!r}")
        selection[name] = int(num)
    return selection


def _emit_matrix(matrix, step: int, out) -> None:
    if out:
        _write_text(out + ".csv", matrix.to_csv_text())
        _write_text(out + ".json",
                    json.dumps(matrix.as_dict() | {"step": step}, indent=2,
                               sort_keys=True, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write(matrix.to_csv_text())


def cmd_cmi(args) -> int:
    _, _, model = _load_model(args)
    m = cmi_matrix(model, args.row, args.col, _selection_from_args(args))
    _emit_matrix(m, args.step, args.out)
    return 0


def cmd_freq(args) -> int:
    _, _, model = _load_model(args)
    m = frequency_matrix(model, args.row, args.col, _selection_from_args(args))
    _emit_matrix(m, args.step, args.out)
    return 0


def cmd_contrast(args) -> int:
    _, _, model = _load_model(args)
    m = contrast_matrix(model, args.target_var, args.target_part,
                        args.row, args.col)
    _emit_matrix(m, args.step, args.out)
    return 0


def _parse_plant_var(text: str) -> PlantVariable:
    pieces = text.split(":")
    if len(pieces) not in (3, 4):
        raise ValueError(
            f"--var expects name:kind:parts[:values_per_part], got {text!r}")
    name, kind = pieces[0], pieces[1]
    kind = {"num": NUMERICAL, "cat": CATEGORICAL}.get(kind, kind)
    parts = int(pieces[2])
    vpp = int(pieces[3]) if len(pieces) == 4 else None
    if kind == CATEGORICAL and vpp is None:
        raise ValueError("categorical variables need values_per_part")
    return PlantVariable(name, kind, parts, vpp)


def cmd_gen_synthetic(args) -> int:
    variables = tuple(_parse_plant_var(v) for v in args.var)
    spec = PlantSpec(variables=variables, n_records=args.n, seed=args.seed,
                     cells=("diagonal", args.noise))
    dataset, truth = generate(spec)
    write_table(dataset, args.out)
    sidecar = {
        "n_records": args.n,
        "seed": args.seed,
        "noise": args.noise,
        "variables": [
            {"name": v.name, "kind": v.kind, "n_parts": v.n_parts,
             "values_per_part": v.values_per_part}
            for v in variables
        ],
        "assignments": {
            name: planted for name, planted in truth.assignments.items()
        },
    }
    _write_text(args.out + ".truth.json",
                json.dumps(sidecar, indent=2, sort_keys=True,
                           ensure_ascii=False) + "\n")
    print(f"wrote {dataset.n_records} records to {args.out}")
    return 0


def _add_result_table_args(p, step_help: str):
    p.add_argument("result", help="result JSON from train")
    p.add_argument("table", help="the original data table")
    p.add_argument("--step", type=int, default=0, help=step_help)
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridclust",
        description="Parameter-free data-grid coclustering")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="optimize a grid and write the result")
    p.add_argument("table")
    p.add_argument("--var", action="append", default=[],
                   help="variable as name:kind (kind: numerical|categorical)")
    p.add_argument("--config", default=None,
                   help="JSON sidecar with variables/delimiter/has_header")
    p.add_argument("--delimiter", default="\t")
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--vns-rounds", type=int, default=10)
    p.add_argument("--max-initial-parts", type=int, default=None)
    p.add_argument("--post-opt-sweeps", type=int, default=2)
    p.add_argument("--freeze", action="append", default=[],
                   help="comma-separated variables excluded from all edits")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--embed-typicality", action="store_true")
    p.add_argument("--embed-matrices", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("simplify", help="replay the hierarchy to a granularity")
    p.add_argument("result")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--clusters", type=int, default=None,
                       help="total part count across variables")
    group.add_argument("--per-var", default=None,
                       help="per-variable targets name=count,...")
    group.add_argument("--info-ratio", type=float, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--pareto-out", default=None)
    p.set_defaults(func=cmd_simplify)

    p = sub.add_parser("typicality", help="rank a cluster's values")
    _add_result_table_args(p, "hierarchy step to replay first")
    p.add_argument("--variable", required=True)
    p.add_argument("--cluster", type=int, required=True)
    p.add_argument("--top", type=int, default=None)
    p.set_defaults(func=cmd_typicality)

    for name, func, extra in (("cmi", cmd_cmi, True), ("freq", cmd_freq, True),
                              ("contrast", cmd_contrast, False)):
        p = sub.add_parser(name, help=f"{name} matrix as CSV + JSON")
        _add_result_table_args(p, "hierarchy step to replay first")
        p.add_argument("--row", required=True)
        p.add_argument("--col", required=True)
        if extra:
            p.add_argument("--select", action="append", default=[],
                           help="fixed part per other variable: name=part")
        else:
            p.add_argument("--target-var", required=True)
            p.add_argument("--target-part", type=int, required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("gen-synthetic", help="planted dataset + ground truth")
    p.add_argument("--var", action="append", required=True,
                   help="name:kind:parts[:values_per_part]")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_synthetic)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 1
    except (OSError, ValueError, KeyError, IndexError) as exc:
        print(f"gridclust: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
