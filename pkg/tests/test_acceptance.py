"""Acceptance suite: one test per criterion, one printed pass/fail line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines live.
"""

import math
import time

import numpy as np
from sklearn.metrics import mutual_info_score

import gridclust as gc
from gridclust.cli import main as cli_main
from gridclust.hierarchy import replay
from conftest import legal_merges, legal_moves, model_ari, planted_2d, random_dataset


def _report(num: int, ok: bool, detail: str) -> None:
    print(f"criterion {num:>2}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


def test_criterion_01_cost_oracle(toy_cat2):
    t0 = time.perf_counter()
    total = gc.cost(gc.null_model(toy_cat2)).total
    expected = 4 * math.log(2) + 2 * math.log(3)
    elapsed = time.perf_counter() - t0
    err = abs(total - expected)
    _report(1, err <= 1e-9 and elapsed < 1.0,
            f"cost(M_null)={total:.12f} vs {expected:.12f} "
            f"(err {err:.2e}, {elapsed:.3f}s)")


def test_criterion_02_exhaustive_delta_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    datasets = 0
    checks = 0
    while datasets < 100:
        ds = random_dataset(rng, n_max=8, v_max=3)
        datasets += 1
        model = gc.initial_model(ds, int(rng.integers(1, 4)))
        base = gc.cost(model).total
        for name, a, b in legal_merges(model):
            inc = gc.delta_merge(model, name, a, b)
            full = gc.cost(gc.merge_parts(model, name, a, b)).total - base
            worst = max(worst, abs(inc - full))
            checks += 1
        for name, vid, fr, to in legal_moves(model):
            inc = gc.delta_move(model, name, vid, fr, to)
            full = gc.cost(gc.move_value(model, name, vid, fr, to)).total - base
            worst = max(worst, abs(inc - full))
            checks += 1
    elapsed = time.perf_counter() - t0
    _report(2, worst <= 1e-9 and elapsed < 60.0,
            f"{checks} deltas on {datasets} datasets, worst err {worst:.2e}, "
            f"{elapsed:.1f}s")


def test_criterion_03_planted_recovery():
    t0 = time.perf_counter()
    ds, truth = planted_2d(n=5000, seed=42, eps=0.05)
    m = gc.vns_optimize(ds, gc.OptimizerConfig(seed=1)).best_model
    ari2 = [model_ari(m, ds, truth, v) for v in ("row", "col")]
    t2d = time.perf_counter() - t0

    t0 = time.perf_counter()
    spec3 = gc.PlantSpec(
        variables=(gc.PlantVariable("a", "categorical", 2, 4),
                   gc.PlantVariable("b", "categorical", 2, 4),
                   gc.PlantVariable("c", "categorical", 2, 4)),
        n_records=20000, seed=7, cells=("diagonal", 0.05))
    ds3, truth3 = gc.generate(spec3)
    m3 = gc.vns_optimize(ds3, gc.OptimizerConfig(seed=3)).best_model
    ari3 = [model_ari(m3, ds3, truth3, v) for v in ("a", "b", "c")]
    t3d = time.perf_counter() - t0

    ok = (all(a == 1.0 for a in ari2) and all(a >= 0.95 for a in ari3)
          and t2d < 120.0 and t3d < 120.0)
    _report(3, ok, f"2D ARI={ari2} ({t2d:.1f}s); 3D ARI="
            f"{[round(a, 3) for a in ari3]} ({t3d:.1f}s)")


def test_criterion_04_regularization_on_noise():
    hits = 0
    for s in range(5):
        rng = np.random.default_rng(1000 + s)
        rows = [["a%d" % rng.integers(0, 10), "b%d" % rng.integers(0, 10)]
                for _ in range(1000)]
        schema = gc.Schema((gc.Variable("x", "categorical"),
                            gc.Variable("y", "categorical")))
        ds = gc.from_rows(rows, schema)
        rep = gc.vns_optimize(ds, gc.OptimizerConfig(seed=s))
        if rep.best_model.shape == (1, 1):
            hits += 1
    _report(4, hits >= 4, f"null model returned in {hits}/5 noise runs")


def test_criterion_05_hierarchy_properties():
    ds, truth = planted_2d(n=4000, seed=19, eps=0.05)
    m = gc.vns_optimize(ds, gc.OptimizerConfig(seed=2)).best_model
    h = gc.build_hierarchy(m)
    count_ok = len(h.records) == sum(m.shape) - m.K
    irs = [r.info_ratio_after for r in h.records]
    curve = gc.pareto_curve(h)
    endpoints_ok = curve[0][1] == 1.0 and irs[-1] == 0.0
    monotone_ok = all(irs[i] >= irs[i + 1] for i in range(len(irs) - 1))
    min_ok = True
    current = m
    for rec in h.records:
        deltas = [gc.delta_merge(current, name, a, b)
                  for name, a, b in legal_merges(current)]
        if rec.delta > min(deltas) + 1e-9:
            min_ok = False
            break
        current = replay(h, rec.step)
    replay_err = abs(gc.cost(replay(h, len(h.records))).total - h.cost_null)
    ok = (count_ok and endpoints_ok and monotone_ok and min_ok
          and replay_err <= 1e-9)
    _report(5, ok, f"records={len(h.records)}, IR endpoints "
            f"({curve[0][1]}, {irs[-1]}), monotone={monotone_ok}, "
            f"min-delta={min_ok}, replay err {replay_err:.2e}")


def test_criterion_06_cmi():
    schema = gc.Schema((gc.Variable("y", "categorical"),
                        gc.Variable("x", "categorical")))
    indep = gc.from_rows([["a", "x"], ["a", "y"], ["b", "x"], ["b", "y"]],
                         schema)
    m_ind = gc.model_from_assignments(indep, [np.array([0, 1]),
                                              np.array([0, 1])])
    zeros_ok = np.all(gc.cmi_matrix(m_ind, "y", "x").values == 0.0)

    diag = gc.from_rows([["a", "x"], ["a", "x"], ["b", "y"], ["b", "y"]],
                        schema)
    m_diag = gc.model_from_assignments(diag, [np.array([0, 1]),
                                              np.array([0, 1])])
    total = gc.cmi_matrix(m_diag, "y", "x").total
    log2_ok = abs(total - math.log(2)) <= 1e-12

    rng = np.random.default_rng(6)
    oracle_ok = True
    nonneg_ok = True
    for _ in range(20):
        rows = [["a%d" % rng.integers(0, 4), "b%d" % rng.integers(0, 3)]
                for _ in range(150)]
        ds = gc.from_rows(rows, schema)
        model = gc.initial_model(ds, 3)
        got = gc.cmi_matrix(model, "y", "x")
        counts = gc.frequency_matrix(model, "y", "x").values
        plugin = mutual_info_score(None, None, contingency=counts)
        oracle_ok &= abs(got.total - plugin) <= 1e-9
        nonneg_ok &= got.total >= -1e-12
    ok = zeros_ok and log2_ok and oracle_ok and nonneg_ok
    _report(6, ok, f"independence zeros={zeros_ok}, diagonal total="
            f"{total:.12f}, plugin oracle={oracle_ok}, total>=-1e-12="
            f"{nonneg_ok}")


def test_criterion_07_contrast():
    spec1 = gc.PlantSpec(
        variables=(gc.PlantVariable("s", "categorical", 1, 3),
                   gc.PlantVariable("r", "categorical", 2, 2),
                   gc.PlantVariable("c", "categorical", 2, 2)),
        n_records=200, seed=4, cells=np.full((1, 2, 2), 0.25))
    ds1, truth1 = gc.generate(spec1)
    single_ok = np.all(gc.contrast_matrix(gc.planted_model(ds1, truth1),
                                          "s", 0, "r", "c").values == 0.0)

    spec2 = gc.PlantSpec(
        variables=(gc.PlantVariable("s", "categorical", 2, 2),
                   gc.PlantVariable("r", "categorical", 2, 2),
                   gc.PlantVariable("c", "categorical", 2, 2)),
        n_records=500, seed=5,
        cells=np.array([[[0.3, 0.05], [0.05, 0.1]],
                        [[0.05, 0.2], [0.15, 0.1]]]))
    ds2, truth2 = gc.generate(spec2)
    m2 = gc.planted_model(ds2, truth2)
    lab = {v: truth2.record_labels(ds2, v) for v in ("s", "r", "c")}
    cnt = np.zeros((2, 2, 2))
    np.add.at(cnt, (lab["s"], lab["r"], lab["c"]), 1)
    p3 = cnt / ds2.n_records
    p_rc = p3.sum(axis=0)
    worst = 0.0
    for s_part in range(2):
        p_s = p3[s_part].sum()
        oracle = np.where(
            p3[s_part] > 0,
            p3[s_part] * np.log(np.maximum(p3[s_part], 1e-300)
                                / (p_rc * p_s)), 0.0)
        got = gc.contrast_matrix(m2, "s", s_part, "r", "c").values
        worst = max(worst, float(np.abs(got - oracle).max()))
    _report(7, single_ok and worst <= 1e-12,
            f"single-part zeros={single_ok}, brute-force worst err "
            f"{worst:.2e}")


def test_criterion_08_typicality():
    p1 = [0.7, 0.2, 0.1]
    p2 = [0.05, 0.25, 0.7]
    rows = []

    def add(name, n, cond):
        for x, w in enumerate(cond):
            rows.extend([[name, f"x{x}"]] * int(round(n * w)))

    for i in range(3):
        add(f"v{i}", 400, p1)
    add("vf", 400, p2)
    for i in range(4):
        add(f"w{i}", 400, p2)
    schema = gc.Schema((gc.Variable("y", "categorical"),
                        gc.Variable("x", "categorical")))
    ds = gc.from_rows(rows, schema)
    assign = ({f"v{i}": 0 for i in range(3)} | {"vf": 0}
              | {f"w{i}": 1 for i in range(4)})
    truth = gc.GroundTruth({"y": assign,
                            "x": {f"x{i}": i for i in range(3)}})
    m = gc.planted_model(ds, truth)
    k = m.var_index("y")
    n = ds.n_records
    base = gc.cost(m).total
    ranking = gc.typicality(m, "y", 0)
    taus = dict(ranking.entries)

    reduction_err = 0.0
    oracle_err = 0.0
    for value, tau in ranking.entries:
        vid = ds.indexes[k].id_of[value]
        reduction_err = max(reduction_err,
                            abs(tau - gc.delta_move(m, "y", vid, 0, 1)))
        s = 0.0
        for cj in range(m.J(k)):
            if cj == 0:
                continue
            w = float(m.part_totals[k][cj]) / n
            s += w * (gc.cost(gc.move_value(m, "y", vid, 0, cj)).total - base)
        oracle = s / (1.0 - float(m.part_totals[k][0]) / n)
        oracle_err = max(oracle_err, abs(tau - oracle))
    order_ok = all(taus[f"v{i}"] > taus["vf"] for i in range(3))
    ok = reduction_err <= 1e-9 and oracle_err <= 1e-9 and order_ok
    _report(8, ok, f"J=2 reduction err {reduction_err:.2e}, oracle err "
            f"{oracle_err:.2e}, native>foreign={order_ok}")


def test_criterion_09_delta_jsd_asymptotics():
    p1 = np.array([0.7, 0.2, 0.1])
    p2 = np.array([0.1, 0.3, 0.6])
    pi1 = 0.4
    tensor = np.stack([pi1 * p1, (1 - pi1) * p2])
    spec = gc.PlantSpec(
        variables=(gc.PlantVariable("y", "categorical", 2, 5),
                   gc.PlantVariable("x", "categorical", 3, 1)),
        n_records=100_000, seed=13, cells=tensor)
    ds, truth = gc.generate(spec)
    m = gc.planted_model(ds, truth)
    d = gc.delta_merge(m, "y", 0, 1)

    def entropy(p):
        p = p[p > 0]
        return float(-(p * np.log(p)).sum())

    jsd = (entropy(pi1 * p1 + (1 - pi1) * p2)
           - pi1 * entropy(p1) - (1 - pi1) * entropy(p2))
    rel = abs(d / ds.n_records - jsd) / jsd
    _report(9, rel <= 0.15,
            f"delta/N={d / ds.n_records:.6f} vs JSD={jsd:.6f} "
            f"(rel err {rel:.4f})")


def _train_args(table, out, seed="5"):
    return ["train", str(table), "--var", "row:categorical",
            "--var", "col:categorical", "--seed", seed,
            "--vns-rounds", "6", "--out", str(out),
            "--embed-matrices", "--embed-typicality"]


def test_criterion_10_determinism_and_scaling(tmp_path):
    # byte-identical reruns of the full CLI pipeline
    ds, _ = planted_2d(n=1200, seed=21, eps=0.05, vpp=3)
    table = tmp_path / "toy.tsv"
    gc.write_table(ds, table)
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert cli_main(_train_args(table, out1)) == 0
    assert cli_main(_train_args(table, out2)) == 0
    identical = out1.read_bytes() == out2.read_bytes()

    # scaling on one planted family: categorical x numerical
    def run(n):
        spec = gc.PlantSpec(
            variables=(gc.PlantVariable("cat", "categorical", 3, 10),
                       gc.PlantVariable("num", "numerical", 3)),
            n_records=n, seed=11, cells=("diagonal", 0.05))
        dsn, _ = gc.generate(spec)
        t0 = time.perf_counter()
        rep = gc.vns_optimize(dsn, gc.OptimizerConfig(seed=9, vns_rounds=2))
        gc.build_hierarchy(rep.best_model)
        return time.perf_counter() - t0

    t_small = run(50_000)
    t_big = run(200_000)
    ratio = t_big / t_small
    ok = identical and ratio <= 16.0
    _report(10, ok, f"byte-identical={identical}; wall 5e4={t_small:.2f}s, "
            f"2e5={t_big:.2f}s, ratio {ratio:.1f} (<=16)")
