"""Agglomerative simplification from the optimum down to the null model.

Merges are chosen over all non-frozen variables without distinction, each
step taking the merge with the least cost degradation. The hierarchy stores
merge records (not model snapshots); models at a chosen granularity are
recovered by replay. Parts carry persistent ids: the optimum's parts are
0..J*-1 per variable and every merge mints the next id, so replays and
external consumers (the result document, the viewer) can track memberships.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cost import cost
from .engine import GridEngine
from .grid import GridModel, null_model
from .optimizer import _frozen_indices, _greedy_pass


@dataclass(frozen=True)
class MergeRecord:
    step: int
    variable: str
    a: int
    b: int
    new_id: int
    delta: float
    cost_after: float
    info_ratio_after: float


@dataclass(frozen=True)
class MergeHierarchy:
    m_star: GridModel
    records: tuple[MergeRecord, ...]
    cost_opt: float
    cost_null: float
    freeze: frozenset[str] = frozenset()

    @property
    def n_steps(self) -> int:
        return len(self.records)

    def records_for(self, variable: str) -> tuple[MergeRecord, ...]:
        """The per-variable dendrogram view of the interleaved sequence."""
        return tuple(r for r in self.records if r.variable == variable)


def information_ratio(cost_m: float, cost_opt: float, cost_null: float) -> float:
    """Position of a model's cost between the null model (0) and the
    optimum (1), clamped to [0, 1]."""
    if cost_opt > cost_null:
        raise ValueError("cost_opt must not exceed cost_null")
    if cost_opt == cost_null:
        return 1.0
    r = (cost_m - cost_null) / (cost_opt - cost_null)
    return min(1.0, max(0.0, r))


def build_hierarchy(m_star: GridModel, freeze=frozenset()) -> MergeHierarchy:
    """Merge down from m_star until every non-frozen variable has one part,
    always applying the least-degrading merge (even when the cost rises)."""
    dataset = m_star.dataset
    frozen = _frozen_indices(dataset, freeze)
    cost_opt = cost(m_star).total
    cost_null = cost(null_model(dataset)).total

    engine = GridEngine(dataset, m_star.atom_to_part)
    engine.total = cost_opt  # anchor the accumulation chain
    persistent = [{j: j for j in range(m_star.J(k))} for k in range(dataset.K)]
    next_id = [m_star.J(k) for k in range(dataset.K)]
    records: list[MergeRecord] = []

    def recorder(k, ida, idb, pa, pb, delta, kept):
        lo_id, hi_id = (ida, idb) if pa < pb else (idb, ida)
        a_pers = persistent[k][lo_id]
        b_pers = persistent[k][hi_id]
        new_id = next_id[k]
        next_id[k] += 1
        persistent[k][kept] = new_id
        cost_after = engine.total
        # Reported ratios are the running minimum: a forced degrading merge
        # can expose an improving one right after (the cost dips), and the
        # information kept at a granularity must not grow while coarsening.
        ir = information_ratio(cost_after, cost_opt, cost_null)
        if records:
            ir = min(ir, records[-1].info_ratio_after)
        records.append(MergeRecord(len(records) + 1,
                                   dataset.schema.variables[k].name,
                                   a_pers, b_pers, new_id, delta, cost_after,
                                   ir))

    _greedy_pass(engine, frozen, stop_when_no_improvement=False,
                 recorder=recorder)

    if records and not freeze:
        # the end model is exactly the null model; pin the known endpoint
        last = records[-1]
        records[-1] = MergeRecord(last.step, last.variable, last.a, last.b,
                                  last.new_id, last.delta, cost_null, 0.0)
    return MergeHierarchy(m_star, tuple(records), cost_opt, cost_null,
                          frozenset(freeze))


def _steps_for_info_ratio(h: MergeHierarchy, r: float) -> int:
    if not 0.0 <= r <= 1.0:
        raise ValueError("info_ratio target must be in [0, 1]")
    for i in range(len(h.records), 0, -1):
        if h.records[i - 1].info_ratio_after >= r:
            return i
    return 0


def _steps_for_total_parts(h: MergeHierarchy, n: int) -> int:
    base = sum(h.m_star.shape)
    floor = base - len(h.records)
    if n < floor:
        raise ValueError(f"total_parts {n} unreachable (floor is {floor})")
    return max(0, base - n)


def _steps_for_per_variable(h: MergeHierarchy, targets: dict[str, int]) -> int:
    counts = {name: h.m_star.J(k)
              for k, name in enumerate(h.m_star.dataset.schema.names)}
    for name, t in targets.items():
        if name not in counts:
            raise KeyError(f"no variable named {name!r}")
        if t < 1:
            raise ValueError("part targets must be >= 1")
        if t > counts[name]:
            raise ValueError(
                f"target {t} for {name!r} above the optimum's {counts[name]}")

    def satisfied():
        return all(counts[name] <= t for name, t in targets.items())

    if satisfied():
        return 0
    for i, rec in enumerate(h.records, start=1):
        counts[rec.variable] -= 1
        if satisfied():
            return i
    raise ValueError(f"targets {targets} unreachable with this hierarchy")


def model_at(h: MergeHierarchy, *, total_parts: int | None = None,
             parts_per_variable: dict[str, int] | None = None,
             info_ratio: float | None = None) -> GridModel:
    """Replay merges from the optimum until the requested granularity: the
    coarsest model with IR >= info_ratio, or the first model at or below the
    requested part counts."""
    given = [total_parts is not None, parts_per_variable is not None,
             info_ratio is not None]
    if sum(given) != 1:
        raise ValueError("specify exactly one granularity target")
    if info_ratio is not None:
        steps = _steps_for_info_ratio(h, info_ratio)
    elif total_parts is not None:
        steps = _steps_for_total_parts(h, total_parts)
    else:
        steps = _steps_for_per_variable(h, parts_per_variable)
    return replay(h, steps)


def replay(h: MergeHierarchy, steps: int) -> GridModel:
    """Model after the first ``steps`` merge records."""
    if not 0 <= steps <= len(h.records):
        raise ValueError(f"step {steps} outside 0..{len(h.records)}")
    if steps == 0:
        return h.m_star
    dataset = h.m_star.dataset
    engine = GridEngine(dataset, h.m_star.atom_to_part)
    to_engine = [{j: j for j in range(h.m_star.J(k))}
                 for k in range(dataset.K)]
    for rec in h.records[:steps]:
        k = dataset.schema.index_of(rec.variable)
        ida = to_engine[k][rec.a]
        idb = to_engine[k][rec.b]
        _, kept = engine.apply_merge(k, ida, idb)
        to_engine[k][rec.new_id] = kept
    return engine.snapshot()


def pareto_curve(h: MergeHierarchy) -> list[tuple[int, float]]:
    """(total parts, information ratio) for the optimum and every step."""
    base = sum(h.m_star.shape)
    points = [(base, 1.0)]
    for rec in h.records:
        points.append((base - rec.step, rec.info_ratio_after))
    return points
