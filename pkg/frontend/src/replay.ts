import type { PartitionInfo, ResultDocument } from "./types.js";

/** One part during client-side hierarchy replay. `baseIds` are the optimum's
 * part ids merged into it, which is all the cell aggregation needs. */
export interface ReplayedPart {
  id: number;
  count: number;
  baseIds: number[];
  values: string[] | null;
  loRank: number | null;
  hiRank: number | null;
}

export type Memberships = Map<string, ReplayedPart[]>;

function initialParts(partition: PartitionInfo): ReplayedPart[] {
  return partition.parts.map((p) => ({
    id: p.id,
    count: p.count,
    baseIds: [p.id],
    values: p.values ? p.values.map((v) => v.value) : null,
    loRank: p.lo_rank ?? null,
    hiRank: p.hi_rank ?? null,
  }));
}

/** Memberships after the first `step` merge records; a merged part takes the
 * lower of its constituents' positions, matching the CLI exactly. */
export function replayMemberships(doc: ResultDocument, step: number): Memberships {
  const records = doc.hierarchy.records;
  if (step < 0 || step > records.length) {
    throw new Error(`step ${step} outside 0..${records.length}`);
  }
  const state: Memberships = new Map(
    doc.model.partitions.map((p) => [p.variable, initialParts(p)]),
  );
  for (const rec of records.slice(0, step)) {
    const parts = state.get(rec.variable);
    if (!parts) throw new Error(`unknown variable ${rec.variable} in record`);
    let pa = parts.findIndex((p) => p.id === rec.a);
    let pb = parts.findIndex((p) => p.id === rec.b);
    if (pa < 0 || pb < 0) {
      throw new Error(`record ${rec.step} references missing parts`);
    }
    if (pa > pb) [pa, pb] = [pb, pa];
    const a = parts[pa];
    const b = parts[pb];
    parts[pa] = {
      id: rec.new_id,
      count: a.count + b.count,
      baseIds: a.baseIds.concat(b.baseIds),
      values: a.values === null ? null : a.values.concat(b.values ?? []),
      loRank: a.loRank === null ? null : Math.min(a.loRank, b.loRank ?? Infinity),
      hiRank: a.hiRank === null ? null : Math.max(a.hiRank, b.hiRank ?? -Infinity),
    };
    parts.splice(pb, 1);
  }
  return state;
}

/** Map from an optimum part id to its current position, per variable. */
export function baseIndexMaps(memberships: Memberships): Map<string, Map<number, number>> {
  const out = new Map<string, Map<number, number>>();
  for (const [variable, parts] of memberships) {
    const m = new Map<number, number>();
    parts.forEach((part, pos) => part.baseIds.forEach((b) => m.set(b, pos)));
    out.set(variable, m);
  }
  return out;
}

/** Frequency matrix of two variables at a replayed granularity, aggregated
 * from the document's sparse base cells (counting only; other variables are
 * marginalized by summation). */
export function aggregateFrequency(
  doc: ResultDocument,
  memberships: Memberships,
  rowVar: string,
  colVar: string,
): number[][] {
  if (rowVar === colVar) throw new Error("row and column variables must differ");
  const names = doc.schema.variables.map((v) => v.name);
  const kr = names.indexOf(rowVar);
  const kc = names.indexOf(colVar);
  if (kr < 0 || kc < 0) throw new Error("unknown variable");
  const maps = baseIndexMaps(memberships);
  const rowMap = maps.get(rowVar)!;
  const colMap = maps.get(colVar)!;
  const nr = memberships.get(rowVar)!.length;
  const nc = memberships.get(colVar)!.length;
  const out: number[][] = Array.from({ length: nr }, () => Array(nc).fill(0));
  for (const cell of doc.model.cells) {
    const count = cell[cell.length - 1];
    out[rowMap.get(cell[kr])!][colMap.get(cell[kc])!] += count;
  }
  return out;
}

export function infoRatioAt(doc: ResultDocument, step: number): number {
  if (step === 0) return 1.0;
  return doc.hierarchy.records[step - 1].info_ratio;
}

/** The coarsest step whose information ratio still meets the target; the
 * same rule the CLI's simplify uses. */
export function stepForInfoRatio(doc: ResultDocument, ratio: number): number {
  const records = doc.hierarchy.records;
  for (let i = records.length; i >= 1; i--) {
    if (records[i - 1].info_ratio >= ratio) return i;
  }
  return 0;
}

export function paretoPoints(doc: ResultDocument): [number, number][] {
  const base = doc.model.shape.reduce((a, b) => a + b, 0);
  const points: [number, number][] = [[base, 1.0]];
  for (const rec of doc.hierarchy.records) {
    points.push([base - rec.step, rec.info_ratio]);
  }
  return points;
}

/** Display label for a replayed part, mirroring the CLI's labeling. */
export function partLabel(
  doc: ResultDocument,
  variable: string,
  part: ReplayedPart,
  maxValues = 4,
): string {
  const partition = doc.model.partitions.find((p) => p.variable === variable);
  if (!partition) throw new Error(`unknown variable ${variable}`);
  if (part.values !== null) {
    const counts = new Map<string, number>();
    for (const p of partition.parts) {
      for (const v of p.values ?? []) counts.set(v.value, v.count);
    }
    const ordered = [...part.values].sort((x, y) => {
      const d = (counts.get(y) ?? 0) - (counts.get(x) ?? 0);
      return d !== 0 ? d : x < y ? -1 : x > y ? 1 : 0;
    });
    const head = ordered.slice(0, maxValues).join(";");
    return ordered.length > maxValues
      ? `${head};…(+${ordered.length - maxValues})`
      : head;
  }
  const lo = partition.parts.find((p) => p.lo_rank === part.loRank)?.lo_value;
  const hi = partition.parts.find((p) => p.hi_rank === part.hiRank)?.hi_value;
  return `[${formatNumber(lo)}; ${formatNumber(hi)}]`;
}

function formatNumber(x: number | undefined): string {
  if (x === undefined) return "?";
  return Number(x.toPrecision(6)).toString();
}
