import {
  aggregateFrequency,
  infoRatioAt,
  partLabel,
  replayMemberships,
  stepForInfoRatio,
  type Memberships,
} from "./replay.js";
import type { HeatmapSpec } from "./heatmap.js";
import type { MatrixInfo, ResultDocument } from "./types.js";

export type MatrixKind = "frequency" | "cmi" | "contrast";

export interface ViewState {
  doc: ResultDocument;
  step: number;
  rowVar: string;
  colVar: string;
  matrixKind: MatrixKind;
  /** contrast only: which embedded target to show */
  targetVar: string | null;
  targetPart: number;
  /** typicality panel */
  clusterVar: string;
  clusterPart: number;
}

export function createState(doc: ResultDocument): ViewState {
  const names = doc.schema.variables.map((v) => v.name);
  const firstCat = doc.schema.variables.find((v) => v.kind === "categorical");
  return {
    doc,
    step: 0,
    rowVar: names[0],
    colVar: names[1],
    matrixKind: "frequency",
    targetVar: null,
    targetPart: 0,
    clusterVar: firstCat ? firstCat.name : names[0],
    clusterPart: 0,
  };
}

export function maxStep(state: ViewState): number {
  return state.doc.hierarchy.records.length;
}

export function setGranularity(state: ViewState, step: number): ViewState {
  if (!Number.isInteger(step) || step < 0 || step > maxStep(state)) {
    throw new Error(`granularity step ${step} outside 0..${maxStep(state)}`);
  }
  return { ...state, step };
}

export function setGranularityByRatio(state: ViewState, ratio: number): ViewState {
  if (!(ratio >= 0 && ratio <= 1)) {
    throw new Error("information ratio must be in [0, 1]");
  }
  return setGranularity(state, stepForInfoRatio(state.doc, ratio));
}

export function setPair(state: ViewState, rowVar: string, colVar: string): ViewState {
  const names = state.doc.schema.variables.map((v) => v.name);
  if (!names.includes(rowVar) || !names.includes(colVar)) {
    throw new Error("unknown variable");
  }
  if (rowVar === colVar) {
    throw new Error("row and column variables must differ");
  }
  return { ...state, rowVar, colVar };
}

export function setMatrixKind(state: ViewState, kind: MatrixKind): ViewState {
  return { ...state, matrixKind: kind };
}

export function memberships(state: ViewState): Memberships {
  return replayMemberships(state.doc, state.step);
}

export function displayedInfoRatio(state: ViewState): number {
  return infoRatioAt(state.doc, state.step);
}

export function shapeAt(state: ViewState): number[] {
  const m = memberships(state);
  return state.doc.schema.variables.map((v) => m.get(v.name)!.length);
}

/** The embedded matrices compatible with the current pair/kind/step. The
 * viewer never recomputes MI client-side; it only displays what the CLI
 * precomputed into the document. */
export function embeddedMatrix(state: ViewState): MatrixInfo | null {
  const list = state.doc.matrices ?? [];
  for (const m of list) {
    if (m.kind !== state.matrixKind || m.step !== state.step) continue;
    const samePair =
      (m.row_variable === state.rowVar && m.col_variable === state.colVar) ||
      (m.row_variable === state.colVar && m.col_variable === state.rowVar);
    if (!samePair) continue;
    if (m.kind === "contrast") {
      if (!m.target || m.target.variable !== state.targetVar ||
          m.target.part !== state.targetPart) continue;
    }
    return m;
  }
  return null;
}

export interface HeatmapResult {
  spec: HeatmapSpec | null;
  /** set when the requested view needs CLI precomputation */
  message: string | null;
}

export function currentHeatmap(state: ViewState): HeatmapResult {
  if (state.matrixKind === "frequency") {
    const m = memberships(state);
    const values = aggregateFrequency(state.doc, m, state.rowVar, state.colVar);
    const rowLabels = m.get(state.rowVar)!.map((p) =>
      partLabel(state.doc, state.rowVar, p));
    const colLabels = m.get(state.colVar)!.map((p) =>
      partLabel(state.doc, state.colVar, p));
    return {
      spec: {
        kind: "frequency",
        rowLabels,
        colLabels,
        values,
        title: `frequency ${state.rowVar} × ${state.colVar} (step ${state.step})`,
      },
      message: null,
    };
  }
  const matrix = embeddedMatrix(state);
  if (!matrix) {
    return {
      spec: null,
      message:
        `no embedded ${state.matrixKind} matrix for this view at step ` +
        `${state.step}; precompute it with the CLI (train --embed-matrices ` +
        `or the ${state.matrixKind} subcommand)`,
    };
  }
  const flipped = matrix.row_variable !== state.rowVar;
  const values = flipped
    ? matrix.values[0].map((_, j) => matrix.values.map((row) => row[j]))
    : matrix.values;
  const rowLabels = flipped ? matrix.col_labels : matrix.row_labels;
  const colLabels = flipped ? matrix.row_labels : matrix.col_labels;
  const suffix = matrix.target
    ? ` | target ${matrix.target.variable}=${matrix.target.part}`
    : matrix.selection && Object.keys(matrix.selection).length
      ? ` | slice ${Object.entries(matrix.selection)
          .map(([k, v]) => `${k}=${v}`).join(",")}`
      : "";
  return {
    spec: {
      kind: matrix.kind,
      rowLabels,
      colLabels,
      values,
      title: `${matrix.kind} ${state.rowVar} × ${state.colVar}` +
        ` (step ${matrix.step})${suffix}`,
    },
    message: null,
  };
}

export interface TypicalityView {
  entries: [string, number][] | null;
  message: string | null;
}

export function typicalityView(state: ViewState): TypicalityView {
  const section = state.doc.typicality;
  const byCluster = section?.[state.clusterVar];
  const entries = byCluster?.[String(state.clusterPart)];
  if (!entries) {
    return {
      entries: null,
      message:
        "no precomputed typicality for this cluster; rerun the CLI with " +
        "--embed-typicality (rankings are defined on the optimum's clusters)",
    };
  }
  return { entries, message: null };
}
