import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  createState,
  currentHeatmap,
  displayedInfoRatio,
  embeddedMatrix,
  maxStep,
  setGranularity,
  setGranularityByRatio,
  setMatrixKind,
  setPair,
  typicalityView,
} from "../src/state.js";
import { parseResult, parseResultText } from "../src/validate.js";
import type { ResultDocument } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));
const doc = parseResultText(
  readFileSync(join(here, "..", "..", "docs", "examples", "toy_result.json"),
    "utf-8"),
);

describe("view state", () => {
  it("initializes on the optimum with the first two variables", () => {
    const s = createState(doc);
    expect(s.step).toBe(0);
    expect(s.rowVar).not.toBe(s.colVar);
    expect(displayedInfoRatio(s)).toBe(1.0);
  });

  it("enforces granularity bounds", () => {
    const s = createState(doc);
    expect(() => setGranularity(s, -1)).toThrow();
    expect(() => setGranularity(s, maxStep(s) + 1)).toThrow();
    expect(setGranularity(s, maxStep(s)).step).toBe(maxStep(s));
  });

  it("maps an IR target to the same step the CLI simplify picks", () => {
    const s = setGranularityByRatio(createState(doc), 1.0);
    expect(s.step).toBe(0);
    const coarse = setGranularityByRatio(createState(doc), 0.0);
    expect(coarse.step).toBe(maxStep(coarse));
  });

  it("rejects identical row and column variables", () => {
    const s = createState(doc);
    expect(() => setPair(s, s.rowVar, s.rowVar)).toThrow();
    expect(() => setPair(s, "nope", s.colVar)).toThrow();
  });

  it("renders the optimum heatmap at J*xJ* and the end at 1x1", () => {
    const s = createState(doc);
    const full = currentHeatmap(s).spec!;
    expect(full.values.length).toBe(doc.model.shape[0]);
    expect(full.values[0].length).toBe(doc.model.shape[1]);
    const single = currentHeatmap(setGranularity(s, maxStep(s))).spec!;
    expect(single.values.length).toBe(1);
    expect(single.values[0].length).toBe(1);
    expect(single.values[0][0]).toBe(doc.dataset.n_records);
  });

  it("serves embedded cmi at step 0 and reports absence elsewhere", () => {
    let s = setMatrixKind(createState(doc), "cmi");
    expect(embeddedMatrix(s)).not.toBeNull();
    expect(currentHeatmap(s).spec!.kind).toBe("cmi");
    s = setGranularity(s, 1);
    const res = currentHeatmap(s);
    expect(res.spec).toBeNull();
    expect(res.message).toMatch(/precompute/);
  });

  it("serves the embedded matrix transposed when the pair is flipped", () => {
    const names = doc.schema.variables.map((v) => v.name);
    let s = setMatrixKind(createState(doc), "cmi");
    const direct = currentHeatmap(s).spec!;
    s = setPair(s, names[1], names[0]);
    const flipped = currentHeatmap(s).spec!;
    expect(flipped.values.length).toBe(direct.values[0].length);
    expect(flipped.values[0][0]).toBe(direct.values[0][0]);
    expect(flipped.values[0][1] ?? 0).toBe(direct.values[1]?.[0] ?? 0);
  });

  it("shows precomputed typicality and a notice when absent", () => {
    const s = createState(doc);
    const view = typicalityView(s);
    expect(view.entries).not.toBeNull();
    const taus = view.entries!.map(([, t]) => t);
    expect([...taus].sort((a, b) => b - a)).toEqual(taus);
    const missing = typicalityView({ ...s, clusterPart: 99 });
    expect(missing.entries).toBeNull();
    expect(missing.message).toMatch(/--embed-typicality/);
  });
});

describe("independence toy document", () => {
  function tinyDoc(): ResultDocument {
    return parseResult({
      format_version: 1,
      schema: {
        variables: [{ name: "a", kind: "categorical" },
                    { name: "b", kind: "categorical" }],
        delimiter: "\t",
        has_header: true,
      },
      dataset: {
        n_records: 4, n_dropped: 0, source: null,
        variables: [{ name: "a", kind: "categorical", distinct: 2 },
                    { name: "b", kind: "categorical", distinct: 2 }],
      },
      model: {
        shape: [2, 2],
        partitions: [
          { variable: "a", kind: "categorical", parts: [
            { id: 0, label: "x", count: 2, values: [{ value: "x", count: 2 }] },
            { id: 1, label: "y", count: 2, values: [{ value: "y", count: 2 }] },
          ]},
          { variable: "b", kind: "categorical", parts: [
            { id: 0, label: "p", count: 2, values: [{ value: "p", count: 2 }] },
            { id: 1, label: "q", count: 2, values: [{ value: "q", count: 2 }] },
          ]},
        ],
        cells: [[0, 0, 1], [0, 1, 1], [1, 0, 1], [1, 1, 1]],
      },
      cost: { total: 1.0 },
      hierarchy: { cost_opt: 1.0, cost_null: 1.0, freeze: [], records: [] },
      optimizer: {},
      matrices: [{
        kind: "cmi", row_variable: "a", col_variable: "b",
        row_labels: ["x", "y"], col_labels: ["p", "q"],
        values: [[0, 0], [0, 0]], total: 0, step: 0,
      }],
    });
  }

  it("independence gives a uniformly zero CMI map", () => {
    const s = setMatrixKind(createState(tinyDoc()), "cmi");
    const spec = currentHeatmap(s).spec!;
    expect(spec.values.flat().every((v) => v === 0)).toBe(true);
  });
});
