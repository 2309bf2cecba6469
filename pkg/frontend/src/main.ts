import { renderHeatmapSVG, renderParetoSVG } from "./heatmap.js";
import { paretoPoints } from "./replay.js";
import {
  createState,
  currentHeatmap,
  displayedInfoRatio,
  maxStep,
  memberships,
  setGranularity,
  setMatrixKind,
  setPair,
  shapeAt,
  typicalityView,
  type MatrixKind,
  type ViewState,
} from "./state.js";
import { parseResultText } from "./validate.js";

let state: ViewState | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function option(value: string, label?: string): HTMLOptionElement {
  const o = document.createElement("option");
  o.value = value;
  o.textContent = label ?? value;
  return o;
}

function renderSummary(): void {
  if (!state) return;
  const doc = state.doc;
  const vars = doc.dataset.variables
    .map((v) => `${v.name} (${v.kind}, ${v.distinct} distinct)`)
    .join(" · ");
  el("summary").innerHTML =
    `<b>${doc.dataset.n_records.toLocaleString()}</b> records` +
    (doc.dataset.n_dropped ? ` (+${doc.dataset.n_dropped} dropped)` : "") +
    ` · optimum grid <b>${doc.model.shape.join("×")}</b>` +
    ` · cost ${doc.cost.total.toFixed(2)} nats` +
    ` (null ${doc.hierarchy.cost_null.toFixed(2)})<br>${vars}`;
  el("pareto-box").innerHTML = renderParetoSVG(paretoPoints(doc));
}

function renderControls(): void {
  if (!state) return;
  const names = state.doc.schema.variables.map((v) => v.name);
  const rowSel = el<HTMLSelectElement>("row-var");
  const colSel = el<HTMLSelectElement>("col-var");
  rowSel.replaceChildren(...names.map((n) => option(n)));
  colSel.replaceChildren(...names.map((n) => option(n)));
  rowSel.value = state.rowVar;
  colSel.value = state.colVar;

  const slider = el<HTMLInputElement>("granularity");
  slider.max = String(maxStep(state));
  slider.value = String(state.step);

  const catVars = state.doc.schema.variables
    .filter((v) => v.kind === "categorical").map((v) => v.name);
  const cvSel = el<HTMLSelectElement>("cluster-var");
  cvSel.replaceChildren(...catVars.map((n) => option(n)));
  if (catVars.length) cvSel.value = state.clusterVar;
  renderClusterParts();
}

function renderClusterParts(): void {
  if (!state) return;
  const partition = state.doc.model.partitions
    .find((p) => p.variable === state!.clusterVar);
  const sel = el<HTMLSelectElement>("cluster-part");
  sel.replaceChildren(...(partition?.parts ?? []).map((p) =>
    option(String(p.id), `${p.id}: ${p.label}`)));
  sel.value = String(state.clusterPart);
}

function renderView(): void {
  if (!state) return;
  const shape = shapeAt(state);
  el("granularity-info").textContent =
    `step ${state.step}/${maxStep(state)} · shape ${shape.join("×")} · ` +
    `IR ${displayedInfoRatio(state).toFixed(4)}`;

  const { spec, message } = currentHeatmap(state);
  el("heatmap-box").innerHTML = spec
    ? renderHeatmapSVG(spec)
    : `<p class="notice">${message}</p>`;

  const parts = memberships(state).get(state.clusterVar) ?? [];
  el("cluster-note").textContent =
    state.step > 0 && parts.length
      ? "typicality rankings are precomputed on the optimum's clusters"
      : "";
  const typ = typicalityView(state);
  if (typ.entries) {
    const rows = typ.entries
      .map(([value, tau]) =>
        `<tr><td>${value}</td><td class="num">${tau.toFixed(3)}</td></tr>`)
      .join("");
    el("typicality-box").innerHTML =
      `<table><thead><tr><th>value</th><th>τ</th></tr></thead>` +
      `<tbody>${rows}</tbody></table>`;
  } else {
    el("typicality-box").innerHTML = `<p class="notice">${typ.message}</p>`;
  }
}

function rerender(): void {
  renderSummary();
  renderControls();
  renderView();
  el("explorer").classList.remove("hidden");
}

function wire(): void {
  el<HTMLInputElement>("file").addEventListener("change", (ev) => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    const reader = new FileReader();
    reader.onload = () => {
      try {
        state = createState(parseResultText(String(reader.result)));
        el("load-error").textContent = "";
        rerender();
      } catch (err) {
        el("load-error").textContent = String(err);
        el("explorer").classList.add("hidden");
      }
    };
    reader.readAsText(file);
  });

  el<HTMLInputElement>("granularity").addEventListener("input", (ev) => {
    if (!state) return;
    state = setGranularity(state, Number((ev.target as HTMLInputElement).value));
    renderView();
  });

  const onPair = () => {
    if (!state) return;
    const row = el<HTMLSelectElement>("row-var").value;
    const col = el<HTMLSelectElement>("col-var").value;
    try {
      state = setPair(state, row, col);
      el("pair-error").textContent = "";
    } catch (err) {
      el("pair-error").textContent = String(err);
      return;
    }
    renderView();
  };
  el("row-var").addEventListener("change", onPair);
  el("col-var").addEventListener("change", onPair);

  el("matrix-kind").addEventListener("change", (ev) => {
    if (!state) return;
    state = setMatrixKind(state,
      (ev.target as HTMLSelectElement).value as MatrixKind);
    renderView();
  });

  el("cluster-var").addEventListener("change", (ev) => {
    if (!state) return;
    state = { ...state, clusterVar: (ev.target as HTMLSelectElement).value,
              clusterPart: 0 };
    renderClusterParts();
    renderView();
  });
  el("cluster-part").addEventListener("change", (ev) => {
    if (!state) return;
    state = { ...state,
              clusterPart: Number((ev.target as HTMLSelectElement).value) };
    renderView();
  });
}

wire();
