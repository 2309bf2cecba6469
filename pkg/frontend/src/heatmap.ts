import { divergingColor, formatCell, sequentialColor } from "./color.js";

export interface HeatmapSpec {
  kind: "frequency" | "cmi" | "contrast";
  rowLabels: string[];
  colLabels: string[];
  values: number[][];
  title: string;
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function clip(s: string, n: number): string {
  return s.length > n ? s.slice(0, n - 1) + "…" : s;
}

/** Render a matrix as a standalone SVG string (pure, testable). */
export function renderHeatmapSVG(spec: HeatmapSpec): string {
  const cellSize = 42;
  const labelW = 150;
  const labelH = 86;
  const rows = spec.values.length;
  const cols = rows > 0 ? spec.values[0].length : 0;
  const width = labelW + cols * cellSize + 10;
  const height = labelH + rows * cellSize + 26;

  const flat = spec.values.flat();
  const maxAbs = flat.reduce((m, v) => Math.max(m, Math.abs(v)), 0);
  const maxVal = flat.reduce((m, v) => Math.max(m, v), 0);
  const color = (v: number) =>
    spec.kind === "frequency" ? sequentialColor(v, maxVal)
      : divergingColor(v, maxAbs);

  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
      `height="${height}" class="heatmap heatmap-${spec.kind}">`,
  );
  out.push(`<text x="4" y="16" class="hm-title">${esc(spec.title)}</text>`);
  spec.colLabels.forEach((label, j) => {
    const x = labelW + j * cellSize + cellSize / 2;
    out.push(
      `<text x="${x}" y="${labelH - 8}" class="hm-col" ` +
        `transform="rotate(-35 ${x} ${labelH - 8})">${esc(clip(label, 18))}</text>`,
    );
  });
  spec.values.forEach((row, i) => {
    const y = labelH + i * cellSize;
    out.push(
      `<text x="${labelW - 6}" y="${y + cellSize / 2 + 4}" class="hm-row">` +
        `${esc(clip(spec.rowLabels[i] ?? "", 22))}</text>`,
    );
    row.forEach((v, j) => {
      const x = labelW + j * cellSize;
      out.push(
        `<rect x="${x}" y="${y}" width="${cellSize - 1}" ` +
          `height="${cellSize - 1}" fill="${color(v)}">` +
          `<title>${esc(spec.rowLabels[i] ?? "")} × ` +
          `${esc(spec.colLabels[j] ?? "")}: ${formatCell(v, spec.kind)}</title>` +
          `</rect>`,
      );
      out.push(
        `<text x="${x + cellSize / 2}" y="${y + cellSize / 2 + 4}" ` +
          `class="hm-cell">${esc(clip(formatCell(v, spec.kind), 8))}</text>`,
      );
    });
  });
  out.push("</svg>");
  return out.join("");
}

export function renderParetoSVG(points: [number, number][]): string {
  const w = 360;
  const h = 160;
  const pad = 30;
  const maxParts = points[0][0];
  const minParts = points[points.length - 1][0];
  const span = Math.max(1, maxParts - minParts);
  const px = (parts: number) =>
    pad + ((maxParts - parts) / span) * (w - 2 * pad);
  const py = (ratio: number) => pad / 2 + (1 - ratio) * (h - pad - pad / 2);
  const path = points
    .map(([p, r], i) => `${i === 0 ? "M" : "L"}${px(p).toFixed(1)},${py(r).toFixed(1)}`)
    .join(" ");
  const dots = points
    .map(([p, r]) =>
      `<circle cx="${px(p).toFixed(1)}" cy="${py(r).toFixed(1)}" r="3">` +
      `<title>${p} parts, IR=${r.toFixed(3)}</title></circle>`)
    .join("");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${w}" height="${h}" class="pareto">` +
    `<path d="${path}" fill="none" stroke="#5561a8" stroke-width="1.5"/>` +
    `<g fill="#5561a8">${dots}</g>` +
    `<text x="${w / 2}" y="${h - 4}" class="hm-col">parts (coarser →)</text>` +
    `<text x="8" y="${h / 2}" class="hm-col" transform="rotate(-90 8 ${h / 2})">IR</text>` +
    `</svg>`
  );
}
