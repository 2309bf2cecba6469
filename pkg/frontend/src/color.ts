// Color scales for the heatmaps: diverging for signed contribution values
// (red = excess, blue = deficit, white at zero), sequential for counts.

function channel(x: number): number {
  return Math.round(Math.max(0, Math.min(255, x)));
}

/** Diverging scale centered at 0: negative values blue, positive red. */
export function divergingColor(value: number, maxAbs: number): string {
  if (maxAbs <= 0 || value === 0) return "rgb(255,255,255)";
  const t = Math.max(-1, Math.min(1, value / maxAbs));
  if (t > 0) {
    const s = 1 - t;
    return `rgb(${channel(255)},${channel(255 * s * 0.85 + 30 * t)},${channel(255 * s * 0.85 + 30 * t)})`;
  }
  const s = 1 + t;
  return `rgb(${channel(255 * s * 0.85 + 30 * -t)},${channel(255 * s * 0.85 + 30 * -t)},${channel(255)})`;
}

/** Sequential white-to-indigo scale for non-negative counts. */
export function sequentialColor(value: number, max: number): string {
  if (max <= 0) return "rgb(255,255,255)";
  const t = Math.max(0, Math.min(1, value / max));
  return `rgb(${channel(255 - 200 * t)},${channel(255 - 175 * t)},${channel(255 - 80 * t)})`;
}

export function formatCell(value: number, kind: string): string {
  if (kind === "frequency") return String(value);
  const magnitude = Math.abs(value);
  if (magnitude !== 0 && (magnitude < 1e-3 || magnitude >= 1e4)) {
    return value.toExponential(3);
  }
  return value.toFixed(5);
}
