/**
 * A tiny deterministic plotting core.
 *
 * Figures are built as a flat display list ("scene") of rectangles,
 * lines, polylines and text, which the SVG and PNG backends render
 * identically run to run: fixed palette, fixed layout, no timestamps,
 * no environment-dependent styling.
 */

export type Item =
  | { kind: "rect"; x: number; y: number; w: number; h: number; color: string }
  | { kind: "line"; x1: number; y1: number; x2: number; y2: number; color: string }
  | { kind: "polyline"; points: Array<[number, number]>; color: string }
  | { kind: "text"; x: number; y: number; text: string; color: string }
  | { kind: "begin-panel"; name: string }
  | { kind: "end-panel" };

export interface Scene {
  width: number;
  height: number;
  items: Item[];
}

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
] as const;

export const AXIS_COLOR = "#202020";
export const GRID_COLOR = "#d8d8d8";

export interface Series {
  label: string;
  points: Array<[number, number]>; // data coordinates
}

export interface PanelSpec {
  name: string; // the caption letter, e.g. "a)"
  xLabel: string;
  yLabel: string;
  xLog: boolean;
  yLog: boolean;
  series: Series[];
}

interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

// ---------------------------------------------------------------------------
// ticks
// ---------------------------------------------------------------------------

function niceStep(raw: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  if (norm <= 1) return mag;
  if (norm <= 2) return 2 * mag;
  if (norm <= 5) return 5 * mag;
  return 10 * mag;
}

export function linearTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const step = niceStep((hi - lo) / (count - 1));
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function logTicks(lo: number, hi: number): number[] {
  const eLo = Math.ceil(Math.log10(lo) - 1e-9);
  const eHi = Math.floor(Math.log10(hi) + 1e-9);
  if (eHi < eLo) {
    return [lo];
  }
  const span = eHi - eLo;
  const stride = span > 8 ? Math.ceil(span / 6) : 1;
  const ticks: number[] = [];
  for (let e = eLo; e <= eHi; e += stride) {
    ticks.push(Math.pow(10, e));
  }
  return ticks;
}

export function formatTick(value: number, log: boolean): string {
  if (value === 0) return "0";
  const exp = Math.floor(Math.log10(Math.abs(value)));
  if (log || exp >= 5 || exp <= -4) {
    const mant = value / Math.pow(10, exp);
    const m = Math.round(mant * 100) / 100;
    return m === 1 ? `1e${exp}` : `${m}e${exp}`;
  }
  const s = value.toPrecision(4);
  return String(Number(s));
}

// ---------------------------------------------------------------------------
// panel rendering
// ---------------------------------------------------------------------------

const MARGIN = { left: 58, right: 10, top: 28, bottom: 44 };

function dataRange(values: number[], log: boolean): [number, number] {
  const usable = values.filter((v) => Number.isFinite(v) && (!log || v > 0));
  if (usable.length === 0) {
    return log ? [0.1, 10] : [0, 1];
  }
  let lo = Math.min(...usable);
  let hi = Math.max(...usable);
  if (lo === hi) {
    if (log) {
      lo /= 2;
      hi *= 2;
    } else {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  return [lo, hi];
}

function makeScale(lo: number, hi: number, log: boolean, pxLo: number, pxHi: number) {
  const tLo = log ? Math.log10(lo) : lo;
  const tHi = log ? Math.log10(hi) : hi;
  return (v: number): number => {
    const t = log ? Math.log10(v) : v;
    return pxLo + ((t - tLo) / (tHi - tLo)) * (pxHi - pxLo);
  };
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}

export function renderPanel(panel: PanelSpec, frame: Rect, items: Item[]): void {
  const plot: Rect = {
    x: frame.x + MARGIN.left,
    y: frame.y + MARGIN.top,
    w: frame.w - MARGIN.left - MARGIN.right,
    h: frame.h - MARGIN.top - MARGIN.bottom,
  };
  items.push({ kind: "begin-panel", name: panel.name });

  const xs = panel.series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = panel.series.flatMap((s) => s.points.map((p) => p[1]));
  const [xLo, xHi] = dataRange(xs, panel.xLog);
  const [yLo, yHi] = dataRange(ys, panel.yLog);
  const sx = makeScale(xLo, xHi, panel.xLog, plot.x, plot.x + plot.w);
  const sy = makeScale(yLo, yHi, panel.yLog, plot.y + plot.h, plot.y);

  const xTicks = panel.xLog ? logTicks(xLo, xHi) : linearTicks(xLo, xHi);
  const yTicks = panel.yLog ? logTicks(yLo, yHi) : linearTicks(yLo, yHi);

  for (const t of xTicks) {
    const px = round2(sx(t));
    items.push({ kind: "line", x1: px, y1: plot.y, x2: px, y2: plot.y + plot.h, color: GRID_COLOR });
    const label = formatTick(t, panel.xLog);
    items.push({
      kind: "text",
      x: round2(px - label.length * 3),
      y: plot.y + plot.h + 14,
      text: label,
      color: AXIS_COLOR,
    });
  }
  for (const t of yTicks) {
    const py = round2(sy(t));
    items.push({ kind: "line", x1: plot.x, y1: py, x2: plot.x + plot.w, y2: py, color: GRID_COLOR });
    const label = formatTick(t, panel.yLog);
    items.push({
      kind: "text",
      x: plot.x - 6 - label.length * 6,
      y: py + 3,
      text: label,
      color: AXIS_COLOR,
    });
  }

  // frame
  items.push({ kind: "line", x1: plot.x, y1: plot.y, x2: plot.x, y2: plot.y + plot.h, color: AXIS_COLOR });
  items.push({ kind: "line", x1: plot.x, y1: plot.y + plot.h, x2: plot.x + plot.w, y2: plot.y + plot.h, color: AXIS_COLOR });
  items.push({ kind: "line", x1: plot.x + plot.w, y1: plot.y, x2: plot.x + plot.w, y2: plot.y + plot.h, color: AXIS_COLOR });
  items.push({ kind: "line", x1: plot.x, y1: plot.y, x2: plot.x + plot.w, y2: plot.y, color: AXIS_COLOR });

  // series
  panel.series.forEach((series, idx) => {
    const color = PALETTE[idx % PALETTE.length]!;
    const pts = series.points
      .filter(([px, py]) =>
        Number.isFinite(px) && Number.isFinite(py) &&
        (!panel.xLog || px > 0) && (!panel.yLog || py > 0))
      .map(([px, py]): [number, number] => [round2(sx(px)), round2(sy(py))]);
    if (pts.length > 0) {
      items.push({ kind: "polyline", points: pts, color });
    }
  });

  // labels: y label horizontal above the axis, x label centered below
  items.push({ kind: "text", x: frame.x + 6, y: frame.y + 14, text: panel.yLabel, color: AXIS_COLOR });
  items.push({
    kind: "text",
    x: round2(plot.x + plot.w / 2 - panel.xLabel.length * 3),
    y: plot.y + plot.h + 28,
    text: panel.xLabel,
    color: AXIS_COLOR,
  });
  items.push({
    kind: "text",
    x: round2(plot.x + plot.w / 2 - panel.name.length * 3),
    y: frame.y + frame.h - 4,
    text: panel.name,
    color: AXIS_COLOR,
  });
  items.push({ kind: "end-panel" });
}

export function buildFigure(panels: PanelSpec[], legend: string[]): Scene {
  const panelW = 320;
  const panelH = 270;
  const legendH = 20;
  const width = panelW * panels.length;
  const height = panelH + legendH;
  const items: Item[] = [
    { kind: "rect", x: 0, y: 0, w: width, h: height, color: "#ffffff" },
  ];

  // legend strip along the top
  let lx = MARGIN.left;
  legend.forEach((label, idx) => {
    const color = PALETTE[idx % PALETTE.length]!;
    items.push({ kind: "rect", x: lx, y: 6, w: 18, h: 4, color });
    items.push({ kind: "text", x: lx + 24, y: 12, text: label, color: AXIS_COLOR });
    lx += 30 + label.length * 6 + 18;
  });

  panels.forEach((panel, idx) => {
    renderPanel(panel, { x: idx * panelW, y: legendH, w: panelW, h: panelH }, items);
  });
  return { width, height, items };
}
