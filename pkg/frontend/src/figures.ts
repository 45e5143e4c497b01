/**
 * The two figure layouts.
 *
 * Three-panel comparison, one curve per method:
 *   a) optimality gap vs cumulative FEV
 *   b) sample size vs iteration
 *   c) penalty parameter vs iteration
 *
 * Noise study, one curve per noise level:
 *   a) optimality gap vs cumulative FEV
 *   b) sample size vs iteration
 *
 * Every plotted point comes straight from a trace row; there is no
 * smoothing or resampling. Each render writes both a raster (.png) and
 * a vector (.svg) file and is byte-deterministic.
 */

import { writeFileSync } from "node:fs";

import { buildFigure, type PanelSpec, type Scene, type Series } from "./scene.js";
import { sceneToPng } from "./png.js";
import { sceneToSvg } from "./svg.js";
import { assertSharedProblem, loadTrace, type LoadedTrace } from "./trace.js";

export interface FigureSpec {
  tracePaths: string[];
  outPath: string; // .png path; the .svg sibling is derived
  gapLog?: boolean;
  penaltyLog?: boolean;
  sampleLog?: boolean;
}

function gapSeries(trace: LoadedTrace): Series {
  const points = trace.rows
    .filter((r) => Number.isFinite(r.gap))
    .map((r): [number, number] => [r.fev, r.gap]);
  if (points.length === 0) {
    throw new Error(
      `${trace.path}: no gap values; the run had no reference solution ` +
      `(pass an oracle file to the harness to enable the gap panel)`,
    );
  }
  return { label: trace.label, points };
}

function sampleSeries(trace: LoadedTrace): Series {
  return { label: trace.label, points: trace.rows.map((r) => [r.k, r.n_k]) };
}

function penaltySeries(trace: LoadedTrace): Series {
  return { label: trace.label, points: trace.rows.map((r) => [r.k, r.mu_k]) };
}

function writeBoth(scene: Scene, outPath: string): { png: string; svg: string } {
  if (!outPath.endsWith(".png")) {
    throw new Error(`output path must end in .png, got ${outPath}`);
  }
  const svgPath = outPath.replace(/\.png$/, ".svg");
  writeFileSync(outPath, sceneToPng(scene));
  writeFileSync(svgPath, sceneToSvg(scene));
  return { png: outPath, svg: svgPath };
}

export function renderThreePanel(spec: FigureSpec): { png: string; svg: string } {
  if (spec.tracePaths.length === 0) {
    throw new Error("need at least one trace");
  }
  const traces = spec.tracePaths.map(loadTrace);
  assertSharedProblem(traces);

  const panels: PanelSpec[] = [
    {
      name: "a)",
      xLabel: "FEV",
      yLabel: "gap",
      xLog: false,
      yLog: spec.gapLog ?? true,
      series: traces.map(gapSeries),
    },
    {
      name: "b)",
      xLabel: "iteration",
      yLabel: "sample size",
      xLog: false,
      yLog: spec.sampleLog ?? false,
      series: traces.map(sampleSeries),
    },
    {
      name: "c)",
      xLabel: "iteration",
      yLabel: "penalty",
      xLog: false,
      yLog: spec.penaltyLog ?? true,
      series: traces.map(penaltySeries),
    },
  ];
  const scene = buildFigure(panels, traces.map((t) => t.label));
  return writeBoth(scene, spec.outPath);
}

export function renderNoisePanels(spec: FigureSpec): { png: string; svg: string } {
  if (spec.tracePaths.length === 0) {
    throw new Error("need at least one trace");
  }
  let traces = spec.tracePaths.map(loadTrace);
  for (const t of traces) {
    if (t.sidecar.sigma === undefined) {
      throw new Error(`${t.path}: sidecar has no sigma; not a noise-study trace`);
    }
  }
  // the noise level and its draw are the swept quantities; everything
  // else about the problem must match
  assertSharedProblem(traces, ["sigma", "noise_seed"]);
  traces = [...traces].sort(
    (a, b) => (a.sidecar.sigma as number) - (b.sidecar.sigma as number),
  );

  const panels: PanelSpec[] = [
    {
      name: "a)",
      xLabel: "FEV",
      yLabel: "gap",
      xLog: false,
      yLog: spec.gapLog ?? true,
      series: traces.map(gapSeries),
    },
    {
      name: "b)",
      xLabel: "iteration",
      yLabel: "sample size",
      xLog: false,
      yLog: spec.sampleLog ?? false,
      series: traces.map(sampleSeries),
    },
  ];
  const scene = buildFigure(panels, traces.map((t) => t.label));
  return writeBoth(scene, spec.outPath);
}
