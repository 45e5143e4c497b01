/**
 * Trace CSV and sidecar loading.
 *
 * The solver harness writes one CSV per run with a fixed 12-column
 * schema plus a JSON sidecar describing the run. Figures consume both:
 * the CSV for data, the sidecar for method names and problem identity.
 */

import { readFileSync } from "node:fs";

export const TRACE_COLUMNS = [
  "k", "phase", "n_k", "mu_k", "alpha_k", "accepted",
  "fev", "feas", "grad_norm", "full_grad_norm", "gap", "eps_k",
] as const;

export interface TraceRow {
  k: number;
  phase: string;
  n_k: number;
  mu_k: number;
  alpha_k: number;
  accepted: boolean;
  fev: number;
  feas: number;
  grad_norm: number;
  full_grad_norm: number;
  gap: number;
  eps_k: number;
}

export interface Sidecar {
  method?: string;
  seed?: number;
  sigma?: number;
  problem?: Record<string, unknown>;
  [key: string]: unknown;
}

export interface LoadedTrace {
  path: string;
  rows: TraceRow[];
  sidecar: Sidecar;
  label: string;
}

export function parseTraceCsv(text: string, path = "<memory>"): TraceRow[] {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error(`${path}: empty trace file`);
  }
  const header = lines[0]!.split(",");
  if (header.length !== TRACE_COLUMNS.length ||
      !TRACE_COLUMNS.every((col, i) => header[i] === col)) {
    throw new Error(
      `${path}: unexpected trace schema [${header.join(",")}], ` +
      `expected [${TRACE_COLUMNS.join(",")}]`,
    );
  }
  const rows: TraceRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i]!.split(",");
    if (parts.length !== TRACE_COLUMNS.length) {
      throw new Error(`${path}: row ${i} has ${parts.length} cells`);
    }
    rows.push({
      k: parseInt(parts[0]!, 10),
      phase: parts[1]!,
      n_k: parseInt(parts[2]!, 10),
      mu_k: Number(parts[3]),
      alpha_k: Number(parts[4]),
      accepted: parts[5] === "true",
      fev: parseInt(parts[6]!, 10),
      feas: Number(parts[7]),
      grad_norm: Number(parts[8]),
      full_grad_norm: Number(parts[9]),
      gap: Number(parts[10]),
      eps_k: Number(parts[11]),
    });
  }
  return rows;
}

function sidecarPath(csvPath: string): string {
  return csvPath.replace(/\.csv$/, ".json");
}

export function loadTrace(csvPath: string): LoadedTrace {
  const rows = parseTraceCsv(readFileSync(csvPath, "utf8"), csvPath);
  let sidecar: Sidecar = {};
  try {
    sidecar = JSON.parse(readFileSync(sidecarPath(csvPath), "utf8")) as Sidecar;
  } catch {
    throw new Error(`${csvPath}: missing or unreadable sidecar ${sidecarPath(csvPath)}`);
  }
  const label =
    sidecar.sigma !== undefined
      ? `sigma=${sidecar.sigma}`
      : (sidecar.method ?? csvPath.replace(/^.*\//, "").replace(/\.csv$/, ""));
  return { path: csvPath, rows, sidecar, label };
}

/** Canonical JSON with sorted keys, for identity comparisons. */
export function canonicalJson(value: unknown): string {
  if (Array.isArray(value)) {
    return `[${value.map(canonicalJson).join(",")}]`;
  }
  if (value !== null && typeof value === "object") {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([k, v]) => `${JSON.stringify(k)}:${canonicalJson(v)}`);
    return `{${entries.join(",")}}`;
  }
  return JSON.stringify(value);
}

/** All traces must come from one problem (same sidecar descriptor). */
export function assertSharedProblem(traces: LoadedTrace[], ignore: string[] = []): void {
  const identities = traces.map((t) => {
    const problem: Record<string, unknown> = { ...(t.sidecar.problem ?? {}) };
    for (const key of ignore) delete problem[key];
    return canonicalJson(problem);
  });
  const first = identities[0];
  for (let i = 1; i < identities.length; i++) {
    if (identities[i] !== first) {
      throw new Error(
        `traces describe different problems: ${traces[0]!.path} vs ${traces[i]!.path}`,
      );
    }
  }
}
