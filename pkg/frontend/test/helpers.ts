import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

// compiled location is frontend/dist/test/, so the repo root is three up
export const REPO_ROOT = join(dirname(fileURLToPath(import.meta.url)), "..", "..", "..");
export const GOLDEN_BENCH = join(REPO_ROOT, "data", "golden", "bench");
export const GOLDEN_NOISE = join(REPO_ROOT, "data", "golden", "noise");

export const BENCH_TRACES = ["aspen_seed0.csv", "full_seed0.csv", "heur_seed0.csv"].map(
  (name) => join(GOLDEN_BENCH, name),
);

export const NOISE_TRACES = ["0.1", "0.5", "1.0", "2.0"].map((sigma) =>
  join(GOLDEN_NOISE, `aspen_sigma${sigma}_seed0.csv`),
);

export function tempDir(): string {
  return mkdtempSync(join(tmpdir(), "figures-"));
}

const HEADER =
  "k,phase,n_k,mu_k,alpha_k,accepted,fev,feas,grad_norm,full_grad_norm,gap,eps_k";

/** Write a tiny synthetic trace + sidecar; returns the CSV path. */
export function writeFakeTrace(
  dir: string,
  stem: string,
  opts: { gap?: boolean; sidecar?: Record<string, unknown> } = {},
): string {
  const gapVal = (k: number) => (opts.gap === false ? "nan" : String(1.0 / (k + 1)));
  const rows = [HEADER];
  for (let k = 0; k < 12; k++) {
    rows.push(
      `${k},MB,3,1.0,0.1,true,${(k + 1) * 20},0.01,0.5,nan,${gapVal(k)},1.0`,
    );
  }
  const csvPath = join(dir, `${stem}.csv`);
  writeFileSync(csvPath, rows.join("\n") + "\n");
  const sidecar = opts.sidecar ?? { method: stem, problem: { kind: "demo", id: 1 } };
  writeFileSync(join(dir, `${stem}.json`), JSON.stringify(sidecar));
  return csvPath;
}
