#!/usr/bin/env node
/**
 * figures CLI
 *
 *   figures three-panel  --traces a.csv,b.csv,c.csv --out fig.png
 *   figures noise-panels --traces s1.csv,s2.csv,... --out fig.png
 *
 * Each command writes the .png and a .svg sibling. Traces must sit next
 * to their .json sidecars (the harness writes both).
 */

import { renderNoisePanels, renderThreePanel } from "./figures.js";

interface Args {
  traces: string[];
  out: string;
  linearGap: boolean;
}

function parseArgs(argv: string[]): Args {
  const args: Args = { traces: [], out: "", linearGap: false };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i]!;
    if (flag === "--traces") {
      args.traces = (argv[++i] ?? "").split(",").filter((s) => s.length > 0);
    } else if (flag === "--out") {
      args.out = argv[++i] ?? "";
    } else if (flag === "--linear-gap") {
      args.linearGap = true;
    } else {
      throw new Error(`unknown flag ${flag}`);
    }
  }
  if (args.traces.length === 0) throw new Error("--traces is required");
  if (!args.out) throw new Error("--out is required");
  return args;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "three-panel" || command === "noise-panels") {
      const args = parseArgs(rest);
      const render = command === "three-panel" ? renderThreePanel : renderNoisePanels;
      const paths = render({
        tracePaths: args.traces,
        outPath: args.out,
        gapLog: !args.linearGap,
      });
      console.log(`wrote ${paths.png} and ${paths.svg}`);
      return 0;
    }
    console.error(`unknown command ${command ?? "(none)"}; ` +
                  `expected three-panel or noise-panels`);
    return 2;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
}

process.exitCode = main(process.argv.slice(2));
