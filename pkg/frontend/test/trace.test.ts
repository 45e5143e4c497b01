import assert from "node:assert/strict";
import { unlinkSync } from "node:fs";
import { test } from "node:test";

import {
  assertSharedProblem,
  canonicalJson,
  loadTrace,
  parseTraceCsv,
} from "../src/trace.js";
import { BENCH_TRACES, tempDir, writeFakeTrace } from "./helpers.js";

test("parses a golden trace with correct types", () => {
  const trace = loadTrace(BENCH_TRACES[0]!);
  assert.ok(trace.rows.length > 100);
  const first = trace.rows[0]!;
  assert.equal(first.k, 0);
  assert.equal(first.phase, "MB");
  assert.equal(typeof first.mu_k, "number");
  assert.equal(first.accepted, true);
  assert.ok(Number.isFinite(first.gap)); // golden bench runs carry the oracle gap
  assert.ok(Number.isNaN(first.full_grad_norm));
  assert.equal(trace.label, "aspen");
});

test("rejects a wrong schema", () => {
  assert.throws(() => parseTraceCsv("a,b,c\n1,2,3\n"), /unexpected trace schema/);
  assert.throws(() => parseTraceCsv(""), /empty trace/);
});

test("rejects ragged rows", () => {
  const header =
    "k,phase,n_k,mu_k,alpha_k,accepted,fev,feas,grad_norm,full_grad_norm,gap,eps_k";
  assert.throws(() => parseTraceCsv(`${header}\n1,MB,3\n`), /row 1/);
});

test("missing sidecar is an error", () => {
  const dir = tempDir();
  const csv = writeFakeTrace(dir, "solo");
  unlinkSync(csv.replace(/\.csv$/, ".json"));
  assert.throws(() => loadTrace(csv), /sidecar/);
});

test("canonical json sorts keys recursively", () => {
  assert.equal(
    canonicalJson({ b: 1, a: { d: [2, 1], c: null } }),
    '{"a":{"c":null,"d":[2,1]},"b":1}',
  );
});

test("shared-problem check tolerates ignored keys only", () => {
  const dir = tempDir();
  const a = loadTrace(writeFakeTrace(dir, "a", {
    sidecar: { method: "a", problem: { kind: "demo", sigma: 1 } },
  }));
  const b = loadTrace(writeFakeTrace(dir, "b", {
    sidecar: { method: "b", problem: { kind: "demo", sigma: 2 } },
  }));
  assert.throws(() => assertSharedProblem([a, b]), /different problems/);
  assertSharedProblem([a, b], ["sigma"]);
});
