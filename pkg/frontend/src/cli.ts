#!/usr/bin/env node
/**
 * bpsim-plot --input results.csv --kind bench_bars --out figure.svg [--title T]
 *
 * Kinds: bench_bars (benchmark table CSV), mean_curves (curves CSV),
 * convergence (diagnostic CSV).  Exits 1 on unreadable input, unknown kind,
 * empty CSV, or column mismatch; nothing is written in that case.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseCsv } from "./csv.js";
import { ChartKind, render } from "./charts.js";

const KINDS: ChartKind[] = ["bench_bars", "mean_curves", "convergence"];

interface Args {
  input: string;
  kind: ChartKind;
  out: string;
  title: string;
}

export function parseArgs(argv: string[]): Args {
  const named = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag?.startsWith("--") || value === undefined) {
      throw new Error(`expected --flag value pairs, got: ${argv.join(" ")}`);
    }
    named.set(flag.slice(2), value);
  }
  const input = named.get("input");
  const kind = named.get("kind") as ChartKind | undefined;
  const out = named.get("out");
  if (!input || !kind || !out) {
    throw new Error("required: --input PATH --kind KIND --out PATH [--title TEXT]");
  }
  if (!KINDS.includes(kind)) {
    throw new Error(`unknown kind ${kind}; expected one of ${KINDS.join(", ")}`);
  }
  return { input, kind, out, title: named.get("title") ?? defaultTitle(kind) };
}

function defaultTitle(kind: ChartKind): string {
  switch (kind) {
    case "bench_bars":
      return "Benchmark errors by algorithm";
    case "mean_curves":
      return "Sample mean curves";
    case "convergence":
      return "Convergence diagnostics";
  }
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
  try {
    const text = readFileSync(args.input, "utf8");
    const svg = render(args.kind, parseCsv(text), args.title);
    writeFileSync(args.out, svg);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
  return 0;
}

const isMain =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (isMain) {
  process.exit(main(process.argv.slice(2)));
}
