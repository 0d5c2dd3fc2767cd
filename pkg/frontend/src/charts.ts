/**
 * The three figure kinds, each a pure function of parsed CSV rows.
 *
 * bench_bars   <- benchmark table CSV (algorithm, parameters,
 *                 max_mean_error, max_sd_error, time_seconds, ...)
 * mean_curves  <- per-grid-point curves CSV (algorithm, t, mean, sd,
 *                 exact_mean, exact_sd); overlays the exact mean line
 * convergence  <- diagnostic CSV (n, k, d_L, d, tail_bound); one labelled
 *                 curve of d_L against n per truncation level k
 */

import { Row, requireColumns, toNumber } from "./csv.js";
import {
  DEFAULT_FRAME,
  PALETTE,
  axes,
  document,
  el,
  esc,
  extent,
  formatTick,
  niceTicks,
  scale,
} from "./svg.js";

export type ChartKind = "bench_bars" | "mean_curves" | "convergence";

export function render(kind: ChartKind, rows: Row[], title: string): string {
  switch (kind) {
    case "bench_bars":
      return benchBars(rows, title);
    case "mean_curves":
      return meanCurves(rows, title);
    case "convergence":
      return convergence(rows, title);
    default:
      throw new Error(`unknown chart kind: ${kind as string}`);
  }
}

export function benchBars(rows: Row[], title: string): string {
  requireColumns(rows, ["algorithm", "max_mean_error", "max_sd_error"], "benchmark table");
  const frame = DEFAULT_FRAME;
  const groups = rows.map((r) => ({
    label: r.algorithm!,
    mean: toNumber(r.max_mean_error!, "max_mean_error"),
    sd: toNumber(r.max_sd_error!, "max_sd_error"),
  }));
  const yExt = { min: 0, max: extent(groups.flatMap((g) => [g.mean, g.sd]), 0.1).max };
  const sy = scale(yExt, frame.height - frame.bottom, frame.top);
  const x1 = frame.left;
  const x2 = frame.width - frame.right;
  const slot = (x2 - x1) / groups.length;
  const barWidth = slot * 0.3;

  const bars: string[] = [];
  const xTicks: { value: number; label: string; px: number }[] = [];
  groups.forEach((g, i) => {
    const cx = x1 + slot * (i + 0.5);
    xTicks.push({ value: i, label: g.label, px: cx });
    bars.push(
      el("rect", {
        x: cx - barWidth,
        y: sy(g.mean),
        width: barWidth,
        height: sy(0) - sy(g.mean),
        fill: PALETTE[0]!,
        class: "bar-mean",
      }),
    );
    bars.push(
      el("rect", {
        x: cx,
        y: sy(g.sd),
        width: barWidth,
        height: sy(0) - sy(g.sd),
        fill: PALETTE[1]!,
        class: "bar-sd",
      }),
    );
  });

  const yTicks = niceTicks(yExt).map((v) => ({ value: v, label: formatTick(v), py: sy(v) }));
  const legend = [
    el("rect", { x: x2 - 170, y: frame.top + 6, width: 12, height: 12, fill: PALETTE[0]! }),
    el("text", { x: x2 - 152, y: frame.top + 16, "font-size": 12 }, "max. mean error"),
    el("rect", { x: x2 - 170, y: frame.top + 26, width: 12, height: 12, fill: PALETTE[1]! }),
    el("text", { x: x2 - 152, y: frame.top + 36, "font-size": 12 }, "max. s.d. error"),
  ].join("\n");
  const body = [
    axes(frame, xTicks, yTicks, { title, xLabel: "algorithm", yLabel: "error" }),
    ...bars,
    legend,
  ].join("\n");
  return document(frame, body);
}

export function meanCurves(rows: Row[], title: string): string {
  requireColumns(rows, ["algorithm", "t", "mean", "exact_mean"], "mean-curves");
  const frame = DEFAULT_FRAME;
  const byAlgo = new Map<string, { t: number; mean: number }[]>();
  const exact: { t: number; y: number }[] = [];
  for (const r of rows) {
    const t = toNumber(r.t!, "t");
    const mean = toNumber(r.mean!, "mean");
    const algo = r.algorithm!;
    if (!byAlgo.has(algo)) byAlgo.set(algo, []);
    byAlgo.get(algo)!.push({ t, mean });
    exact.push({ t, y: toNumber(r.exact_mean!, "exact_mean") });
  }
  const ts = rows.map((r) => toNumber(r.t!, "t"));
  const ys = rows.flatMap((r) => [toNumber(r.mean!, "mean"), toNumber(r.exact_mean!, "exact_mean")]);
  const xExt = extent([0, ...ts], 0.02);
  const yExt = extent([0, ...ys], 0.05);
  const sx = scale(xExt, frame.left, frame.width - frame.right);
  const sy = scale(yExt, frame.height - frame.bottom, frame.top);

  const pieces: string[] = [];
  // the exact mean overlay: E[A(t)] drawn through the exact_mean column
  const exactSorted = [...new Map(exact.map((p) => [p.t, p])).values()].sort(
    (a, b) => a.t - b.t,
  );
  pieces.push(
    el("polyline", {
      points: exactSorted.map((p) => `${sx(p.t)},${sy(p.y)}`).join(" "),
      fill: "none",
      stroke: "#000",
      "stroke-width": 2,
      "stroke-dasharray": "6 4",
      class: "exact-mean",
    }),
  );
  let i = 0;
  const legend: string[] = [];
  for (const [algo, pts] of byAlgo) {
    const color = PALETTE[i % PALETTE.length]!;
    const sorted = [...pts].sort((a, b) => a.t - b.t);
    pieces.push(
      el("polyline", {
        points: sorted.map((p) => `${sx(p.t)},${sy(p.mean)}`).join(" "),
        fill: "none",
        stroke: color,
        "stroke-width": 1.5,
        class: `curve-${algo}`,
      }),
    );
    legend.push(
      el("line", {
        x1: frame.left + 10,
        y1: frame.top + 14 + i * 16,
        x2: frame.left + 34,
        y2: frame.top + 14 + i * 16,
        stroke: color,
        "stroke-width": 2,
      }),
    );
    legend.push(
      el(
        "text",
        { x: frame.left + 40, y: frame.top + 18 + i * 16, "font-size": 12 },
        esc(algo),
      ),
    );
    i += 1;
  }
  legend.push(
    el("line", {
      x1: frame.left + 10,
      y1: frame.top + 14 + i * 16,
      x2: frame.left + 34,
      y2: frame.top + 14 + i * 16,
      stroke: "#000",
      "stroke-width": 2,
      "stroke-dasharray": "6 4",
    }),
  );
  legend.push(
    el(
      "text",
      { x: frame.left + 40, y: frame.top + 18 + i * 16, "font-size": 12 },
      "exact mean",
    ),
  );
  const xTicks = niceTicks(xExt).map((v) => ({ value: v, label: formatTick(v), px: sx(v) }));
  const yTicks = niceTicks(yExt).map((v) => ({ value: v, label: formatTick(v), py: sy(v) }));
  const body = [
    axes(frame, xTicks, yTicks, { title, xLabel: "t", yLabel: "mean of sampled paths" }),
    ...pieces,
    ...legend,
  ].join("\n");
  return document(frame, body);
}

export function convergence(rows: Row[], title: string): string {
  requireColumns(rows, ["n", "k", "d_L"], "convergence diagnostic");
  const frame = DEFAULT_FRAME;
  const byK = new Map<number, { n: number; d: number }[]>();
  for (const r of rows) {
    const k = toNumber(r.k!, "k");
    if (!byK.has(k)) byK.set(k, []);
    byK.get(k)!.push({ n: toNumber(r.n!, "n"), d: toNumber(r.d_L!, "d_L") });
  }
  const ns = rows.map((r) => toNumber(r.n!, "n"));
  const ds = rows.map((r) => toNumber(r.d_L!, "d_L"));
  const xExt = extent(ns.map((n) => Math.log10(n)), 0.05);
  const yExt = extent([0, ...ds], 0.05);
  const sx = scale(xExt, frame.left, frame.width - frame.right);
  const sy = scale(yExt, frame.height - frame.bottom, frame.top);

  const pieces: string[] = [];
  const legend: string[] = [];
  const ks = [...byK.keys()].sort((a, b) => a - b);
  ks.forEach((k, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    const pts = byK.get(k)!.sort((a, b) => a.n - b.n);
    pieces.push(
      el("polyline", {
        points: pts.map((p) => `${sx(Math.log10(p.n))},${sy(p.d)}`).join(" "),
        fill: "none",
        stroke: color,
        "stroke-width": 1.5,
        class: `curve-k${k}`,
      }),
    );
    for (const p of pts) {
      pieces.push(
        el("circle", { cx: sx(Math.log10(p.n)), cy: sy(p.d), r: 3, fill: color }),
      );
    }
    legend.push(
      el(
        "text",
        {
          x: frame.width - frame.right - 60,
          y: frame.top + 14 + i * 16,
          "font-size": 12,
          fill: color,
        },
        `k = ${k}`,
      ),
    );
  });
  const xTicks = [...new Set(ns)].sort((a, b) => a - b).map((n) => ({
    value: n,
    label: String(n),
    px: sx(Math.log10(n)),
  }));
  const yTicks = niceTicks(yExt).map((v) => ({ value: v, label: formatTick(v), py: sy(v) }));
  const body = [
    axes(frame, xTicks, yTicks, {
      title,
      xLabel: "approximation size n (log scale)",
      yLabel: "Levy distance to reference",
    }),
    ...pieces,
    ...legend,
  ].join("\n");
  return document(frame, body);
}
