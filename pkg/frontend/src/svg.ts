/** String-assembled SVG primitives shared by the chart renderers. */

export interface Extent {
  min: number;
  max: number;
}

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function el(
  tag: string,
  attrs: Record<string, string | number>,
  body = "",
): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? round(v) : esc(v)}"`)
    .join(" ");
  return body === "" && tag !== "text"
    ? `<${tag} ${parts}/>`
    : `<${tag} ${parts}>${body}</${tag}>`;
}

function round(v: number): string {
  return Number.isInteger(v) ? String(v) : v.toFixed(2);
}

export function extent(values: number[], padFraction = 0.05): Extent {
  let min = Math.min(...values);
  let max = Math.max(...values);
  if (min === max) {
    min -= 0.5;
    max += 0.5;
  }
  const pad = (max - min) * padFraction;
  return { min: min - pad, max: max + pad };
}

/** Linear scale mapping a data extent onto pixel coordinates. */
export function scale(ext: Extent, pixelFrom: number, pixelTo: number) {
  const span = ext.max - ext.min;
  return (v: number) => pixelFrom + ((v - ext.min) / span) * (pixelTo - pixelFrom);
}

export function niceTicks(ext: Extent, count = 5): number[] {
  const rawStep = (ext.max - ext.min) / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const step = [1, 2, 2.5, 5, 10].map((m) => m * mag).find((s) => s >= rawStep)!;
  const start = Math.ceil(ext.min / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= ext.max + 1e-12; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1000 || a < 0.001) return v.toExponential(1);
  return String(Number(v.toPrecision(4)));
}

export const PALETTE = [
  "#4477aa",
  "#ee6677",
  "#228833",
  "#ccbb44",
  "#66ccee",
  "#aa3377",
  "#bbbbbb",
];

export interface Frame {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export const DEFAULT_FRAME: Frame = {
  width: 720,
  height: 440,
  left: 70,
  right: 20,
  top: 40,
  bottom: 55,
};

/** Axes, tick marks, labels and an optional title for a framed plot area. */
export function axes(
  frame: Frame,
  xTicks: { value: number; label: string; px: number }[],
  yTicks: { value: number; label: string; py: number }[],
  options: { title?: string; xLabel?: string; yLabel?: string },
): string {
  const { width, height, left, right, top, bottom } = frame;
  const pieces: string[] = [];
  const x1 = left;
  const x2 = width - right;
  const y1 = top;
  const y2 = height - bottom;
  pieces.push(el("line", { x1, y1: y2, x2, y2, stroke: "#333", "stroke-width": 1 }));
  pieces.push(el("line", { x1, y1, x2: x1, y2, stroke: "#333", "stroke-width": 1 }));
  for (const t of xTicks) {
    pieces.push(el("line", { x1: t.px, y1: y2, x2: t.px, y2: y2 + 5, stroke: "#333" }));
    pieces.push(
      el(
        "text",
        { x: t.px, y: y2 + 20, "text-anchor": "middle", "font-size": 12 },
        esc(t.label),
      ),
    );
  }
  for (const t of yTicks) {
    pieces.push(el("line", { x1: x1 - 5, y1: t.py, x2: x1, y2: t.py, stroke: "#333" }));
    pieces.push(
      el(
        "text",
        { x: x1 - 9, y: t.py + 4, "text-anchor": "end", "font-size": 12 },
        esc(t.label),
      ),
    );
    pieces.push(
      el("line", {
        x1,
        y1: t.py,
        x2,
        y2: t.py,
        stroke: "#ddd",
        "stroke-width": 0.5,
      }),
    );
  }
  if (options.title) {
    pieces.push(
      el(
        "text",
        { x: width / 2, y: 22, "text-anchor": "middle", "font-size": 16, "font-weight": "bold" },
        esc(options.title),
      ),
    );
  }
  if (options.xLabel) {
    pieces.push(
      el(
        "text",
        { x: (x1 + x2) / 2, y: height - 12, "text-anchor": "middle", "font-size": 13 },
        esc(options.xLabel),
      ),
    );
  }
  if (options.yLabel) {
    pieces.push(
      el(
        "text",
        {
          x: 16,
          y: (y1 + y2) / 2,
          "text-anchor": "middle",
          "font-size": 13,
          transform: `rotate(-90 16 ${(y1 + y2) / 2})`,
        },
        esc(options.yLabel),
      ),
    );
  }
  return pieces.join("\n");
}

export function document(frame: Frame, body: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${frame.width}" height="${frame.height}" viewBox="0 0 ${frame.width} ${frame.height}">`,
    el("rect", { x: 0, y: 0, width: frame.width, height: frame.height, fill: "#ffffff" }),
    body,
    "</svg>",
  ].join("\n");
}
