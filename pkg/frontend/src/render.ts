/**
 * SVG rendering of BER curves: linear x axis, log-scale BER axis, solid
 * lines for Monte Carlo curves, dashed lines for analytical bounds, and
 * open downward triangles for censored (zero-error) points.
 *
 * Rendering is pure string generation over the parsed rows, so re-running
 * on the same CSV produces byte-identical output.
 */

import { FigureSpec, Series, buildSeries } from "./figures.js";
import { HarnessRow } from "./schema.js";

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 24, right: 200, bottom: 48, left: 72 };

const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
];

const AXIS_LABELS: Record<string, string> = {
  snr_db: "SNR (dB)",
  sjr_db: "SJR (dB)",
  rho: "jammed fraction rho",
};

interface Scale {
  (v: number): number;
  ticks: number[];
}

function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  const f = ((v: number) => outLo + ((v - lo) / span) * (outHi - outLo)) as Scale;
  const step = niceStep(span);
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-9; t += step) {
    ticks.push(Number(t.toFixed(10)));
  }
  f.ticks = ticks;
  return f;
}

function niceStep(span: number): number {
  const raw = span / 6;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= raw) return m * mag;
  }
  return 10 * mag;
}

function logScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi - llo || 1;
  const f = ((v: number) => outLo + ((Math.log10(v) - llo) / span) * (outHi - outLo)) as Scale;
  const ticks: number[] = [];
  for (let d = Math.floor(llo); d <= Math.ceil(lhi); d++) {
    ticks.push(Math.pow(10, d));
  }
  f.ticks = ticks;
  return f;
}

function fmt(v: number): string {
  return Number(v.toFixed(3)).toString();
}

function fmtTick(v: number): string {
  if (v >= 0.01 && v < 10000) return Number(v.toPrecision(3)).toString();
  const exp = Math.round(Math.log10(v));
  return `1e${exp}`;
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Render parsed harness rows to a complete SVG document. */
export function renderFigure(rows: HarnessRow[], spec: FigureSpec): string {
  const series = buildSeries(rows, spec);
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);

  const allPoints = series.flatMap((s) => s.points);
  if (allPoints.length === 0) {
    parts.push(axesOnly(plotW, plotH, spec));
    parts.push(
      `<text class="warning" x="${MARGIN.left + plotW / 2}" y="${MARGIN.top + plotH / 2}" ` +
        `text-anchor="middle" fill="#a00">no data rows in CSV</text>`,
    );
    parts.push("</svg>");
    return parts.join("\n");
  }

  const xs = allPoints.map((p) => p.x);
  const ys = allPoints.map((p) => p.y).filter((y) => y > 0);
  const x = linearScale(Math.min(...xs), Math.max(...xs), MARGIN.left, MARGIN.left + plotW);
  const yLo = ys.length ? Math.min(...ys) : 1e-6;
  const yHi = ys.length ? Math.max(...ys) : 1;
  const y = spec.logY
    ? logScale(yLo, Math.max(yHi, yLo * 10), MARGIN.top + plotH, MARGIN.top)
    : linearScale(0, yHi, MARGIN.top + plotH, MARGIN.top);

  parts.push(axes(x, y, plotW, plotH, spec));
  series.forEach((s, i) => {
    parts.push(seriesGroup(s, i, x, y));
  });
  parts.push(legend(series));
  parts.push("</svg>");
  return parts.join("\n");
}

function axesOnly(plotW: number, plotH: number, spec: FigureSpec): string {
  return (
    frame(plotW, plotH) +
    `\n<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 12}" text-anchor="middle">` +
    `${esc(AXIS_LABELS[spec.xAxis])}</text>` +
    yAxisTitle(plotH, spec)
  );
}

function frame(plotW: number, plotH: number): string {
  return (
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
    `fill="none" stroke="#333"/>`
  );
}

function yAxisTitle(plotH: number, spec: FigureSpec): string {
  const label = spec.logY ? "BER (log scale)" : "BER";
  const cy = MARGIN.top + plotH / 2;
  return (
    `\n<text x="18" y="${cy}" text-anchor="middle" ` +
    `transform="rotate(-90 18 ${cy})">${label}</text>`
  );
}

function axes(x: Scale, y: Scale, plotW: number, plotH: number, spec: FigureSpec): string {
  const parts = [frame(plotW, plotH)];
  for (const t of x.ticks) {
    const px = x(t);
    parts.push(
      `<line x1="${fmt(px)}" y1="${MARGIN.top + plotH}" x2="${fmt(px)}" ` +
        `y2="${MARGIN.top + plotH + 5}" stroke="#333"/>`,
      `<text x="${fmt(px)}" y="${MARGIN.top + plotH + 18}" text-anchor="middle">${fmtTick(t)}</text>`,
    );
  }
  for (const t of y.ticks) {
    const py = y(t);
    if (py < MARGIN.top - 1 || py > MARGIN.top + plotH + 1) continue;
    parts.push(
      `<line class="gridline" x1="${MARGIN.left}" y1="${fmt(py)}" ` +
        `x2="${MARGIN.left + plotW}" y2="${fmt(py)}" stroke="#ddd"/>`,
      `<text x="${MARGIN.left - 6}" y="${fmt(py + 4)}" text-anchor="end">${fmtTick(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 12}" text-anchor="middle">` +
      `${esc(AXIS_LABELS[spec.xAxis])}</text>`,
    yAxisTitle(plotH, spec),
  );
  return parts.join("\n");
}

function seriesGroup(s: Series, index: number, x: Scale, y: Scale): string {
  const color = PALETTE[index % PALETTE.length];
  const parts = [`<g class="series${s.dashed ? " analytical" : ""}" data-label="${esc(s.label)}">`];
  const coords = s.points.map((p) => `${fmt(x(p.x))},${fmt(y(p.y))}`).join(" ");
  if (s.points.length > 1) {
    parts.push(
      `<polyline points="${coords}" fill="none" stroke="${color}" stroke-width="1.5"` +
        (s.dashed ? ` stroke-dasharray="6 4"` : "") +
        `/>`,
    );
  }
  for (const p of s.points) {
    const px = fmt(x(p.x));
    const py = fmt(y(p.y));
    if (p.censored) {
      // open downward triangle: observed zero errors, value is a CI bound
      parts.push(
        `<path class="censored" d="M ${fmt(x(p.x) - 5)} ${fmt(y(p.y) - 4)} ` +
          `L ${fmt(x(p.x) + 5)} ${fmt(y(p.y) - 4)} L ${px} ${fmt(y(p.y) + 5)} Z" ` +
          `fill="white" stroke="${color}" stroke-width="1.5"/>`,
      );
    } else if (!s.dashed) {
      parts.push(`<circle cx="${px}" cy="${py}" r="3" fill="${color}"/>`);
    }
  }
  parts.push("</g>");
  return parts.join("\n");
}

function legend(series: Series[]): string {
  const x0 = WIDTH - MARGIN.right + 12;
  const parts = [`<g class="legend">`];
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const cy = MARGIN.top + 10 + i * 18;
    parts.push(
      `<line x1="${x0}" y1="${cy}" x2="${x0 + 24}" y2="${cy}" stroke="${color}" ` +
        `stroke-width="1.5"${s.dashed ? ` stroke-dasharray="6 4"` : ""}/>`,
      `<text x="${x0 + 30}" y="${cy + 4}">${esc(s.label)}</text>`,
    );
  });
  parts.push("</g>");
  return parts.join("\n");
}
