/**
 * Figure specifications: which CSV column drives the x axis and which
 * columns split the rows into curves, plus the prepackaged presets.
 */

import { CSV_COLUMNS, CsvColumn, HarnessRow, SchemaError, isBoundRow } from "./schema.js";

export type XAxis = "snr_db" | "sjr_db" | "rho";

export interface FigureSpec {
  xAxis: XAxis;
  /** CSV columns whose values become part of the curve label. */
  groupBy: CsvColumn[];
  logY: boolean;
  overlayBounds: boolean;
}

export const FIGURE_PRESETS: Record<string, FigureSpec> = {
  fig3: { xAxis: "snr_db", groupBy: [], logY: true, overlayBounds: true },
  fig4: { xAxis: "snr_db", groupBy: ["framework", "M"], logY: true, overlayBounds: true },
  fig5a: { xAxis: "rho", groupBy: ["framework", "M"], logY: true, overlayBounds: true },
  fig5b: { xAxis: "rho", groupBy: ["framework", "M"], logY: true, overlayBounds: true },
  fig6: { xAxis: "rho", groupBy: ["framework", "M"], logY: true, overlayBounds: true },
  fig7: { xAxis: "sjr_db", groupBy: ["framework", "M"], logY: true, overlayBounds: true },
};

export function validateSpec(spec: FigureSpec): void {
  if (!["snr_db", "sjr_db", "rho"].includes(spec.xAxis)) {
    throw new SchemaError(`unsupported x axis: ${spec.xAxis}`);
  }
  for (const col of spec.groupBy) {
    if (!CSV_COLUMNS.includes(col)) {
      throw new SchemaError(`unknown group-by column: ${col}`);
    }
  }
}

/**
 * Curve stem of a scenario id: the id minus its trailing sweep tag
 * (e.g. "fig3_full_snr25" -> "fig3_full"), so the points of one sweep
 * share a curve even though every row has a distinct scenario id.
 */
export function scenarioStem(id: string): string {
  return id.replace(/_(snr|sjr|rho)m?-?\d+$/, "");
}

export interface SeriesPoint {
  x: number;
  y: number;
  /** Zero-error points are plotted at the CI upper bound, not a BER. */
  censored: boolean;
}

export interface Series {
  label: string;
  dashed: boolean;
  points: SeriesPoint[];
}

/** One point per row: measured BER, or the rule-of-three 95% upper bound
 * when no errors were observed. */
function pointOf(row: HarnessRow, spec: FigureSpec): SeriesPoint {
  if (!isBoundRow(row) && row.bit_errors === 0) {
    return { x: row[spec.xAxis], y: 3 / Math.max(row.bits_sent, 1), censored: true };
  }
  return { x: row[spec.xAxis], y: row.ber, censored: false };
}

export function buildSeries(rows: HarnessRow[], spec: FigureSpec): Series[] {
  validateSpec(spec);
  const byLabel = new Map<string, Series>();
  for (const row of rows) {
    const bound = isBoundRow(row);
    if (bound && !spec.overlayBounds) continue;
    const parts = [scenarioStem(row.scenario_id)];
    for (const col of spec.groupBy) parts.push(`${col}=${row[col]}`);
    if (bound) parts.push("(analytical)");
    const label = parts.join(" ");
    let series = byLabel.get(label);
    if (!series) {
      series = { label, dashed: bound, points: [] };
      byLabel.set(label, series);
    }
    series.points.push(pointOf(row, spec));
  }
  const out = [...byLabel.values()];
  for (const s of out) s.points.sort((a, b) => a.x - b.x);
  out.sort((a, b) => a.label.localeCompare(b.label));
  return out;
}
