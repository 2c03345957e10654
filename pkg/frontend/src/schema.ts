/**
 * Harness CSV schema: parsing and validation.
 *
 * The simulation harness writes one row per (scenario, sweep point).
 * Analytical-bound rows are marked by trials = 0 and carry the bound value
 * in the `ber` column.
 */

import Papa from "papaparse";

export const CSV_COLUMNS = [
  "scenario_id",
  "framework",
  "K",
  "N",
  "p",
  "M",
  "N_A",
  "pattern",
  "rho",
  "snr_db",
  "sjr_db",
  "seed",
  "trials",
  "bits_sent",
  "bit_errors",
  "ber",
  "runtime_ms",
] as const;

export type CsvColumn = (typeof CSV_COLUMNS)[number];

export interface HarnessRow {
  scenario_id: string;
  framework: string;
  K: number;
  N: number;
  p: number;
  M: string;
  N_A: string;
  pattern: string;
  rho: number;
  snr_db: number;
  sjr_db: number;
  seed: number;
  trials: number;
  bits_sent: number;
  bit_errors: number;
  ber: number;
  runtime_ms: number;
}

export class SchemaError extends Error {}

const NUMERIC: CsvColumn[] = [
  "K", "N", "p", "rho", "snr_db", "sjr_db", "seed", "trials",
  "bits_sent", "bit_errors", "ber", "runtime_ms",
];

/** Parse harness CSV text; throws SchemaError naming any missing column. */
export function parseHarnessCsv(text: string): HarnessRow[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  const fields = parsed.meta.fields ?? [];
  for (const col of CSV_COLUMNS) {
    if (!fields.includes(col)) {
      throw new SchemaError(`missing column: ${col}`);
    }
  }
  return parsed.data.map((raw, i) => {
    const row: Record<string, string | number> = {
      scenario_id: raw.scenario_id,
      framework: raw.framework,
      M: raw.M,
      N_A: raw.N_A,
      pattern: raw.pattern,
    };
    for (const col of NUMERIC) {
      const v = Number(raw[col]);
      if (!Number.isFinite(v)) {
        throw new SchemaError(`row ${i + 1}: non-numeric ${col} value ${JSON.stringify(raw[col])}`);
      }
      row[col] = v;
    }
    return row as unknown as HarnessRow;
  });
}

/** True for analytical-bound rows (no Monte Carlo trials behind them). */
export function isBoundRow(row: HarnessRow): boolean {
  return row.trials === 0;
}
