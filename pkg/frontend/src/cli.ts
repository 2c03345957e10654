#!/usr/bin/env node
/**
 * Command line:
 *   ajofdm-plots render --csv <path> --figure <fig3|fig4|fig5a|fig5b|fig6|fig7|custom> --out <path>
 *
 * With --figure custom the x axis comes from --x and the grouping from
 * --group (comma-separated CSV column names).
 */

import { readFileSync, writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { FIGURE_PRESETS, FigureSpec, XAxis } from "./figures.js";
import { renderFigure } from "./render.js";
import { CsvColumn, parseHarnessCsv } from "./schema.js";

export function resolveSpec(argv: {
  figure: string;
  x?: string;
  group?: string;
  linearY?: boolean;
  noBounds?: boolean;
}): FigureSpec {
  let spec: FigureSpec;
  if (argv.figure === "custom") {
    if (!argv.x) throw new Error("custom figures require --x <snr_db|sjr_db|rho>");
    spec = {
      xAxis: argv.x as XAxis,
      groupBy: (argv.group ? argv.group.split(",") : []) as CsvColumn[],
      logY: true,
      overlayBounds: true,
    };
  } else {
    const preset = FIGURE_PRESETS[argv.figure];
    if (!preset) throw new Error(`unknown figure ${argv.figure}`);
    spec = { ...preset };
  }
  if (argv.linearY) spec.logY = false;
  if (argv.noBounds) spec.overlayBounds = false;
  return spec;
}

export function runRender(csvPath: string, spec: FigureSpec, outPath: string): void {
  const rows = parseHarnessCsv(readFileSync(csvPath, "utf-8"));
  if (rows.length === 0) {
    console.warn(`warning: ${csvPath} has no data rows; rendering empty axes`);
  }
  writeFileSync(outPath, renderFigure(rows, spec));
}

export function main(args: string[]): number {
  const parser = yargs(args)
    .command(
      "render",
      "render a harness CSV to an SVG figure",
      (y) =>
        y
          .option("csv", { type: "string", demandOption: true })
          .option("figure", {
            type: "string",
            demandOption: true,
            choices: [...Object.keys(FIGURE_PRESETS), "custom"],
          })
          .option("out", { type: "string", demandOption: true })
          .option("x", { type: "string", choices: ["snr_db", "sjr_db", "rho"] })
          .option("group", { type: "string" })
          .option("linear-y", { type: "boolean", default: false })
          .option("no-bounds", { type: "boolean", default: false }),
      (argv) => {
        const spec = resolveSpec({
          figure: argv.figure as string,
          x: argv.x as string | undefined,
          group: argv.group as string | undefined,
          linearY: argv["linear-y"] as boolean,
          noBounds: argv["no-bounds"] as boolean,
        });
        runRender(argv.csv as string, spec, argv.out as string);
        console.log(`wrote ${argv.out}`);
      },
    )
    .demandCommand(1)
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      throw err ?? new Error(msg);
    });
  parser.parseSync();
  return 0;
}

const entry = process.argv[1];
if (entry && (entry.endsWith("cli.js") || entry.endsWith("ajofdm-plots"))) {
  try {
    process.exitCode = main(hideBin(process.argv));
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    process.exitCode = 1;
  }
}
