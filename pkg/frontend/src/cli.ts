#!/usr/bin/env node
/**
 * figures — render simulator CSVs to SVG.
 *
 * Usage:
 *   figures rate_vs_k --in demo_campaign.csv --out rate.svg [--algorithm ASEG]
 *   figures timing    --in demo_campaign.csv --out timing.svg
 *   figures omega_curves --in omega.csv --out omega.svg
 *   figures beam_pattern --in zf_pair_beams_close.csv --out beams.svg
 *   figures heatmap   --in radiation_map.csv --out map.svg
 */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { SchemaError } from "./csv";
import { FigureKind } from "./options";
import { render } from "./render";

const KINDS: FigureKind[] = [
  "rate_vs_k",
  "timing",
  "omega_curves",
  "beam_pattern",
  "heatmap",
];

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .command("$0 <kind>", "render a figure from a simulator CSV", (y) =>
      y.positional("kind", {
        choices: KINDS,
        describe: "figure kind",
        type: "string",
      }),
    )
    .option("in", { type: "string", demandOption: true, describe: "input CSV" })
    .option("out", { type: "string", demandOption: true, describe: "output SVG" })
    .option("algorithm", {
      type: "string",
      describe: "algorithm filter for rate_vs_k",
    })
    .option("title", { type: "string" })
    .option("width", { type: "number", default: 840 })
    .option("height", { type: "number", default: 560 })
    .strict()
    .fail((msg, err) => {
      throw err ?? new Error(msg);
    })
    .parse();

  const out = render({
    kind: args.kind as FigureKind,
    inputCsv: args.in,
    outputImage: args.out,
    algorithm: args.algorithm,
    styling: { title: args.title, width: args.width, height: args.height },
  });
  console.log(`wrote ${out}`);
  return 0;
}

if (require.main === module) {
  main(hideBin(process.argv))
    .then((code) => process.exit(code))
    .catch((err) => {
      if (err instanceof SchemaError) {
        console.error(`error: ${err.message}`);
      } else {
        console.error(`error: ${err.message ?? err}`);
      }
      process.exit(1);
    });
}
