#!/usr/bin/env node
/**
 * extract --images <dir> --meta <jsonl> --conf 0.8 --out <workspace>
 *         [--boxes <jsonl> | --detector-cmd "<command>"] [--style-model <json>]
 *
 * Writes manifest.jsonl + vectors.tlvb (+ crops.jsonl, extraction.json)
 * ready for the corpus library's ingest. Exit codes: 0 ok, 2 bad input.
 */

import {
  DEFAULT_CONFIDENCE,
  DetectionSource,
  boxesFileSource,
  detectorCommandSource,
  offlineSetupError,
} from './detect'
import { runExtraction } from './extract'
import { readMetaJsonl } from './manifest'
import { StyleEmbedder, modelFileEmbedder, seededProjectionEmbedder } from './style'

interface Args {
  images?: string
  meta?: string
  out?: string
  conf: number
  boxes?: string
  detectorCmd?: string
  styleModel?: string
}

function parseArgs(argv: string[]): Args {
  const args: Args = { conf: DEFAULT_CONFIDENCE }
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i]
    const next = () => {
      if (i + 1 >= argv.length) throw new Error(`${flag} needs a value`)
      return argv[++i]
    }
    switch (flag) {
      case 'extract':
        break // single-command CLI; the verb is optional
      case '--images':
        args.images = next()
        break
      case '--meta':
        args.meta = next()
        break
      case '--out':
        args.out = next()
        break
      case '--conf':
        args.conf = Number(next())
        break
      case '--boxes':
        args.boxes = next()
        break
      case '--detector-cmd':
        args.detectorCmd = next()
        break
      case '--style-model':
        args.styleModel = next()
        break
      default:
        throw new Error(`unknown flag ${flag}`)
    }
  }
  return args
}

export function main(argv: string[]): number {
  let args: Args
  try {
    args = parseArgs(argv)
    if (!args.images || !args.meta || !args.out) {
      throw new Error('required: --images <dir> --meta <jsonl> --out <workspace>')
    }
    if (!Number.isFinite(args.conf)) {
      throw new Error('--conf must be a number')
    }

    let source: DetectionSource
    if (args.boxes) {
      source = boxesFileSource(args.boxes)
    } else if (args.detectorCmd) {
      source = detectorCommandSource(args.detectorCmd)
    } else {
      throw offlineSetupError()
    }
    const embedder: StyleEmbedder = args.styleModel
      ? modelFileEmbedder(args.styleModel)
      : seededProjectionEmbedder()

    const report = runExtraction(
      {
        meta: readMetaJsonl(args.meta),
        imagesDir: args.images,
        source,
        embedder,
        confThreshold: args.conf,
        outDir: args.out,
      },
      (msg) => console.error(msg),
    )
    console.log(
      `extracted ${report.accepted} crops from ${report.images} images ` +
        `(${report.skipped.length} skipped, ${report.dropped_boxes} boxes dropped) -> ${args.out}`,
    )
    return 0
  } catch (e) {
    console.error(`error: ${e instanceof Error ? e.message : e}`)
    return 2
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)))
}
