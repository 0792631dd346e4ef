/**
 * Orchestration: metadata + images + detections -> person crops -> fused
 * style[128] + lab[256] descriptor rows in the corpus on-disk formats.
 */

import { mkdirSync, writeFileSync } from 'fs'
import { join } from 'path'
import { LAB_HISTOGRAM_BINS, labHistogram } from './color'
import { CropResult, DetectReport, DetectionSource, detectAndCrop } from './detect'
import { ManifestRow, MetaRow, writeManifestJsonl } from './manifest'
import { STYLE_DIM, StyleEmbedder } from './style'
import { writeVectorBlock } from './tlvb'

export const FUSED_DIM = STYLE_DIM + LAB_HISTOGRAM_BINS // 384, pre-PCA

export interface ExtractionJob {
  meta: MetaRow[]
  imagesDir: string
  source: DetectionSource
  embedder: StyleEmbedder
  confThreshold: number
  outDir: string
}

export interface ExtractionReport {
  accepted: number
  images: number
  skipped: { id: string; reason: string }[]
  dropped_boxes: number
  confidence_threshold: number
  fused_dim: number
  style_dim: number
  lab_bins: number
  style_embedder: string
  detection_source: string
  files: { manifest: string; vectors: string; crops: string }
}

export function descriptorRow(crop: CropResult, embedder: StyleEmbedder): Float32Array {
  const row = new Float32Array(FUSED_DIM)
  row.set(embedder.embed(crop.pixels), 0)
  row.set(labHistogram(crop.pixels.rgb), STYLE_DIM)
  return row
}

/** Crop ids are `<image id>#<crop index>`; all other metadata is copied verbatim. */
export function cropId(imageId: string, cropIndex: number): string {
  return `${imageId}#${cropIndex}`
}

export function runExtraction(job: ExtractionJob, log: (msg: string) => void = () => {}): ExtractionReport {
  const metaById = new Map(job.meta.map((m) => [m.id, m]))
  const images = job.meta.map((m) => ({ id: m.id, path: join(job.imagesDir, `${m.id}.png`) }))
  const report: DetectReport = detectAndCrop(images, job.source, job.confThreshold, log)

  const rows: Float32Array[] = []
  const manifest: ManifestRow[] = []
  const provenance: string[] = []
  for (const crop of report.crops) {
    const meta = metaById.get(crop.imageId)!
    manifest.push({
      id: cropId(crop.imageId, crop.cropIndex),
      city: meta.city,
      ts: meta.ts,
      lon: meta.lon,
      lat: meta.lat,
      vec: rows.length,
    })
    provenance.push(
      JSON.stringify({
        crop_id: cropId(crop.imageId, crop.cropIndex),
        image_id: crop.imageId,
        box: crop.box,
        score: crop.score,
      }),
    )
    rows.push(descriptorRow(crop, job.embedder))
  }

  mkdirSync(job.outDir, { recursive: true })
  const files = {
    manifest: join(job.outDir, 'manifest.jsonl'),
    vectors: join(job.outDir, 'vectors.tlvb'),
    crops: join(job.outDir, 'crops.jsonl'),
  }
  writeVectorBlock(files.vectors, rows, FUSED_DIM)
  writeManifestJsonl(files.manifest, manifest)
  writeFileSync(files.crops, provenance.join('\n') + (provenance.length ? '\n' : ''))

  const summary: ExtractionReport = {
    accepted: rows.length,
    images: images.length,
    skipped: report.skipped,
    dropped_boxes: report.droppedBoxes,
    confidence_threshold: job.confThreshold,
    fused_dim: FUSED_DIM,
    style_dim: STYLE_DIM,
    lab_bins: LAB_HISTOGRAM_BINS,
    style_embedder: job.embedder.name,
    detection_source: job.source.name,
    files: {
      manifest: 'manifest.jsonl',
      vectors: 'vectors.tlvb',
      crops: 'crops.jsonl',
    },
  }
  writeFileSync(join(job.outDir, 'extraction.json'), JSON.stringify(summary, null, 2) + '\n')
  return summary
}
