import assert from 'node:assert/strict'
import { test } from 'node:test'
import { readFileSync } from 'fs'
import { join } from 'path'
import { boxesFileSource } from '../src/detect'
import { FUSED_DIM, runExtraction } from '../src/extract'
import { readMetaJsonl } from '../src/manifest'
import { seededProjectionEmbedder, STYLE_DIM } from '../src/style'
import { readVectorBlock } from '../src/tlvb'
import { GRAY, oracleBin, oracleLab, tempDir, writeJsonl, writePng } from './helpers'

function fixture() {
  const dir = tempDir()
  writePng(join(dir, 'a.png'), 60, 40, GRAY)
  writePng(join(dir, 'b.png'), 30, 30, [230, 40, 10], [
    { x: 5, y: 5, w: 10, h: 10, rgb: [10, 40, 230] },
  ])
  writeJsonl(join(dir, 'meta.jsonl'), [
    { id: 'a', city: 'London', ts: 1370044800, lon: -0.12776, lat: 51.50735 },
    { id: 'b', city: 'Paris', ts: 1370044801, lon: 2.352222, lat: 48.85661 },
  ])
  writeJsonl(join(dir, 'boxes.jsonl'), [
    {
      id: 'a',
      boxes: [
        { label: 'person', score: 0.95, x: 0, y: 0, w: 20, h: 40 },
        { label: 'person', score: 0.85, x: 30, y: 0, w: 20, h: 40 },
      ],
    },
    { id: 'b', boxes: [{ label: 'person', score: 0.9, x: 0, y: 0, w: 30, h: 30 }] },
  ])
  return dir
}

function job(dir: string, out: string) {
  return {
    meta: readMetaJsonl(join(dir, 'meta.jsonl')),
    imagesDir: dir,
    source: boxesFileSource(join(dir, 'boxes.jsonl')),
    embedder: seededProjectionEmbedder(),
    confThreshold: 0.8,
    outDir: out,
  }
}

test('one 384-dim fused row per retained crop', () => {
  const dir = fixture()
  const report = runExtraction(job(dir, join(dir, 'out')))
  assert.equal(report.accepted, 3)
  assert.equal(report.fused_dim, 384)
  const block = readVectorBlock(join(dir, 'out', 'vectors.tlvb'))
  assert.equal(block.dim, FUSED_DIM)
  assert.equal(block.count, 3)
})

test('crop ids extend the image id; metadata fields are copied verbatim', () => {
  const dir = fixture()
  runExtraction(job(dir, join(dir, 'out')))
  const lines = readFileSync(join(dir, 'out', 'manifest.jsonl'), 'utf-8')
    .trim()
    .split('\n')
    .map((l) => JSON.parse(l))
  assert.deepEqual(
    lines.map((r) => r.id),
    ['a#0', 'a#1', 'b#0'],
  )
  assert.deepEqual(
    lines.map((r) => [r.city, r.ts, r.lon, r.lat]),
    [
      ['London', 1370044800, -0.12776, 51.50735],
      ['London', 1370044800, -0.12776, 51.50735],
      ['Paris', 1370044801, 2.352222, 48.85661],
    ],
  )
  assert.deepEqual(lines.map((r) => r.vec), [0, 1, 2])
})

test('lab segment of a uniform-gray crop lands in the oracle bin', () => {
  const dir = fixture()
  runExtraction(job(dir, join(dir, 'out')))
  const block = readVectorBlock(join(dir, 'out', 'vectors.tlvb'))
  const labSegment = block.data.slice(STYLE_DIM, FUSED_DIM) // first crop, gray image
  const bin = oracleBin(oracleLab(...GRAY))
  assert.equal(labSegment[bin], 1)
  const sum = labSegment.reduce((s, v) => s + v, 0)
  assert.ok(Math.abs(sum - 1) < 1e-6)
})

test('repeated runs are byte-identical (deterministic mode)', () => {
  const dir = fixture()
  runExtraction(job(dir, join(dir, 'out1')))
  runExtraction(job(dir, join(dir, 'out2')))
  for (const name of ['vectors.tlvb', 'manifest.jsonl', 'crops.jsonl', 'extraction.json']) {
    assert.deepEqual(
      readFileSync(join(dir, 'out1', name)),
      readFileSync(join(dir, 'out2', name)),
      name,
    )
  }
})

test('provenance sidecar maps crops back to images and boxes', () => {
  const dir = fixture()
  runExtraction(job(dir, join(dir, 'out')))
  const rows = readFileSync(join(dir, 'out', 'crops.jsonl'), 'utf-8')
    .trim()
    .split('\n')
    .map((l) => JSON.parse(l))
  assert.equal(rows.length, 3)
  assert.equal(rows[0].crop_id, 'a#0')
  assert.equal(rows[0].image_id, 'a')
  assert.deepEqual(rows[0].box, { x: 0, y: 0, w: 20, h: 40 })
  assert.equal(rows[0].score, 0.95)
})

test('extraction report names the embedder and detection source', () => {
  const dir = fixture()
  const report = runExtraction(job(dir, join(dir, 'out')))
  assert.match(report.style_embedder, /seeded-projection-v1/)
  assert.match(report.detection_source, /boxes-file/)
  const onDisk = JSON.parse(readFileSync(join(dir, 'out', 'extraction.json'), 'utf-8'))
  assert.equal(onDisk.style_embedder, report.style_embedder)
})
