/**
 * Adapter round-trip: everything this package writes must load through the
 * corpus library's own loaders (invoked here as a real subprocess) with
 * zero validation errors and verbatim metadata.
 */

import assert from 'node:assert/strict'
import { test } from 'node:test'
import { spawnSync } from 'child_process'
import { existsSync, readFileSync } from 'fs'
import { join } from 'path'
import { main } from '../src/cli'
import { STYLE_DIM } from '../src/style'
import { readVectorBlock } from '../src/tlvb'
import { GRAY, oracleBin, oracleLab, tempDir, writeJsonl, writePng } from './helpers'

const PYTHON = process.env.STYLESCAPE_PYTHON ?? 'python3'

function havePrimary(): boolean {
  const probe = spawnSync(PYTHON, ['-c', 'import stylescape'], { encoding: 'utf-8' })
  return probe.status === 0
}

function buildFixture() {
  const dir = tempDir()
  writePng(join(dir, 'snap-1.png'), 50, 80, GRAY)
  writePng(join(dir, 'snap-2.png'), 64, 64, [210, 30, 20], [
    { x: 8, y: 8, w: 20, h: 40, rgb: [20, 30, 210] },
  ])
  writePng(join(dir, 'snap-3.png'), 32, 32, [40, 200, 90])
  const meta = [
    { id: 'snap-1', city: 'London', ts: 1370044800, lon: -0.12776, lat: 51.50735 },
    { id: 'snap-2', city: 'Paris', ts: 1400000000, lon: 2.352222, lat: 48.85661 },
    { id: 'snap-3', city: 'Paris', ts: 1400000500, lon: 2.36, lat: 48.86 },
  ]
  writeJsonl(join(dir, 'meta.jsonl'), meta)
  writeJsonl(join(dir, 'boxes.jsonl'), [
    { id: 'snap-1', boxes: [{ label: 'person', score: 0.99, x: 0, y: 0, w: 50, h: 80 }] },
    {
      id: 'snap-2',
      boxes: [
        { label: 'person', score: 0.91, x: 8, y: 8, w: 20, h: 40 },
        { label: 'person', score: 0.86, x: 30, y: 10, w: 20, h: 40 },
        { label: 'dog', score: 0.99, x: 0, y: 0, w: 10, h: 10 },
      ],
    },
    { id: 'snap-3', boxes: [{ label: 'person', score: 0.5, x: 0, y: 0, w: 10, h: 10 }] },
  ])
  return { dir, meta }
}

test('CLI writes a workspace the primary loaders ingest without errors', (t) => {
  if (!havePrimary()) {
    t.skip('stylescape python package not importable')
    return
  }
  const { dir, meta } = buildFixture()
  const out = join(dir, 'out')
  const code = main([
    'extract',
    '--images', dir,
    '--meta', join(dir, 'meta.jsonl'),
    '--boxes', join(dir, 'boxes.jsonl'),
    '--conf', '0.8',
    '--out', out,
  ])
  assert.equal(code, 0)

  // 3 person crops survive: snap-1 (1), snap-2 (2); snap-3's box is 0.5 < 0.8.
  const block = readVectorBlock(join(out, 'vectors.tlvb'))
  assert.equal(block.count, 3)
  assert.equal(block.dim, 384)

  const ws = join(dir, 'ws')
  const ingest = spawnSync(
    PYTHON,
    ['-m', 'stylescape.cli', 'ingest',
     '--manifest', join(out, 'manifest.jsonl'),
     '--vectors', join(out, 'vectors.tlvb'),
     '--out', ws],
    { encoding: 'utf-8' },
  )
  assert.equal(ingest.status, 0, ingest.stderr)
  const report = JSON.parse(readFileSync(join(ws, 'ingest_report.json'), 'utf-8'))
  assert.equal(report.accepted, 3)
  assert.deepEqual(report.rejected, [])
  assert.equal(report.dim, 384)
  assert.ok(existsSync(join(ws, 'vectors.tlvb')))

  // Metadata fields byte-identical: serialize each field the same way the
  // input rows did and compare against what came through the workspace.
  const ingested = readFileSync(join(ws, 'manifest.jsonl'), 'utf-8')
    .trim()
    .split('\n')
    .map((l) => JSON.parse(l))
  const metaById = new Map(meta.map((m) => [m.id, m]))
  assert.equal(ingested.length, 3)
  for (const row of ingested) {
    const src = metaById.get(String(row.id).split('#')[0])!
    for (const key of ['city', 'ts', 'lon', 'lat'] as const) {
      assert.equal(JSON.stringify(row[key]), JSON.stringify(src[key]), `${row.id}.${key}`)
    }
  }

  // The gray crop's Lab mass sits in the oracle-computed bin even after the
  // primary round-trip rewrote the vector file.
  const rewritten = readVectorBlock(join(ws, 'vectors.tlvb'))
  const grayRow = ingested.find((r) => r.id === 'snap-1#0')!
  const lab = rewritten.data.slice(
    grayRow.vec * 384 + STYLE_DIM,
    (grayRow.vec + 1) * 384,
  )
  assert.equal(lab[oracleBin(oracleLab(...GRAY))], 1)
})

test('CLI without a detection source explains the offline setup', () => {
  const { dir } = buildFixture()
  const code = main([
    'extract',
    '--images', dir,
    '--meta', join(dir, 'meta.jsonl'),
    '--out', join(dir, 'out2'),
  ])
  assert.equal(code, 2)
})

test('CLI with a missing style model errors with instructions', () => {
  const { dir } = buildFixture()
  const code = main([
    'extract',
    '--images', dir,
    '--meta', join(dir, 'meta.jsonl'),
    '--boxes', join(dir, 'boxes.jsonl'),
    '--style-model', join(dir, 'nope.json'),
    '--out', join(dir, 'out3'),
  ])
  assert.equal(code, 2)
})

test('default confidence threshold is 0.8', () => {
  const { dir } = buildFixture()
  const out = join(dir, 'out4')
  const code = main([
    'extract',
    '--images', dir,
    '--meta', join(dir, 'meta.jsonl'),
    '--boxes', join(dir, 'boxes.jsonl'),
    '--out', out,
  ])
  assert.equal(code, 0)
  const report = JSON.parse(readFileSync(join(out, 'extraction.json'), 'utf-8'))
  assert.equal(report.confidence_threshold, 0.8)
})
