/**
 * 128-dim style embeddings for crops.
 *
 * The built-in embedder is a fixed seeded random projection of a 32x32
 * grayscale average-pool of the crop: weight-free, dependency-free, and
 * byte-identical across runs.  It stands in for a real pretrained style
 * network; any substitute's name is recorded in the extraction metadata.
 * A projection matrix exported from a real model can be supplied as JSON.
 */

import { existsSync, readFileSync } from 'fs'
import { ImagePixels } from './image'

export const STYLE_DIM = 128
const POOL = 32 // grayscale pooling grid, POOL*POOL inputs to the projection

export interface StyleEmbedder {
  name: string
  embed(crop: ImagePixels): Float32Array
}

// Deterministic 32-bit PRNG (mulberry32); Math.random is not seedable.
function mulberry32(seed: number): () => number {
  let state = seed | 0
  return () => {
    state = (state + 0x6d2b79f5) | 0
    let t = Math.imul(state ^ (state >>> 15), 1 | state)
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296
  }
}

export function grayPool(crop: ImagePixels, grid: number = POOL): Float64Array {
  const out = new Float64Array(grid * grid)
  for (let ty = 0; ty < grid; ty++) {
    const y0 = Math.floor((ty * crop.height) / grid)
    const y1 = Math.max(y0 + 1, Math.floor(((ty + 1) * crop.height) / grid))
    for (let tx = 0; tx < grid; tx++) {
      const x0 = Math.floor((tx * crop.width) / grid)
      const x1 = Math.max(x0 + 1, Math.floor(((tx + 1) * crop.width) / grid))
      let sum = 0
      for (let y = y0; y < y1; y++) {
        for (let x = x0; x < x1; x++) {
          const p = 3 * (y * crop.width + x)
          sum += (crop.rgb[p] + crop.rgb[p + 1] + crop.rgb[p + 2]) / 3
        }
      }
      out[ty * grid + tx] = sum / ((y1 - y0) * (x1 - x0)) / 255
    }
  }
  return out
}

function projectionEmbedder(name: string, matrix: Float64Array[]): StyleEmbedder {
  return {
    name,
    embed(crop: ImagePixels): Float32Array {
      const g = grayPool(crop)
      const out = new Float32Array(STYLE_DIM)
      for (let i = 0; i < STYLE_DIM; i++) {
        let acc = 0
        const row = matrix[i]
        for (let j = 0; j < g.length; j++) {
          acc += row[j] * g[j]
        }
        out[i] = acc
      }
      return out
    },
  }
}

export function seededProjectionEmbedder(seed = 0x7a11): StyleEmbedder {
  const rng = mulberry32(seed)
  const scale = 1 / Math.sqrt(POOL * POOL)
  const matrix: Float64Array[] = []
  for (let i = 0; i < STYLE_DIM; i++) {
    const row = new Float64Array(POOL * POOL)
    for (let j = 0; j < row.length; j++) {
      row[j] = (2 * rng() - 1) * scale
    }
    matrix.push(row)
  }
  return projectionEmbedder(`seeded-projection-v1(seed=${seed})`, matrix)
}

/** Load a 128x1024 projection matrix exported from a real style model. */
export function modelFileEmbedder(path: string): StyleEmbedder {
  if (!existsSync(path)) {
    throw new Error(
      `style model not found at ${path}; export your embedding head as JSON ` +
        `{"name": ..., "matrix": 128x${POOL * POOL} weights} and pass it via ` +
        `--style-model, or omit the flag to use the built-in deterministic embedder`,
    )
  }
  const parsed = JSON.parse(readFileSync(path, 'utf-8'))
  const matrix: number[][] = parsed.matrix
  if (!Array.isArray(matrix) || matrix.length !== STYLE_DIM) {
    throw new Error(`${path}: expected ${STYLE_DIM} projection rows`)
  }
  const rows = matrix.map((row, i) => {
    if (!Array.isArray(row) || row.length !== POOL * POOL) {
      throw new Error(`${path}: row ${i} must have ${POOL * POOL} weights`)
    }
    return Float64Array.from(row)
  })
  return projectionEmbedder(String(parsed.name ?? `model-file(${path})`), rows)
}
