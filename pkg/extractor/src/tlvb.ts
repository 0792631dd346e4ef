/**
 * Binary vector-block format shared with the corpus library:
 * magic "TLVB" | u32 version=1 | u32 dim | u64 count | count*dim float32,
 * everything little-endian.
 */

import { readFileSync, writeFileSync } from 'fs'

export const MAGIC = 'TLVB'
export const VERSION = 1
export const HEADER_BYTES = 4 + 4 + 4 + 8

export interface VectorBlock {
  dim: number
  count: number
  data: Float32Array // row-major, count * dim entries
}

export function writeVectorBlock(path: string, rows: Float32Array[], dim: number): void {
  const header = Buffer.alloc(HEADER_BYTES)
  header.write(MAGIC, 0, 'ascii')
  header.writeUInt32LE(VERSION, 4)
  header.writeUInt32LE(dim, 8)
  header.writeBigUInt64LE(BigInt(rows.length), 12)

  const payload = Buffer.alloc(4 * dim * rows.length)
  rows.forEach((row, i) => {
    if (row.length !== dim) {
      throw new Error(`row ${i} has ${row.length} values, expected ${dim}`)
    }
    for (let j = 0; j < dim; j++) {
      const v = row[j]
      if (!Number.isFinite(v)) {
        throw new Error(`row ${i} column ${j} is not finite (${v})`)
      }
      payload.writeFloatLE(v, 4 * (i * dim + j))
    }
  })
  writeFileSync(path, Buffer.concat([header, payload]))
}

export function readVectorBlock(path: string): VectorBlock {
  const buf = readFileSync(path)
  if (buf.length < HEADER_BYTES || buf.toString('ascii', 0, 4) !== MAGIC) {
    throw new Error(`${path}: not a ${MAGIC} vector block`)
  }
  const version = buf.readUInt32LE(4)
  if (version !== VERSION) {
    throw new Error(`${path}: unsupported version ${version}`)
  }
  const dim = buf.readUInt32LE(8)
  const count = Number(buf.readBigUInt64LE(12))
  const expected = HEADER_BYTES + 4 * dim * count
  if (buf.length !== expected) {
    throw new Error(`${path}: expected ${expected} bytes, found ${buf.length}`)
  }
  const data = new Float32Array(count * dim)
  for (let i = 0; i < data.length; i++) {
    data[i] = buf.readFloatLE(HEADER_BYTES + 4 * i)
  }
  return { dim, count, data }
}
