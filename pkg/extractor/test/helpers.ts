import { mkdtempSync, writeFileSync } from 'fs'
import { tmpdir } from 'os'
import { join } from 'path'
import { PNG } from 'pngjs'

export function tempDir(prefix = 'extractor-test-'): string {
  return mkdtempSync(join(tmpdir(), prefix))
}

export interface Patch {
  x: number
  y: number
  w: number
  h: number
  rgb: [number, number, number]
}

/** Solid-color PNG with optional painted rectangles. */
export function writePng(
  path: string,
  width: number,
  height: number,
  base: [number, number, number],
  patches: Patch[] = [],
): void {
  const png = new PNG({ width, height })
  for (let p = 0; p < width * height; p++) {
    png.data[4 * p] = base[0]
    png.data[4 * p + 1] = base[1]
    png.data[4 * p + 2] = base[2]
    png.data[4 * p + 3] = 255
  }
  for (const patch of patches) {
    for (let y = patch.y; y < patch.y + patch.h; y++) {
      for (let x = patch.x; x < patch.x + patch.w; x++) {
        const p = 4 * (y * width + x)
        png.data[p] = patch.rgb[0]
        png.data[p + 1] = patch.rgb[1]
        png.data[p + 2] = patch.rgb[2]
      }
    }
  }
  writeFileSync(path, PNG.sync.write(png))
}

export function writeJsonl(path: string, rows: object[]): void {
  writeFileSync(path, rows.map((r) => JSON.stringify(r)).join('\n') + '\n')
}

/**
 * Reference sRGB -> Lab oracle, written in the classic decimal-constant
 * formulation (0.008856 / 7.787) so it is an independent route from the
 * package's rational-threshold implementation.
 */
export function oracleLab(r: number, g: number, b: number): { l: number; a: number; b: number } {
  const lin = (c: number) => {
    const v = c / 255
    return v <= 0.04045 ? v / 12.92 : Math.pow((v + 0.055) / 1.055, 2.4)
  }
  const rl = lin(r)
  const gl = lin(g)
  const bl = lin(b)
  const f = (t: number) => (t > 0.008856 ? Math.pow(t, 1 / 3) : 7.787 * t + 16 / 116)
  const fx = f((0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl) / 0.95047)
  const fy = f((0.2126729 * rl + 0.7151522 * gl + 0.072175 * bl) / 1.0)
  const fz = f((0.0193339 * rl + 0.119192 * gl + 0.9503041 * bl) / 1.08883)
  return { l: 116 * fy - 16, a: 500 * (fx - fy), b: 200 * (fy - fz) }
}

/** Bin index per the documented 4x8x8 layout, computed from oracle values. */
export function oracleBin(lab: { l: number; a: number; b: number }): number {
  const clamp = (i: number, n: number) => Math.min(Math.max(i, 0), n - 1)
  const lBin = clamp(Math.floor(lab.l / 25), 4)
  const aBin = clamp(Math.floor((lab.a + 128) / 32), 8)
  const bBin = clamp(Math.floor((lab.b + 128) / 32), 8)
  return lBin * 64 + aBin * 8 + bBin
}

export const GRAY: [number, number, number] = [128, 128, 128]
