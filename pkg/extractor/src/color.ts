/**
 * sRGB -> CIE L*a*b* (D65) and the 256-bin joint Lab histogram used as the
 * color half of a crop descriptor.
 *
 * Binning: 4 L* bins of width 25 over [0, 100], 8 a* and 8 b* bins of width
 * 32 over [-128, 128), flattened as lBin*64 + aBin*8 + bBin.  Histograms
 * are L1-normalized so crop size does not change the descriptor scale.
 */

export interface Lab {
  l: number
  a: number
  b: number
}

// D65 reference white
const XN = 0.95047
const YN = 1.0
const ZN = 1.08883

const DELTA = 6 / 29

function srgbLinear(c: number): number {
  const v = c / 255
  return v <= 0.04045 ? v / 12.92 : Math.pow((v + 0.055) / 1.055, 2.4)
}

function fLab(t: number): number {
  return t > DELTA * DELTA * DELTA ? Math.cbrt(t) : t / (3 * DELTA * DELTA) + 4 / 29
}

export function srgbToLab(r: number, g: number, b: number): Lab {
  const rl = srgbLinear(r)
  const gl = srgbLinear(g)
  const bl = srgbLinear(b)
  const x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl
  const y = 0.2126729 * rl + 0.7151522 * gl + 0.072175 * bl
  const z = 0.0193339 * rl + 0.119192 * gl + 0.9503041 * bl
  const fx = fLab(x / XN)
  const fy = fLab(y / YN)
  const fz = fLab(z / ZN)
  return { l: 116 * fy - 16, a: 500 * (fx - fy), b: 200 * (fy - fz) }
}

export const LAB_HISTOGRAM_BINS = 256
const L_BINS = 4
const AB_BINS = 8

function clampIndex(i: number, bins: number): number {
  return Math.min(Math.max(i, 0), bins - 1)
}

export function labBinIndex(lab: Lab): number {
  const lBin = clampIndex(Math.floor(lab.l / 25), L_BINS)
  const aBin = clampIndex(Math.floor((lab.a + 128) / 32), AB_BINS)
  const bBin = clampIndex(Math.floor((lab.b + 128) / 32), AB_BINS)
  return lBin * AB_BINS * AB_BINS + aBin * AB_BINS + bBin
}

/** rgb holds 3 bytes per pixel; the result sums to 1 for non-empty input. */
export function labHistogram(rgb: Uint8Array): Float32Array {
  if (rgb.length % 3 !== 0) {
    throw new Error(`rgb buffer length ${rgb.length} is not a multiple of 3`)
  }
  const hist = new Float64Array(LAB_HISTOGRAM_BINS)
  const pixels = rgb.length / 3
  if (pixels === 0) {
    throw new Error('empty pixel buffer')
  }
  for (let p = 0; p < pixels; p++) {
    const lab = srgbToLab(rgb[3 * p], rgb[3 * p + 1], rgb[3 * p + 2])
    hist[labBinIndex(lab)] += 1
  }
  const out = new Float32Array(LAB_HISTOGRAM_BINS)
  for (let i = 0; i < LAB_HISTOGRAM_BINS; i++) {
    out[i] = hist[i] / pixels
  }
  return out
}
