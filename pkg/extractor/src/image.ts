/** PNG loading and pixel cropping. */

import { readFileSync } from 'fs'
import { PNG } from 'pngjs'

export interface ImagePixels {
  width: number
  height: number
  rgb: Uint8Array // 3 bytes per pixel, row-major
}

export interface Box {
  x: number
  y: number
  w: number
  h: number
}

export function loadPng(path: string): ImagePixels {
  const png = PNG.sync.read(readFileSync(path))
  const rgb = new Uint8Array(png.width * png.height * 3)
  for (let p = 0; p < png.width * png.height; p++) {
    rgb[3 * p] = png.data[4 * p]
    rgb[3 * p + 1] = png.data[4 * p + 1]
    rgb[3 * p + 2] = png.data[4 * p + 2]
  }
  return { width: png.width, height: png.height, rgb }
}

/** Intersect the box with the image; null when nothing remains. */
export function clampBox(img: ImagePixels, box: Box): Box | null {
  const x0 = Math.max(0, Math.floor(box.x))
  const y0 = Math.max(0, Math.floor(box.y))
  const x1 = Math.min(img.width, Math.ceil(box.x + box.w))
  const y1 = Math.min(img.height, Math.ceil(box.y + box.h))
  if (x1 <= x0 || y1 <= y0) {
    return null
  }
  return { x: x0, y: y0, w: x1 - x0, h: y1 - y0 }
}

export function cropPixels(img: ImagePixels, box: Box): ImagePixels {
  const clamped = clampBox(img, box)
  if (!clamped) {
    throw new Error(`box ${JSON.stringify(box)} lies outside the image`)
  }
  const rgb = new Uint8Array(clamped.w * clamped.h * 3)
  for (let row = 0; row < clamped.h; row++) {
    const src = 3 * ((clamped.y + row) * img.width + clamped.x)
    rgb.set(img.rgb.subarray(src, src + 3 * clamped.w), 3 * row * clamped.w)
  }
  return { width: clamped.w, height: clamped.h, rgb }
}
