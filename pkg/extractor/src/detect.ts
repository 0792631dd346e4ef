/**
 * Person detection sources and crop extraction.
 *
 * Detection itself runs in an off-the-shelf detector: either ahead of time
 * (a detections JSONL passed with --boxes) or invoked per image as an
 * external command (--detector-cmd).  Only boxes labeled "person" with
 * confidence >= the threshold are cropped.
 */

import { execFileSync } from 'child_process'
import { readFileSync } from 'fs'
import { Box, ImagePixels, clampBox, cropPixels, loadPng } from './image'

export const PERSON_LABEL = 'person'
export const DEFAULT_CONFIDENCE = 0.8

export interface Detection {
  label: string
  score: number
  x: number
  y: number
  w: number
  h: number
}

export interface DetectionSource {
  name: string
  boxesFor(imageId: string, imagePath: string): Detection[]
}

export interface ImageEntry {
  id: string
  path: string
}

export interface CropResult {
  imageId: string
  cropIndex: number
  box: Box
  score: number
  pixels: ImagePixels
}

export interface DetectReport {
  crops: CropResult[]
  skipped: { id: string; reason: string }[]
  droppedBoxes: number // below threshold, non-person, or outside the image
}

function parseDetection(raw: any, where: string): Detection {
  for (const key of ['label', 'score', 'x', 'y', 'w', 'h']) {
    if (!(key in raw)) {
      throw new Error(`${where}: detection missing key ${key}`)
    }
  }
  return {
    label: String(raw.label),
    score: Number(raw.score),
    x: Number(raw.x),
    y: Number(raw.y),
    w: Number(raw.w),
    h: Number(raw.h),
  }
}

/** JSONL rows {id, boxes: [{label, score, x, y, w, h}]} keyed by image id. */
export function boxesFileSource(path: string): DetectionSource {
  const byId = new Map<string, Detection[]>()
  const lines = readFileSync(path, 'utf-8').split('\n')
  lines.forEach((line, i) => {
    if (!line.trim()) return
    let obj: any
    try {
      obj = JSON.parse(line)
    } catch (e) {
      throw new Error(`${path} line ${i + 1}: not JSON (${e})`)
    }
    const boxes = (obj.boxes ?? []).map((b: any) =>
      parseDetection(b, `${path} line ${i + 1}`),
    )
    byId.set(String(obj.id), boxes)
  })
  return {
    name: `boxes-file(${path})`,
    boxesFor(imageId: string): Detection[] {
      return byId.get(imageId) ?? []
    },
  }
}

/** Run `command <imagePath>`; it must print a JSON array of detections. */
export function detectorCommandSource(command: string): DetectionSource {
  const [cmd, ...args] = command.split(' ').filter(Boolean)
  return {
    name: `detector-cmd(${command})`,
    boxesFor(imageId: string, imagePath: string): Detection[] {
      const stdout = execFileSync(cmd, [...args, imagePath], { encoding: 'utf-8' })
      const parsed = JSON.parse(stdout)
      if (!Array.isArray(parsed)) {
        throw new Error(`detector output for ${imageId} is not a JSON array`)
      }
      return parsed.map((b) => parseDetection(b, `detector output for ${imageId}`))
    },
  }
}

export function offlineSetupError(): Error {
  return new Error(
    'no detection source configured: run any pretrained person detector offline ' +
      'and pass --boxes <detections.jsonl> (rows {id, boxes: [{label, score, x, y, w, h}]}), ' +
      'or pass --detector-cmd "<command>" to invoke one per image',
  )
}

export function detectAndCrop(
  images: ImageEntry[],
  source: DetectionSource,
  confThreshold: number = DEFAULT_CONFIDENCE,
  log: (msg: string) => void = () => {},
): DetectReport {
  const crops: CropResult[] = []
  const skipped: { id: string; reason: string }[] = []
  let dropped = 0
  for (const entry of images) {
    let pixels: ImagePixels
    try {
      pixels = loadPng(entry.path)
    } catch (e) {
      skipped.push({ id: entry.id, reason: String(e) })
      log(`skipping unreadable image ${entry.id}: ${e}`)
      continue
    }
    let index = 0
    for (const det of source.boxesFor(entry.id, entry.path)) {
      if (det.label !== PERSON_LABEL || det.score < confThreshold) {
        dropped++
        continue
      }
      const box = clampBox(pixels, det)
      if (!box) {
        dropped++
        log(`dropping out-of-frame box on ${entry.id}`)
        continue
      }
      crops.push({
        imageId: entry.id,
        cropIndex: index++,
        box,
        score: det.score,
        pixels: cropPixels(pixels, box),
      })
    }
  }
  return { crops, skipped, droppedBoxes: dropped }
}
