/** Record metadata: the corpus JSONL schema (id, city, ts, lon, lat, vec). */

import { readFileSync, writeFileSync } from 'fs'

export interface MetaRow {
  id: string
  city: string
  ts: number
  lon: number
  lat: number
}

export interface ManifestRow extends MetaRow {
  vec: number
}

export function readMetaJsonl(path: string): MetaRow[] {
  const rows: MetaRow[] = []
  const seen = new Set<string>()
  readFileSync(path, 'utf-8')
    .split('\n')
    .forEach((line, i) => {
      if (!line.trim()) return
      let obj: any
      try {
        obj = JSON.parse(line)
      } catch (e) {
        throw new Error(`${path} line ${i + 1}: not JSON (${e})`)
      }
      for (const key of ['id', 'city', 'ts', 'lon', 'lat']) {
        if (!(key in obj)) {
          throw new Error(`${path} line ${i + 1}: missing key ${key}`)
        }
      }
      const id = String(obj.id)
      if (seen.has(id)) {
        throw new Error(`${path} line ${i + 1}: duplicate id ${id}`)
      }
      seen.add(id)
      rows.push({
        id,
        city: String(obj.city),
        ts: Number(obj.ts),
        lon: Number(obj.lon),
        lat: Number(obj.lat),
      })
    })
  return rows
}

/** Keys are written alphabetically, matching the corpus library's writer. */
export function writeManifestJsonl(path: string, rows: ManifestRow[]): void {
  const lines = rows.map((r) =>
    JSON.stringify({ city: r.city, id: r.id, lat: r.lat, lon: r.lon, ts: r.ts, vec: r.vec }),
  )
  writeFileSync(path, lines.join('\n') + (lines.length ? '\n' : ''))
}
