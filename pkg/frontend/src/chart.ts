/**
 * Deterministic SVG line chart: one polyline per series, x ascending,
 * y axis fixed to [0, 1.05] for ratio data.
 */

import { Series } from './csv'

export interface ChartOptions {
  title: string
  xLabel: string
  yLabel: string
  seriesLabel: string
  width?: number
  height?: number
}

const PALETTE = [
  '#1f77b4',
  '#d62728',
  '#2ca02c',
  '#9467bd',
  '#ff7f0e',
  '#8c564b',
  '#17becf',
  '#7f7f7f',
]

const Y_MIN = 0
const Y_MAX = 1.05

function fmt(v: number): string {
  return Number(v.toFixed(2)).toString()
}

export function renderChart(series: Series[], opts: ChartOptions): string {
  const width = opts.width ?? 720
  const height = opts.height ?? 480
  const margin = { left: 64, right: 120, top: 44, bottom: 52 }
  const plotW = width - margin.left - margin.right
  const plotH = height - margin.top - margin.bottom

  const xs = series.flatMap((s) => s.points.map((p) => p.x))
  let xMin = Math.min(...xs)
  let xMax = Math.max(...xs)
  if (xMin === xMax) {
    xMin -= 0.5
    xMax += 0.5
  }
  const sx = (x: number) => margin.left + ((x - xMin) / (xMax - xMin)) * plotW
  const clampY = (y: number) => Math.min(Math.max(y, Y_MIN), Y_MAX)
  const sy = (y: number) => margin.top + (1 - (clampY(y) - Y_MIN) / (Y_MAX - Y_MIN)) * plotH

  const parts: string[] = []
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="sans-serif">`,
  )
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`)
  parts.push(
    `<text x="${width / 2}" y="24" text-anchor="middle" font-size="16">${escapeXml(opts.title)}</text>`,
  )

  // axes
  const x0 = margin.left
  const y0 = margin.top + plotH
  parts.push(`<line x1="${x0}" y1="${margin.top}" x2="${x0}" y2="${y0}" stroke="black"/>`)
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0 + plotW}" y2="${y0}" stroke="black"/>`)
  for (let i = 0; i <= 7; i++) {
    const yv = Y_MIN + ((Y_MAX - Y_MIN) * i) / 7
    const yy = sy(yv)
    parts.push(`<line x1="${x0 - 4}" y1="${yy}" x2="${x0}" y2="${yy}" stroke="black"/>`)
    parts.push(
      `<text x="${x0 - 8}" y="${yy + 4}" text-anchor="end" font-size="11">${fmt(yv)}</text>`,
    )
  }
  const xTicks = 6
  for (let i = 0; i <= xTicks; i++) {
    const xv = xMin + ((xMax - xMin) * i) / xTicks
    const xx = sx(xv)
    parts.push(`<line x1="${xx}" y1="${y0}" x2="${xx}" y2="${y0 + 4}" stroke="black"/>`)
    parts.push(
      `<text x="${xx}" y="${y0 + 18}" text-anchor="middle" font-size="11">${fmt(xv)}</text>`,
    )
  }
  parts.push(
    `<text x="${x0 + plotW / 2}" y="${height - 12}" text-anchor="middle" font-size="13">${escapeXml(opts.xLabel)}</text>`,
  )
  parts.push(
    `<text x="18" y="${margin.top + plotH / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 18 ${margin.top + plotH / 2})">${escapeXml(opts.yLabel)}</text>`,
  )

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length]
    const coords = s.points.map((p) => `${sx(p.x).toFixed(2)},${sy(p.y).toFixed(2)}`)
    if (coords.length > 1) {
      parts.push(
        `<polyline fill="none" stroke="${color}" stroke-width="2" points="${coords.join(' ')}"/>`,
      )
    }
    for (const c of coords) {
      const [cx, cy] = c.split(',')
      parts.push(`<circle cx="${cx}" cy="${cy}" r="3" fill="${color}"/>`)
    }
    const ly = margin.top + 16 + i * 18
    const lx = margin.left + plotW + 12
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 18}" y2="${ly - 4}" stroke="${color}" stroke-width="2"/>`)
    parts.push(
      `<text x="${lx + 24}" y="${ly}" font-size="12">${escapeXml(opts.seriesLabel)}=${escapeXml(s.key)}</text>`,
    )
  })

  parts.push('</svg>')
  return parts.join('\n') + '\n'
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
}
