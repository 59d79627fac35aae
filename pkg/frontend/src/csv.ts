/**
 * Reader for the experiment CSV output: `#` comment lines, then a header
 * row, then data rows. Parsing never mutates the input file.
 */

export class MissingColumnError extends Error {
  constructor(column: string, header: string[]) {
    super(`missing column "${column}" (header has: ${header.join(', ')})`)
    this.name = 'MissingColumnError'
  }
}

export class EmptyDataError extends Error {
  constructor(message: string) {
    super(message)
    this.name = 'EmptyDataError'
  }
}

export interface Table {
  header: string[]
  rows: string[][]
  comments: string[]
}

export function parseCsv(text: string): Table {
  const comments: string[] = []
  const lines: string[] = []
  for (const raw of text.split(/\r?\n/)) {
    const line = raw.trim()
    if (line === '') continue
    if (line.startsWith('#')) {
      comments.push(line)
      continue
    }
    lines.push(line)
  }
  if (lines.length === 0) {
    throw new EmptyDataError('no header row in CSV input')
  }
  const header = lines[0].split(',').map((s) => s.trim())
  const rows = lines.slice(1).map((ln) => ln.split(',').map((s) => s.trim()))
  return { header, rows, comments }
}

export function columnIndex(table: Table, name: string): number {
  const i = table.header.indexOf(name)
  if (i < 0) throw new MissingColumnError(name, table.header)
  return i
}

export interface SeriesPoint {
  x: number
  y: number
}

export interface Series {
  key: string
  points: SeriesPoint[]
}

/**
 * Group rows into one series per distinct value of `seriesCol`, with
 * points sorted by ascending x. Rows whose x or y does not parse as a
 * finite number (e.g. excluded cells reported as nan) are dropped.
 */
export function extractSeries(
  table: Table,
  xCol: string,
  seriesCol: string,
  yCol: string,
): Series[] {
  const xi = columnIndex(table, xCol)
  const si = columnIndex(table, seriesCol)
  const yi = columnIndex(table, yCol)
  const groups = new Map<string, SeriesPoint[]>()
  for (const row of table.rows) {
    const x = Number(row[xi])
    const y = Number(row[yi])
    if (!Number.isFinite(x) || !Number.isFinite(y)) continue
    const key = row[si]
    const pts = groups.get(key)
    if (pts) pts.push({ x, y })
    else groups.set(key, [{ x, y }])
  }
  if (groups.size === 0) {
    throw new EmptyDataError('no plottable rows after filtering')
  }
  const keys = [...groups.keys()].sort((a, b) => {
    const na = Number(a)
    const nb = Number(b)
    if (Number.isFinite(na) && Number.isFinite(nb)) return na - nb
    return a < b ? -1 : a > b ? 1 : 0
  })
  return keys.map((key) => {
    const points = groups.get(key)!
    points.sort((a, b) => a.x - b.x)
    return { key, points }
  })
}
