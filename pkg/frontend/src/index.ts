import { readFileSync, writeFileSync } from 'fs'

import { renderChart } from './chart'
import { extractSeries, parseCsv } from './csv'

export { renderChart } from './chart'
export {
  EmptyDataError,
  MissingColumnError,
  Series,
  Table,
  columnIndex,
  extractSeries,
  parseCsv,
} from './csv'

export interface PlotSpec {
  input: string
  x: string
  series: string
  y: string
  title: string
  out: string
}

/** Read the CSV, build the chart, write the SVG; returns the SVG text. */
export function plot(spec: PlotSpec): string {
  const table = parseCsv(readFileSync(spec.input, 'utf8'))
  const series = extractSeries(table, spec.x, spec.series, spec.y)
  const svg = renderChart(series, {
    title: spec.title,
    xLabel: spec.x,
    yLabel: spec.y,
    seriesLabel: spec.series,
  })
  writeFileSync(spec.out, svg)
  return svg
}
