#!/usr/bin/env node
/**
 * stochmatch-plot --input results.csv --out chart.svg
 *                 [--x f] [--series R] [--y ratio] [--title "..."]
 */

import { PlotSpec, plot } from './index'

function parseArgs(argv: string[]): PlotSpec {
  const opts: Record<string, string> = {
    x: 'f',
    series: 'R',
    y: 'ratio',
    title: 'fraction of the omniscient objective',
  }
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i]
    if (!a.startsWith('--')) throw new Error(`unexpected argument ${a}`)
    const key = a.slice(2)
    const val = argv[++i]
    if (val === undefined) throw new Error(`missing value for --${key}`)
    opts[key] = val
  }
  if (!opts.input) throw new Error('missing required --input')
  if (!opts.out) throw new Error('missing required --out')
  return {
    input: opts.input,
    x: opts.x,
    series: opts.series,
    y: opts.y,
    title: opts.title,
    out: opts.out,
  }
}

function main(): number {
  try {
    const spec = parseArgs(process.argv.slice(2))
    plot(spec)
    process.stderr.write(`wrote ${spec.out}\n`)
    return 0
  } catch (err) {
    process.stderr.write(`error: ${err instanceof Error ? err.message : String(err)}\n`)
    return 1
  }
}

process.exit(main())
