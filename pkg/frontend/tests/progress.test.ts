import { afterEach, describe, expect, it, vi } from 'vitest'
import { AnnotationClient } from '../src/api'
import { pollUntilTracked, progressFraction, stopBadge } from '../src/progress'
import type { Progress } from '../src/types'

function snapshot(overrides: Partial<Progress>): Progress {
  return {
    running: true,
    frames_done: 0,
    n_frame: 100,
    revision: 2,
    instances: [],
    ...overrides,
  }
}

afterEach(() => {
  vi.restoreAllMocks()
})

describe('pollUntilTracked', () => {
  it('polls until running is false and the revision advanced', async () => {
    const snapshots = [
      snapshot({ frames_done: 10 }),
      snapshot({ frames_done: 60 }),
      snapshot({ running: false, frames_done: 100, revision: 3 }),
    ]
    let calls = 0
    vi.stubGlobal('fetch', vi.fn(async () => new Response(
      JSON.stringify(snapshots[Math.min(calls++, snapshots.length - 1)]),
      { status: 200 },
    )))

    const client = new AnnotationClient('http://test')
    const seen: number[] = []
    const final = await pollUntilTracked(client, 'abc', 2, {
      intervalMs: 1,
      onUpdate: (p) => seen.push(p.frames_done),
    })
    expect(final.running).toBe(false)
    expect(final.revision).toBe(3)
    expect(seen).toEqual([10, 60, 100])
    expect(calls).toBe(3)
  })

  it('keeps polling while the revision has not advanced past the start', async () => {
    const snapshots = [
      snapshot({ running: false, revision: 2 }),
      snapshot({ running: false, revision: 3, frames_done: 100 }),
    ]
    let calls = 0
    vi.stubGlobal('fetch', vi.fn(async () => new Response(
      JSON.stringify(snapshots[Math.min(calls++, snapshots.length - 1)]),
      { status: 200 },
    )))

    const client = new AnnotationClient('http://test')
    const final = await pollUntilTracked(client, 'abc', 2, { intervalMs: 1 })
    expect(final.revision).toBe(3)
    expect(calls).toBe(2)
  })
})

describe('progressFraction', () => {
  it('maps frames done to [0, 1]', () => {
    expect(progressFraction(snapshot({ frames_done: 0 }))).toBe(0)
    expect(progressFraction(snapshot({ frames_done: 50 }))).toBe(0.5)
    expect(progressFraction(snapshot({ frames_done: 100 }))).toBe(1)
  })

  it('caps at 1 and handles an empty sequence', () => {
    expect(progressFraction(snapshot({ frames_done: 150 }))).toBe(1)
    expect(progressFraction(snapshot({ n_frame: 0 }))).toBe(0)
  })
})

describe('stopBadge', () => {
  it('shows the stop frame for halted instances', () => {
    expect(stopBadge({ id: '01', status: 'stopped', stopped_at: 41 }))
      .toBe('stopped @ frame 41')
  })

  it('shows active otherwise', () => {
    expect(stopBadge({ id: '01', status: 'active', stopped_at: null })).toBe('active')
  })
})
