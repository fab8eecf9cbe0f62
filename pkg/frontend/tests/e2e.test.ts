/**
 * End-to-end: spawn the real annotation service over a synthetic fixture and
 * drive the full workflow through the typed client — label two instances,
 * track, correct one instance at the last frame, finalize, and check the
 * persisted document.
 */
import { type ChildProcess, spawn } from 'node:child_process'
import { mkdtemp, readFile, rm } from 'node:fs/promises'
import { tmpdir } from 'node:os'
import { join } from 'node:path'
import { afterAll, beforeAll, describe, expect, it } from 'vitest'
import { AnnotationClient, ApiError } from '../src/api'
import { pollUntilTracked } from '../src/progress'
import type { AnnotationDoc } from '../src/types'

const PYTHON = process.env.PYTHON ?? 'python3'
const PORT = 8765 + (process.pid % 500)
const BASE = `http://127.0.0.1:${PORT}`
const N_FRAME = 40

let workDir: string
let framesDir: string
let server: ChildProcess | null = null
const client = new AnnotationClient(BASE)

function run(cmd: string, args: string[]): Promise<void> {
  return new Promise((resolve, reject) => {
    const p = spawn(cmd, args, { stdio: 'inherit' })
    p.on('error', reject)
    p.on('exit', (code) =>
      code === 0 ? resolve() : reject(new Error(`${cmd} exited ${code}`)))
  })
}

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      await fetch(`${BASE}/sessions/warmup-probe`)
      return
    } catch {
      await new Promise((resolve) => setTimeout(resolve, 100))
    }
  }
  throw new Error('service did not come up')
}

beforeAll(async () => {
  workDir = await mkdtemp(join(tmpdir(), 'textvid-e2e-'))
  framesDir = join(workDir, 'frames')
  await run(PYTHON, [
    '-m', 'textvid.cli', 'synth',
    '--motion', 'translation', '--length', String(N_FRAME), '--out', framesDir,
  ])
  server = spawn(PYTHON, [
    '-m', 'textvid.cli', 'serve',
    '--port', String(PORT), '--data-dir', join(workDir, 'data'),
  ], { stdio: 'inherit' })
  await waitForServer()
}, 60_000)

afterAll(async () => {
  server?.kill()
  if (workDir) await rm(workDir, { recursive: true, force: true })
})

describe('annotation workflow', () => {
  let sessionId: string
  let targetInstance: string
  let revision = 0

  it('creates a session over the fixture frames', async () => {
    const info = await client.createSession(framesDir)
    sessionId = info.id
    expect(info.state).toBe('created')
    expect(info.n_frame).toBe(N_FRAME)
    expect(info.frame_width).toBe(360)
    expect(info.frame_height).toBe(240)
  })

  it('serves frames and 404s outside the range', async () => {
    const res = await fetch(client.frameUrl(sessionId, 0))
    expect(res.status).toBe(200)
    expect(res.headers.get('content-type')).toBe('image/png')
    const bad = await fetch(client.frameUrl(sessionId, N_FRAME))
    expect(bad.status).toBe(404)
  })

  it('rejects out-of-frame boxes', async () => {
    await expect(
      client.putFirstBoxes(sessionId, [{ x: 350, y: 10, w: 64, h: 24 }]),
    ).rejects.toMatchObject({ code: 'bad_geometry' })
  })

  it('assigns reading-order ids to two first-frame boxes', async () => {
    // The fixture's moving target starts at (30, 100); the second box covers
    // static background and sits above it, so it reads first and gets id 01.
    const res = await client.putFirstBoxes(sessionId, [
      { x: 30, y: 100, w: 64, h: 24 },
      { x: 200, y: 30, w: 40, h: 20 },
    ])
    revision = res.revision
    expect(res.instances.map((b) => b.id)).toEqual(['01', '02'])
    const target = res.instances.find((b) => b.y === 100)
    expect(target).toBeDefined()
    targetInstance = target!.id
    expect(targetInstance).toBe('02')
  })

  it('tracks to completion in the background', async () => {
    const started = await client.startTracking(sessionId)
    expect(started.started).toBe(true)
    const final = await pollUntilTracked(client, sessionId, revision, { intervalMs: 100 })
    revision = final.revision
    expect(final.frames_done).toBe(N_FRAME)
    const session = await client.getSession(sessionId)
    expect(session.state).toBe('tracked')
  }, 60_000)

  it('produced a full track for the moving target', async () => {
    const { document } = await client.getDocument(sessionId)
    const inst = document.instances.find((i) => i.id === targetInstance)!
    expect(inst.entries).toHaveLength(N_FRAME)
    expect(inst.entries[0].source).toBe('manual')
    for (const e of inst.entries.slice(1)) {
      expect(e.source).toBe('tracked')
      expect(e.confidence).not.toBeNull()
    }
  })

  it('applies a correction at the last frame', async () => {
    // Ground truth for the fixture: 2 px/frame translation from (30, 100).
    const t = N_FRAME
    const corrected = { x: 30 + 2 * (t - 1), y: 100, w: 64, h: 24 }
    const res = await client.submitCorrection(sessionId, targetInstance, t, corrected)
    revision = res.revision
    const { document } = await client.getDocument(sessionId)
    const inst = document.instances.find((i) => i.id === targetInstance)!
    const correctedEntries = inst.entries.filter((e) => e.source === 'corrected')
    expect(correctedEntries).toHaveLength(1)
    expect(correctedEntries[0].frame).toBe(t)
    expect(correctedEntries[0].x).toBe(corrected.x)
  })

  it('rejects corrections for unknown instances', async () => {
    await expect(
      client.submitCorrection(sessionId, '99', 5, { x: 0, y: 0, w: 10, h: 10 }),
    ).rejects.toMatchObject({ code: 'unknown_instance' })
  })

  it('finalizes and persists a valid document with one corrected entry', async () => {
    const res = await client.finalize(sessionId)
    expect(res.path).toContain(sessionId)
    const session = await client.getSession(sessionId)
    expect(session.state).toBe('finalized')

    const doc = JSON.parse(await readFile(res.path, 'utf8')) as AnnotationDoc
    expect(doc.schema).toBe('text-rbl-annot/1')
    expect(doc.instances.map((i) => i.id)).toEqual(['01', '02'])
    const correctedEntries = doc.instances
      .flatMap((i) => i.entries)
      .filter((e) => e.source === 'corrected')
    expect(correctedEntries).toHaveLength(1)

    // Finalize is idempotent.
    const again = await client.finalize(sessionId)
    expect(again.path).toBe(res.path)
  })

  it('reports errors with structured codes', async () => {
    try {
      await client.getSession('no-such-session')
      expect.unreachable('expected a 404')
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError)
      expect((err as ApiError).status).toBe(404)
      expect((err as ApiError).code).toBe('session_not_found')
    }
  })
})
