import { AnnotationClient, ApiError } from './api'
import { boxFromDrag, canvasToImage, clampBox, sourceColor } from './boxes'
import { pollUntilTracked, progressFraction, stopBadge } from './progress'
import { Scrubber, entriesAtFrame, keyToAction } from './scrub'
import type { AnnotationDoc, Box, SessionInfo } from './types'

interface AppState {
  session: SessionInfo | null
  scrubber: Scrubber | null
  doc: AnnotationDoc | null
  revision: number
  pendingBoxes: Box[]
  drag: { x0: number; y0: number; x1: number; y1: number } | null
  selectedInstance: string | null
}

const state: AppState = {
  session: null,
  scrubber: null,
  doc: null,
  revision: 0,
  pendingBoxes: [],
  drag: null,
  selectedInstance: null,
}

const client = new AnnotationClient('')

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id)
  if (!node) throw new Error(`missing element #${id}`)
  return node as T
}

const canvas = el<HTMLCanvasElement>('frame-canvas')
const ctx = canvas.getContext('2d')!
const statusBar = el<HTMLElement>('status')
const frameLabel = el<HTMLElement>('frame-label')
const instanceList = el<HTMLElement>('instances')

let frameImage: HTMLImageElement | null = null

function setStatus(text: string): void {
  statusBar.textContent = text
}

function reportError(err: unknown): void {
  if (err instanceof ApiError) {
    setStatus(`error (${err.code}): ${err.message}`)
  } else {
    setStatus(`error: ${String(err)}`)
  }
}

async function loadFrame(t: number): Promise<void> {
  if (!state.session) return
  const img = new Image()
  img.src = client.frameUrl(state.session.id, t)
  await img.decode()
  frameImage = img
  canvas.width = img.naturalWidth
  canvas.height = img.naturalHeight
  frameLabel.textContent = `frame ${t + 1} / ${state.session.n_frame}`
  render()
}

function drawBox(box: Box, color: string, label?: string): void {
  ctx.strokeStyle = color
  ctx.lineWidth = 2
  ctx.strokeRect(box.x, box.y, box.w, box.h)
  if (label) {
    ctx.fillStyle = color
    ctx.font = '12px sans-serif'
    ctx.fillText(label, box.x + 2, Math.max(box.y - 4, 12))
  }
}

function render(): void {
  ctx.clearRect(0, 0, canvas.width, canvas.height)
  if (frameImage) ctx.drawImage(frameImage, 0, 0)
  for (const box of state.pendingBoxes) drawBox(box, sourceColor('manual'))
  if (state.doc && state.scrubber) {
    for (const entry of entriesAtFrame(state.doc, state.scrubber.frame)) {
      const conf = entry.confidence !== null ? ` ${entry.confidence.toFixed(2)}` : ''
      drawBox(entry, sourceColor(entry.source), `${entry.id}${conf}`)
    }
  }
  if (state.drag) {
    const live = boxFromDrag(state.drag.x0, state.drag.y0, state.drag.x1, state.drag.y1)
    if (live) drawBox(live, '#aaaaaa')
  }
}

function renderInstances(): void {
  instanceList.textContent = ''
  if (!state.doc) return
  for (const inst of state.doc.instances) {
    const row = document.createElement('div')
    row.className = 'instance-row'
    const badge = inst.stopped_at !== null
      ? stopBadge({ id: inst.id, status: 'stopped', stopped_at: inst.stopped_at })
      : 'active'
    row.textContent = `${inst.id} — ${badge}`
    if (inst.id === state.selectedInstance) row.classList.add('selected')
    row.addEventListener('click', () => {
      state.selectedInstance = inst.id
      renderInstances()
    })
    instanceList.appendChild(row)
  }
}

function pointerToImage(ev: MouseEvent): { x: number; y: number } {
  const rect = canvas.getBoundingClientRect()
  return canvasToImage(
    ev.clientX - rect.left,
    ev.clientY - rect.top,
    rect.width,
    rect.height,
    canvas.width,
    canvas.height,
  )
}

canvas.addEventListener('mousedown', (ev) => {
  const p = pointerToImage(ev)
  state.drag = { x0: p.x, y0: p.y, x1: p.x, y1: p.y }
})

canvas.addEventListener('mousemove', (ev) => {
  if (!state.drag) return
  const p = pointerToImage(ev)
  state.drag.x1 = p.x
  state.drag.y1 = p.y
  render()
})

canvas.addEventListener('mouseup', async (ev) => {
  if (!state.drag || !state.session || !state.scrubber) return
  const p = pointerToImage(ev)
  const box = boxFromDrag(state.drag.x0, state.drag.y0, p.x, p.y)
  state.drag = null
  if (!box) {
    render()
    return
  }
  const clamped = clampBox(box, state.session.frame_width, state.session.frame_height)
  if (state.doc && state.selectedInstance) {
    // Past the labeling phase a drawn box is a correction for the selected
    // instance at the current frame; re-tracking resumes from there.
    try {
      const res = await client.submitCorrection(
        state.session.id, state.selectedInstance, state.scrubber.frame + 1, clamped)
      state.revision = res.revision
      const { document: doc } = await client.getDocument(state.session.id)
      state.doc = doc
      setStatus(`corrected ${state.selectedInstance}; re-tracked from frame ${state.scrubber.frame + 1}`)
      renderInstances()
    } catch (err) {
      reportError(err)
    }
  } else {
    state.pendingBoxes.push(clamped)
    setStatus(`${state.pendingBoxes.length} box(es) drawn on first frame`)
  }
  render()
})

async function submitFirstBoxes(): Promise<void> {
  if (!state.session || state.pendingBoxes.length === 0) {
    setStatus('draw at least one box on the first frame')
    return
  }
  try {
    const res = await client.putFirstBoxes(state.session.id, state.pendingBoxes)
    state.revision = res.revision
    state.pendingBoxes = []
    setStatus(`labeled ${res.instances.map((b) => b.id).join(', ')}`)
  } catch (err) {
    reportError(err)
  }
}

async function startTracking(): Promise<void> {
  if (!state.session) return
  try {
    const res = await client.startTracking(state.session.id)
    setStatus('tracking…')
    const final = await pollUntilTracked(client, state.session.id, res.revision, {
      onUpdate: (p) => setStatus(`tracking… ${Math.round(progressFraction(p) * 100)}%`),
    })
    state.revision = final.revision
    const { document: doc } = await client.getDocument(state.session.id)
    state.doc = doc
    setStatus('tracked; review and correct, Enter to finalize')
    renderInstances()
    render()
  } catch (err) {
    reportError(err)
  }
}

async function finalizeSession(): Promise<void> {
  if (!state.session) return
  if (!window.confirm('Finalize this session? The document is written to disk.')) return
  try {
    const res = await client.finalize(state.session.id)
    state.revision = res.revision
    setStatus(`finalized → ${res.path}`)
  } catch (err) {
    reportError(err)
  }
}

window.addEventListener('keydown', (ev) => {
  if (!state.scrubber) return
  const action = keyToAction(ev.key)
  if (!action) return
  ev.preventDefault()
  switch (action.kind) {
    case 'step':
      void loadFrame(state.scrubber.step(action.delta))
      break
    case 'last':
      void loadFrame(state.scrubber.jumpToLast())
      break
    case 'finalize':
      void finalizeSession()
      break
    case 'cancel':
      state.drag = null
      state.pendingBoxes = []
      state.selectedInstance = null
      renderInstances()
      render()
      break
  }
})

async function openSession(framesDir: string): Promise<void> {
  try {
    state.session = await client.createSession(framesDir)
    state.scrubber = new Scrubber(state.session.n_frame)
    state.doc = null
    state.pendingBoxes = []
    state.selectedInstance = null
    await loadFrame(0)
    setStatus(`session ${state.session.id}: draw boxes on frame 1, then Track`)
  } catch (err) {
    reportError(err)
  }
}

el<HTMLButtonElement>('open-btn').addEventListener('click', () => {
  const framesDir = el<HTMLInputElement>('frames-dir').value.trim()
  if (framesDir) void openSession(framesDir)
})
el<HTMLButtonElement>('label-btn').addEventListener('click', () => void submitFirstBoxes())
el<HTMLButtonElement>('track-btn').addEventListener('click', () => void startTracking())
el<HTMLButtonElement>('finalize-btn').addEventListener('click', () => void finalizeSession())

setStatus('enter a frames directory to begin')
