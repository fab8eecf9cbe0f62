import type { AnnotationDoc, DocEntry } from './types'

/** Frame cursor with clamped navigation; frames are 0-based for display. */
export class Scrubber {
  private cursor = 0

  constructor(public readonly nFrame: number) {
    if (nFrame < 1) throw new Error('scrubber needs at least one frame')
  }

  get frame(): number {
    return this.cursor
  }

  seek(t: number): number {
    this.cursor = Math.min(Math.max(t, 0), this.nFrame - 1)
    return this.cursor
  }

  step(delta: number): number {
    return this.seek(this.cursor + delta)
  }

  jumpToLast(): number {
    return this.seek(this.nFrame - 1)
  }
}

export type ScrubAction =
  | { kind: 'step'; delta: number }
  | { kind: 'last' }
  | { kind: 'finalize' }
  | { kind: 'cancel' }
  | null

/** Keyboard mapping: arrows scrub, End jumps to last frame, Enter finalizes. */
export function keyToAction(key: string): ScrubAction {
  switch (key) {
    case 'ArrowLeft':
      return { kind: 'step', delta: -1 }
    case 'ArrowRight':
      return { kind: 'step', delta: 1 }
    case 'End':
      return { kind: 'last' }
    case 'Enter':
      return { kind: 'finalize' }
    case 'Escape':
      return { kind: 'cancel' }
    default:
      return null
  }
}

/** Entries visible at a display frame (0-based); document frames are 1-based. */
export function entriesAtFrame(doc: AnnotationDoc, displayFrame: number): Array<DocEntry & { id: string }> {
  const frame = displayFrame + 1
  const out: Array<DocEntry & { id: string }> = []
  for (const inst of doc.instances) {
    for (const e of inst.entries) {
      if (e.frame === frame) out.push({ ...e, id: inst.id })
    }
  }
  return out
}
