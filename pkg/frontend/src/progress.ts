import type { AnnotationClient } from './api'
import type { InstanceProgress, Progress } from './types'

export interface PollOptions {
  intervalMs?: number
  onUpdate?: (p: Progress) => void
}

/**
 * Poll the tracking progress endpoint until the background run finishes.
 * Resolves with the final progress snapshot (running === false and the
 * document revision bumped past `sinceRevision`).
 */
export async function pollUntilTracked(
  client: AnnotationClient,
  sessionId: string,
  sinceRevision: number,
  opts: PollOptions = {},
): Promise<Progress> {
  const interval = opts.intervalMs ?? 250
  for (;;) {
    const p = await client.getProgress(sessionId)
    opts.onUpdate?.(p)
    if (!p.running && p.revision > sinceRevision) return p
    await new Promise((resolve) => setTimeout(resolve, interval))
  }
}

/** Fraction of frames processed, in [0, 1]. */
export function progressFraction(p: Progress): number {
  if (p.n_frame <= 0) return 0
  return Math.min(p.frames_done / p.n_frame, 1)
}

/**
 * Badge text for an instance row: stopped instances show the frame where the
 * failure guard halted them so the reviewer knows where to scrub.
 */
export function stopBadge(inst: InstanceProgress): string {
  if (inst.status === 'stopped' && inst.stopped_at !== null) {
    return `stopped @ frame ${inst.stopped_at}`
  }
  return 'active'
}
