import type { AnnotationDoc, AssignedBox, Box, Progress, SessionInfo } from './types'

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public detail: unknown = null,
  ) {
    super(message)
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const res = await fetch(base + path, {
    headers: { 'Content-Type': 'application/json' },
    ...init,
  })
  if (!res.ok) {
    let code = 'http_error'
    let message = `${res.status} ${res.statusText}`
    let detail: unknown = null
    try {
      const body = await res.json()
      code = body.code ?? code
      message = body.message ?? message
      detail = body.detail ?? null
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(res.status, code, message, detail)
  }
  return res.json() as Promise<T>
}

/** Typed client for the annotation service HTTP API. */
export class AnnotationClient {
  constructor(private base: string = '') {}

  createSession(framesDir: string): Promise<SessionInfo> {
    return request(this.base, '/sessions', {
      method: 'POST',
      body: JSON.stringify({ frames_dir: framesDir }),
    })
  }

  getSession(id: string): Promise<SessionInfo> {
    return request(this.base, `/sessions/${id}`)
  }

  frameUrl(id: string, t: number): string {
    return `${this.base}/sessions/${id}/frames/${t}`
  }

  putFirstBoxes(id: string, boxes: Box[]): Promise<{ revision: number; instances: AssignedBox[] }> {
    return request(this.base, `/sessions/${id}/first-boxes`, {
      method: 'PUT',
      body: JSON.stringify({ boxes }),
    })
  }

  startTracking(
    id: string,
    failureDetection: 'on' | 'off' = 'on',
  ): Promise<{ revision: number; started: boolean }> {
    return request(this.base, `/sessions/${id}/track`, {
      method: 'POST',
      body: JSON.stringify({ failure_detection: failureDetection }),
    })
  }

  getProgress(id: string): Promise<Progress> {
    return request(this.base, `/sessions/${id}/progress`)
  }

  getDocument(id: string): Promise<{ revision: number; document: AnnotationDoc }> {
    return request(this.base, `/sessions/${id}/document`)
  }

  submitCorrection(
    id: string,
    instance: string,
    frame: number,
    box: Box,
  ): Promise<{ revision: number; instance: string; entries: number }> {
    return request(this.base, `/sessions/${id}/corrections`, {
      method: 'POST',
      body: JSON.stringify({ instance, frame, box }),
    })
  }

  finalize(id: string): Promise<{ revision: number; path: string }> {
    return request(this.base, `/sessions/${id}/finalize`, { method: 'POST' })
  }
}
