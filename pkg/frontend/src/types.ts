export interface Box {
  x: number
  y: number
  w: number
  h: number
}

export type EntrySource = 'manual' | 'tracked' | 'corrected'

export interface DocEntry {
  frame: number
  x: number
  y: number
  w: number
  h: number
  source: EntrySource
  confidence: number | null
}

export interface DocInstance {
  id: string
  stopped_at: number | null
  entries: DocEntry[]
}

export interface AnnotationDoc {
  schema: string
  video: string
  n_frame: number
  frame_width: number
  frame_height: number
  degradation: { kind: 'blur'; n: number } | { kind: 'lr'; m: number } | null
  instances: DocInstance[]
}

export interface SessionInfo {
  id: string
  state: 'created' | 'labeled' | 'tracked' | 'reviewed' | 'finalized'
  revision: number
  n_frame: number
  frame_width: number
  frame_height: number
  degradation: AnnotationDoc['degradation']
}

export interface InstanceProgress {
  id: string
  status: 'active' | 'stopped'
  stopped_at: number | null
}

export interface Progress {
  running: boolean
  frames_done: number
  n_frame: number
  revision: number
  instances: InstanceProgress[]
}

export interface AssignedBox extends Box {
  id: string
}
