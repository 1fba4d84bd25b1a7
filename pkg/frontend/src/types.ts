/** Shapes of the session service's JSON, mirrored one-to-one. */

export interface DiagnosisView {
  ids: number[];
  sentences: string[];
  probability: number | null;
}

export interface QuerySentence {
  text: string;
  cost: number;
}

export interface QueryView {
  sentences: QuerySentence[];
  p_true: number;
  p_false: number;
  dplus: number[][];
  dminus: number[][];
}

export interface HistoryEntry {
  iteration: number;
  leading: { ids: number[]; probability: number }[];
  query: string[];
  qpartition: { dplus: number[][]; dminus: number[][] };
  answer: string | null;
  timings: { seconds: number };
}

export interface SessionStateJson {
  id: string;
  created_at: string;
  status: "RUNNING" | "DONE";
  leading: DiagnosisView[];
  query: QueryView | null;
  diagnosis: { ids: number[]; sentences: string[] } | null;
  history: HistoryEntry[];
}

export interface SessionConfig {
  n_leading?: number;
  qsm_measure?: string;
  qsm_threshold?: number;
  qcm_measure?: string;
  enhance?: boolean;
  goal_kind?: string;
  goal_threshold?: number;
  goal_ratio?: number;
}

export type Answer = "true" | "false" | "skip";
