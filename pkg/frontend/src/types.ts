// Shapes of the JSON API (docs/api.md in the repository root).

export interface ApiError {
  code: string;
  message: string;
  field?: string;
}

export type Envelope<T> =
  | { ok: true; data: T }
  | { ok: false; error: ApiError };

export interface EntityView {
  iri: string;
  class: string;
  class_label: string;
  literal: string | null;
  created_by: string;
  label: string;
}

export interface StatementView {
  id: number;
  subject: string;
  property: string;
  property_label: string;
  object: string | null;
  note: string | null;
  qualifier: string | null;
  qualifier_label: string | null;
  asserted_by: string;
  retracted_by: string | null;
}

export interface NeighborView {
  statement: StatementView;
  direction: "out" | "in";
  other: EntityView | null;
}

export interface EntityWithNeighbors {
  entity: EntityView;
  neighbors: NeighborView[];
}

export interface AuditEntry {
  activity_iri: string;
  operator_label: string;
  kind_label: string;
  timespan: string;
  note: string;
  entities_created: number;
  statements_asserted: number;
  statements_retracted: number;
  commit_seq: number;
}

export interface ReportRow {
  iri: string;
  label: string;
  detail: Record<string, unknown>;
}

export interface Report {
  kind: string;
  generated_at: string;
  rows: ReportRow[];
}

export interface OperatorRow {
  iri: string;
  label: string;
}

export interface Meta {
  profile: string;
  iri_base: string;
  version: string;
  counts: { entities: number; statements: number; activities: number };
  vocabulary: string[];
}

export interface AccessionData {
  set: string;
  parts: string[];
  identifier: string;
  source: string | null;
  audit: AuditEntry;
}

export interface TosecBatchData {
  ok_count: number;
  file_iris: string[];
  errors: { filename: string; message: string }[];
}
