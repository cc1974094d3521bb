// Wire types, mirroring the service's JSON payloads field for field.

export interface SpecificHarmDoc {
  id: string;
  name: string;
  definition: string;
}

export interface HarmTypeDoc {
  id: string;
  name: string;
  definition: string;
  specific_harms: SpecificHarmDoc[];
}

export interface TaxonomyDoc {
  version: string;
  title: string;
  created_at: string;
  harm_types: HarmTypeDoc[];
}

export type HarmStatus = "actual" | "potential";

export interface Selection {
  harm_type_id: string;
  specific_harm_id: string;
  status: HarmStatus;
}

export interface AnnotationPayload {
  round_id: string;
  incident_id: string;
  selections: Selection[];
  comment: string | null;
}

export interface AnnotationDoc {
  incident_id: string;
  annotator_id: string;
  round_id: string;
  selections: Selection[];
  comment: string | null;
  submitted_at: string;
  taxonomy_version: string;
}

export interface RoundDoc {
  round_id: string;
  label: string;
  taxonomy_version: string;
  incident_ids: string[];
  opened_at: string;
  closed_at: string | null;
}

export interface IncidentDoc {
  id: string;
  title: string;
  description: string;
  occurred: string | null;
  sector: string | null;
  country: string | null;
  source_links: string[];
  imported_at: string;
}

export interface IncidentPage {
  items: IncidentDoc[];
  total: number;
  offset: number;
  limit: number;
}

export interface SankeyNodeDoc {
  id: string;
  layer: "harm_type" | "specific_harm" | "status";
  label: string;
}

export interface SankeyLinkDoc {
  source: string;
  target: string;
  weight: number;
}

export interface SankeyDoc {
  nodes: SankeyNodeDoc[];
  links: SankeyLinkDoc[];
  meta: { incident: string; round: string; annotators: number };
}

export interface IncidentSummaryRow {
  incident_id: string;
  alpha: number | null;
  degenerate: boolean;
  annotators: number;
}

export interface SummaryDoc {
  round_id: string;
  label: string;
  taxonomy_version: string;
  incidents: IncidentSummaryRow[];
  top_disputed: string[];
  totals: { annotations: number; selections: number };
}

export interface TrendPointDoc {
  round: string;
  mean_alpha: number | null;
  incident_count: number;
}

export interface TrendDoc {
  points: TrendPointDoc[];
}

export interface AgreementDoc {
  alpha: number;
  d_o: number;
  d_e: number;
  n: number;
  mode: string;
  distance: string;
  excluded_units: number;
  degenerate: boolean;
  ci: { low: number; high: number; confidence: number; resamples: number } | null;
}

export interface ApiErrorBody {
  error: { status: number; code: string; message: string; path: string | null };
}
