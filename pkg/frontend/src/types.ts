// Payload shapes of the /v1 API. The client renders these verbatim and
// never recomputes a score; see docs/openapi.json in the repo root.

export type FactorName = "consumption" | "efficiency" | "supplier" | "transport";

export const FACTOR_ORDER: FactorName[] = [
  "consumption",
  "efficiency",
  "supplier",
  "transport",
];

export const FACTOR_LABELS: Record<FactorName, string> = {
  consumption: "Energy consumption",
  efficiency: "Energy efficiency",
  supplier: "Green supplier",
  transport: "Green transport",
};

export interface ListingSummary {
  id: string;
  city: string;
  bedrooms: number | null;
  overall: number | null;
  leaves: number | null;
  co2_avg: number | null;
}

export interface SearchResponse {
  items: ListingSummary[];
  page: number;
  page_size: number;
  total: number;
  total_pages: number;
}

export interface ProvenanceInfo {
  kind: "direct" | "interpolated" | "meter";
  n_neighbors: number | null;
}

export interface Report {
  listing_id: string;
  factor_scores: Partial<Record<FactorName, number>>;
  overall: number;
  leaves: number;
  provenance: ProvenanceInfo | null;
  co2_avg: number | null;
  co2_low: number | null;
  co2_high: number | null;
  co2_sigma: number | null;
  missing_factors: FactorName[];
}

export interface DetailResponse {
  listing_id: string;
  city: string;
  bedrooms: number | null;
  status: "ok" | "coming_soon";
  report: Report | null;
}

export interface SupplierRow {
  listing_id: string;
  factor_scores: Partial<Record<FactorName, number>> | null;
  overall: number | null;
  leaves: number | null;
  co2_high: number | null;
  co2_low: number | null;
  co2_avg: number | null;
  emissions_comparison: string;
  comparison_status: "ok" | "coming_soon";
}

export interface SupplierDashboardResponse {
  supplier_id: string;
  rows: SupplierRow[];
}

export interface CorporateMonth {
  month: string;
  n_bookings: number;
  n_unscored: number;
  factor_means: Partial<Record<FactorName, number>>;
  overall_mean: number | null;
  deltas: Partial<Record<FactorName, number>> | null;
  co2_total: number;
}

export interface CorporateDashboardResponse {
  client_id: string;
  as_of: string;
  months: CorporateMonth[];
  co2_total: number;
}

export interface AdviceItem {
  attribute: string;
  current_band: string;
  expected_band: string;
  action: string;
  gain: number;
  projected_overall: number;
}

export interface AdviceResponse {
  listing_id: string;
  overall: number | null;
  neighborhood_inferred: boolean;
  items: AdviceItem[];
}

export interface ProblemDocument {
  code: string;
  message: string;
}

export interface SearchFilters {
  city?: string;
  beds?: number;
  order: "asc" | "desc";
  page: number;
}
