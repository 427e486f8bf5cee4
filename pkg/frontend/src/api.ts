import type {
  AdviceResponse,
  CorporateDashboardResponse,
  DetailResponse,
  ProblemDocument,
  SearchFilters,
  SearchResponse,
  SupplierDashboardResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function getJson<T>(url: string, signal?: AbortSignal): Promise<T> {
  const response = await fetch(url, { signal, headers: { Accept: "application/json" } });
  if (!response.ok) {
    let problem: ProblemDocument = { code: "error", message: response.statusText };
    try {
      problem = (await response.json()) as ProblemDocument;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, problem.code, problem.message);
  }
  return (await response.json()) as T;
}

export class EcoGradeApi {
  constructor(private readonly baseUrl: string = "") {}

  searchListings(filters: SearchFilters, signal?: AbortSignal): Promise<SearchResponse> {
    const params = new URLSearchParams({ sort: "ecograde", order: filters.order });
    if (filters.city) params.set("city", filters.city);
    if (filters.beds !== undefined) params.set("beds", String(filters.beds));
    params.set("page", String(filters.page));
    return getJson(`${this.baseUrl}/v1/listings?${params}`, signal);
  }

  listingDetail(id: string, signal?: AbortSignal): Promise<DetailResponse> {
    return getJson(`${this.baseUrl}/v1/listings/${encodeURIComponent(id)}/ecograde`, signal);
  }

  listingAdvice(id: string, signal?: AbortSignal): Promise<AdviceResponse> {
    return getJson(`${this.baseUrl}/v1/listings/${encodeURIComponent(id)}/advice`, signal);
  }

  supplierDashboard(id: string, signal?: AbortSignal): Promise<SupplierDashboardResponse> {
    return getJson(`${this.baseUrl}/v1/suppliers/${encodeURIComponent(id)}/dashboard`, signal);
  }

  corporateDashboard(
    id: string,
    asOf?: string,
    signal?: AbortSignal,
  ): Promise<CorporateDashboardResponse> {
    const suffix = asOf ? `?as_of=${encodeURIComponent(asOf)}` : "";
    return getJson(
      `${this.baseUrl}/v1/corporate/${encodeURIComponent(id)}/dashboard${suffix}`,
      signal,
    );
  }
}
