import { ApiError, EcoGradeApi } from "./api.js";
import { escapeHtml } from "./format.js";
import type { SearchFilters } from "./types.js";
import { renderCorporateDashboard } from "./views/corporate.js";
import { renderDetailTab, renderExplanation } from "./views/detail.js";
import { renderSearchPage } from "./views/search.js";
import { renderImprovePanel, renderSupplierDashboard } from "./views/supplier.js";

const api = new EcoGradeApi(
  new URLSearchParams(window.location.search).get("api") ?? "",
);
const root = document.getElementById("app") as HTMLElement;

// One in-flight request per view; navigating away aborts it.
let inflight: AbortController | null = null;

function freshSignal(): AbortSignal {
  inflight?.abort();
  inflight = new AbortController();
  return inflight.signal;
}

function errorBanner(error: unknown): string {
  const message =
    error instanceof ApiError ? `${error.code}: ${error.message}` : "network error";
  return `
  <div class="error-banner">
    <p>Could not load this view (${escapeHtml(message)}).</p>
    <button id="retry">Retry</button>
  </div>`;
}

function currentFilters(): SearchFilters {
  const params = new URLSearchParams(window.location.hash.split("?")[1] ?? "");
  const beds = params.get("beds");
  return {
    city: params.get("city") ?? undefined,
    beds: beds === null || beds === "" ? undefined : Number(beds),
    order: params.get("order") === "asc" ? "asc" : "desc",
    page: Number(params.get("page") ?? "1"),
  };
}

async function render(): Promise<void> {
  const hash = window.location.hash || "#/search";
  const [path] = hash.slice(1).split("?");
  const segments = path.split("/").filter(Boolean);
  const signal = freshSignal();
  try {
    if (segments.length === 0 || segments[0] === "search") {
      const filters = currentFilters();
      root.innerHTML = renderSearchPage(await api.searchListings(filters, signal), filters);
      wireSearch(filters);
    } else if (segments[0] === "listing" && segments[1]) {
      root.innerHTML = renderDetailTab(await api.listingDetail(segments[1], signal));
    } else if (segments[0] === "improve" && segments[1]) {
      root.innerHTML = renderImprovePanel(await api.listingAdvice(segments[1], signal));
    } else if (segments[0] === "supplier" && segments[1]) {
      root.innerHTML = renderSupplierDashboard(await api.supplierDashboard(segments[1], signal));
    } else if (segments[0] === "corporate" && segments[1]) {
      root.innerHTML = renderCorporateDashboard(await api.corporateDashboard(segments[1], undefined, signal));
    } else if (segments[0] === "explain") {
      root.innerHTML = renderExplanation();
    } else {
      root.innerHTML = '<p class="empty-state">Page not found. <a href="#/search">Back to search</a></p>';
    }
  } catch (error) {
    if (error instanceof DOMException && error.name === "AbortError") return;
    if (error instanceof ApiError && error.status === 404) {
      root.innerHTML = `<p class="empty-state">Not found. <a href="#/search">Back to search</a></p>`;
      return;
    }
    root.innerHTML = errorBanner(error);
    document.getElementById("retry")?.addEventListener("click", () => void render());
  }
}

function wireSearch(filters: SearchFilters): void {
  const form = document.getElementById("search-form") as HTMLFormElement | null;
  form?.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    const params = new URLSearchParams();
    const city = String(data.get("city") ?? "").trim();
    const beds = String(data.get("beds") ?? "");
    if (city) params.set("city", city);
    if (beds !== "") params.set("beds", beds);
    params.set("order", String(data.get("order") ?? "desc"));
    params.set("page", "1");
    window.location.hash = `#/search?${params}`;
  });
  const page = (delta: number) => {
    const params = new URLSearchParams(window.location.hash.split("?")[1] ?? "");
    params.set("page", String(filters.page + delta));
    window.location.hash = `#/search?${params}`;
  };
  document.getElementById("prev-page")?.addEventListener("click", () => page(-1));
  document.getElementById("next-page")?.addEventListener("click", () => page(1));
}

window.addEventListener("hashchange", () => void render());
void render();
