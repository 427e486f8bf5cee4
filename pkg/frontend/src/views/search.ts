import { escapeHtml, fmt1 } from "../format.js";
import { renderLeaves } from "../leaves.js";
import type { ListingSummary, SearchFilters, SearchResponse } from "../types.js";

function card(item: ListingSummary): string {
  const price = '<span class="price-placeholder">price on request</span>';
  const beds =
    item.bedrooms === null ? "" : item.bedrooms === 0 ? "studio" : `${item.bedrooms} bed`;
  return `
  <article class="card" data-listing-id="${escapeHtml(item.id)}">
    <a href="#/listing/${encodeURIComponent(item.id)}" class="card-link">
      <h3>${escapeHtml(item.id)}</h3>
      <p class="card-meta">${escapeHtml(item.city)}${beds ? " &middot; " + beds : ""}</p>
      <div class="card-ecograde">
        <span class="ecograde-logo" title="EcoGrade">❂</span>
        ${renderLeaves(item.leaves)}
        <span class="card-score">${item.overall === null ? "" : fmt1(item.overall)}</span>
      </div>
      ${price}
    </a>
  </article>`;
}

export function renderSearchPage(response: SearchResponse, filters: SearchFilters): string {
  const cards = response.items.map(card).join("\n");
  const empty =
    response.items.length === 0
      ? '<p class="empty-state">No listings match this search. Try another city or clear the filters.</p>'
      : "";
  return `
<section class="search-page">
  <form id="search-form" class="search-controls">
    <input name="city" placeholder="City" value="${escapeHtml(filters.city ?? "")}" />
    <select name="beds">
      <option value="">Any beds</option>
      ${[0, 1, 2, 3, 4, 5]
        .map(
          (b) =>
            `<option value="${b}" ${filters.beds === b ? "selected" : ""}>${b === 0 ? "Studio" : `${b} bed`}</option>`,
        )
        .join("")}
    </select>
    <select name="order">
      <option value="desc" ${filters.order === "desc" ? "selected" : ""}>EcoGrade: best first</option>
      <option value="asc" ${filters.order === "asc" ? "selected" : ""}>EcoGrade: worst first</option>
    </select>
    <button type="submit">Search</button>
  </form>
  <p class="search-meta">${response.total} listing${response.total === 1 ? "" : "s"} &middot; page ${response.page} of ${response.total_pages}</p>
  <div class="card-grid">
    ${cards}
  </div>
  ${empty}
  <nav class="pager">
    <button id="prev-page" ${response.page <= 1 ? "disabled" : ""}>Previous</button>
    <button id="next-page" ${response.page >= response.total_pages ? "disabled" : ""}>Next</button>
  </nav>
</section>`;
}
