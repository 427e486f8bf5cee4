import { escapeHtml, fmt1, fmt2 } from "../format.js";
import type {
  AdviceResponse,
  SupplierDashboardResponse,
  SupplierRow,
} from "../types.js";
import { FACTOR_LABELS, FACTOR_ORDER } from "../types.js";

// Mirrors the supplier dashboard table: factor ratings, CO2 highest /
// lowest / average, the emissions comparison, and the improve-score action.
const HEADERS = [
  "Listing",
  ...FACTOR_ORDER.map((f) => FACTOR_LABELS[f]),
  "Overall",
  "CO2 Emissions Highest",
  "CO2 Emissions Lowest",
  "CO2 Emissions Average",
  "Emissions",
  "",
];

function cell(value: number | null | undefined): string {
  return `<td class="num">${value === null || value === undefined ? "Coming Soon" : fmt1(value)}</td>`;
}

function row(r: SupplierRow): string {
  const factors = FACTOR_ORDER.map((f) => cell(r.factor_scores ? r.factor_scores[f] : null)).join("");
  return `
    <tr data-listing-id="${escapeHtml(r.listing_id)}">
      <td><a href="#/listing/${encodeURIComponent(r.listing_id)}">${escapeHtml(r.listing_id)}</a></td>
      ${factors}
      ${cell(r.overall)}
      ${cell(r.co2_high)}
      ${cell(r.co2_low)}
      ${cell(r.co2_avg)}
      <td class="emissions">${escapeHtml(r.emissions_comparison)}</td>
      <td><a class="improve-link" href="#/improve/${encodeURIComponent(r.listing_id)}">Improve score</a></td>
    </tr>`;
}

export function renderSupplierDashboard(response: SupplierDashboardResponse): string {
  const body = response.rows.map(row).join("\n");
  const empty =
    response.rows.length === 0
      ? '<p class="empty-state">No listings in this portfolio yet.</p>'
      : "";
  return `
<section class="supplier-page" data-supplier-id="${escapeHtml(response.supplier_id)}">
  <h2>Supplier dashboard — ${escapeHtml(response.supplier_id)}</h2>
  <table class="dashboard-table">
    <thead><tr>${HEADERS.map((h) => `<th>${h}</th>`).join("")}</tr></thead>
    <tbody>
      ${body}
    </tbody>
  </table>
  ${empty}
</section>`;
}

// Improve-score what-if panel: every number (current score, projected score,
// gain) is served by the advice endpoint; nothing is recomputed here.
export function renderImprovePanel(advice: AdviceResponse): string {
  if (advice.items.length === 0) {
    return `
<section class="improve-panel" data-listing-id="${escapeHtml(advice.listing_id)}">
  <h2>Improve score — ${escapeHtml(advice.listing_id)}</h2>
  <p class="empty-state">Nothing to improve: every surveyed item already rates good or better.</p>
</section>`;
  }
  const inferred = advice.neighborhood_inferred
    ? '<p class="badge badge-inferred">Advice inferred from neighbouring properties’ certificates.</p>'
    : "";
  const items = advice.items
    .map(
      (item) => `
    <li class="advice-item" data-attribute="${escapeHtml(item.attribute)}">
      <p class="advice-action">${escapeHtml(item.action)}</p>
      <p class="advice-bands">${escapeHtml(item.current_band)} → ${escapeHtml(item.expected_band)}</p>
      <p class="advice-projection">
        Current ${advice.overall === null ? "n/a" : fmt2(advice.overall)}
        → projected <strong>${fmt2(item.projected_overall)}</strong>
        (+${fmt2(item.gain)})
      </p>
    </li>`,
    )
    .join("\n");
  return `
<section class="improve-panel" data-listing-id="${escapeHtml(advice.listing_id)}">
  <h2>Improve score — ${escapeHtml(advice.listing_id)}</h2>
  ${inferred}
  <ol class="advice-list">
    ${items}
  </ol>
</section>`;
}
