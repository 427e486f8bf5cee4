import { escapeHtml, fmt1, fmt2, fmtDelta } from "../format.js";
import type { CorporateDashboardResponse, CorporateMonth } from "../types.js";
import { FACTOR_LABELS, FACTOR_ORDER } from "../types.js";

function trendChart(months: CorporateMonth[]): string {
  const points = months
    .map((m, i) => ({ x: i, y: m.overall_mean }))
    .filter((p): p is { x: number; y: number } => p.y !== null);
  if (points.length < 2) return "";
  const width = 360;
  const height = 80;
  const step = width / (months.length - 1 || 1);
  const path = points
    .map((p) => `${(p.x * step).toFixed(1)},${(height - (p.y / 5) * height).toFixed(1)}`)
    .join(" ");
  return `
  <svg class="trend" viewBox="0 0 ${width} ${height}" role="img" aria-label="overall EcoGrade by month">
    <polyline fill="none" stroke="currentColor" stroke-width="2" points="${path}" />
  </svg>`;
}

function monthRow(month: CorporateMonth): string {
  const factorCells = FACTOR_ORDER.map((f) => {
    const mean = month.factor_means[f];
    if (mean === undefined) return "<td class=\"num\">–</td>";
    const delta = month.deltas ? month.deltas[f] : undefined;
    const deltaHtml =
      delta === undefined ? "" : ` <span class="delta" data-delta="${delta}">${fmtDelta(delta)}</span>`;
    return `<td class="num">${fmt1(mean)}${deltaHtml}</td>`;
  }).join("");
  return `
    <tr data-month="${month.month}">
      <td>${escapeHtml(month.month)}</td>
      <td class="num">${month.n_bookings}</td>
      ${factorCells}
      <td class="num">${month.overall_mean === null ? "–" : fmt1(month.overall_mean)}</td>
      <td class="num">${fmt2(month.co2_total)}</td>
    </tr>`;
}

export function renderCorporateDashboard(response: CorporateDashboardResponse): string {
  if (response.months.length === 0) {
    return `
<section class="corporate-page" data-client-id="${escapeHtml(response.client_id)}">
  <h2>Bookings dashboard — ${escapeHtml(response.client_id)}</h2>
  <p class="empty-state">No completed booking months yet. Data lands here at the
  end of each month once bookings are made.</p>
</section>`;
  }
  const rows = response.months.map(monthRow).join("\n");
  return `
<section class="corporate-page" data-client-id="${escapeHtml(response.client_id)}">
  <h2>Bookings dashboard — ${escapeHtml(response.client_id)}</h2>
  ${trendChart(response.months)}
  <table class="dashboard-table">
    <thead>
      <tr>
        <th>Month</th><th>Bookings</th>
        ${FACTOR_ORDER.map((f) => `<th>${FACTOR_LABELS[f]}</th>`).join("")}
        <th>Overall</th><th>CO2 total (t)</th>
      </tr>
    </thead>
    <tbody>
      ${rows}
    </tbody>
    <tfoot>
      <tr class="totals">
        <td colspan="${2 + FACTOR_ORDER.length + 1}">Total CO2 across months</td>
        <td class="num" data-co2-total="${response.co2_total}">${fmt2(response.co2_total)}</td>
      </tr>
    </tfoot>
  </table>
</section>`;
}
