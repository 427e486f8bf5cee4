import { escapeHtml, fmt1 } from "../format.js";
import { renderLeaves } from "../leaves.js";
import type { DetailResponse, FactorName, Report } from "../types.js";
import { FACTOR_LABELS, FACTOR_ORDER } from "../types.js";

const MISSING_BADGES: Record<FactorName, string> = {
  consumption: "no consumption data",
  efficiency: "no certificate data",
  supplier: "no tariff data",
  transport: "no transport data",
};

function factorRow(name: FactorName, report: Report): string {
  const score = report.factor_scores[name];
  if (score === undefined) {
    return `
    <div class="factor-row factor-missing" data-factor="${name}">
      <span class="factor-label">${FACTOR_LABELS[name]}</span>
      <span class="badge badge-missing">${MISSING_BADGES[name]}</span>
    </div>`;
  }
  const width = (score / 5) * 100;
  return `
    <div class="factor-row" data-factor="${name}">
      <span class="factor-label">${FACTOR_LABELS[name]}</span>
      <span class="factor-bar"><span class="factor-fill" style="width:${width.toFixed(1)}%"></span></span>
      <span class="factor-value">${fmt1(score)}</span>
    </div>`;
}

function co2Block(report: Report): string {
  if (report.co2_avg === null) {
    return '<p class="co2 co2-pending">CO₂ estimate: Coming Soon</p>';
  }
  const collapsed = report.co2_low === report.co2_high;
  const value = collapsed
    ? `<strong>${fmt1(report.co2_avg)}</strong> t/yr`
    : `<strong>${fmt1(report.co2_avg)}</strong> t/yr (range ${fmt1(report.co2_low)} – ${fmt1(report.co2_high)})`;
  return `<p class="co2">Estimated CO₂: ${value}</p>`;
}

function provenanceNote(report: Report): string {
  const p = report.provenance;
  if (!p) return "";
  if (p.kind === "direct") {
    return '<p class="provenance">Based on this property’s own energy certificate.</p>';
  }
  if (p.kind === "meter") {
    return '<p class="provenance">Based on smart-meter readings from this property.</p>';
  }
  return `<p class="provenance">Estimated from <strong>${p.n_neighbors}</strong> similar neighbouring properties.</p>`;
}

export function renderDetailTab(detail: DetailResponse): string {
  if (detail.status !== "ok" || detail.report === null) {
    return `
<section class="detail-page" data-listing-id="${escapeHtml(detail.listing_id)}">
  <h2>${escapeHtml(detail.listing_id)}</h2>
  <p class="empty-state">EcoGrade for this listing is Coming Soon.</p>
  <p><a href="#/explain">Learn more about EcoGrade</a></p>
</section>`;
  }
  const report = detail.report;
  const rows = FACTOR_ORDER.map((name) => factorRow(name, report)).join("\n");
  return `
<section class="detail-page" data-listing-id="${escapeHtml(detail.listing_id)}">
  <h2>${escapeHtml(detail.listing_id)} <small>${escapeHtml(detail.city)}</small></h2>
  <div class="detail-headline">
    ${renderLeaves(report.leaves)}
    <span class="detail-overall">${fmt1(report.overall)} / 5</span>
  </div>
  <div class="factor-list">
    ${rows}
  </div>
  ${co2Block(report)}
  ${provenanceNote(report)}
  <p><a href="#/explain">Learn more about EcoGrade</a></p>
</section>`;
}

// Placeholder copy: the production explanation page's text is owned by the
// marketplace content team.
export function renderExplanation(): string {
  return `
<section class="explain-page">
  <h2>What is EcoGrade?</h2>
  <p>EcoGrade is a 0–5 sustainability score for a specific address. It blends
  up to four factors, each shown on the listing’s EcoGrade tab:</p>
  <ul>
    <li><strong>Energy consumption</strong>: predicted energy use per square metre,
    from the property’s energy certificate or its smart meter. Lower is better.</li>
    <li><strong>Energy efficiency</strong>: how well the building keeps heat in,
    from the certificate’s surveyed items (walls, windows, roof, heating…).</li>
    <li><strong>Green supplier</strong>: whether the electricity tariff is renewable
    and the home avoids a gas boiler. Only shown when tariff data exists.</li>
    <li><strong>Green transport</strong>: how quickly you can walk to shared bikes,
    scooters, and public transport.</li>
  </ul>
  <p>Where a property has no certificate of its own, EcoGrade is estimated from
  similar neighbouring properties in the same postcode and marked as such.</p>
  <p><a href="#/search">Back to search</a></p>
</section>`;
}
