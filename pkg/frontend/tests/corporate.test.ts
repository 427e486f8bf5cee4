import { describe, expect, it } from "vitest";

import { renderCorporateDashboard } from "../src/views/corporate.js";
import type { CorporateDashboardResponse } from "../src/types.js";
import { loadFixture } from "./helpers.js";

function fixtureBody(): CorporateDashboardResponse {
  return loadFixture<CorporateDashboardResponse>("corporate_dashboard").body;
}

describe("corporate dashboard", () => {
  it("renders the recorded dashboard (snapshot)", () => {
    expect(renderCorporateDashboard(fixtureBody())).toMatchSnapshot();
  });

  it("months appear in served (chronological) order", () => {
    const body = fixtureBody();
    const html = renderCorporateDashboard(body);
    const months = [...html.matchAll(/data-month="([^"]+)"/g)].map((m) => m[1]);
    expect(months).toEqual(body.months.map((m) => m.month));
    expect(months).toEqual([...months].sort());
  });

  it("delta arrows carry exactly the served delta values", () => {
    const body = fixtureBody();
    const html = renderCorporateDashboard(body);
    const firstMonthRow = html.split("<tr").find((c) => c.includes(`data-month="${body.months[0].month}"`))!;
    expect(firstMonthRow).not.toContain("class=\"delta\"");
    for (const month of body.months.slice(1)) {
      if (!month.deltas) continue;
      for (const delta of Object.values(month.deltas)) {
        expect(html).toContain(`data-delta="${delta}"`);
      }
    }
  });

  it("totals row equals the served co2_total", () => {
    const body = fixtureBody();
    const html = renderCorporateDashboard(body);
    expect(html).toContain(`data-co2-total="${body.co2_total}"`);
    expect(html).toContain(body.co2_total.toFixed(2));
  });

  it("a single month shows no deltas and no trend line", () => {
    const body = fixtureBody();
    const single: CorporateDashboardResponse = { ...body, months: body.months.slice(0, 1) };
    const html = renderCorporateDashboard(single);
    expect(html).not.toContain("class=\"delta\"");
    expect(html).not.toContain("<svg");
  });

  it("no bookings renders the onboarding empty state", () => {
    const body = fixtureBody();
    const empty: CorporateDashboardResponse = { ...body, months: [], co2_total: 0 };
    expect(renderCorporateDashboard(empty)).toContain("No completed booking months yet");
  });
});
