import { describe, expect, it } from "vitest";

import { renderSearchPage } from "../src/views/search.js";
import type { SearchFilters, SearchResponse } from "../src/types.js";
import { listingIdsIn, loadFixture } from "./helpers.js";

const filters = (order: "asc" | "desc"): SearchFilters => ({
  city: "Birmingham",
  order,
  page: 1,
});

describe("search page", () => {
  it("renders the recorded page (snapshot)", () => {
    const fixture = loadFixture<SearchResponse>("search_birmingham_desc");
    expect(renderSearchPage(fixture.body, filters("desc"))).toMatchSnapshot();
  });

  it.each(["search_birmingham_desc", "search_birmingham_asc"] as const)(
    "card order equals API order for %s",
    (name) => {
      const fixture = loadFixture<SearchResponse>(name);
      const html = renderSearchPage(fixture.body, filters(name.endsWith("asc") ? "asc" : "desc"));
      expect(listingIdsIn(html)).toEqual(fixture.body.items.map((item) => item.id));
    },
  );

  it("renders leaves exactly as served, never recomputed", () => {
    const fixture = loadFixture<SearchResponse>("search_birmingham_desc");
    const html = renderSearchPage(fixture.body, filters("desc"));
    const cards = html.split("<article").slice(1);
    expect(cards).toHaveLength(fixture.body.items.length);
    fixture.body.items.forEach((item, i) => {
      if (item.leaves === null) {
        expect(cards[i]).toContain("Coming Soon");
      } else {
        expect(cards[i]).toContain(`data-leaves="${item.leaves}"`);
        const filled = (cards[i].match(/leaf-filled/g) ?? []).length;
        expect(filled).toBe(item.leaves);
        expect(cards[i]).toContain(item.overall!.toFixed(1));
      }
    });
  });

  it("beds filter fixture only shows matching cards", () => {
    const fixture = loadFixture<SearchResponse>("search_beds1");
    const html = renderSearchPage(fixture.body, { ...filters("desc"), beds: 1 });
    expect(fixture.body.items.every((item) => item.bedrooms === 1)).toBe(true);
    expect(listingIdsIn(html)).toEqual(fixture.body.items.map((item) => item.id));
    expect(html).toContain("1 bed");
  });

  it("shows an empty state for a city with no listings", () => {
    const fixture = loadFixture<SearchResponse>("search_empty");
    const html = renderSearchPage(fixture.body, { city: "Atlantis", order: "desc", page: 1 });
    expect(html).toContain("No listings match this search");
    expect(listingIdsIn(html)).toEqual([]);
  });
});
