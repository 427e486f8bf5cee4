import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, EcoGradeApi } from "../src/api.js";
import type { SearchResponse } from "../src/types.js";
import { loadFixture } from "./helpers.js";

function stubFetch(status: number, body: unknown) {
  const mock = vi.fn(async () => ({
    ok: status < 400,
    status,
    statusText: "stub",
    json: async () => body,
  }));
  vi.stubGlobal("fetch", mock);
  return mock;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("api client", () => {
  it("builds the search URL from the filters", async () => {
    const fixture = loadFixture<SearchResponse>("search_birmingham_desc");
    const mock = stubFetch(200, fixture.body);
    const api = new EcoGradeApi("http://api.test");
    const result = await api.searchListings({ city: "Birmingham", beds: 1, order: "desc", page: 2 });
    expect(result).toEqual(fixture.body);
    const url = String((mock.mock.calls[0] as unknown[])[0]);
    expect(url).toContain("http://api.test/v1/listings?");
    expect(url).toContain("sort=ecograde");
    expect(url).toContain("order=desc");
    expect(url).toContain("city=Birmingham");
    expect(url).toContain("beds=1");
    expect(url).toContain("page=2");
  });

  it("raises a typed error from problem documents", async () => {
    stubFetch(404, { code: "not_found", message: "listing 'ghost'" });
    const api = new EcoGradeApi();
    const error = await api.listingDetail("ghost").catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.status).toBe(404);
    expect(error.code).toBe("not_found");
  });

  it("encodes path segments", async () => {
    const mock = stubFetch(200, { listing_id: "a b", overall: null, neighborhood_inferred: false, items: [] });
    await new EcoGradeApi().listingAdvice("a b");
    expect(String((mock.mock.calls[0] as unknown[])[0])).toContain("/v1/listings/a%20b/advice");
  });
});
