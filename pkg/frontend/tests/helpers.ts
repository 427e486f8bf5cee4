import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "..", "fixtures");

export interface RecordedResponse<T> {
  request: { path: string; params: Record<string, string> };
  status: number;
  body: T;
}

export function loadFixture<T>(name: string): RecordedResponse<T> {
  return JSON.parse(readFileSync(join(FIXTURES, `${name}.json`), "utf-8")) as RecordedResponse<T>;
}

// Ordered list of data-listing-id occurrences in a rendered page.
export function listingIdsIn(html: string): string[] {
  return [...html.matchAll(/data-listing-id="([^"]+)"/g)].map((m) => m[1]);
}
