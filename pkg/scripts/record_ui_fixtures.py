#!/usr/bin/env python3
"""Record API responses as JSON fixtures for the web client's tests.

Builds a deterministic store (one synthetic city for search pages, plus a
handful of handcrafted London listings that exercise the emissions labels,
"Coming Soon" cells, and the advice ordering), serves it in-process, and
saves selected responses under frontend/fixtures/.
"""

import argparse
import datetime as dt
import json
import sys
from pathlib import Path

from fastapi.testclient import TestClient

from ecograde.ingest import default_bedroom_table, ensure_city
from ecograde.interpolate import EpcIndex
from ecograde.model import (
    CityBaseline,
    EcoGradeReport,
    EfficiencyBand,
    EpcRecord,
    Listing,
    Provenance,
)
from ecograde.scoring import ScoringContext, score_all
from ecograde.service import create_app
from ecograde.stats import baselines_from_scored
from ecograde.store import Booking, Client, Supplier, write_store
from ecograde.synthcity import generate_city, params_for_city


def crafted_listing(id, address, beds=1, city="London", postcode="SW1A 1AA"):
    return Listing(
        id=id,
        address_key=address,
        postcode=postcode,
        latitude=51.5074,
        longitude=-0.1278,
        city=city,
        bedrooms=beds,
    )


def crafted_record(address, bands, postcode="SW1A 1AA", area=50.0, kwh=250.0):
    return EpcRecord(
        address_key=address,
        postcode=postcode,
        floor_area=area,
        bands=bands,
        kwh_per_m2=kwh,
        lodgement_date=dt.date(2022, 6, 1),
        headline_rating="D",
    )


def crafted_report(listing_id, factors, co2, provenance, sigma=0.0, missing=("supplier", "transport")):
    overall = sum(factors.values()) / len(factors)
    return EcoGradeReport(
        listing_id=listing_id,
        factor_scores=factors,
        overall=overall,
        leaves=min(5, int(overall + 0.5)),
        provenance=provenance,
        co2_avg=co2,
        co2_low=co2 if provenance.kind != "interpolated" else co2 - sigma,
        co2_high=co2 if provenance.kind != "interpolated" else co2 + sigma,
        co2_sigma=sigma,
        missing_factors=tuple(missing),
    )


def build_store(store_dir: Path) -> None:
    corpus = generate_city(params_for_city("Birmingham", seed=7, n_addresses=60))
    table = ensure_city(default_bedroom_table(), "Birmingham")
    ctx = ScoringContext(
        index=EpcIndex(corpus.records),
        table=table,
        transport_fixed=corpus.transport_fixed,
        transport_snapshots=corpus.transport_snapshots,
    )
    scored, _ = score_all(corpus.listings, ctx)
    baselines, _ = baselines_from_scored(scored)

    listings = list(corpus.listings)
    records = list(corpus.records)
    reports = [s.report for s in scored]

    # Handcrafted London rows: exact emissions labels, advice ordering, and
    # an unscored listing for the Coming Soon path.
    listings += [
        crafted_listing("london-low", "1 ALDER STREET"),
        crafted_listing("london-high", "2 ALDER STREET"),
        crafted_listing("london-interp", "9 UNMATCHED ROAD"),
        crafted_listing("london-unscored", "1 VOID LANE", postcode="SW9 9ZZ"),
    ]
    records += [
        crafted_record(
            "1 ALDER STREET",
            {
                "walls": EfficiencyBand.VERY_POOR,
                "lighting": EfficiencyBand.AVERAGE,
                "roof": EfficiencyBand.VERY_GOOD,
            },
        ),
        crafted_record("2 ALDER STREET", {"walls": EfficiencyBand.VERY_GOOD}),
        crafted_record("5 ALDER STREET", {"walls": EfficiencyBand.GOOD}),
        crafted_record("6 ALDER STREET", {"walls": EfficiencyBand.AVERAGE}, area=52.0),
    ]
    reports += [
        crafted_report(
            "london-low",
            {"consumption": 3.0, "efficiency": 3.0},
            co2=1.2624,
            provenance=Provenance("direct"),
        ),
        crafted_report(
            "london-high",
            {"consumption": 4.2, "efficiency": 4.2},
            co2=2.0981,
            provenance=Provenance("direct"),
        ),
        crafted_report(
            "london-interp",
            {"consumption": 2.5, "efficiency": 2.5},
            co2=1.9,
            provenance=Provenance("interpolated", n_neighbors=4),
            sigma=0.3,
        ),
    ]
    baselines = baselines + [CityBaseline("London", 1, c_mu=2.0, c_sigma=1.0, c_n=20)]

    scored_ids = [s.listing.id for s in scored]
    bookings = [
        Booking("acme", scored_ids[0], "2024-01", 14),
        Booking("acme", scored_ids[1], "2024-01", 30),
        Booking("acme", scored_ids[2], "2024-02", 21),
        Booking("acme", scored_ids[3], "2024-02", 7),
    ]
    write_store(
        store_dir,
        listings=listings,
        records=records,
        reports=reports,
        baselines=baselines,
        bookings=bookings,
        clients=[Client("acme", "Acme Corp")],
        suppliers=[
            Supplier(
                "sup-london",
                "London Portfolio",
                ("london-low", "london-high", "london-interp", "london-unscored"),
            )
        ],
    )


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out", type=Path, default=Path(__file__).resolve().parents[1] / "frontend/fixtures"
    )
    parser.add_argument("--store", type=Path, default=Path("demo/fixture-store"))
    args = parser.parse_args()

    build_store(args.store)
    client = TestClient(create_app(args.store))
    args.out.mkdir(parents=True, exist_ok=True)

    def record(name, path, params=None):
        response = client.get(path, params=params or {})
        payload = {
            "request": {"path": path, "params": params or {}},
            "status": response.status_code,
            "body": response.json(),
        }
        with open(args.out / f"{name}.json", "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"recorded {name}: {response.status_code} {path}")

    record("search_birmingham_desc", "/v1/listings", {"city": "Birmingham", "page_size": 12})
    record(
        "search_birmingham_asc",
        "/v1/listings",
        {"city": "Birmingham", "page_size": 12, "order": "asc"},
    )
    record("search_beds1", "/v1/listings", {"city": "Birmingham", "beds": 1, "page_size": 12})
    record("search_empty", "/v1/listings", {"city": "Atlantis"})
    record("detail_direct", "/v1/listings/birmingham-00000/ecograde")
    record("detail_interpolated", "/v1/listings/london-interp/ecograde")
    record("detail_unscored", "/v1/listings/london-unscored/ecograde")
    record("detail_not_found", "/v1/listings/ghost/ecograde")
    record("supplier_dashboard", "/v1/suppliers/sup-london/dashboard")
    record("corporate_dashboard", "/v1/corporate/acme/dashboard", {"as_of": "2024-03"})
    record("advice_improvable", "/v1/listings/london-low/advice")
    record("advice_empty", "/v1/listings/london-high/advice")
    return 0


if __name__ == "__main__":
    sys.exit(main())
