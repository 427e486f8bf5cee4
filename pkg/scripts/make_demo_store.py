#!/usr/bin/env python3
"""Build a small deterministic demo store so `ecograde serve` has data.

Two synthetic cities, scored through the production pipeline, plus a few
corporate bookings and a supplier portfolio. Everything derives from one
seed, so the store is reproducible byte for byte.
"""

import argparse
import json
import sys
from pathlib import Path

from ecograde.ingest import default_bedroom_table, ensure_city
from ecograde.interpolate import EpcIndex
from ecograde.scoring import ScoringContext, score_all
from ecograde.stats import baselines_from_scored
from ecograde.store import Booking, Client, Supplier, write_store
from ecograde.synthcity import generate_city, params_for_city

SEED = 7
CITIES = ("Birmingham", "London")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("demo/store"))
    parser.add_argument("--n-addresses", type=int, default=150)
    args = parser.parse_args()

    listings, records, fixed, snapshots = [], [], [], None
    for i, city in enumerate(CITIES):
        corpus = generate_city(
            params_for_city(city, seed=SEED + i, n_addresses=args.n_addresses)
        )
        listings.extend(corpus.listings)
        records.extend(corpus.records)
        fixed.extend(corpus.transport_fixed)
        if snapshots is None:
            snapshots = [list(s) for s in corpus.transport_snapshots]
        else:
            for merged, snap in zip(snapshots, corpus.transport_snapshots):
                merged.extend(snap)

    table = default_bedroom_table()
    for city in CITIES:
        table = ensure_city(table, city)
    ctx = ScoringContext(
        index=EpcIndex(records),
        table=table,
        transport_fixed=fixed,
        transport_snapshots=snapshots,
    )
    scored, diagnostics = score_all(listings, ctx)
    baselines, _ = baselines_from_scored(scored)

    scored_ids = [s.listing.id for s in scored]
    bookings = [
        Booking("acme", scored_ids[0], "2024-01", 14),
        Booking("acme", scored_ids[1], "2024-01", 30),
        Booking("acme", scored_ids[2], "2024-02", 21),
        Booking("acme", scored_ids[3], "2024-02", 7),
        Booking("acme", scored_ids[4], "2024-03", 28),
        Booking("globex", scored_ids[5], "2024-02", 60),
    ]
    clients = [Client("acme", "Acme Corp"), Client("globex", "Globex Ltd")]
    birmingham_ids = tuple(
        s.listing.id for s in scored if s.listing.city == "Birmingham"
    )[:20]
    suppliers = [Supplier("sup-birmingham", "Birmingham Lettings", birmingham_ids)]

    write_store(
        args.out,
        listings=listings,
        records=records,
        reports=[s.report for s in scored],
        baselines=baselines,
        bookings=bookings,
        clients=clients,
        suppliers=suppliers,
    )
    print(
        json.dumps(
            {
                "store": str(args.out),
                "listings": len(listings),
                "scored": len(scored),
                "unscored": len(diagnostics),
                "baselines": len(baselines),
            },
            indent=2,
        )
    )
    print(f"\nserve with: ecograde serve --store {args.out} --port 8000")
    return 0


if __name__ == "__main__":
    sys.exit(main())
