"""File-backed store behind the HTTP service.

Each entity type lives in its own JSON-lines file (baselines in CSV, as
they are shared with the batch tooling); loading builds one immutable
in-memory snapshot with a content fingerprint. Serving always reads a
single snapshot, so concurrent requests never observe partial state;
reloading swaps the whole snapshot atomically.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .interpolate import EpcIndex
from .ingest import BedroomLookupTable, default_bedroom_table, read_records_jsonl
from .model import CityBaseline, EcoGradeReport, Listing
from .scoring import ConversionFactors, ScoreCalibration
from .stats import read_baselines_csv

_MONTH_RE = re.compile(r"^\d{4}-(0[1-9]|1[0-2])$")

LISTINGS_FILE = "listings.jsonl"
RECORDS_FILE = "epc_records.jsonl"
REPORTS_FILE = "reports.jsonl"
BASELINES_FILE = "baselines.csv"
BOOKINGS_FILE = "bookings.jsonl"
CLIENTS_FILE = "clients.jsonl"
SUPPLIERS_FILE = "suppliers.jsonl"

STORE_FILES = (
    LISTINGS_FILE,
    RECORDS_FILE,
    REPORTS_FILE,
    BASELINES_FILE,
    BOOKINGS_FILE,
    CLIENTS_FILE,
    SUPPLIERS_FILE,
)


@dataclass(frozen=True)
class Booking:
    corporate_client_id: str
    listing_id: str
    month: str  # YYYY-MM
    nights: int

    def __post_init__(self):
        if not _MONTH_RE.match(self.month):
            raise ValueError(f"month must be YYYY-MM, got {self.month!r}")
        if self.nights <= 0:
            raise ValueError("nights must be positive")

    def to_dict(self) -> dict:
        return {
            "corporate_client_id": self.corporate_client_id,
            "listing_id": self.listing_id,
            "month": self.month,
            "nights": self.nights,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Booking":
        return cls(
            corporate_client_id=d["corporate_client_id"],
            listing_id=d["listing_id"],
            month=d["month"],
            nights=int(d["nights"]),
        )


@dataclass(frozen=True)
class Client:
    id: str
    name: str = ""


@dataclass(frozen=True)
class Supplier:
    id: str
    name: str = ""
    listing_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class StoreSnapshot:
    """Immutable view of everything the API serves."""

    listings: dict[str, Listing]
    reports: dict[str, EcoGradeReport]
    baselines: dict[tuple[str, int], CityBaseline]
    bookings: tuple[Booking, ...]
    clients: dict[str, Client]
    suppliers: dict[str, Supplier]
    epc_index: EpcIndex
    table: BedroomLookupTable
    calibration: ScoreCalibration
    conversion: ConversionFactors
    fingerprint: str = ""
    listing_order: tuple[str, ...] = field(default_factory=tuple)

    def baseline_for(self, city: str, bed_type: Optional[int]) -> Optional[CityBaseline]:
        if bed_type is None:
            return None
        return self.baselines.get((city, bed_type))


def _read_jsonl(path: Path) -> list[dict]:
    if not path.exists():
        return []
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(json.loads(line))
    return out


def store_fingerprint(data_dir: Path) -> str:
    """Content hash over the store files that exist."""
    h = hashlib.sha256()
    for name in STORE_FILES:
        path = Path(data_dir) / name
        if path.exists():
            h.update(name.encode("utf-8"))
            h.update(path.read_bytes())
    return h.hexdigest()


def load_store(
    data_dir,
    calibration: Optional[ScoreCalibration] = None,
    conversion: Optional[ConversionFactors] = None,
    table: Optional[BedroomLookupTable] = None,
) -> StoreSnapshot:
    """Build a snapshot from a store directory; absent files mean empty."""
    data_dir = Path(data_dir)
    listings = [Listing.from_dict(d) for d in _read_jsonl(data_dir / LISTINGS_FILE)]
    reports = [EcoGradeReport.from_dict(d) for d in _read_jsonl(data_dir / REPORTS_FILE)]
    bookings = tuple(Booking.from_dict(d) for d in _read_jsonl(data_dir / BOOKINGS_FILE))
    clients = {
        d["id"]: Client(id=d["id"], name=d.get("name", ""))
        for d in _read_jsonl(data_dir / CLIENTS_FILE)
    }
    suppliers = {
        d["id"]: Supplier(
            id=d["id"], name=d.get("name", ""), listing_ids=tuple(d.get("listing_ids", ()))
        )
        for d in _read_jsonl(data_dir / SUPPLIERS_FILE)
    }
    baselines_path = data_dir / BASELINES_FILE
    baselines = read_baselines_csv(baselines_path) if baselines_path.exists() else []
    records_path = data_dir / RECORDS_FILE
    records = read_records_jsonl(records_path) if records_path.exists() else []

    return StoreSnapshot(
        listings={l.id: l for l in listings},
        reports={r.listing_id: r for r in reports},
        baselines={(b.city, b.bed_type): b for b in baselines},
        bookings=bookings,
        clients=clients,
        suppliers=suppliers,
        epc_index=EpcIndex(records),
        table=table or default_bedroom_table(),
        calibration=calibration or ScoreCalibration(),
        conversion=conversion or ConversionFactors(),
        fingerprint=store_fingerprint(data_dir),
        listing_order=tuple(l.id for l in listings),
    )


def write_store(
    data_dir,
    listings=(),
    records=(),
    reports=(),
    baselines=(),
    bookings=(),
    clients=(),
    suppliers=(),
) -> None:
    """Write store files for the given collections (helper for tools/tests)."""
    from .ingest import write_records_jsonl
    from .stats import write_baselines_csv

    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)

    def dump(path: Path, dicts) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for d in dicts:
                fh.write(json.dumps(d, sort_keys=True) + "\n")

    dump(data_dir / LISTINGS_FILE, (l.to_dict() for l in listings))
    write_records_jsonl(records, data_dir / RECORDS_FILE)
    dump(data_dir / REPORTS_FILE, (r.to_dict() for r in reports))
    write_baselines_csv(list(baselines), data_dir / BASELINES_FILE)
    dump(data_dir / BOOKINGS_FILE, (b.to_dict() for b in bookings))
    dump(data_dir / CLIENTS_FILE, ({"id": c.id, "name": c.name} for c in clients))
    dump(
        data_dir / SUPPLIERS_FILE,
        ({"id": s.id, "name": s.name, "listing_ids": list(s.listing_ids)} for s in suppliers),
    )
