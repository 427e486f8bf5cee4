"""Certificate export parsing, cleaning, dedup, and bedroom inference.

The parser accepts the two open-data export shapes we encounter in the
wild (comma-separated CSV with a header row, and JSON-lines) and emits
per-row diagnostics instead of failing globally: a bad band label keeps
the record and drops the band, a missing mandatory field drops the row.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from datetime import date
from typing import IO, Iterable, Optional, Sequence, Union

from .errors import ConfigError, OutOfRange, UnknownCity
from .model import RATING_LETTERS, EfficiencyBand, EpcRecord, normalize_address, normalize_postcode


@dataclass(frozen=True)
class CleaningRules:
    """Thresholds for the entry-error filters. Shipped defaults, all editable."""

    max_plausible_area: float = 500.0
    min_plausible_area: float = 10.0
    good_rating_kwh_cap: float = 400.0
    good_ratings: frozenset[str] = frozenset({"A", "B"})

    def __post_init__(self):
        if not self.min_plausible_area < self.max_plausible_area:
            raise ConfigError("min_plausible_area must be below max_plausible_area")
        if not self.good_rating_kwh_cap > 0:
            raise ConfigError("good_rating_kwh_cap must be positive")
        if not set(self.good_ratings) <= set(RATING_LETTERS):
            raise ConfigError("good_ratings must be rating letters")

    @classmethod
    def from_dict(cls, d: dict) -> "CleaningRules":
        return cls(
            max_plausible_area=float(d.get("max_plausible_area", 500.0)),
            min_plausible_area=float(d.get("min_plausible_area", 10.0)),
            good_rating_kwh_cap=float(d.get("good_rating_kwh_cap", 400.0)),
            good_ratings=frozenset(d.get("good_ratings", ("A", "B"))),
        )


@dataclass(frozen=True)
class ParseDiagnostic:
    row: int
    reason: str
    detail: str = ""


@dataclass(frozen=True)
class BedroomRow:
    area_low: float
    area_high: float
    bedrooms: int


@dataclass(frozen=True)
class BedroomLookupTable:
    """Per-city floor-area bands mapping onto bedroom counts (0 = studio).

    The shipped defaults are illustrative configuration, not industry data;
    edit config/bedroom_table.json to match local market conventions.
    """

    rows_by_city: dict[str, tuple[BedroomRow, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for city, rows in self.rows_by_city.items():
            if not rows:
                raise ConfigError(f"city {city!r} has no rows")
            prev: Optional[BedroomRow] = None
            for row in rows:
                if not row.area_low < row.area_high:
                    raise ConfigError(f"{city}: empty area range {row}")
                if not 0 <= row.bedrooms <= 5:
                    raise ConfigError(f"{city}: bedrooms out of [0, 5]: {row}")
                if prev is not None:
                    if row.area_low != prev.area_high:
                        raise ConfigError(f"{city}: rows must be contiguous and ascending")
                    if row.bedrooms < prev.bedrooms:
                        raise ConfigError(f"{city}: bedrooms must not decrease with area")
                prev = row

    def cities(self) -> list[str]:
        return sorted(self.rows_by_city)

    def span(self, city: str) -> tuple[float, float]:
        rows = self._rows(city)
        return rows[0].area_low, rows[-1].area_high

    def _rows(self, city: str) -> tuple[BedroomRow, ...]:
        try:
            return self.rows_by_city[city]
        except KeyError:
            raise UnknownCity(f"no bedroom table for city {city!r}") from None

    @classmethod
    def from_dict(cls, d: dict) -> "BedroomLookupTable":
        return cls(
            rows_by_city={
                city: tuple(BedroomRow(float(lo), float(hi), int(b)) for lo, hi, b in rows)
                for city, rows in d.items()
            }
        )

    def to_dict(self) -> dict:
        return {
            city: [[r.area_low, r.area_high, r.bedrooms] for r in rows]
            for city, rows in sorted(self.rows_by_city.items())
        }


_DEFAULT_ROWS = ((0, 37, 0), (37, 55, 1), (55, 75, 2), (75, 100, 3), (100, 130, 4), (130, 500, 5))
_LONDON_ROWS = ((0, 41, 0), (41, 60, 1), (60, 80, 2), (80, 105, 3), (105, 135, 4), (135, 500, 5))

DEFAULT_CITIES = (
    "Birmingham",
    "Bristol",
    "Cardiff",
    "Edinburgh",
    "Glasgow",
    "London",
    "Manchester",
    "Milton Keynes",
    "Newcastle",
    "Nottingham",
)


def default_bedroom_table() -> BedroomLookupTable:
    rows = {city: _DEFAULT_ROWS for city in DEFAULT_CITIES}
    rows["London"] = _LONDON_ROWS
    return BedroomLookupTable.from_dict(rows)


def ensure_city(table: BedroomLookupTable, city: str) -> BedroomLookupTable:
    """Return a table that covers ``city``, adding the stock rows if absent."""
    if city in table.rows_by_city:
        return table
    extended = dict(table.to_dict())
    extended[city] = [list(r) for r in _DEFAULT_ROWS]
    return BedroomLookupTable.from_dict(extended)


def infer_bedrooms(floor_area: float, city: str, table: BedroomLookupTable) -> int:
    """Bedroom count of the row containing floor_area (low inclusive, high exclusive)."""
    rows = table._rows(city)
    for row in rows:
        if row.area_low <= floor_area < row.area_high:
            return row.bedrooms
    lo, hi = rows[0].area_low, rows[-1].area_high
    raise OutOfRange(f"floor area {floor_area} m2 outside table span [{lo}, {hi}) for {city}")


# Header aliases seen in open-data exports, normalized to lowercase with
# underscores. Unknown columns are ignored.
_FIELD_ALIASES = {
    "address": "address",
    "address1": "address",
    "address_key": "address",
    "postcode": "postcode",
    "floor_area": "floor_area",
    "total_floor_area": "floor_area",
    "kwh_per_m2": "kwh_per_m2",
    "energy_consumption_current": "kwh_per_m2",
    "lodgement_date": "lodgement_date",
    "headline_rating": "headline_rating",
    "current_energy_rating": "headline_rating",
}

_BAND_ALIASES = {
    "hot_water": "hot_water",
    "hot_water_energy_eff": "hot_water",
    "floor": "floor",
    "floor_energy_eff": "floor",
    "windows": "windows",
    "windows_energy_eff": "windows",
    "walls": "walls",
    "walls_energy_eff": "walls",
    "secondary_heating": "secondary_heating",
    "sheating_energy_eff": "secondary_heating",
    "roof": "roof",
    "roof_energy_eff": "roof",
    "main_heat": "main_heat",
    "mainheat_energy_eff": "main_heat",
    "main_heat_control": "main_heat_control",
    "mainheatc_energy_eff": "main_heat_control",
    "lighting": "lighting",
    "lighting_energy_eff": "lighting",
}

MANDATORY_FIELDS = ("address", "postcode", "floor_area", "kwh_per_m2", "lodgement_date")


def _normalize_header(name: str) -> str:
    return "_".join(name.strip().lower().replace("-", " ").split())


def _build_record(
    row_no: int,
    fields: dict[str, str],
    bands_raw: dict[str, str],
    diagnostics: list[ParseDiagnostic],
) -> Optional[EpcRecord]:
    missing = [f for f in MANDATORY_FIELDS if not fields.get(f, "").strip()]
    if missing:
        diagnostics.append(ParseDiagnostic(row_no, "missing_field", ",".join(missing)))
        return None
    rating = fields.get("headline_rating", "").strip().upper()
    if rating not in RATING_LETTERS:
        # Dedup needs a rating letter for its tie-break, so treat it as
        # required even though scoring never reads it.
        diagnostics.append(ParseDiagnostic(row_no, "missing_field", "headline_rating"))
        return None
    try:
        floor_area = float(fields["floor_area"])
        kwh = float(fields["kwh_per_m2"])
        lodgement = date.fromisoformat(fields["lodgement_date"].strip())
    except ValueError as exc:
        diagnostics.append(ParseDiagnostic(row_no, "invalid_value", str(exc)))
        return None
    if floor_area <= 0 or kwh < 0:
        diagnostics.append(
            ParseDiagnostic(row_no, "invalid_value", f"area={floor_area} kwh={kwh}")
        )
        return None

    bands: dict[str, EfficiencyBand] = {}
    for attr, label in bands_raw.items():
        if not label or not label.strip():
            continue
        try:
            bands[attr] = EfficiencyBand.parse(label)
        except ValueError:
            diagnostics.append(ParseDiagnostic(row_no, "bad_band_label", f"{attr}={label}"))
    return EpcRecord(
        address_key=normalize_address(fields["address"]),
        postcode=normalize_postcode(fields["postcode"]),
        floor_area=floor_area,
        bands=bands,
        kwh_per_m2=kwh,
        lodgement_date=lodgement,
        headline_rating=rating,
    )


def _parse_csv(stream: IO[str]) -> tuple[list[EpcRecord], list[ParseDiagnostic]]:
    reader = csv.DictReader(stream)
    records: list[EpcRecord] = []
    diagnostics: list[ParseDiagnostic] = []
    header_map: dict[str, str] = {}
    band_map: dict[str, str] = {}
    for name in reader.fieldnames or []:
        norm = _normalize_header(name)
        if norm in _FIELD_ALIASES:
            header_map[name] = _FIELD_ALIASES[norm]
        elif norm in _BAND_ALIASES:
            band_map[name] = _BAND_ALIASES[norm]
    for row_no, row in enumerate(reader, start=1):
        fields = {canon: (row.get(col) or "") for col, canon in header_map.items()}
        bands_raw = {canon: (row.get(col) or "") for col, canon in band_map.items()}
        record = _build_record(row_no, fields, bands_raw, diagnostics)
        if record is not None:
            records.append(record)
    return records, diagnostics


def _parse_jsonl(stream: IO[str]) -> tuple[list[EpcRecord], list[ParseDiagnostic]]:
    records: list[EpcRecord] = []
    diagnostics: list[ParseDiagnostic] = []
    for row_no, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            diagnostics.append(ParseDiagnostic(row_no, "invalid_json", str(exc)))
            continue
        fields = {}
        for key, value in obj.items():
            canon = _FIELD_ALIASES.get(_normalize_header(key))
            if canon:
                fields[canon] = "" if value is None else str(value)
        bands_raw = {}
        for key, value in (obj.get("bands") or {}).items():
            canon = _BAND_ALIASES.get(_normalize_header(key))
            if canon:
                bands_raw[canon] = "" if value is None else str(value)
        record = _build_record(row_no, fields, bands_raw, diagnostics)
        if record is not None:
            records.append(record)
    return records, diagnostics


def parse_epc_export(
    source: Union[bytes, str, IO[str], IO[bytes]], format: str = "csv"
) -> tuple[list[EpcRecord], list[ParseDiagnostic]]:
    """Parse a certificate export into records plus per-row diagnostics.

    ``format`` is ``csv`` or ``json-lines``. Row numbers in diagnostics are
    1-based over data rows (the CSV header row is not counted).
    """
    if isinstance(source, bytes):
        stream: IO[str] = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str):
        stream = io.StringIO(source)
    elif hasattr(source, "read"):
        data = source.read()
        stream = io.StringIO(data.decode("utf-8") if isinstance(data, bytes) else data)
    else:
        raise TypeError("source must be bytes, str, or a readable stream")
    if format == "csv":
        return _parse_csv(stream)
    if format == "json-lines":
        return _parse_jsonl(stream)
    raise ConfigError(f"unknown export format: {format!r}")


def clean_records(
    records: Sequence[EpcRecord], rules: CleaningRules = CleaningRules()
) -> tuple[list[EpcRecord], list[tuple[EpcRecord, str]]]:
    """Partition records into kept and (record, reason) rejects.

    Rejects implausible floor areas, good headline ratings paired with very
    large kWh/m2 predictions, and records left with no band at all (the
    canonical set guarantees at least one band per record).
    """
    kept: list[EpcRecord] = []
    rejected: list[tuple[EpcRecord, str]] = []
    for record in records:
        if not rules.min_plausible_area <= record.floor_area <= rules.max_plausible_area:
            rejected.append((record, "implausible_area"))
        elif record.headline_rating in rules.good_ratings and record.kwh_per_m2 > rules.good_rating_kwh_cap:
            rejected.append((record, "rating_kwh_conflict"))
        elif not record.bands:
            rejected.append((record, "no_bands"))
        else:
            kept.append(record)
    return kept, rejected


def record_fingerprint(record: EpcRecord) -> str:
    """Stable content hash used in rejection reports and dedup tie-breaks."""
    payload = json.dumps(record.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def dedupe_by_address(records: Iterable[EpcRecord]) -> list[EpcRecord]:
    """One canonical record per (address key, postcode).

    Latest lodgement date wins; ties keep the worst headline rating; any
    remaining tie keeps the lexicographically smallest fingerprint, so the
    result is independent of input order.
    """
    best: dict[tuple[str, str], tuple] = {}
    for record in records:
        # Sort key: later date, then worse (further down the alphabet)
        # rating, then smaller fingerprint.
        key = (
            record.lodgement_date,
            RATING_LETTERS.index(record.headline_rating),
            _negated_fingerprint(record),
        )
        identity = record.identity
        incumbent = best.get(identity)
        if incumbent is None or key > incumbent[0]:
            best[identity] = (key, record)
    return [best[k][1] for k in sorted(best)]


def _negated_fingerprint(record: EpcRecord) -> bytes:
    # max() semantics need "smaller fingerprint is better", so compare the
    # bitwise complement.
    raw = bytes.fromhex(record_fingerprint(record))
    return bytes(255 - b for b in raw)


def write_records_jsonl(records: Iterable[EpcRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")


def read_records_jsonl(path) -> list[EpcRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(EpcRecord.from_dict(json.loads(line)))
    return records


def write_rejections_csv(rejected: Sequence[tuple[EpcRecord, str]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fingerprint", "reason"])
        for record, reason in rejected:
            writer.writerow([record_fingerprint(record), reason])
