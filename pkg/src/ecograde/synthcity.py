"""Deterministic synthetic cities for desk-scale validation runs.

Each city is a set of postcode districts; every postcode carries a
latent build-quality level, and its dwellings draw their certificate
bands and energy use around that level. That shared latent makes
neighbor interpolation meaningful by construction. A fixed fraction of
addresses receives a direct certificate; the rest must be interpolated,
mirroring how coverage holes appear in the real certificate database.

Everything is driven by one 64-bit seed; the same seed reproduces the
corpus byte for byte. The per-city distribution parameters below are
configuration chosen to echo the qualitative spread of UK cities (a
narrow low mode for Birmingham, a wider and greener London); they are
illustrative, not measured.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import date, datetime, timedelta
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, NoComparableData, OutOfRange
from .geo import TransportPoint, GeoPoint
from .ingest import BedroomLookupTable, default_bedroom_table, ensure_city, infer_bedrooms
from .model import EfficiencyBand, EpcRecord, Listing, BAND_ATTRIBUTES

_BAND_CUTS = (0.2, 0.4, 0.6, 0.8)  # very poor | poor | average | good | very good
_STREET_NAMES = (
    "ALDER", "BIRCH", "CEDAR", "DAMSON", "ELM", "FIELDFARE", "GORSE", "HAWTHORN",
    "IVY", "JUNIPER", "LARCH", "MAPLE", "NETTLE", "ORCHARD", "POPLAR", "ROWAN",
)
_BEDROOM_CLASS_WEIGHTS = (0.18, 0.30, 0.26, 0.14, 0.08, 0.04)  # studio .. 5-bed
_SNAPSHOT_TIMES = (
    datetime(2024, 3, 4, 8, 0),
    datetime(2024, 3, 6, 13, 0),
    datetime(2024, 3, 9, 19, 30),
)


@dataclass(frozen=True)
class SyntheticCityParams:
    """Knobs for one synthetic city. Deterministic for a fixed seed."""

    city: str
    seed: int
    n_addresses: int = 1000
    epc_coverage_fraction: float = 0.7
    postcode_prefix: str = "ZZ"
    center_lat: float = 52.0
    center_lon: float = -1.0
    n_districts: int = 8
    postcodes_per_district: int = 5
    quality_mean: float = 0.42
    quality_spread: float = 0.10  # between postcodes
    quality_noise: float = 0.06  # within a postcode
    band_noise: float = 0.05  # per attribute, around the dwelling level
    band_missing_prob: float = 0.05
    kwh_base: float = 470.0
    kwh_slope: float = 360.0
    kwh_noise: float = 18.0
    transport_density: float = 1.0
    quality_shift: float = 0.0  # applied to certificate-less dwellings only

    def __post_init__(self):
        if not 0.0 <= self.epc_coverage_fraction <= 1.0:
            raise ConfigError("epc_coverage_fraction must lie in [0, 1]")
        if self.n_addresses < 0 or self.n_districts < 1 or self.postcodes_per_district < 1:
            raise ConfigError("counts must be positive")


# (prefix, lat, lon, quality_mean, quality_spread, transport_density)
CITY_PRESETS: dict[str, tuple[str, float, float, float, float, float]] = {
    "Birmingham": ("B", 52.4862, -1.8904, 0.33, 0.05, 0.9),
    "Bristol": ("BS", 51.4545, -2.5879, 0.42, 0.09, 1.0),
    "Cardiff": ("CF", 51.4816, -3.1791, 0.40, 0.08, 0.9),
    "Edinburgh": ("EH", 55.9533, -3.1883, 0.44, 0.10, 1.1),
    "Glasgow": ("G", 55.8642, -4.2518, 0.38, 0.09, 1.0),
    "London": ("SW", 51.5074, -0.1278, 0.52, 0.16, 2.0),
    "Manchester": ("M", 53.4808, -2.2426, 0.41, 0.10, 1.2),
    "Milton Keynes": ("MK", 52.0406, -0.7594, 0.55, 0.09, 1.1),
    "Newcastle": ("NE", 54.9783, -1.6178, 0.37, 0.08, 0.9),
    "Nottingham": ("NG", 52.9548, -1.1581, 0.39, 0.08, 0.9),
}


def params_for_city(city: str, seed: int, n_addresses: int = 1000, **overrides) -> SyntheticCityParams:
    if city not in CITY_PRESETS:
        raise ConfigError(f"no preset for city {city!r}; build SyntheticCityParams directly")
    prefix, lat, lon, q_mean, q_spread, density = CITY_PRESETS[city]
    return SyntheticCityParams(
        city=city,
        seed=seed,
        n_addresses=n_addresses,
        postcode_prefix=prefix,
        center_lat=lat,
        center_lon=lon,
        quality_mean=q_mean,
        quality_spread=q_spread,
        transport_density=density,
        **overrides,
    )


@dataclass(frozen=True)
class CityCorpus:
    """Everything generate_city produces for one city."""

    params: SyntheticCityParams
    listings: tuple[Listing, ...]
    records: tuple[EpcRecord, ...]
    transport_fixed: tuple[TransportPoint, ...]
    transport_snapshots: tuple[tuple[TransportPoint, ...], ...]
    covered_ids: frozenset[str] = field(default_factory=frozenset)


def _rng_for(params: SyntheticCityParams) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(params.seed))


def _quality_to_band(q: float) -> EfficiencyBand:
    for i, cut in enumerate(_BAND_CUTS):
        if q < cut:
            return EfficiencyBand(i)
    return EfficiencyBand.VERY_GOOD


def _quality_to_rating(q: float) -> str:
    return "ABCDEFG"[min(6, int((1.0 - q) * 7.0))]


def assign_random_area(neighbors: Sequence[EpcRecord], rng: np.random.Generator) -> float:
    """Uniform floor-area draw within the neighbors' observed range."""
    if not neighbors:
        raise NoComparableData("no neighbor floor areas to draw from")
    areas = [r.floor_area for r in neighbors]
    lo, hi = min(areas), max(areas)
    if lo == hi:
        return lo
    return float(rng.uniform(lo, hi))


def _transport_for_city(
    params: SyntheticCityParams, rng: np.random.Generator
) -> tuple[tuple[TransportPoint, ...], tuple[tuple[TransportPoint, ...], ...]]:
    sd = 0.030
    fixed_counts = {"bike_share": 25, "metro_station": 12, "bus_stop": 40}
    mobile_counts = {"e_scooter": 30, "car_share": 15}
    fixed: list[TransportPoint] = []
    for mode in sorted(fixed_counts):
        n = max(1, int(round(fixed_counts[mode] * params.transport_density)))
        for _ in range(n):
            lat = params.center_lat + float(rng.normal(0.0, sd))
            lon = params.center_lon + float(rng.normal(0.0, sd))
            fixed.append(TransportPoint(GeoPoint(lat, lon), mode))
    snapshots: list[tuple[TransportPoint, ...]] = []
    for ts in _SNAPSHOT_TIMES:
        snap: list[TransportPoint] = []
        for mode in sorted(mobile_counts):
            n = max(1, int(round(mobile_counts[mode] * params.transport_density)))
            for _ in range(n):
                lat = params.center_lat + float(rng.normal(0.0, sd))
                lon = params.center_lon + float(rng.normal(0.0, sd))
                snap.append(TransportPoint(GeoPoint(lat, lon), mode, observed_at=ts))
        snapshots.append(tuple(snap))
    return tuple(fixed), tuple(snapshots)


def generate_city(
    params: SyntheticCityParams, table: Optional[BedroomLookupTable] = None
) -> CityCorpus:
    """Deterministically generate one city's listings and certificates.

    Exactly round(n_addresses * epc_coverage_fraction) listings receive a
    direct certificate. Certificate-less listings get their bedroom count
    the way the validation methodology prescribes: a random floor area
    drawn within the range of same-postcode certificated neighbors
    (falling back to the district when the postcode has none), then the
    city lookup table maps area to bedrooms.
    """
    table = ensure_city(table or default_bedroom_table(), params.city)
    rows = table.rows_by_city[params.city]
    rng = _rng_for(params)

    n = params.n_addresses
    n_covered = int(math.floor(n * params.epc_coverage_fraction + 0.5))
    covered_mask = np.zeros(n, dtype=bool)
    if n:
        covered_mask[rng.choice(n, size=n_covered, replace=False)] = True

    # Allocate addresses to postcodes.
    n_postcodes = params.n_districts * params.postcodes_per_district
    postcode_of = rng.integers(0, n_postcodes, size=n)
    postcode_names: list[str] = []
    postcode_centers: list[tuple[float, float]] = []
    district_angle = 2.0 * math.pi / params.n_districts
    for d in range(params.n_districts):
        d_lat = params.center_lat + 0.035 * math.sin(district_angle * d) * (1 + 0.2 * float(rng.normal()))
        d_lon = params.center_lon + 0.035 * math.cos(district_angle * d) * (1 + 0.2 * float(rng.normal()))
        for p in range(params.postcodes_per_district):
            postcode_names.append(f"{params.postcode_prefix}{d + 1} {p + 1}AA")
            postcode_centers.append(
                (d_lat + float(rng.normal(0.0, 0.004)), d_lon + float(rng.normal(0.0, 0.004)))
            )
    postcode_quality = np.clip(
        rng.normal(params.quality_mean, params.quality_spread, size=n_postcodes), 0.05, 0.95
    )

    bedroom_classes = rng.choice(6, size=n, p=_BEDROOM_CLASS_WEIGHTS)
    city_slug = params.city.lower().replace(" ", "-")

    listings: list[Listing] = []
    records: list[EpcRecord] = []
    covered_ids: set[str] = set()
    house_counter: dict[int, int] = {}

    for i in range(n):
        pc = int(postcode_of[i])
        house_counter[pc] = house_counter.get(pc, 0) + 1
        street = _STREET_NAMES[pc % len(_STREET_NAMES)]
        address_key = f"{house_counter[pc]} {street} STREET"
        postcode = postcode_names[pc]
        lat = postcode_centers[pc][0] + float(rng.normal(0.0, 0.0015))
        lon = postcode_centers[pc][1] + float(rng.normal(0.0, 0.0015))

        quality = float(
            np.clip(postcode_quality[pc] + rng.normal(0.0, params.quality_noise), 0.01, 0.99)
        )
        if not covered_mask[i]:
            quality = float(np.clip(quality + params.quality_shift, 0.01, 0.99))
        row = rows[int(bedroom_classes[i])]
        # Stay well inside the row so inference round-trips, and keep the
        # open-ended top row from producing implausibly vast homes.
        area_lo = max(row.area_low, 12.0)
        area_hi = min(row.area_high, area_lo + 130.0)
        area = float(rng.uniform(area_lo, area_hi))
        listing_id = f"{city_slug}-{i:05d}"

        if covered_mask[i]:
            bands: dict[str, EfficiencyBand] = {}
            for attr in BAND_ATTRIBUTES:
                if float(rng.random()) < params.band_missing_prob:
                    continue
                attr_q = float(np.clip(quality + rng.normal(0.0, params.band_noise), 0.0, 1.0))
                bands[attr] = _quality_to_band(attr_q)
            if not bands:
                bands["main_heat"] = _quality_to_band(quality)
            kwh = float(
                np.clip(
                    params.kwh_base - params.kwh_slope * quality + rng.normal(0.0, params.kwh_noise),
                    25.0,
                    620.0,
                )
            )
            lodged = date(2015, 1, 1) + timedelta(days=int(rng.integers(0, 3200)))
            records.append(
                EpcRecord(
                    address_key=address_key,
                    postcode=postcode,
                    floor_area=area,
                    bands=bands,
                    kwh_per_m2=kwh,
                    lodgement_date=lodged,
                    headline_rating=_quality_to_rating(quality),
                )
            )
            covered_ids.add(listing_id)
            bedrooms: Optional[int] = infer_bedrooms(area, params.city, table)
        else:
            bedrooms = None  # resolved below once certificates exist

        listings.append(
            Listing(
                id=listing_id,
                address_key=address_key,
                postcode=postcode,
                latitude=lat,
                longitude=lon,
                city=params.city,
                bedrooms=bedrooms,
            )
        )

    # Second pass: certificate-less listings draw a floor area from their
    # certificated neighbors and infer bedrooms from it.
    by_postcode: dict[str, list[EpcRecord]] = {}
    by_district: dict[str, list[EpcRecord]] = {}
    for record in records:
        by_postcode.setdefault(record.postcode, []).append(record)
        by_district.setdefault(record.postcode.split(" ")[0], []).append(record)
    resolved: list[Listing] = []
    for listing in listings:
        if listing.id in covered_ids or listing.bedrooms is not None:
            resolved.append(listing)
            continue
        neighbors = by_postcode.get(listing.postcode) or by_district.get(
            listing.postcode.split(" ")[0]
        )
        if not neighbors:
            resolved.append(listing)
            continue
        area = assign_random_area(neighbors, rng)
        try:
            beds = infer_bedrooms(area, params.city, table)
        except OutOfRange:
            resolved.append(listing)
            continue
        resolved.append(replace(listing, bedrooms=beds))

    fixed, snapshots = _transport_for_city(params, rng)
    return CityCorpus(
        params=params,
        listings=tuple(resolved),
        records=tuple(records),
        transport_fixed=fixed,
        transport_snapshots=snapshots,
        covered_ids=frozenset(covered_ids),
    )


def write_corpus_store(corpus: CityCorpus, data_dir) -> None:
    """Dump a corpus as a store directory the CLI can ingest and score."""
    import json
    from pathlib import Path

    from .geo import write_transport_jsonl
    from .ingest import write_records_jsonl

    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    with open(data_dir / "listings.jsonl", "w", encoding="utf-8") as fh:
        for listing in corpus.listings:
            fh.write(json.dumps(listing.to_dict(), sort_keys=True) + "\n")
    write_records_jsonl(corpus.records, data_dir / "epc_records.jsonl")
    write_transport_jsonl(corpus.transport_fixed, data_dir / "transport_fixed.jsonl")
    for snapshot in corpus.transport_snapshots:
        stamp = snapshot[0].observed_at.strftime("%Y%m%dT%H%M")
        write_transport_jsonl(snapshot, data_dir / f"transport_mobile_{stamp}.jsonl")
