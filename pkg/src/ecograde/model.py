"""Shared domain types: certificates, listings, reports, and the band scale.

Everything here is an immutable value object safe to share between threads.
Serialization is plain UTF-8 JSON with ISO-8601 dates; the committed schema
files under docs/schemas/ describe the wire form of each type.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from datetime import date
from typing import Mapping, Optional


class EfficiencyBand(enum.IntEnum):
    """Five-point certificate band, ordered worst (0) to best (4)."""

    VERY_POOR = 0
    POOR = 1
    AVERAGE = 2
    GOOD = 3
    VERY_GOOD = 4

    @classmethod
    def parse(cls, label: str) -> "EfficiencyBand":
        key = label.strip().lower().replace("-", " ").replace("_", " ")
        key = " ".join(key.split())
        try:
            return _BAND_LABELS[key]
        except KeyError:
            raise ValueError(f"unrecognized efficiency band label: {label!r}") from None

    @property
    def label(self) -> str:
        return self.name.lower().replace("_", " ")


_BAND_LABELS = {
    "very poor": EfficiencyBand.VERY_POOR,
    "poor": EfficiencyBand.POOR,
    "average": EfficiencyBand.AVERAGE,
    "good": EfficiencyBand.GOOD,
    "very good": EfficiencyBand.VERY_GOOD,
}

# The nine certificate attributes we read, in canonical order.
BAND_ATTRIBUTES = (
    "hot_water",
    "floor",
    "windows",
    "walls",
    "secondary_heating",
    "roof",
    "main_heat",
    "main_heat_control",
    "lighting",
)

# Headline rating letters, best first. Used only by cleaning cross-checks.
RATING_LETTERS = "ABCDEFG"

FACTOR_NAMES = ("consumption", "efficiency", "supplier", "transport")


def band_to_score(band: EfficiencyBand) -> float:
    """Map a band to its numeric value on the 0..1 quarter scale."""
    return band.value / 4.0


_PUNCT_RE = re.compile(r"[^\w\s]", re.UNICODE)


def normalize_address(raw: str) -> str:
    """Canonical address key: uppercase, punctuation stripped, spaces collapsed."""
    cleaned = _PUNCT_RE.sub(" ", raw.upper())
    return " ".join(cleaned.split())


def normalize_postcode(raw: str) -> str:
    """Uppercase a postcode and force a single space before the 3-char inward part."""
    compact = "".join(raw.upper().split())
    if len(compact) > 3:
        return compact[:-3] + " " + compact[-3:]
    return compact


def outward_code(postcode: str) -> str:
    """District part of a postcode (the part before the space)."""
    return normalize_postcode(postcode).split(" ")[0]


@dataclass(frozen=True)
class EpcRecord:
    """One cleaned certificate for a dwelling.

    ``headline_rating`` is retained only so cleaning can cross-check it
    against the kWh prediction; it never feeds a score.
    """

    address_key: str
    postcode: str
    floor_area: float
    bands: Mapping[str, EfficiencyBand]
    kwh_per_m2: float
    lodgement_date: date
    headline_rating: str

    def __post_init__(self):
        if not self.floor_area > 0:
            raise ValueError("floor_area must be positive")
        if self.kwh_per_m2 < 0:
            raise ValueError("kwh_per_m2 must be nonnegative")
        if self.headline_rating not in RATING_LETTERS:
            raise ValueError(f"headline_rating must be one of {RATING_LETTERS}")
        unknown = set(self.bands) - set(BAND_ATTRIBUTES)
        if unknown:
            raise ValueError(f"unknown band attributes: {sorted(unknown)}")

    @property
    def identity(self) -> tuple[str, str]:
        return (self.address_key, normalize_postcode(self.postcode))

    def to_dict(self) -> dict:
        return {
            "address_key": self.address_key,
            "postcode": self.postcode,
            "floor_area": self.floor_area,
            "bands": {k: self.bands[k].label for k in BAND_ATTRIBUTES if k in self.bands},
            "kwh_per_m2": self.kwh_per_m2,
            "lodgement_date": self.lodgement_date.isoformat(),
            "headline_rating": self.headline_rating,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EpcRecord":
        return cls(
            address_key=d["address_key"],
            postcode=d["postcode"],
            floor_area=float(d["floor_area"]),
            bands={k: EfficiencyBand.parse(v) for k, v in d["bands"].items()},
            kwh_per_m2=float(d["kwh_per_m2"]),
            lodgement_date=date.fromisoformat(d["lodgement_date"]),
            headline_rating=d["headline_rating"],
        )


@dataclass(frozen=True)
class Tariff:
    """Energy supply details for a listing, when the supplier shares them."""

    renewable_fraction: float
    gas_main_heat: bool = False

    def __post_init__(self):
        if not 0.0 <= self.renewable_fraction <= 1.0:
            raise ValueError("renewable_fraction must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "renewable_fraction": self.renewable_fraction,
            "gas_main_heat": self.gas_main_heat,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tariff":
        return cls(
            renewable_fraction=float(d["renewable_fraction"]),
            gas_main_heat=bool(d.get("gas_main_heat", False)),
        )


@dataclass(frozen=True)
class Listing:
    """A rentable property as it arrives from the marketplace feed."""

    id: str
    address_key: str
    postcode: str
    latitude: float
    longitude: float
    city: str
    bedrooms: Optional[int] = None
    tariff: Optional[Tariff] = None
    meter_kwh_per_m2: Optional[float] = None

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError("latitude out of range")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError("longitude out of range")
        if self.bedrooms is not None and self.bedrooms < 0:
            raise ValueError("bedrooms must be >= 0")
        if self.meter_kwh_per_m2 is not None and self.meter_kwh_per_m2 < 0:
            raise ValueError("meter_kwh_per_m2 must be nonnegative")

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "address_key": self.address_key,
            "postcode": self.postcode,
            "latitude": self.latitude,
            "longitude": self.longitude,
            "city": self.city,
            "bedrooms": self.bedrooms,
            "tariff": self.tariff.to_dict() if self.tariff else None,
            "meter_kwh_per_m2": self.meter_kwh_per_m2,
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Listing":
        return cls(
            id=d["id"],
            address_key=d["address_key"],
            postcode=d["postcode"],
            latitude=float(d["latitude"]),
            longitude=float(d["longitude"]),
            city=d["city"],
            bedrooms=None if d.get("bedrooms") is None else int(d["bedrooms"]),
            tariff=Tariff.from_dict(d["tariff"]) if d.get("tariff") else None,
            meter_kwh_per_m2=(
                None if d.get("meter_kwh_per_m2") is None else float(d["meter_kwh_per_m2"])
            ),
        )


PROVENANCE_KINDS = ("direct", "interpolated", "meter")


@dataclass(frozen=True)
class Provenance:
    """Where a report's consumption and CO2 inputs came from."""

    kind: str
    n_neighbors: Optional[int] = None

    def __post_init__(self):
        if self.kind not in PROVENANCE_KINDS:
            raise ValueError(f"kind must be one of {PROVENANCE_KINDS}")
        if self.kind == "interpolated":
            if self.n_neighbors is None or self.n_neighbors < 1:
                raise ValueError("interpolated provenance needs n_neighbors >= 1")
        elif self.n_neighbors is not None:
            raise ValueError("n_neighbors only applies to interpolated provenance")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "n_neighbors": self.n_neighbors}

    @classmethod
    def from_dict(cls, d: dict) -> "Provenance":
        return cls(kind=d["kind"], n_neighbors=d.get("n_neighbors"))


def leaves_from_overall(overall: float, rounding: str = "half_up") -> int:
    """Integer leaf count shown in search results.

    ``half_up`` rounds .5 upward (2.5 -> 3); ``truncate`` drops the fraction.
    """
    if not 0.0 <= overall <= 5.0:
        raise ValueError("overall must lie in [0, 5]")
    if rounding == "half_up":
        return min(5, int(math.floor(overall + 0.5)))
    if rounding == "truncate":
        return int(math.floor(overall))
    raise ValueError(f"unknown rounding mode: {rounding!r}")


@dataclass(frozen=True)
class EcoGradeReport:
    """Scored output for one listing.

    ``overall`` is the arithmetic mean of the factor scores present in
    ``factor_scores``; ``missing_factors`` names the absent ones.  CO2
    fields are None when no energy-use source exists for the listing;
    when present they satisfy co2_low <= co2_avg <= co2_high, collapsing
    to a single value for direct and meter provenance.  ``co2_sigma`` is
    the sample standard deviation of the neighbor CO2 values behind
    co2_avg (0.0 for direct/meter), kept so downstream effect-size
    comparisons can treat the report as a sample.
    """

    listing_id: str
    factor_scores: Mapping[str, float]
    overall: float
    leaves: int
    provenance: Optional[Provenance] = None
    co2_avg: Optional[float] = None
    co2_low: Optional[float] = None
    co2_high: Optional[float] = None
    co2_sigma: Optional[float] = None
    missing_factors: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.factor_scores:
            raise ValueError("a report needs at least one factor score")
        for name, value in self.factor_scores.items():
            if name not in FACTOR_NAMES:
                raise ValueError(f"unknown factor {name!r}")
            if not 0.0 <= value <= 5.0:
                raise ValueError(f"factor {name} out of [0, 5]: {value}")
        mean = sum(self.factor_scores.values()) / len(self.factor_scores)
        if abs(self.overall - mean) > 1e-9:
            raise ValueError("overall must equal the mean of present factors")
        co2 = (self.co2_avg, self.co2_low, self.co2_high)
        if any(v is not None for v in co2) and any(v is None for v in co2):
            raise ValueError("co2_avg/low/high must be present together")
        if self.co2_avg is not None:
            if not self.co2_low <= self.co2_avg <= self.co2_high:
                raise ValueError("co2 range must satisfy low <= avg <= high")
            if self.provenance and self.provenance.kind in ("direct", "meter"):
                if self.co2_low != self.co2_high:
                    raise ValueError("direct/meter provenance implies a degenerate range")

    def to_dict(self) -> dict:
        return {
            "listing_id": self.listing_id,
            "factor_scores": dict(self.factor_scores),
            "overall": self.overall,
            "leaves": self.leaves,
            "provenance": self.provenance.to_dict() if self.provenance else None,
            "co2_avg": self.co2_avg,
            "co2_low": self.co2_low,
            "co2_high": self.co2_high,
            "co2_sigma": self.co2_sigma,
            "missing_factors": list(self.missing_factors),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EcoGradeReport":
        return cls(
            listing_id=d["listing_id"],
            factor_scores={k: float(v) for k, v in d["factor_scores"].items()},
            overall=float(d["overall"]),
            leaves=int(d["leaves"]),
            provenance=Provenance.from_dict(d["provenance"]) if d.get("provenance") else None,
            co2_avg=None if d.get("co2_avg") is None else float(d["co2_avg"]),
            co2_low=None if d.get("co2_low") is None else float(d["co2_low"]),
            co2_high=None if d.get("co2_high") is None else float(d["co2_high"]),
            co2_sigma=None if d.get("co2_sigma") is None else float(d["co2_sigma"]),
            missing_factors=tuple(d.get("missing_factors", ())),
        )


@dataclass(frozen=True)
class CityBaseline:
    """CO2 mean/sd/count for one (city, bed type) group."""

    city: str
    bed_type: int
    c_mu: float
    c_sigma: float
    c_n: int

    def __post_init__(self):
        if self.c_n < 2:
            raise ValueError("a baseline needs at least two samples")
        if self.c_sigma < 0:
            raise ValueError("c_sigma must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "city": self.city,
            "bed_type": self.bed_type,
            "c_mu": self.c_mu,
            "c_sigma": self.c_sigma,
            "c_n": self.c_n,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CityBaseline":
        return cls(
            city=d["city"],
            bed_type=int(d["bed_type"]),
            c_mu=float(d["c_mu"]),
            c_sigma=float(d["c_sigma"]),
            c_n=int(d["c_n"]),
        )
