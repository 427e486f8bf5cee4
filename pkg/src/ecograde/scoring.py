"""Factor scores, the 0-5 overall grade, and CO2 estimates.

Each factor is first normalized to [0, 1], then stretched onto the 0-5
leaf scale by a concave log curve 5*ln(1+beta*x)/ln(1+beta) whose beta
is calibration (default 9, fit helper provided). The overall grade is
the plain mean of whichever factors are available.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .errors import ConfigError, FactorUnavailable, NoScore, NoTransportData
from .geo import GeoPoint, TransportPoint, access_summary
from .ingest import BedroomLookupTable, infer_bedrooms
from .interpolate import (
    DEFAULT_MIN_SIMILAR,
    EpcIndex,
    find_direct,
    find_neighbors,
    interpolate,
)
from .model import (
    BAND_ATTRIBUTES,
    FACTOR_NAMES,
    EcoGradeReport,
    EpcRecord,
    Listing,
    Provenance,
    Tariff,
    band_to_score,
    leaves_from_overall,
)
from .errors import NoComparableData, OutOfRange, UnknownCity


def _default_betas() -> dict[str, float]:
    return {name: 9.0 for name in FACTOR_NAMES}


@dataclass(frozen=True)
class ScoreCalibration:
    """Normalization bounds and leaf-curve shape. All values are configuration."""

    kwh_floor: float = 0.0
    kwh_cap: float = 500.0
    walk_cap_hours: float = 1.0
    leaf_curve_beta: dict[str, float] = field(default_factory=_default_betas)
    leaf_rounding: str = "half_up"

    def __post_init__(self):
        if not self.kwh_floor < self.kwh_cap:
            raise ConfigError("kwh_floor must be below kwh_cap")
        if not self.walk_cap_hours > 0:
            raise ConfigError("walk_cap_hours must be positive")
        for name in FACTOR_NAMES:
            beta = self.leaf_curve_beta.get(name)
            if beta is None or beta <= 0:
                raise ConfigError(f"leaf_curve_beta[{name!r}] must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "ScoreCalibration":
        betas = _default_betas()
        raw = d.get("leaf_curve_beta", {})
        if isinstance(raw, (int, float)):
            betas = {name: float(raw) for name in FACTOR_NAMES}
        else:
            betas.update({k: float(v) for k, v in raw.items()})
        return cls(
            kwh_floor=float(d.get("kwh_floor", 0.0)),
            kwh_cap=float(d.get("kwh_cap", 500.0)),
            walk_cap_hours=float(d.get("walk_cap_hours", 1.0)),
            leaf_curve_beta=betas,
            leaf_rounding=d.get("leaf_rounding", "half_up"),
        )

    def to_dict(self) -> dict:
        return {
            "kwh_floor": self.kwh_floor,
            "kwh_cap": self.kwh_cap,
            "walk_cap_hours": self.walk_cap_hours,
            "leaf_curve_beta": dict(self.leaf_curve_beta),
            "leaf_rounding": self.leaf_rounding,
        }


@dataclass(frozen=True)
class ConversionFactors:
    """Published kg CO2e per kWh by fuel, for one reporting year."""

    kg_per_kwh: Mapping[str, float] = field(
        default_factory=lambda: {"electricity": 0.207, "gas": 0.183}
    )
    year: int = 2023

    def __post_init__(self):
        for fuel, factor in self.kg_per_kwh.items():
            if factor <= 0:
                raise ConfigError(f"conversion factor for {fuel} must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "ConversionFactors":
        return cls(
            kg_per_kwh={k: float(v) for k, v in d["kg_per_kwh"].items()},
            year=int(d.get("year", 2023)),
        )

    def to_dict(self) -> dict:
        return {"kg_per_kwh": dict(self.kg_per_kwh), "year": self.year}


def clamp01(x: float) -> float:
    return max(0.0, min(1.0, x))


def consumption_factor(kwh_per_m2: float, calib: ScoreCalibration = ScoreCalibration()) -> float:
    """Normalized, inverted energy use: 1 at the floor, 0 at or above the cap."""
    if kwh_per_m2 < 0:
        raise ValueError("kwh_per_m2 must be nonnegative")
    span = calib.kwh_cap - calib.kwh_floor
    return 1.0 - clamp01((kwh_per_m2 - calib.kwh_floor) / span)


def efficiency_factor(feature_scores: Mapping[str, float]) -> float:
    """Mean of the per-attribute band scores that are present."""
    values = [feature_scores[a] for a in BAND_ATTRIBUTES if a in feature_scores]
    if not values:
        raise FactorUnavailable("no efficiency attributes present")
    if min(values) == max(values):
        return values[0]
    return sum(values) / len(values)


def supplier_factor(tariff: Optional[Tariff]) -> float:
    """Renewable share of the tariff, halved when heating burns mains gas."""
    if tariff is None:
        raise FactorUnavailable("no tariff data")
    score = tariff.renewable_fraction
    if tariff.gas_main_heat:
        score *= 0.5
    return score


def transport_factor(mean_time_hours: float, calib: ScoreCalibration = ScoreCalibration()) -> float:
    """Linear decay from 1 at the doorstep to 0 at the walking-time cap."""
    if mean_time_hours < 0:
        raise ValueError("mean_time_hours must be nonnegative")
    return max(0.0, 1.0 - mean_time_hours / calib.walk_cap_hours)


def to_leaf_scale(x: float, beta: float) -> float:
    """Map x in [0,1] onto [0,5] by the concave curve 5*ln(1+beta*x)/ln(1+beta).

    Strictly increasing with exact endpoints for every beta > 0; beta -> 0
    degenerates to the linear 5x, which is what beta == 0 returns.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if beta == 0.0:
        return 5.0 * x
    if x == 1.0:
        return 5.0
    return 5.0 * math.log1p(beta * x) / math.log1p(beta)


def fit_leaf_beta(values: Sequence[float], floor: float = 1e-9, cap: float = 1e6) -> float:
    """Choose beta so the corpus median lands on 2.5 leaves.

    Solving 5*ln(1+b*m)/ln(1+b) = 2.5 gives b = (1-2m)/m^2. Medians at or
    above 0.5 already reach 2.5 under the linear limit, so the result is
    clamped to a near-zero floor rather than going convex.
    """
    if not values:
        raise ValueError("fit_leaf_beta needs at least one value")
    m = statistics.median(values)
    if not 0.0 <= m <= 1.0:
        raise ValueError("values must lie in [0, 1]")
    if m == 0.0:
        return cap
    return min(cap, max(floor, (1.0 - 2.0 * m) / (m * m)))


def ecograde(factor_scores: Mapping[str, float]) -> float:
    """Overall grade: arithmetic mean of the available factor subscores."""
    if not factor_scores:
        raise NoScore("no factors available")
    values = list(factor_scores.values())
    return sum(values) / len(values)


def default_fuel_mix(gas_main_heat: bool = False, gas_split: float = 0.5) -> dict[str, float]:
    if gas_main_heat:
        return {"electricity": 1.0 - gas_split, "gas": gas_split}
    return {"electricity": 1.0}


def co2_estimate(
    kwh_mean: float,
    kwh_min: float,
    kwh_max: float,
    floor_area: float,
    factors: ConversionFactors,
    fuel_mix: Mapping[str, float],
) -> tuple[float, float, float]:
    """(avg, low, high) tonnes CO2 per annum for the given kWh/m2 range."""
    if not floor_area > 0:
        raise ValueError("floor_area must be positive")
    if not kwh_min <= kwh_mean <= kwh_max:
        raise ValueError("kwh range must satisfy min <= mean <= max")
    if abs(sum(fuel_mix.values()) - 1.0) > 1e-9:
        raise ConfigError("fuel mix shares must sum to 1")
    effective = 0.0
    for fuel, share in fuel_mix.items():
        if fuel not in factors.kg_per_kwh:
            raise ConfigError(f"no conversion factor for fuel {fuel!r}")
        effective += share * factors.kg_per_kwh[fuel]

    def tonnes(kwh: float) -> float:
        return kwh * floor_area * effective / 1000.0

    return tonnes(kwh_mean), tonnes(kwh_min), tonnes(kwh_max)


@dataclass(frozen=True)
class ScoringContext:
    """Everything the batch scorer needs besides the listing itself."""

    index: EpcIndex
    table: BedroomLookupTable
    calibration: ScoreCalibration = ScoreCalibration()
    conversion: ConversionFactors = ConversionFactors()
    transport_fixed: Sequence[TransportPoint] = ()
    transport_snapshots: Sequence[Sequence[TransportPoint]] = ()
    min_similar: int = DEFAULT_MIN_SIMILAR


@dataclass(frozen=True)
class ScoredListing:
    listing: Listing
    report: EcoGradeReport
    bedrooms: Optional[int]


def resolve_bedrooms(
    listing: Listing, direct: Optional[EpcRecord], table: BedroomLookupTable
) -> Optional[int]:
    """Listing bedrooms, falling back to the direct certificate's floor area."""
    if listing.bedrooms is not None:
        return listing.bedrooms
    if direct is not None:
        try:
            return infer_bedrooms(direct.floor_area, listing.city, table)
        except (UnknownCity, OutOfRange):
            return None
    return None


def score_listing(
    listing: Listing, ctx: ScoringContext
) -> tuple[Optional[ScoredListing], Optional[str]]:
    """Score one listing; (None, reason) when nothing at all is scoreable."""
    calib = ctx.calibration
    direct = find_direct(listing, ctx.index)
    bedrooms = resolve_bedrooms(listing, direct, ctx.table)

    neighbors: list[EpcRecord] = []
    interp = None
    if direct is None and bedrooms is not None:
        try:
            neighbors, widened = find_neighbors(listing, ctx.index, ctx.table, ctx.min_similar)
            interp = interpolate(neighbors, widened)
        except NoComparableData:
            pass

    raw: dict[str, float] = {}
    missing: list[str] = []

    # Consumption: smart meter beats certificate predictions.
    if listing.meter_kwh_per_m2 is not None:
        raw["consumption"] = consumption_factor(listing.meter_kwh_per_m2, calib)
    elif direct is not None:
        raw["consumption"] = consumption_factor(direct.kwh_per_m2, calib)
    elif interp is not None:
        raw["consumption"] = consumption_factor(interp.kwh_mean, calib)
    else:
        missing.append("consumption")

    try:
        if direct is not None:
            raw["efficiency"] = efficiency_factor(
                {a: band_to_score(b) for a, b in direct.bands.items()}
            )
        elif interp is not None:
            raw["efficiency"] = efficiency_factor(interp.feature_means)
        else:
            raise FactorUnavailable("no certificate data")
    except FactorUnavailable:
        missing.append("efficiency")

    try:
        raw["supplier"] = supplier_factor(listing.tariff)
    except FactorUnavailable:
        missing.append("supplier")

    try:
        summary = access_summary(
            GeoPoint(listing.latitude, listing.longitude),
            ctx.transport_fixed,
            ctx.transport_snapshots,
        )
        raw["transport"] = transport_factor(summary.mean_time_hours, calib)
    except NoTransportData:
        missing.append("transport")

    if not raw:
        return None, "no scoreable data"

    factor_scores = {
        name: to_leaf_scale(clamp01(x), calib.leaf_curve_beta[name]) for name, x in raw.items()
    }
    overall = ecograde(factor_scores)

    # CO2 side output: needs an energy-use source and a floor area.
    provenance: Optional[Provenance] = None
    co2 = {"avg": None, "low": None, "high": None, "sigma": None}
    area = None
    if direct is not None:
        area = direct.floor_area
    elif neighbors:
        area = sum(r.floor_area for r in neighbors) / len(neighbors)

    fuel_mix = default_fuel_mix(bool(listing.tariff and listing.tariff.gas_main_heat))
    if listing.meter_kwh_per_m2 is not None:
        provenance = Provenance("meter")
        if area is not None:
            m = listing.meter_kwh_per_m2
            avg, low, high = co2_estimate(m, m, m, area, ctx.conversion, fuel_mix)
            co2 = {"avg": avg, "low": low, "high": high, "sigma": 0.0}
    elif direct is not None:
        provenance = Provenance("direct")
        k = direct.kwh_per_m2
        avg, low, high = co2_estimate(k, k, k, area, ctx.conversion, fuel_mix)
        co2 = {"avg": avg, "low": low, "high": high, "sigma": 0.0}
    elif interp is not None:
        provenance = Provenance("interpolated", n_neighbors=interp.n_neighbors)
        avg, low, high = co2_estimate(
            interp.kwh_mean, interp.kwh_min, interp.kwh_max, area, ctx.conversion, fuel_mix
        )
        # Spread of the neighbors' own energy use at the interpolated area,
        # kept as the apartment-side sigma for effect-size comparisons.
        sigma = 0.0
        if len(neighbors) >= 2:
            kwh_sd = statistics.stdev(r.kwh_per_m2 for r in neighbors)
            sigma = kwh_sd * (avg / interp.kwh_mean if interp.kwh_mean > 0 else 0.0)
        co2 = {"avg": avg, "low": low, "high": high, "sigma": sigma}

    report = EcoGradeReport(
        listing_id=listing.id,
        factor_scores=factor_scores,
        overall=overall,
        leaves=leaves_from_overall(overall, calib.leaf_rounding),
        provenance=provenance,
        co2_avg=co2["avg"],
        co2_low=co2["low"],
        co2_high=co2["high"],
        co2_sigma=co2["sigma"],
        missing_factors=tuple(missing),
    )
    return ScoredListing(listing, report, bedrooms), None


def score_all(
    listings: Sequence[Listing], ctx: ScoringContext
) -> tuple[list[ScoredListing], list[tuple[str, str]]]:
    """Score every listing; diagnostics carry the ids that yielded nothing."""
    scored: list[ScoredListing] = []
    diagnostics: list[tuple[str, str]] = []
    for listing in listings:
        result, reason = score_listing(listing, ctx)
        if result is None:
            diagnostics.append((listing.id, reason or "unscoreable"))
        else:
            scored.append(result)
    return scored, diagnostics
