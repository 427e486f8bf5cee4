"""Effect-size comparison of listing CO2 against city baselines.

Cohen's d uses the pooled (n-1) standard deviation; the bounded
d-percentage transform 100*d/sqrt(d^2+4) feeds the "% higher/lower
emissions" labels on the supplier dashboard. Missing or degenerate data
surfaces as a "Coming Soon" status rather than an error.
"""

from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import DegenerateVariance, InsufficientSamples
from .model import CityBaseline, EcoGradeReport


@dataclass(frozen=True)
class SampleStats:
    """Mean, sample (n-1) standard deviation, and count of one group."""

    mu: float
    sigma: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")

    @property
    def sigma_defined(self) -> bool:
        # A single observation has no spread; sigma is stored as 0 there.
        return self.n >= 2

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "SampleStats":
        n = len(values)
        if n == 0:
            raise ValueError("need at least one value")
        mu = sum(values) / n
        sigma = statistics.stdev(values) if n >= 2 else 0.0
        return cls(mu=mu, sigma=sigma, n=n)


def cohens_d(a: SampleStats, c: SampleStats) -> float:
    """Standardized mean difference of group a against group c."""
    if a.n + c.n < 3:
        raise InsufficientSamples("need a_n + c_n >= 3")
    pooled_var = ((a.n - 1) * a.sigma**2 + (c.n - 1) * c.sigma**2) / (a.n + c.n - 2)
    if pooled_var <= 0.0:
        raise DegenerateVariance("pooled variance is zero")
    return (a.mu - c.mu) / math.sqrt(pooled_var)


def cohens_d_percent(d: float) -> float:
    """Bounded (-100, 100) percentage form of d."""
    if not math.isfinite(d):
        raise ValueError("d must be finite")
    return 100.0 * d / math.sqrt(d * d + 4.0)


def round_half_away(value: float, decimals: int = 1) -> float:
    """Display rounding: halves move away from zero (-34.55 -> -34.6)."""
    scale = 10.0**decimals
    return math.copysign(math.floor(abs(value) * scale + 0.5) / scale, value)


def bed_type_phrase(bed_type: int) -> str:
    return "studio" if bed_type == 0 else f"{bed_type}-bed"


@dataclass(frozen=True)
class ComparisonLabel:
    """Displayable emissions comparison for one listing."""

    d_p: float
    direction: str  # "higher" | "lower"
    reference: str  # e.g. "typical 1-bed apartment in London"

    @property
    def text(self) -> str:
        return (
            f"{round_half_away(self.d_p):.1f}% {self.direction.capitalize()} emissions "
            f"compared to a {self.reference}"
        )


@dataclass(frozen=True)
class ComparisonResult:
    status: str  # "ok" | "coming_soon"
    label: Optional[ComparisonLabel] = None


COMING_SOON = ComparisonResult(status="coming_soon")


def report_co2_stats(report: EcoGradeReport) -> Optional[SampleStats]:
    """Apartment-side sample behind a report's CO2 average, if any."""
    if report.co2_avg is None:
        return None
    n = 1
    if report.provenance and report.provenance.kind == "interpolated":
        n = report.provenance.n_neighbors
    return SampleStats(mu=report.co2_avg, sigma=report.co2_sigma or 0.0, n=n)


def emissions_comparison(
    listing_stats: Optional[SampleStats], baseline: Optional[CityBaseline]
) -> ComparisonResult:
    """Label comparing a listing's CO2 sample to its city/bed-type baseline.

    Anything that prevents a well-defined effect size (no data, too few
    samples, zero pooled variance) yields the "Coming Soon" placeholder.
    """
    if listing_stats is None or baseline is None:
        return COMING_SOON
    city_stats = SampleStats(mu=baseline.c_mu, sigma=baseline.c_sigma, n=baseline.c_n)
    try:
        d = cohens_d(listing_stats, city_stats)
    except (DegenerateVariance, InsufficientSamples):
        return COMING_SOON
    d_p = cohens_d_percent(d)
    return ComparisonResult(
        status="ok",
        label=ComparisonLabel(
            d_p=d_p,
            direction="higher" if d_p > 0 else "lower",
            reference=f"typical {bed_type_phrase(baseline.bed_type)} apartment in {baseline.city}",
        ),
    )


def build_baselines(
    groups: Iterable[tuple[str, int, float]]
) -> tuple[list[CityBaseline], list[str]]:
    """Fold (city, bed_type, co2_avg) triples into per-group baselines.

    Groups with fewer than two reports are omitted, each with a diagnostic.
    """
    by_group: dict[tuple[str, int], list[float]] = {}
    for city, bed_type, co2 in groups:
        by_group.setdefault((city, bed_type), []).append(co2)
    baselines: list[CityBaseline] = []
    diagnostics: list[str] = []
    for (city, bed_type), values in sorted(by_group.items()):
        if len(values) < 2:
            diagnostics.append(
                f"group ({city}, {bed_type}) has {len(values)} report(s); baseline omitted"
            )
            continue
        stats = SampleStats.from_values(values)
        baselines.append(
            CityBaseline(city=city, bed_type=bed_type, c_mu=stats.mu, c_sigma=stats.sigma, c_n=stats.n)
        )
    return baselines, diagnostics


def baselines_from_scored(scored) -> tuple[list[CityBaseline], list[str]]:
    """Baselines from scored listings (skips ones without CO2 or bedrooms)."""
    triples = [
        (s.listing.city, s.bedrooms, s.report.co2_avg)
        for s in scored
        if s.report.co2_avg is not None and s.bedrooms is not None
    ]
    return build_baselines(triples)


def write_baselines_csv(baselines: Sequence[CityBaseline], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["city", "bed_type", "mu", "sigma", "n"])
        for b in baselines:
            writer.writerow([b.city, b.bed_type, repr(b.c_mu), repr(b.c_sigma), b.c_n])


def read_baselines_csv(path) -> list[CityBaseline]:
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                CityBaseline(
                    city=row["city"],
                    bed_type=int(row["bed_type"]),
                    c_mu=float(row["mu"]),
                    c_sigma=float(row["sigma"]),
                    c_n=int(row["n"]),
                )
            )
    return out
