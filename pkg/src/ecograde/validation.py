"""Desk-scale validation: are interpolated scores equivalent to direct ones?

Generates synthetic cities, scores every listing through the production
pipeline, then runs a Welch-based two one-sided test (TOST) on the mean
overall score of the interpolated group against the directly-matched
group. Distribution data (histograms and raw score vectors for raincloud
rendering) is exported per city and per bed type.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import InsufficientData
from .ingest import default_bedroom_table, ensure_city
from .interpolate import EpcIndex
from .scoring import ScoredListing, ScoringContext, score_all
from .synthcity import CITY_PRESETS, generate_city, params_for_city
from .tdist import student_t_cdf, student_t_ppf, student_t_sf

HISTOGRAM_BIN_WIDTH = 0.25
HISTOGRAM_BINS = 20  # covers [0, 5]


@dataclass(frozen=True)
class TostResult:
    """Equivalence decision for two score samples."""

    p_lower: float
    p_upper: float
    equivalent: bool
    margin: float = 0.1
    alpha: float = 0.05
    ci_g1: tuple[float, float] = (0.0, 0.0)
    ci_g2: tuple[float, float] = (0.0, 0.0)

    def to_dict(self) -> dict:
        return {
            "p_lower": self.p_lower,
            "p_upper": self.p_upper,
            "equivalent": self.equivalent,
            "margin": self.margin,
            "alpha": self.alpha,
            "ci_g1": list(self.ci_g1),
            "ci_g2": list(self.ci_g2),
        }


def _sample_moments(sample: Sequence[float]) -> tuple[int, float, float]:
    n = len(sample)
    if n < 2:
        raise InsufficientData("each group needs at least two observations")
    mean = float(np.mean(sample))
    var = float(np.var(sample, ddof=1))
    if var <= 0.0:
        raise InsufficientData("each group needs positive variance")
    return n, mean, var


def mean_confidence_interval(sample: Sequence[float], confidence: float = 0.95) -> tuple[float, float]:
    """Two-sided t confidence interval for the sample mean."""
    n, mean, var = _sample_moments(sample)
    half = student_t_ppf(0.5 + confidence / 2.0, n - 1) * math.sqrt(var / n)
    return (mean - half, mean + half)


def tost_equivalence(
    g1: Sequence[float],
    g2: Sequence[float],
    margin: float = 0.1,
    alpha: float = 0.05,
) -> TostResult:
    """Welch TOST of mean equivalence within +/- margin.

    Both one-sided hypotheses (difference <= -margin, difference >= +margin)
    must be rejected at alpha for equivalence. Unequal variances are
    assumed; degrees of freedom follow Welch-Satterthwaite.
    """
    if margin <= 0:
        raise ValueError("margin must be positive")
    n1, m1, v1 = _sample_moments(g1)
    n2, m2, v2 = _sample_moments(g2)
    se = math.sqrt(v1 / n1 + v2 / n2)
    df = (v1 / n1 + v2 / n2) ** 2 / ((v1 / n1) ** 2 / (n1 - 1) + (v2 / n2) ** 2 / (n2 - 1))
    diff = m1 - m2
    p_lower = student_t_sf((diff + margin) / se, df)
    p_upper = student_t_cdf((diff - margin) / se, df)
    return TostResult(
        p_lower=p_lower,
        p_upper=p_upper,
        equivalent=max(p_lower, p_upper) < alpha,
        margin=margin,
        alpha=alpha,
        ci_g1=mean_confidence_interval(g1),
        ci_g2=mean_confidence_interval(g2),
    )


@dataclass(frozen=True)
class DistributionGroup:
    """Binned counts plus the raw (deterministically ordered) score vector."""

    key: str
    bin_counts: tuple[int, ...]
    scores: tuple[float, ...]


def export_distributions(
    scored: Sequence[ScoredListing],
    group_by: str = "city",
    out_dir: Optional[Path] = None,
) -> dict[str, DistributionGroup]:
    """Histogram (0.25-wide bins over [0, 5]) and raw scores per group.

    ``group_by`` is "city" or "bed_type"; listings without a resolved
    bedroom count are skipped for bed_type grouping. When ``out_dir`` is
    given, one histogram CSV and one raincloud CSV are written per group.
    """
    if group_by not in ("city", "bed_type"):
        raise ValueError("group_by must be 'city' or 'bed_type'")
    grouped: dict[str, list[tuple[str, float]]] = {}
    for s in sorted(scored, key=lambda s: s.listing.id):
        if group_by == "city":
            key = s.listing.city
        else:
            if s.bedrooms is None:
                continue
            key = str(s.bedrooms)
        grouped.setdefault(key, []).append((s.listing.id, s.report.overall))

    result: dict[str, DistributionGroup] = {}
    for key in sorted(grouped):
        scores = tuple(score for _, score in grouped[key])
        counts = [0] * HISTOGRAM_BINS
        for score in scores:
            counts[min(HISTOGRAM_BINS - 1, int(score / HISTOGRAM_BIN_WIDTH))] += 1
        result[key] = DistributionGroup(key=key, bin_counts=tuple(counts), scores=scores)

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for key, group in result.items():
            slug = key.lower().replace(" ", "-")
            with open(out_dir / f"histogram_{group_by}_{slug}.csv", "w", encoding="utf-8") as fh:
                fh.write("bin_low,bin_high,count\n")
                for b, count in enumerate(group.bin_counts):
                    fh.write(
                        f"{b * HISTOGRAM_BIN_WIDTH},{(b + 1) * HISTOGRAM_BIN_WIDTH},{count}\n"
                    )
            with open(out_dir / f"raincloud_{group_by}_{slug}.csv", "w", encoding="utf-8") as fh:
                fh.write("listing_id,score\n")
                for listing_id, score in grouped[key]:
                    fh.write(f"{listing_id},{score!r}\n")
    return result


@dataclass(frozen=True)
class ValidationConfig:
    seed: int = 20240301
    cities: tuple[str, ...] = tuple(sorted(CITY_PRESETS))
    n_addresses: int = 1000
    epc_coverage_fraction: float = 0.7
    margin: float = 0.1
    alpha: float = 0.05
    inject_shift: float = 0.0


@dataclass(frozen=True)
class CityOutcome:
    city: str
    g1_mean: float
    g2_mean: float
    gap: float
    n_g1: int
    n_g2: int

    def to_dict(self) -> dict:
        return {
            "city": self.city,
            "g1_mean": self.g1_mean,
            "g2_mean": self.g2_mean,
            "gap": self.gap,
            "n_g1": self.n_g1,
            "n_g2": self.n_g2,
        }


@dataclass(frozen=True)
class ValidationSummary:
    seed: int
    cities: tuple[CityOutcome, ...]
    omitted: tuple[str, ...]
    tost: TostResult
    inject_shift: float = 0.0
    diagnostics: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "inject_shift": self.inject_shift,
            "cities": [c.to_dict() for c in self.cities],
            "omitted": list(self.omitted),
            "tost": self.tost.to_dict(),
            "diagnostics": list(self.diagnostics),
        }


def score_synthetic_city(city: str, seed: int, config: ValidationConfig) -> tuple[list[ScoredListing], frozenset[str], list[tuple[str, str]]]:
    """Generate and score one synthetic city through the production path."""
    table = ensure_city(default_bedroom_table(), city)
    params = params_for_city(
        city,
        seed=seed,
        n_addresses=config.n_addresses,
        epc_coverage_fraction=config.epc_coverage_fraction,
    )
    corpus = generate_city(params, table)
    ctx = ScoringContext(
        index=EpcIndex(corpus.records),
        table=table,
        transport_fixed=corpus.transport_fixed,
        transport_snapshots=corpus.transport_snapshots,
    )
    scored, diagnostics = score_all(corpus.listings, ctx)
    return scored, corpus.covered_ids, diagnostics


def run_validation(
    config: ValidationConfig = ValidationConfig(), out_dir: Optional[Path] = None
) -> ValidationSummary:
    """Interpolated-vs-direct comparison across synthetic cities.

    G1 holds listings scored by neighbor interpolation, G2 those scored
    from their own certificate. A positive ``inject_shift`` displaces the
    G1 scores before testing; it exists to show the harness detects real
    differences. Cities yielding an empty group are omitted with a
    diagnostic. Deterministic for a fixed config.
    """
    city_seeds = np.random.SeedSequence(config.seed).generate_state(
        len(config.cities), dtype=np.uint64
    )
    g1_all: list[float] = []
    g2_all: list[float] = []
    outcomes: list[CityOutcome] = []
    omitted: list[str] = []
    diagnostics: list[str] = []
    all_scored: list[ScoredListing] = []

    for city, city_seed in zip(config.cities, city_seeds):
        scored, _covered, diags = score_synthetic_city(city, int(city_seed), config)
        diagnostics.extend(f"{city}: {lid}: {why}" for lid, why in diags)
        g1 = [
            s.report.overall
            for s in scored
            if s.report.provenance and s.report.provenance.kind == "interpolated"
        ]
        g2 = [
            s.report.overall
            for s in scored
            if s.report.provenance and s.report.provenance.kind == "direct"
        ]
        if config.inject_shift:
            g1 = [min(5.0, max(0.0, v + config.inject_shift)) for v in g1]
        if not g1 or not g2:
            omitted.append(city)
            diagnostics.append(f"{city}: omitted (empty comparison group)")
            continue
        g1_mean = sum(g1) / len(g1)
        g2_mean = sum(g2) / len(g2)
        outcomes.append(
            CityOutcome(
                city=city,
                g1_mean=g1_mean,
                g2_mean=g2_mean,
                gap=abs(g1_mean - g2_mean),
                n_g1=len(g1),
                n_g2=len(g2),
            )
        )
        g1_all.extend(g1)
        g2_all.extend(g2)
        all_scored.extend(scored)

    tost = tost_equivalence(g1_all, g2_all, margin=config.margin, alpha=config.alpha)
    summary = ValidationSummary(
        seed=config.seed,
        cities=tuple(outcomes),
        omitted=tuple(omitted),
        tost=tost,
        inject_shift=config.inject_shift,
        diagnostics=tuple(diagnostics),
    )

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        export_distributions(all_scored, "city", out_dir)
        export_distributions(all_scored, "bed_type", out_dir)
        with open(out_dir / "summary.json", "w", encoding="utf-8") as fh:
            json.dump(summary.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return summary
