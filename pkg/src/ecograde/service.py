"""HTTP JSON API over a file-backed store snapshot.

Read-only: every number served comes verbatim from the batch scorer's
output files, so the API can never drift from the engine. Errors are
JSON problem documents with a machine-readable ``code``.
"""

from __future__ import annotations

import datetime as _dt
import math
import re
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import __version__
from .errors import NoComparableData
from .interpolate import find_direct, find_neighbors, interpolate
from .model import EcoGradeReport, EfficiencyBand, Listing, band_to_score
from .scoring import clamp01, ecograde, efficiency_factor, resolve_bedrooms, to_leaf_scale
from .stats import emissions_comparison, report_co2_stats
from .store import StoreSnapshot, load_store

_MONTH_RE = re.compile(r"^\d{4}-(0[1-9]|1[0-2])$")

COMING_SOON = "Coming Soon"

# One-band improvement suggestions, keyed by certificate attribute.
ADVICE_ACTIONS = {
    "hot_water": "Upgrade the hot water system: insulate the cylinder or fit an efficient boiler",
    "floor": "Add underfloor or solid floor insulation",
    "windows": "Fit double or secondary glazing",
    "walls": "Install cavity or internal wall insulation",
    "secondary_heating": "Replace portable heaters with fixed efficient heating",
    "roof": "Top up loft or flat-roof insulation",
    "main_heat": "Upgrade the main heating to a condensing boiler or heat pump",
    "main_heat_control": "Fit a programmer, room thermostat and radiator valves",
    "lighting": "Switch all fittings to low-energy lighting",
}


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _not_found(what: str) -> ApiError:
    return ApiError(404, "not_found", what)


def _snapshot(request: Request) -> StoreSnapshot:
    snapshot = getattr(request.app.state, "snapshot", None)
    if snapshot is None:
        raise ApiError(503, "store_loading", "store snapshot not loaded yet")
    return snapshot


def _quantized_band(score: float) -> EfficiencyBand:
    return EfficiencyBand(min(4, int(math.floor(score * 4.0 + 0.5))))


def _attribute_scores(
    snapshot: StoreSnapshot, listing: Listing
) -> tuple[dict[str, float], bool]:
    """Per-attribute scores for a listing and whether they are neighbor-derived."""
    direct = find_direct(listing, snapshot.epc_index)
    if direct is not None:
        return {a: band_to_score(b) for a, b in direct.bands.items()}, False
    bedrooms = resolve_bedrooms(listing, direct, snapshot.table)
    if bedrooms is None:
        return {}, False
    try:
        neighbors, widened = find_neighbors(
            listing if listing.bedrooms is not None else _with_bedrooms(listing, bedrooms),
            snapshot.epc_index,
            snapshot.table,
        )
    except NoComparableData:
        return {}, False
    return dict(interpolate(neighbors, widened).feature_means), True


def _with_bedrooms(listing: Listing, bedrooms: int) -> Listing:
    from dataclasses import replace

    return replace(listing, bedrooms=bedrooms)


def advice_items(snapshot: StoreSnapshot, listing: Listing) -> dict:
    """Improve-score advice: one item per attribute below "good".

    Each item's gain is a what-if: the attribute raised one band, the
    efficiency factor and overall grade recomputed through the scorer.
    """
    report = snapshot.reports.get(listing.id)
    scores, inferred = _attribute_scores(snapshot, listing)
    items = []
    if report is not None and "efficiency" in report.factor_scores and scores:
        beta = snapshot.calibration.leaf_curve_beta["efficiency"]
        for attr in sorted(scores):
            current = _quantized_band(scores[attr])
            if current >= EfficiencyBand.GOOD:
                continue
            expected = EfficiencyBand(current + 1)
            what_if = dict(scores)
            what_if[attr] = band_to_score(expected)
            new_eff = to_leaf_scale(clamp01(efficiency_factor(what_if)), beta)
            factors = dict(report.factor_scores)
            factors["efficiency"] = new_eff
            projected = ecograde(factors)
            items.append(
                {
                    "attribute": attr,
                    "current_band": current.label,
                    "expected_band": expected.label,
                    "action": ADVICE_ACTIONS[attr],
                    "gain": projected - report.overall,
                    "projected_overall": projected,
                    "_rank": int(current),
                }
            )
        # Largest gain first; equal gains surface the worst band first.
        items.sort(key=lambda item: (-item["gain"], item["_rank"], item["attribute"]))
        for item in items:
            del item["_rank"]
    return {
        "listing_id": listing.id,
        "overall": report.overall if report else None,
        "neighborhood_inferred": inferred,
        "items": items,
    }


def _report_payload(report: Optional[EcoGradeReport]) -> Optional[dict]:
    return report.to_dict() if report is not None else None


def _listing_summary(listing: Listing, report: Optional[EcoGradeReport]) -> dict:
    return {
        "id": listing.id,
        "city": listing.city,
        "bedrooms": listing.bedrooms,
        "overall": report.overall if report else None,
        "leaves": report.leaves if report else None,
        "co2_avg": report.co2_avg if report else None,
    }


def search_listings(
    snapshot: StoreSnapshot,
    city: Optional[str],
    beds: Optional[int],
    order: str,
) -> list[tuple[Listing, Optional[EcoGradeReport]]]:
    """Filtered listings, scored ones first in score order, ties by id."""
    rows = []
    for listing_id in sorted(snapshot.listings):
        listing = snapshot.listings[listing_id]
        if city is not None and listing.city.lower() != city.lower():
            continue
        if beds is not None and listing.bedrooms != beds:
            continue
        rows.append((listing, snapshot.reports.get(listing_id)))
    sign = -1.0 if order == "desc" else 1.0
    scored = [r for r in rows if r[1] is not None]
    unscored = [r for r in rows if r[1] is None]
    scored.sort(key=lambda r: (sign * r[1].overall, r[0].id))
    return scored + unscored


def corporate_dashboard(snapshot: StoreSnapshot, client_id: str, as_of: str) -> dict:
    """Per-month factor means, month-over-month deltas, and CO2 totals.

    Only complete months (strictly before ``as_of``) are included; the
    CO2 total prorates each booking's annual estimate by nights/365.
    """
    bookings = [
        b
        for b in snapshot.bookings
        if b.corporate_client_id == client_id and b.month < as_of
    ]
    by_month: dict[str, list] = {}
    for b in bookings:
        by_month.setdefault(b.month, []).append(b)

    months = []
    previous_means: Optional[dict[str, float]] = None
    for month in sorted(by_month):
        factor_values: dict[str, list[float]] = {}
        overall_values: list[float] = []
        co2_total = 0.0
        n_unscored = 0
        for b in by_month[month]:
            report = snapshot.reports.get(b.listing_id)
            if report is None:
                n_unscored += 1
                continue
            overall_values.append(report.overall)
            for name, value in report.factor_scores.items():
                factor_values.setdefault(name, []).append(value)
            if report.co2_avg is not None:
                co2_total += report.co2_avg * b.nights / 365.0
        factor_means = {
            name: sum(vals) / len(vals) for name, vals in sorted(factor_values.items())
        }
        deltas = None
        if previous_means is not None:
            deltas = {
                name: factor_means[name] - previous_means[name]
                for name in factor_means
                if name in previous_means
            }
        months.append(
            {
                "month": month,
                "n_bookings": len(by_month[month]),
                "n_unscored": n_unscored,
                "factor_means": factor_means,
                "overall_mean": (
                    sum(overall_values) / len(overall_values) if overall_values else None
                ),
                "deltas": deltas,
                "co2_total": co2_total,
            }
        )
        previous_means = factor_means
    return {
        "client_id": client_id,
        "as_of": as_of,
        "months": months,
        "co2_total": sum(m["co2_total"] for m in months),
    }


def supplier_dashboard(snapshot: StoreSnapshot, supplier_id: str) -> dict:
    """One row per owned listing; unscoreable cells read "Coming Soon"."""
    supplier = snapshot.suppliers[supplier_id]
    rows = []
    for listing_id in sorted(supplier.listing_ids):
        listing = snapshot.listings.get(listing_id)
        report = snapshot.reports.get(listing_id)
        bed_type = None
        if listing is not None:
            bed_type = resolve_bedrooms(
                listing, find_direct(listing, snapshot.epc_index), snapshot.table
            )
        baseline = (
            snapshot.baseline_for(listing.city, bed_type) if listing is not None else None
        )
        comparison = emissions_comparison(
            report_co2_stats(report) if report else None, baseline
        )
        rows.append(
            {
                "listing_id": listing_id,
                "factor_scores": dict(report.factor_scores) if report else None,
                "overall": report.overall if report else None,
                "leaves": report.leaves if report else None,
                "co2_high": report.co2_high if report else None,
                "co2_low": report.co2_low if report else None,
                "co2_avg": report.co2_avg if report else None,
                "emissions_comparison": (
                    comparison.label.text if comparison.status == "ok" else COMING_SOON
                ),
                "comparison_status": comparison.status,
            }
        )
    return {"supplier_id": supplier_id, "rows": rows}


def create_app(
    store_dir=None,
    calibration=None,
    conversion=None,
    table=None,
    defer_load: bool = False,
) -> FastAPI:
    app = FastAPI(
        title="ecograde",
        version=__version__,
        description="Address-specific sustainability scores for rental listings.",
    )
    app.state.snapshot = None
    app.state.store_dir = Path(store_dir) if store_dir is not None else None
    app.state.store_options = {
        "calibration": calibration,
        "conversion": conversion,
        "table": table,
    }
    if store_dir is not None and not defer_load:
        load_app_snapshot(app)

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"code": "bad_request", "message": str(exc.errors())}
        )

    @app.get("/health")
    def health(request: Request):
        snapshot = _snapshot(request)
        return {"status": "ok", "version": __version__, "snapshot_fingerprint": snapshot.fingerprint}

    @app.get("/v1/listings")
    def listings(
        request: Request,
        city: Optional[str] = None,
        beds: Optional[int] = None,
        sort: str = "ecograde",
        order: str = "desc",
        page: int = 1,
        page_size: int = 50,
    ):
        snapshot = _snapshot(request)
        if sort != "ecograde":
            raise ApiError(400, "bad_request", f"unsupported sort {sort!r}")
        if order not in ("asc", "desc"):
            raise ApiError(400, "bad_request", f"order must be asc or desc, got {order!r}")
        if page < 1 or not 1 <= page_size <= 500:
            raise ApiError(400, "bad_request", "page must be >= 1 and page_size in [1, 500]")
        rows = search_listings(snapshot, city, beds, order)
        start = (page - 1) * page_size
        items = [_listing_summary(l, r) for l, r in rows[start : start + page_size]]
        return {
            "items": items,
            "page": page,
            "page_size": page_size,
            "total": len(rows),
            "total_pages": max(1, -(-len(rows) // page_size)),
        }

    @app.get("/v1/listings/{listing_id}/ecograde")
    def listing_ecograde(request: Request, listing_id: str):
        snapshot = _snapshot(request)
        listing = snapshot.listings.get(listing_id)
        if listing is None:
            raise _not_found(f"listing {listing_id!r}")
        report = snapshot.reports.get(listing_id)
        return {
            "listing_id": listing_id,
            "city": listing.city,
            "bedrooms": listing.bedrooms,
            "status": "ok" if report is not None else "coming_soon",
            "report": _report_payload(report),
        }

    @app.get("/v1/listings/{listing_id}/advice")
    def listing_advice(request: Request, listing_id: str):
        snapshot = _snapshot(request)
        listing = snapshot.listings.get(listing_id)
        if listing is None:
            raise _not_found(f"listing {listing_id!r}")
        return advice_items(snapshot, listing)

    @app.get("/v1/corporate/{client_id}/dashboard")
    def corporate(request: Request, client_id: str, as_of: Optional[str] = None):
        snapshot = _snapshot(request)
        if client_id not in snapshot.clients:
            raise _not_found(f"corporate client {client_id!r}")
        if as_of is None:
            as_of = _dt.date.today().strftime("%Y-%m")
        elif not _MONTH_RE.match(as_of):
            raise ApiError(400, "bad_request", "as_of must be YYYY-MM")
        return corporate_dashboard(snapshot, client_id, as_of)

    @app.get("/v1/suppliers/{supplier_id}/dashboard")
    def supplier(request: Request, supplier_id: str):
        snapshot = _snapshot(request)
        if supplier_id not in snapshot.suppliers:
            raise _not_found(f"supplier {supplier_id!r}")
        return supplier_dashboard(snapshot, supplier_id)

    return app


def load_app_snapshot(app: FastAPI) -> None:
    """(Re)load the store snapshot; swaps atomically once built."""
    options = app.state.store_options
    app.state.snapshot = load_store(
        app.state.store_dir,
        calibration=options["calibration"],
        conversion=options["conversion"],
        table=options["table"],
    )
