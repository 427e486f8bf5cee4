"""Address-specific sustainability scoring for rental accommodation."""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    BAND_ATTRIBUTES,
    CityBaseline,
    EcoGradeReport,
    EfficiencyBand,
    EpcRecord,
    Listing,
    Provenance,
    Tariff,
    band_to_score,
    leaves_from_overall,
    normalize_address,
    normalize_postcode,
    outward_code,
)
