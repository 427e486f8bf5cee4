"""Direct certificate matching and neighbor interpolation.

A listing either matches a certificate exactly on (address key, postcode)
or borrows from similar neighbors: same full postcode and same bedroom
count, widening to the postcode district when fewer than ``min_similar``
candidates exist.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import NoComparableData, OutOfRange
from .ingest import BedroomLookupTable, infer_bedrooms, read_records_jsonl, write_records_jsonl
from .model import BAND_ATTRIBUTES, EpcRecord, Listing, band_to_score, normalize_postcode, outward_code

DEFAULT_MIN_SIMILAR = 3


class EpcIndex:
    """Read-only lookup over canonical records.

    Built once from the deduped record set; every record is reachable by
    exact identity, by full postcode, and by outward code. The snapshot
    form on disk is simply the canonical JSON-lines record file, from
    which a rebuild is deterministic.
    """

    def __init__(self, records: Sequence[EpcRecord]):
        self._by_identity: dict[tuple[str, str], EpcRecord] = {}
        self._by_postcode: dict[str, list[EpcRecord]] = {}
        self._by_outward: dict[str, list[EpcRecord]] = {}
        for record in records:
            self._by_identity[record.identity] = record
            postcode = normalize_postcode(record.postcode)
            self._by_postcode.setdefault(postcode, []).append(record)
            self._by_outward.setdefault(outward_code(postcode), []).append(record)

    def __len__(self) -> int:
        return len(self._by_identity)

    @property
    def records(self) -> list[EpcRecord]:
        return [self._by_identity[k] for k in sorted(self._by_identity)]

    def lookup(self, address_key: str, postcode: str) -> Optional[EpcRecord]:
        return self._by_identity.get((address_key, normalize_postcode(postcode)))

    def postcode_group(self, postcode: str) -> list[EpcRecord]:
        return list(self._by_postcode.get(normalize_postcode(postcode), ()))

    def outward_group(self, postcode: str) -> list[EpcRecord]:
        return list(self._by_outward.get(outward_code(postcode), ()))

    def save(self, path) -> None:
        write_records_jsonl(self.records, path)

    @classmethod
    def load(cls, path) -> "EpcIndex":
        return cls(read_records_jsonl(path))


@dataclass(frozen=True)
class InterpolationResult:
    """Neighbor-averaged metrics standing in for a missing certificate."""

    feature_means: dict[str, float] = field(default_factory=dict)
    kwh_mean: float = 0.0
    kwh_min: float = 0.0
    kwh_max: float = 0.0
    n_neighbors: int = 1
    widened: bool = False


def find_direct(listing: Listing, index: EpcIndex) -> Optional[EpcRecord]:
    """The certificate whose (address key, postcode) equals the listing's."""
    return index.lookup(listing.address_key, listing.postcode)


def find_neighbors(
    listing: Listing,
    index: EpcIndex,
    table: BedroomLookupTable,
    min_similar: int = DEFAULT_MIN_SIMILAR,
) -> tuple[list[EpcRecord], bool]:
    """Similar-neighbor candidates and whether the search was widened.

    Similarity is bedroom-count equality, with record bedrooms inferred
    from certificate floor areas. Records whose area falls outside the
    city's table span cannot be compared and are skipped.
    """
    if listing.bedrooms is None:
        raise ValueError("listing.bedrooms must be known before neighbor search")

    def similar(records: list[EpcRecord]) -> list[EpcRecord]:
        out = []
        for record in records:
            try:
                beds = infer_bedrooms(record.floor_area, listing.city, table)
            except OutOfRange:
                continue
            if beds == listing.bedrooms:
                out.append(record)
        return out

    candidates = similar(index.postcode_group(listing.postcode))
    if len(candidates) >= min_similar:
        return candidates, False
    widened = similar(index.outward_group(listing.postcode))
    if not widened:
        raise NoComparableData(
            f"no comparable certificates for {listing.id} even in {outward_code(listing.postcode)}"
        )
    return widened, True


def _mean(values: Sequence[float]) -> float:
    # Constant inputs must reproduce the input bit-exactly (degenerate
    # interpolation equals the direct metrics), so short-circuit them.
    if min(values) == max(values):
        return values[0]
    return sum(values) / len(values)


def interpolate(neighbors: Sequence[EpcRecord], widened: bool = False) -> InterpolationResult:
    """Per-attribute mean band scores and the kWh/m2 mean and range."""
    if not neighbors:
        raise ValueError("interpolate requires at least one neighbor")
    feature_means: dict[str, float] = {}
    for attr in BAND_ATTRIBUTES:
        scores = [band_to_score(r.bands[attr]) for r in neighbors if attr in r.bands]
        if scores:
            feature_means[attr] = _mean(scores)
    kwh_values = [r.kwh_per_m2 for r in neighbors]
    return InterpolationResult(
        feature_means=feature_means,
        kwh_mean=_mean(kwh_values),
        kwh_min=min(kwh_values),
        kwh_max=max(kwh_values),
        n_neighbors=len(neighbors),
        widened=widened,
    )
