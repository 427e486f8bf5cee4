import datetime as dt

import pytest
from hypothesis import given, strategies as st

from ecograde.errors import ConfigError, OutOfRange, UnknownCity
from ecograde.ingest import (
    BedroomLookupTable,
    CleaningRules,
    clean_records,
    dedupe_by_address,
    default_bedroom_table,
    ensure_city,
    infer_bedrooms,
    parse_epc_export,
    record_fingerprint,
)
from ecograde.model import EfficiencyBand

from conftest import make_record

CSV_HEADER = (
    "ADDRESS,POSTCODE,TOTAL_FLOOR_AREA,ENERGY_CONSUMPTION_CURRENT,"
    "LODGEMENT_DATE,CURRENT_ENERGY_RATING,WALLS_ENERGY_EFF,MAINHEAT_ENERGY_EFF,UNUSED_COLUMN"
)

CSV_THREE_ROWS = f"""{CSV_HEADER}
"1 Alder Street",B1 1AA,55,250,2022-06-01,D,Good,Average,x
"2 Alder Street",B1 1AA,62,180,2021-03-15,C,Very Good,Good,y
"Flat 3, 9 Elm Road",SW1A 2BB,38,310,2019-11-02,E,Poor,Very Poor,z
"""


def test_parse_csv_three_clean_rows():
    records, diagnostics = parse_epc_export(CSV_THREE_ROWS, format="csv")
    assert len(records) == 3
    assert diagnostics == []
    assert records[0].address_key == "1 ALDER STREET"
    assert records[0].bands["walls"] == EfficiencyBand.GOOD
    assert records[2].address_key == "FLAT 3 9 ELM ROAD"
    assert records[2].postcode == "SW1A 2BB"


def test_parse_bad_band_label_keeps_record_with_diagnostic():
    csv_text = f"""{CSV_HEADER}
"1 Alder Street",B1 1AA,55,250,2022-06-01,D,N/A,Average,x
"""
    records, diagnostics = parse_epc_export(csv_text, format="csv")
    assert len(records) == 1
    assert "walls" not in records[0].bands
    assert records[0].bands["main_heat"] == EfficiencyBand.AVERAGE
    assert len(diagnostics) == 1
    assert diagnostics[0].row == 1
    assert diagnostics[0].reason == "bad_band_label"


def test_parse_empty_file():
    assert parse_epc_export("", format="csv") == ([], [])
    assert parse_epc_export("", format="json-lines") == ([], [])


def test_parse_missing_mandatory_field_is_per_row():
    csv_text = f"""{CSV_HEADER}
"1 Alder Street",,55,250,2022-06-01,D,Good,Average,x
"2 Alder Street",B1 1AA,62,180,2021-03-15,C,Good,Average,y
"""
    records, diagnostics = parse_epc_export(csv_text, format="csv")
    assert len(records) == 1
    assert len(diagnostics) == 1
    assert diagnostics[0].reason == "missing_field"
    assert "postcode" in diagnostics[0].detail


def test_parse_invalid_values_and_bytes_input():
    csv_text = f"""{CSV_HEADER}
"1 Alder Street",B1 1AA,not-a-number,250,2022-06-01,D,Good,Average,x
"""
    records, diagnostics = parse_epc_export(csv_text.encode("utf-8"), format="csv")
    assert records == []
    assert diagnostics[0].reason == "invalid_value"


def test_parse_jsonl_roundtrips_canonical_form():
    record = make_record()
    import json

    line = json.dumps(record.to_dict())
    records, diagnostics = parse_epc_export(line + "\n\n", format="json-lines")
    assert diagnostics == []
    assert records == [record]


def test_parse_jsonl_bad_json():
    records, diagnostics = parse_epc_export("{not json}\n", format="json-lines")
    assert records == []
    assert diagnostics[0].reason == "invalid_json"


def test_parse_unknown_format():
    with pytest.raises(ConfigError):
        parse_epc_export("", format="xml")


# --- cleaning ----------------------------------------------------------------


def test_clean_rating_kwh_conflict():
    record = make_record(rating="B", kwh=600.0)
    kept, rejected = clean_records([record])
    assert kept == []
    assert rejected == [(record, "rating_kwh_conflict")]


def test_clean_implausible_area():
    record = make_record(floor_area=2.0)
    kept, rejected = clean_records([record])
    assert rejected == [(record, "implausible_area")]
    big = make_record(floor_area=900.0)
    assert clean_records([big])[1][0][1] == "implausible_area"


def test_clean_keeps_plausible_record():
    record = make_record(rating="D", kwh=250.0, floor_area=55.0)
    kept, rejected = clean_records([record])
    assert kept == [record]
    assert rejected == []


def test_clean_rejects_bandless_record():
    import dataclasses

    record = make_record(bands={"walls": EfficiencyBand.GOOD})
    no_bands = dataclasses.replace(record, bands={})
    kept, rejected = clean_records([no_bands])
    assert rejected == [(no_bands, "no_bands")]


def test_clean_good_rating_below_cap_kept():
    record = make_record(rating="A", kwh=399.0)
    kept, rejected = clean_records([record])
    assert kept == [record]


records_lists = st.lists(
    st.builds(
        make_record,
        floor_area=st.floats(min_value=1.0, max_value=1000.0, allow_nan=False),
        kwh=st.floats(min_value=0.0, max_value=900.0, allow_nan=False),
        rating=st.sampled_from("ABCDEFG"),
    ),
    max_size=30,
)


@given(records_lists)
def test_clean_partitions_input(records):
    kept, rejected = clean_records(records)
    assert len(kept) + len(rejected) == len(records)
    reconstructed = kept + [r for r, _ in rejected]
    assert sorted(map(record_fingerprint, reconstructed)) == sorted(
        map(record_fingerprint, records)
    )


# --- dedup ---------------------------------------------------------------


def test_dedupe_latest_date_wins():
    older = make_record(lodged=dt.date(2019, 1, 1), rating="C")
    newer = make_record(lodged=dt.date(2022, 6, 1), rating="B")
    assert dedupe_by_address([older, newer]) == [newer]
    assert dedupe_by_address([newer, older]) == [newer]


def test_dedupe_same_date_worst_rating_wins():
    c = make_record(lodged=dt.date(2021, 5, 5), rating="C")
    e = make_record(lodged=dt.date(2021, 5, 5), rating="E")
    assert dedupe_by_address([c, e]) == [e]
    assert dedupe_by_address([e, c]) == [e]


def test_dedupe_single_record_identity():
    record = make_record()
    assert dedupe_by_address([record]) == [record]


def test_dedupe_full_tie_uses_fingerprint():
    a = make_record(kwh=100.0)
    b = make_record(kwh=200.0)
    expected = min((a, b), key=record_fingerprint)
    assert dedupe_by_address([a, b]) == [expected]
    assert dedupe_by_address([b, a]) == [expected]


def test_dedupe_respects_postcode_in_identity():
    one = make_record(postcode="B1 1AA")
    other = make_record(postcode="B2 2BB")
    assert len(dedupe_by_address([one, other])) == 2


@given(
    st.lists(
        st.builds(
            make_record,
            address=st.sampled_from(["1 A STREET", "2 A STREET", "3 A STREET"]),
            lodged=st.dates(dt.date(2015, 1, 1), dt.date(2023, 1, 1)),
            rating=st.sampled_from("ABCDEFG"),
            kwh=st.floats(min_value=0, max_value=500, allow_nan=False),
        ),
        max_size=12,
    ),
    st.randoms(),
)
def test_dedupe_permutation_invariant(records, rnd):
    base = dedupe_by_address(records)
    shuffled = list(records)
    rnd.shuffle(shuffled)
    assert dedupe_by_address(shuffled) == base
    assert len({r.identity for r in base}) == len(base)


# --- bedroom inference ------------------------------------------------------


def test_infer_bedrooms_default_table():
    table = default_bedroom_table()
    assert infer_bedrooms(30.0, "Birmingham", table) == 0
    assert infer_bedrooms(60.0, "Birmingham", table) == 2


def test_infer_bedrooms_boundary_is_low_inclusive():
    table = default_bedroom_table()
    assert infer_bedrooms(37.0, "Birmingham", table) == 1
    assert infer_bedrooms(36.999, "Birmingham", table) == 0


def test_infer_bedrooms_errors():
    table = default_bedroom_table()
    with pytest.raises(OutOfRange):
        infer_bedrooms(10_000.0, "Birmingham", table)
    with pytest.raises(UnknownCity):
        infer_bedrooms(50.0, "Atlantis", table)


def test_ensure_city_extends_missing():
    table = ensure_city(default_bedroom_table(), "Atlantis")
    assert infer_bedrooms(50.0, "Atlantis", table) == 1


def test_table_validation():
    with pytest.raises(ConfigError):
        BedroomLookupTable.from_dict({"X": [[0, 30, 0], [40, 60, 1]]})  # gap
    with pytest.raises(ConfigError):
        BedroomLookupTable.from_dict({"X": [[0, 30, 1], [30, 60, 0]]})  # decreasing
    with pytest.raises(ConfigError):
        BedroomLookupTable.from_dict({"X": [[0, 30, 7]]})  # out of range


@given(st.floats(min_value=0.0, max_value=499.0, allow_nan=False), st.floats(min_value=0.0, max_value=1.0))
def test_infer_bedrooms_monotone(area, bump):
    table = default_bedroom_table()
    a = infer_bedrooms(area, "Bristol", table)
    b = infer_bedrooms(min(area + bump, 499.5), "Bristol", table)
    assert b >= a


def test_cleaning_rules_validation():
    with pytest.raises(ConfigError):
        CleaningRules(min_plausible_area=100, max_plausible_area=50)
    with pytest.raises(ConfigError):
        CleaningRules(good_ratings=frozenset({"Z"}))
