import datetime as dt

import pytest

from ecograde.ingest import default_bedroom_table
from ecograde.model import EfficiencyBand, EpcRecord, Listing, Tariff


def make_record(
    address="1 ALDER STREET",
    postcode="B1 1AA",
    floor_area=55.0,
    bands=None,
    kwh=250.0,
    lodged=dt.date(2022, 6, 1),
    rating="D",
):
    if bands is None:
        bands = {"walls": EfficiencyBand.GOOD, "main_heat": EfficiencyBand.AVERAGE}
    return EpcRecord(
        address_key=address,
        postcode=postcode,
        floor_area=floor_area,
        bands=bands,
        kwh_per_m2=kwh,
        lodgement_date=lodged,
        headline_rating=rating,
    )


def make_listing(
    id="lst-1",
    address="1 ALDER STREET",
    postcode="B1 1AA",
    lat=52.4862,
    lon=-1.8904,
    city="Birmingham",
    bedrooms=1,
    tariff=None,
    meter=None,
):
    return Listing(
        id=id,
        address_key=address,
        postcode=postcode,
        latitude=lat,
        longitude=lon,
        city=city,
        bedrooms=bedrooms,
        tariff=tariff,
        meter_kwh_per_m2=meter,
    )


@pytest.fixture
def bedroom_table():
    return default_bedroom_table()


@pytest.fixture
def green_tariff():
    return Tariff(renewable_fraction=1.0, gas_main_heat=False)
