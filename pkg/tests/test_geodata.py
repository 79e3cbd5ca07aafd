import numpy as np
import pytest

from sixghz_coexistence.exceptions import GeodataError, ParameterError
from sixghz_coexistence.geodata import (
    METERS_PER_DEGREE,
    BoundingBox,
    load_geodata,
    project,
    read_geodata,
)
from sixghz_coexistence.geometry import NO_OWNER, Tier
from sixghz_coexistence.scenario_io import data_path

BOX = BoundingBox(lat_min=55.85, lat_max=55.867, lon_min=-4.29, lon_max=-4.265)


@pytest.fixture
def geodata(tmp_path):
    path = tmp_path / "sites.csv"
    path.write_text(
        "lon,lat,kind,owner\n"
        "-4.28,55.855,bs,\n"
        "-4.27,55.860,bs,1\n"
        "-4.275,55.858,ap,\n"
        "-4.2751,55.8581,incumbent,\n"
        "-4.20,55.860,bs,\n",
        encoding="utf-8",
    )
    return path


class TestBoundingBox:
    def test_center(self):
        lon, lat = BOX.center
        assert lon == pytest.approx(-4.2775)
        assert lat == pytest.approx(55.8585)

    def test_inverted_bounds(self):
        with pytest.raises(ParameterError):
            BoundingBox(lat_min=56.0, lat_max=55.0, lon_min=-4.3, lon_max=-4.2)


class TestProjection:
    def test_north_offset(self):
        xy = project(0.0, 0.001, (0.0, 0.0))
        np.testing.assert_allclose(xy, [[0.0, 0.001 * METERS_PER_DEGREE]])

    def test_east_offset_shrinks_with_latitude(self):
        xy = project(0.001, 60.0, (0.0, 60.0))
        assert xy[0, 0] == pytest.approx(0.5 * 0.001 * METERS_PER_DEGREE)


class TestReadGeodata:
    def test_records(self, geodata):
        records = read_geodata(geodata)
        assert len(records) == 5
        assert records[1].owner == 1
        assert records[3].tier == Tier.INCUMBENT

    def test_missing_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("lon,lat\n1,2\n", encoding="utf-8")
        with pytest.raises(GeodataError):
            read_geodata(path)

    def test_unknown_kind(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("lon,lat,kind\n1,2,tower\n", encoding="utf-8")
        with pytest.raises(GeodataError):
            read_geodata(path)

    def test_bad_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("lon,lat,kind\nwest,2,bs\n", encoding="utf-8")
        with pytest.raises(GeodataError):
            read_geodata(path)


class TestLoadGeodata:
    def test_drops_records_outside_the_box(self, geodata):
        deployment = load_geodata(geodata, BOX, [(0.5, 1.0), (0.5, 0.0)], seed=1)
        assert len(deployment) == 4
        assert int((deployment.tier == Tier.CELLULAR).sum()) == 2

    def test_explicit_owner_is_kept(self, geodata):
        deployment = load_geodata(geodata, BOX, [(1.0, 1.0), (0.0, 0.0)], seed=1)
        cellular = deployment.where(tier=Tier.CELLULAR)
        assert sorted(cellular.owner) == [0, 1]
        assert list(deployment.where(tier=Tier.INCUMBENT).owner) == [NO_OWNER]

    def test_owner_out_of_range(self, geodata):
        with pytest.raises(GeodataError):
            load_geodata(geodata, BOX, [(1.0, 1.0)], seed=1)

    def test_exclusion_flags(self, geodata):
        deployment = load_geodata(geodata, BOX, [(0.5, 1.0), (0.5, 0.0)], rho=200.0)
        wifi = deployment.where(tier=Tier.WIFI)
        assert list(wifi.in_zone) == [True]

    def test_empty_selection(self, geodata):
        far = BoundingBox(lat_min=0.0, lat_max=1.0, lon_min=0.0, lon_max=1.0)
        with pytest.raises(GeodataError):
            load_geodata(geodata, far, [(1.0, 1.0)])

    def test_shipped_city_sample(self):
        shares = [(0.22, 0.22), (0.19, 0.19), (0.25, 0.25), (0.34, 0.34)]
        deployment = load_geodata(data_path("glasgow_geodata.csv"), BOX, shares, rho=200.0)
        counts = {tier: int((deployment.tier == tier).sum()) for tier in Tier}
        assert counts == {Tier.CELLULAR: 45, Tier.WIFI: 160, Tier.INCUMBENT: 3}
        assert deployment.in_zone.any()
        assert set(deployment.where(tier=Tier.WIFI).owner) == {0, 1, 2, 3}
