import math

import pytest

from sixghz_coexistence.units import (
    db_to_linear,
    dbm_to_watts,
    linear_to_db,
    parse_db_range,
    per_km2_to_per_m2,
    per_m2_to_per_km2,
    thermal_noise,
    watts_to_dbm,
)


class TestConversions:
    def test_db_round_values(self):
        """10 dB is a factor 10 and 0 dB is unity."""
        assert db_to_linear(10.0) == pytest.approx(10.0)
        assert db_to_linear(0.0) == pytest.approx(1.0)
        assert linear_to_db(100.0) == pytest.approx(20.0)

    def test_dbm_to_watts(self):
        """33 dBm is about 2 W and 30 dBm exactly 1 W."""
        assert dbm_to_watts(33.0) == pytest.approx(1.995, abs=1e-3)
        assert dbm_to_watts(30.0) == pytest.approx(1.0)
        assert watts_to_dbm(1.0) == pytest.approx(30.0)

    def test_intensity_units(self):
        """25 per km² is 2.5e-5 per m²."""
        assert per_km2_to_per_m2(25.0) == pytest.approx(2.5e-5)
        assert per_m2_to_per_km2(2.5e-5) == pytest.approx(25.0)

    @pytest.mark.parametrize("value_dbm", [-174.0, -90.0, 0.0, 23.0, 46.0])
    def test_dbm_round_trip(self, value_dbm):
        assert watts_to_dbm(dbm_to_watts(value_dbm)) == pytest.approx(value_dbm, abs=1e-9)


class TestThermalNoise:
    def test_one_hertz_without_noise_figure(self):
        """-174 dBm over 1 Hz."""
        assert thermal_noise(1.0, 0.0) == pytest.approx(10 ** (-17.4) / 1000.0)

    def test_scales_with_bandwidth(self):
        assert thermal_noise(2e6) == pytest.approx(2 * thermal_noise(1e6))

    def test_rejects_non_positive_bandwidth(self):
        with pytest.raises(ValueError):
            thermal_noise(0.0)


class TestParseDbRange:
    def test_stop_is_included(self):
        values = parse_db_range("-10:20:1")
        assert len(values) == 31
        assert values[0] == -10.0
        assert values[-1] == 20.0

    def test_fractional_step(self):
        assert parse_db_range("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]

    def test_single_value(self):
        assert parse_db_range("7") == [7.0]

    @pytest.mark.parametrize("text", ["0:10", "0:10:0", "10:0:1", "a:b:c"])
    def test_invalid(self, text):
        with pytest.raises(ValueError):
            parse_db_range(text)

    def test_values_are_rounded(self):
        """Accumulated float steps do not leak into threshold values."""
        assert all(math.isclose(v, round(v, 1)) for v in parse_db_range("-1:1:0.1"))
