import pytest

from sixghz_coexistence.analytic import (
    coverage_cellular_licensed,
    coverage_cellular_unlicensed,
    coverage_wifi_legacy,
    coverage_wifi_unlicensed,
)
from sixghz_coexistence.models import Entity, GameConfig, McConfig, Scenario, Window
from sixghz_coexistence.units import mbps_to_bps, mhz_to_hz, per_km2_to_per_m2


@pytest.fixture(autouse=True)
def clear_coverage_caches():
    yield
    for function in (
        coverage_cellular_licensed,
        coverage_cellular_unlicensed,
        coverage_wifi_legacy,
        coverage_wifi_unlicensed,
    ):
        function.cache_clear()


@pytest.fixture
def scenario():
    """Reference deployment, interference limited."""
    return Scenario(
        lambda_z=per_km2_to_per_m2(1.0),
        lambda_c=per_km2_to_per_m2(25.0),
        lambda_w=per_km2_to_per_m2(100.0),
        rho=200.0,
        rho_w=50.0,
        p_z=1.0,
        p_c=2.0,
        p_w=1.0,
        b_u=mhz_to_hz(240.0),
        b_cl=mhz_to_hz(80.0),
        b_wl=mhz_to_hz(80.0),
        alpha=4.0,
        gamma=10.0,
    )


@pytest.fixture
def game_config():
    return GameConfig(mu=0.1, epsilon=0.0, seed=0)


@pytest.fixture
def fast_mc():
    return McConfig(
        n_realizations=400,
        window=Window(2000.0),
        seed=3,
        gamma_db_grid=(-10.0, 0.0, 10.0, 20.0),
    )


@pytest.fixture
def two_entities():
    return [
        Entity(
            v_c=0.6,
            v_w=0.3,
            sigma_hat_c=mbps_to_bps(30.0),
            sigma_hat_w=mbps_to_bps(100.0),
            theta_c=7.0,
            name="operator-a",
        ),
        Entity(
            v_c=0.4,
            v_w=0.7,
            sigma_hat_c=mbps_to_bps(30.0),
            sigma_hat_w=mbps_to_bps(100.0),
            theta_c=7.0,
            name="operator-b",
        ),
    ]


@pytest.fixture
def three_entities():
    shares = [(0.5, 0.2), (0.3, 0.3), (0.2, 0.5)]
    return [
        Entity(
            v_c=v_c,
            v_w=v_w,
            sigma_hat_c=mbps_to_bps(30.0),
            sigma_hat_w=mbps_to_bps(80.0),
            theta_c=7.0,
            name=f"operator-{index}",
        )
        for index, (v_c, v_w) in enumerate(shares)
    ]
