"""
Closed-form self-check of the analytic module.

Usage:
    sixghz-coexistence validate --out checks.csv
"""

import logging
import math

from ..analytic import (
    band_intensity,
    cellular_coverage_closed_form,
    coverage_cellular_licensed,
    coverage_wifi_legacy,
    coverage_wifi_unlicensed,
    cross_tier_exponent,
    sinc,
    wifi_coverage_closed_form,
    zeta,
)
from ..geometry import Band, Tier, thinned_intensity
from ..units import db_to_linear, dbm_to_watts, per_km2_to_per_m2, per_m2_to_per_km2
from .base import BaseCommand, CommandError, CommandResult

logger = logging.getLogger(__name__)

COLUMNS = ["check", "gamma_db", "expected", "actual", "abs_error", "tolerance", "passed"]

GAMMA_DB = range(-10, 21)


class OracleSuite:
    """Comparisons of computed values against closed forms, collected as result rows."""

    def __init__(self):
        self.rows = []

    def add(self, check, expected, actual, tolerance, gamma_db=None):
        error = abs(actual - expected)
        passed = error <= tolerance
        self.rows.append(
            {
                "check": check,
                "gamma_db": gamma_db,
                "expected": expected,
                "actual": actual,
                "abs_error": error,
                "tolerance": tolerance,
                "passed": passed,
            }
        )
        if not passed:
            logger.error(f"{check} failed: expected {expected}, got {actual}")

    @property
    def failures(self):
        return [row for row in self.rows if not row["passed"]]

    def __str__(self):
        return f"Validation: {len(self.rows) - len(self.failures)}/{len(self.rows)} checks passed"


def run_checks(scenario):
    """Closed-form checks on an interference-limited copy of ``scenario``."""
    suite = OracleSuite()
    quiet = scenario.replace(noise_c=0.0, noise_w=0.0)
    alpha = quiet.alpha

    suite.add("zeta(10, 4)", 1.99927, zeta(10.0, 4.0), 1e-4)
    suite.add(
        "thinned cellular intensity (per km2)",
        22.048,
        per_m2_to_per_km2(
            thinned_intensity(per_km2_to_per_m2(25.0), per_km2_to_per_m2(1.0), 200.0)
        ),
        1e-3,
    )
    suite.add("33 dBm in W", 1.995, dbm_to_watts(33.0), 1e-3)

    for convention in ("printed", "laplace"):
        variant = quiet.replace(self_interference=convention)
        for gamma_db in GAMMA_DB:
            gamma = db_to_linear(gamma_db)
            suite.add(
                f"licensed cellular coverage ({convention})",
                cellular_coverage_closed_form(gamma, alpha, convention),
                coverage_cellular_licensed(gamma, 0.0, variant),
                1e-5,
                gamma_db,
            )

    delta_c, delta_w = 0.7, 0.2
    for gamma_db in GAMMA_DB:
        gamma = db_to_linear(gamma_db)
        intensity = band_intensity(Tier.WIFI, Band.LICENSED, quiet, 0.0, delta_w)
        exponent = math.pi * gamma ** (2.0 / alpha) * intensity / sinc(2.0 / alpha)
        suite.add(
            "legacy WiFi coverage",
            wifi_coverage_closed_form(exponent, quiet.rho_w),
            coverage_wifi_legacy(gamma, delta_w, quiet),
            1e-6,
            gamma_db,
        )
        weighted = (
            delta_w * quiet.lambda_w_bar * quiet.p_w ** (2.0 / alpha)
            + delta_c * quiet.lambda_c_bar * quiet.p_c ** (2.0 / alpha)
            + quiet.lambda_z * quiet.p_z ** (2.0 / alpha)
        )
        suite.add(
            "unlicensed WiFi coverage",
            wifi_coverage_closed_form(
                cross_tier_exponent(gamma, quiet.p_w, weighted, alpha), quiet.rho_w
            ),
            coverage_wifi_unlicensed(gamma, delta_c, delta_w, quiet),
            1e-6,
            gamma_db,
        )
    return suite


class Command(BaseCommand):
    name = "validate"
    help = "Check the analytic expressions against their closed forms"

    def handle(self, loaded, options):
        suite = run_checks(loaded.scenario)
        if suite.failures:
            raise CommandError(str(suite), returncode=1)
        return CommandResult(records=suite.rows, columns=COLUMNS, lines=[str(suite)])
