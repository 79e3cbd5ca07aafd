"""
Coverage curves: closed-form expressions next to Monte Carlo estimates.

Usage:
    sixghz-coexistence coverage --config reference.toml --gamma-db -10:20:1 --out cov.csv
    sixghz-coexistence coverage --analytic-only --set coverage.delta_c=0.5
"""

import logging
from dataclasses import replace

from ..analytic import coverage
from ..exceptions import DegenerateTierError
from ..geometry import Band, Tier
from ..renderers.plot_renderer import PlotRenderer
from ..services.montecarlo import CoverageSimulator
from ..units import db_to_linear
from .base import BaseCommand, CommandError, CommandResult

logger = logging.getLogger(__name__)

COLUMNS = ["gamma_db", "tier", "band", "analytic", "p_hat", "ci99", "ci_low", "ci_high", "n"]

CURVES = [
    (Tier.CELLULAR, Band.LICENSED),
    (Tier.CELLULAR, Band.UNLICENSED),
    (Tier.WIFI, Band.LICENSED),
    (Tier.WIFI, Band.UNLICENSED),
]


class Command(BaseCommand):
    name = "coverage"
    help = "Coverage probability of the four tier/band pairs over an SINR threshold range"
    seed_keys = ("montecarlo.seed",)

    def add_arguments(self, parser):
        parser.add_argument(
            "--gamma-db",
            type=str,
            help="Threshold range start:stop:step in dB (stop included)",
        )
        parser.add_argument(
            "--delta-c",
            type=float,
            help="Fraction of eligible BSs in the unlicensed band",
        )
        parser.add_argument(
            "--delta-w",
            type=float,
            help="Fraction of eligible APs in the unlicensed band",
        )
        parser.add_argument(
            "--n-realizations",
            type=int,
            help="Monte Carlo realizations per curve",
        )
        parser.add_argument(
            "--analytic-only",
            action="store_true",
            help="Skip the Monte Carlo estimates",
        )

    def overrides(self, options):
        overrides = super().overrides(options)
        if options.gamma_db is not None:
            overrides.append(f'coverage.gamma_db="{options.gamma_db}"')
        if options.delta_c is not None:
            overrides.append(f"coverage.delta_c={options.delta_c}")
        if options.delta_w is not None:
            overrides.append(f"coverage.delta_w={options.delta_w}")
        if options.n_realizations is not None:
            overrides.append(f"montecarlo.n_realizations={options.n_realizations}")
        return overrides

    def handle(self, loaded, options):
        scenario = loaded.scenario
        settings = loaded.coverage
        mc = replace(loaded.montecarlo, gamma_db_grid=settings.gamma_db)
        simulator = CoverageSimulator(scenario, mc, threads=options.threads)

        records = []
        skipped = 0
        for tier, band in CURVES:
            analytic = {}
            for gamma_db in settings.gamma_db:
                try:
                    analytic[gamma_db] = coverage(
                        tier,
                        band,
                        db_to_linear(gamma_db),
                        settings.delta_c,
                        settings.delta_w,
                        scenario,
                    )
                except DegenerateTierError:
                    analytic[gamma_db] = None

            estimates = {}
            if not options.analytic_only:
                try:
                    for estimate in simulator.simulate(
                        tier, band, settings.delta_c, settings.delta_w
                    ):
                        estimates[estimate.gamma_db] = estimate
                except DegenerateTierError as e:
                    skipped += 1
                    label = f"{tier.name.lower()}/{band.name.lower()}"
                    logger.warning(f"Skipping Monte Carlo for {label}: {e}")

            for gamma_db in settings.gamma_db:
                estimate = estimates.get(gamma_db)
                records.append(
                    {
                        "gamma_db": gamma_db,
                        "tier": tier,
                        "band": band,
                        "analytic": analytic[gamma_db],
                        "p_hat": estimate.p_hat if estimate else None,
                        "ci99": estimate.ci99 if estimate else None,
                        "ci_low": estimate.ci_low if estimate else None,
                        "ci_high": estimate.ci_high if estimate else None,
                        "n": estimate.n if estimate else None,
                    }
                )

        if skipped == len(CURVES):
            raise CommandError("No tier/band pair has a serving transmitter")

        outside = [
            r
            for r in records
            if r["p_hat"] is not None
            and r["analytic"] is not None
            and not r["ci_low"] <= r["analytic"] <= r["ci_high"]
        ]
        lines = [
            f"Coverage: {len(records)} points over {len(CURVES)} curves",
            f"  delta_c = {settings.delta_c:g}, delta_w = {settings.delta_w:g}",
        ]
        if not options.analytic_only:
            lines.append(f"  analytic value outside the 99% interval at {len(outside)} point(s)")

        plot_rows = [
            {**r, "tier": r["tier"].name.lower(), "band": r["band"].name.lower()}
            for r in records
            if r["analytic"] is not None
        ]
        figures = {"coverage": PlotRenderer().coverage(plot_rows)} if options.plot else {}
        return CommandResult(records=records, columns=COLUMNS, figures=figures, lines=lines)
