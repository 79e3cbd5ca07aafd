"""
D-BRA against the RANDOM baseline over random two-entity share draws.

Usage:
    sixghz-coexistence compare-random --config two_entity.toml --runs 30 --out compare.csv
"""

import logging

from ..geometry import Tier
from ..renderers.plot_renderer import PlotRenderer
from ..services.experiments import compare_with_random
from .base import BaseCommand, CommandResult

logger = logging.getLogger(__name__)

COLUMNS = [
    "run",
    "theta_ratio",
    "dbra_rate_c",
    "dbra_rate_w",
    "random_rate_c",
    "random_rate_w",
]

SUMMARY_COLUMNS = ["tier", "dbra_mean_mbps", "random_mean_mbps", "improvement_pct"]


class Command(BaseCommand):
    name = "compare-random"
    help = "Compare best-response equilibria with random band fractions"
    seed_keys = ("game.seed",)

    def add_arguments(self, parser):
        parser.add_argument(
            "--runs",
            type=int,
            help="Number of share draws",
        )

    def overrides(self, options):
        overrides = super().overrides(options)
        if options.runs is not None:
            overrides.append(f"compare_random.runs={options.runs}")
        return overrides

    def handle(self, loaded, options):
        settings = loaded.compare_random
        result = compare_with_random(
            loaded.scenario,
            loaded.game,
            runs=settings.runs,
            theta_ratios=settings.ratios,
            sigma_hat_c=settings.sigma_hat_c,
            sigma_hat_w=settings.sigma_hat_w,
            share_min=settings.share_min,
            share_max=settings.share_max,
            threads=options.threads,
        )
        summary_rows = result.summary_rows()
        figures = {"comparison": PlotRenderer().comparison(result.runs)} if options.plot else {}
        return CommandResult(
            records=result.runs,
            columns=COLUMNS,
            tables={"means": (SUMMARY_COLUMNS, summary_rows)},
            summary={
                "runs": len(result.runs),
                "converged_runs": result.converged,
                "improvement_pct": {
                    "cellular": result.improvement(Tier.CELLULAR),
                    "wifi": result.improvement(Tier.WIFI),
                },
            },
            figures=figures,
            lines=[str(result)],
        )
