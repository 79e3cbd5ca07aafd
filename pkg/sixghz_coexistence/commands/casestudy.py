"""
Best-response dynamics on real transmitter locations with measured datarates.

Usage:
    sixghz-coexistence casestudy --config glasgow.toml --out glasgow_trace.csv
"""

import logging

from ..game import TRACE_COLUMNS, EmpiricalRateModel, run_dbra
from ..geodata import load_geodata
from ..geometry import Tier
from ..renderers.plot_renderer import PlotRenderer
from ..services.empirical import EmpiricalRateEvaluator
from ..streams import RandomStreams
from .base import BaseCommand, CommandError, CommandResult
from .game import MIXED_COLUMNS, mixed_strategy_rows, outcome_lines, outcome_summary

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    name = "casestudy"
    help = "Run the game on a geodata deployment with empirical datarates"
    seed_keys = ("game.seed", "casestudy.seed")

    def add_arguments(self, parser):
        parser.add_argument(
            "--n-users",
            type=int,
            help="Test users per entity and owned tier",
        )

    def overrides(self, options):
        overrides = super().overrides(options)
        if options.n_users is not None:
            overrides.append(f"casestudy.n_users={options.n_users}")
        return overrides

    def handle(self, loaded, options):
        settings = loaded.casestudy
        if settings is None:
            raise CommandError("The scenario has no [casestudy] table", returncode=1)
        if not loaded.entities:
            raise CommandError("The scenario defines no entity", returncode=1)

        deployment = load_geodata(
            settings.geodata,
            settings.bbox,
            [(e.v_c, e.v_w) for e in loaded.entities],
            seed=settings.seed,
            rho=loaded.scenario.rho,
        )
        evaluator = EmpiricalRateEvaluator(
            deployment,
            loaded.scenario,
            loaded.entities,
            settings.n_users,
            RandomStreams(settings.seed),
        )
        outcome = run_dbra(
            loaded.entities,
            loaded.scenario,
            loaded.game,
            rate_model=EmpiricalRateModel(evaluator),
            threads=options.threads,
        )

        summary = outcome_summary(outcome)
        summary["deployment"] = {
            tier.name.lower(): int((deployment.tier == tier).sum()) for tier in Tier
        }
        figures = {}
        if options.plot:
            figures["trace"] = PlotRenderer().trace(outcome.trace.rows(), len(outcome.entities))
        return CommandResult(
            records=outcome.trace.rows(),
            columns=TRACE_COLUMNS,
            tables={
                "mixed": (
                    MIXED_COLUMNS,
                    mixed_strategy_rows(outcome.entities, outcome.mixed_strategy),
                )
            },
            summary=summary,
            figures=figures,
            lines=[repr(deployment)] + outcome_lines(outcome),
        )
