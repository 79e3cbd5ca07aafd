"""
Best-response dynamics on the entities of a scenario file.

Usage:
    sixghz-coexistence game --config two_entity.toml --seed 7 --out trace.csv
    sixghz-coexistence game --config two_entity.toml --sweep --out rcp.csv
"""

import logging

from ..game import TRACE_COLUMNS, run_dbra, verify_equilibrium
from ..renderers.plot_renderer import PlotRenderer
from ..services.experiments import RateCoverageSweep
from ..units import bps_to_mbps
from .base import BaseCommand, CommandError, CommandResult

logger = logging.getLogger(__name__)

MIXED_COLUMNS = ["entity", "name", "delta_c", "delta_w", "probability"]

RCP_COLUMNS = ["sigma_hat_c_mbps", "sigma_hat_w_mbps", "tier", "rate_mbps", "rcp"]


def mixed_strategy_rows(entities, mixed_strategy):
    rows = []
    for index, (entity, strategy) in enumerate(zip(entities, mixed_strategy)):
        for action, probability in strategy.items():
            rows.append(
                {
                    "entity": index,
                    "name": entity.label,
                    "delta_c": action.delta_c,
                    "delta_w": action.delta_w,
                    "probability": probability,
                }
            )
    return rows


def outcome_summary(outcome):
    """JSON-ready description of a game outcome."""
    return {
        "outcome": "converged" if outcome.converged else "not_terminated",
        "activations": len(outcome.trace),
        "burn_in": outcome.burn_in,
        "entities": [
            {
                "name": entity.label,
                "v_c": entity.v_c,
                "v_w": entity.v_w,
                "delta_c": entity.action.delta_c,
                "delta_w": entity.action.delta_w,
                "rate_c_mbps": bps_to_mbps(rate_c),
                "rate_w_mbps": bps_to_mbps(rate_w),
                "thresholds_met": met,
            }
            for entity, (rate_c, rate_w), met in zip(
                outcome.entities, outcome.rates, outcome.thresholds_met()
            )
        ],
    }


def outcome_lines(outcome):
    lines = [str(outcome.summary)]
    for entity, (rate_c, rate_w), met in zip(
        outcome.entities, outcome.rates, outcome.thresholds_met()
    ):
        lines.append(
            f"  {entity.label}: action {entity.action}, "
            f"cellular {bps_to_mbps(rate_c):.2f} Mbps, WiFi {bps_to_mbps(rate_w):.2f} Mbps, "
            f"thresholds {'met' if met else 'NOT met'}"
        )
    return lines


class Command(BaseCommand):
    name = "game"
    help = "Run the distributed best-response dynamics"
    seed_keys = ("game.seed",)

    def add_arguments(self, parser):
        parser.add_argument(
            "--sweep",
            action="store_true",
            help="Rate coverage sweep over random two-entity share draws instead of one run",
        )
        parser.add_argument(
            "--initial-actions",
            action="store_true",
            help="Start from the delta_c/delta_w of the scenario entities, not a random profile",
        )

    def handle(self, loaded, options):
        if options.sweep:
            return self._sweep(loaded, options)
        if not loaded.entities:
            raise CommandError("The scenario defines no entity", returncode=1)

        initial = [e.action for e in loaded.entities] if options.initial_actions else None
        outcome = run_dbra(
            loaded.entities,
            loaded.scenario,
            loaded.game,
            threads=options.threads,
            initial=initial,
        )
        summary = outcome_summary(outcome)
        if outcome.converged:
            summary["deviating_entities"] = verify_equilibrium(
                outcome.entities, loaded.scenario, loaded.game.mu, threads=options.threads
            )

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
            lines=outcome_lines(outcome),
        )

    def _sweep(self, loaded, options):
        settings = loaded.sweep
        sweep = RateCoverageSweep(
            loaded.scenario,
            loaded.game,
            settings.thresholds,
            theta_ratio=settings.theta_ratio,
            draws=settings.draws,
            threads=options.threads,
        )
        records = [point.as_row() for point in sweep.run(settings.rate_grid)]
        figures = {"rate_coverage": PlotRenderer().rate_coverage(records)} if options.plot else {}
        lines = [
            f"Rate coverage sweep: {len(settings.thresholds)} threshold pair(s), "
            f"{settings.draws} share draws each"
        ]
        return CommandResult(records=records, columns=RCP_COLUMNS, figures=figures, lines=lines)
