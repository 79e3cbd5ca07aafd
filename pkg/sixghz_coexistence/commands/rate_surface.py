"""
Average datarates of a single entity over the (delta_c, delta_w) grid.

Usage:
    sixghz-coexistence rate-surface --config reference.toml --step 0.1 --out surface.csv
"""

import logging

from ..analytic import rate_surface
from ..renderers.plot_renderer import PlotRenderer
from ..units import bps_to_mbps
from .base import BaseCommand, CommandResult

logger = logging.getLogger(__name__)

COLUMNS = ["tier", "delta_c", "delta_w", "delta_i", "rate_mbps"]


def surface_extrema(cellular, wifi):
    """Global cellular argmax and, for every delta_c, the WiFi-maximizing delta_w."""
    best_cellular = max(cellular, key=lambda p: p.value)
    wifi_argmax = {}
    for point in wifi:
        current = wifi_argmax.get(point.delta_c)
        if current is None or point.value > current.value:
            wifi_argmax[point.delta_c] = point
    return best_cellular, wifi_argmax


class Command(BaseCommand):
    name = "rate-surface"
    help = "Cellular and WiFi datarates over the (delta_c, delta_w) grid"

    def add_arguments(self, parser):
        parser.add_argument(
            "--step",
            type=float,
            default=0.1,
            help="Grid step of delta_c and delta_w (1/step must be an integer)",
        )

    def handle(self, loaded, options):
        cellular, wifi = rate_surface(loaded.scenario, options.step)
        records = [
            {
                "tier": point.tier,
                "delta_c": point.delta_c,
                "delta_w": point.delta_w,
                "delta_i": point.delta_i,
                "rate_mbps": bps_to_mbps(point.value),
            }
            for point in cellular + wifi
        ]

        best_cellular, wifi_argmax = surface_extrema(cellular, wifi)
        summary = {
            "cellular_argmax": {
                "delta_c": best_cellular.delta_c,
                "delta_w": best_cellular.delta_w,
                "rate_mbps": bps_to_mbps(best_cellular.value),
            },
            "wifi_argmax_by_delta_c": [
                {
                    "delta_c": delta_c,
                    "delta_w": point.delta_w,
                    "rate_mbps": bps_to_mbps(point.value),
                }
                for delta_c, point in sorted(wifi_argmax.items())
            ],
        }
        lines = [
            f"Rate surface: {len(cellular)} grid points per tier",
            f"  cellular maximum {bps_to_mbps(best_cellular.value):.2f} Mbps at "
            f"(delta_c, delta_w) = ({best_cellular.delta_c:g}, {best_cellular.delta_w:g})",
        ]
        figures = {}
        if options.plot:
            plot_rows = [{**r, "tier": r["tier"].name.lower()} for r in records]
            figures["rate_surface"] = PlotRenderer().rate_surface(plot_rows)
        return CommandResult(
            records=records, columns=COLUMNS, summary=summary, figures=figures, lines=lines
        )
