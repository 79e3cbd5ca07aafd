"""
Shared plumbing of the subcommands.

A command declares its arguments, turns a loaded scenario into a ``CommandResult`` and leaves
the writing to ``BaseCommand.execute``: the main result file, optional side tables and summary,
SVG figures, a PDF report and the run-metadata JSON.
"""

import json
import logging
import platform
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy

from .. import __version__
from ..scenario_io import LoadedScenario, format_value, load_scenario, write_results

logger = logging.getLogger(__name__)


class CommandError(Exception):
    """A subcommand failed; ``returncode`` is the process exit status."""

    def __init__(self, message: str, returncode: int = 2):
        super().__init__(message)
        self.returncode = returncode


@dataclass
class CommandResult:
    """
    What a command produced.

    Attributes:
        records: Rows of the main result file
        columns: Column order of ``records``
        tables: Side tables, written next to the main file as ``<stem>.<name><suffix>``
        summary: Written as ``<stem>.summary.json`` when not empty
        figures: SVG documents by file stem, written under ``--plot``
        lines: Human-readable summary printed on stdout
    """

    records: List[Dict[str, Any]]
    columns: Sequence[str]
    tables: Dict[str, Tuple[Sequence[str], List[Dict[str, Any]]]] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)
    figures: Dict[str, bytes] = field(default_factory=dict)
    lines: List[str] = field(default_factory=list)


class BaseCommand:
    name = ""
    help = ""
    # Seed keys the --seed flag overrides
    seed_keys: Sequence[str] = ()

    def __init__(self, stdout=None):
        self.stdout = stdout or sys.stdout

    def write(self, text: str = ""):
        self.stdout.write(text + "\n")

    def add_common_arguments(self, parser):
        parser.add_argument(
            "--config",
            type=str,
            help="Scenario TOML file, or the name of a shipped scenario",
        )
        parser.add_argument(
            "--out",
            type=str,
            default=f"{self.name}.csv",
            help="Result file (.csv, .json or .xlsx)",
        )
        parser.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="SECTION.KEY=VALUE",
            help="Override one scenario value (repeatable)",
        )
        parser.add_argument(
            "--seed",
            type=int,
            help="Seed of every random stream of the run",
        )
        parser.add_argument(
            "--plot",
            type=str,
            metavar="DIR",
            help="Directory for SVG figures",
        )
        parser.add_argument(
            "--report",
            type=str,
            metavar="PDF",
            help="Write a PDF run report",
        )

    def add_arguments(self, parser):
        pass

    def overrides(self, options) -> List[str]:
        overrides = list(options.overrides)
        if options.seed is not None:
            overrides.extend(f"{key}={options.seed}" for key in self.seed_keys)
        return overrides

    def handle(self, loaded: LoadedScenario, options) -> CommandResult:
        raise NotImplementedError

    def execute(self, options, argv: Sequence[str] = ()) -> int:
        started = time.perf_counter()
        loaded = load_scenario(options.config, self.overrides(options))
        logger.info(f"Running {self.name} ({loaded.mode} scenario)")
        result = self.handle(loaded, options)

        out = Path(options.out)
        outputs = [
            write_results(result.records, out, columns=result.columns, config=loaded.resolved)
        ]
        for name, (columns, rows) in result.tables.items():
            side = out.with_name(f"{out.stem}.{name}{out.suffix or '.csv'}")
            outputs.append(write_results(rows, side, columns=columns, config=loaded.resolved))
        if result.summary:
            summary_path = out.with_name(f"{out.stem}.summary.json")
            summary_path.write_text(
                json.dumps(format_value(result.summary), indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )
            outputs.append(summary_path)
        if options.plot:
            outputs.extend(self._write_figures(result.figures, Path(options.plot)))
        if options.report:
            outputs.append(self._write_report(result, loaded, Path(options.report)))

        for line in result.lines:
            self.write(line)

        meta_path = out.with_name(f"{out.stem}.meta.json")
        meta = {
            "command": self.name,
            "argv": list(argv),
            "config": format_value(loaded.resolved),
            "warnings": loaded.warnings,
            "versions": {
                "sixghz_coexistence": __version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
            },
            "outputs": [str(p) for p in outputs],
            "wall_time_s": round(time.perf_counter() - started, 3),
        }
        meta_path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
        return 0

    def _write_figures(self, figures: Dict[str, bytes], directory: Path) -> List[Path]:
        directory.mkdir(parents=True, exist_ok=True)
        written = []
        for stem, svg in figures.items():
            path = directory / f"{stem}.svg"
            path.write_bytes(svg)
            written.append(path)
        logger.info(f"Wrote {len(written)} figure(s) to {directory}")
        return written

    def _write_report(self, result: CommandResult, loaded: LoadedScenario, path: Path) -> Path:
        from ..renderers.excel_renderer import flatten_config
        from ..renderers.pdf_renderer import PDFRenderer

        columns = list(result.columns)
        sections = [
            (
                f"{self.name} results",
                columns,
                [[format_value(r.get(c)) for c in columns] for r in result.records],
            )
        ]
        for name, (table_columns, rows) in result.tables.items():
            table_rows = [[format_value(r.get(c)) for c in table_columns] for r in rows]
            sections.append((name, list(table_columns), table_rows))
        content = PDFRenderer(f"sixghz-coexistence {self.name}").render(
            sections, flatten_config(format_value(loaded.resolved)), result.figures.values()
        )
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(content)
        return path
