"""
Scenario files and result files.

Scenario files are TOML documents (schema in README.md). Values are written in engineering
units (km⁻², dBm or W, MHz, dB, Mbps) and converted to the SI-linear units of ``models`` here.
``ScenarioForm`` validates a raw document table by table and collects every field error before
giving up, so a user sees all problems of a file at once.
"""

import copy
import json
import logging
import math
import tomllib
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .exceptions import ParameterError, ScenarioValidationError
from .geodata import BoundingBox
from .models import (
    SELF_INTERFERENCE_CONVENTIONS,
    WIFI_ASSOCIATION_MODES,
    ActionVector,
    Entity,
    GameConfig,
    McConfig,
    Scenario,
    Window,
    check_shares,
)
from .units import (
    db_to_linear,
    dbm_to_watts,
    mbps_to_bps,
    mhz_to_hz,
    parse_db_range,
    per_km2_to_per_m2,
    thermal_noise,
    watts_to_dbm,
)

logger = logging.getLogger(__name__)

MODES = ("analytic", "montecarlo", "casestudy")

SIGNIFICANT_DIGITS = 9

DEFAULT_GAMMA_DB = tuple(float(g) for g in range(-10, 21))

SECTIONS = {
    "scenario": {
        "lambda_z_per_km2",
        "lambda_c_per_km2",
        "lambda_w_per_km2",
        "rho_m",
        "rho_w_m",
        "p_z_w",
        "p_c_w",
        "p_w_w",
        "p_z_dbm",
        "p_c_dbm",
        "p_w_dbm",
        "b_u_mhz",
        "b_cl_mhz",
        "b_wl_mhz",
        "alpha",
        "gamma_db",
        "self_interference",
        "noise",
    },
    "scenario.noise": {
        "model",
        "noise_figure_db",
        "bandwidth_mhz",
        "kappa_c_dbm",
        "kappa_w_dbm",
        "kappa_c_w",
        "kappa_w_w",
    },
    "window": {"radius_m"},
    "coverage": {"delta_c", "delta_w", "gamma_db"},
    "montecarlo": {"n_realizations", "seed", "redraw_factor", "wifi_association"},
    "game": {
        "mu",
        "epsilon",
        "max_activations",
        "seed",
        "burn_in_fraction",
        "stop_on_convergence",
    },
    "entities": {
        "name",
        "v_c",
        "v_w",
        "sigma_hat_c_mbps",
        "sigma_hat_w_mbps",
        "theta_c",
        "theta_w",
        "delta_c",
        "delta_w",
    },
    "compare_random": {
        "runs",
        "ratios",
        "share_min",
        "share_max",
        "sigma_hat_c_mbps",
        "sigma_hat_w_mbps",
    },
    "sweep": {"thresholds_mbps", "theta_ratio", "draws", "rate_grid_mbps"},
    "casestudy": {"geodata", "lat_min", "lat_max", "lon_min", "lon_max", "n_users", "seed"},
}

# Parameter set of the single-entity rate study; every key may be overridden by a file.
DEFAULTS = {
    "mode": "analytic",
    "scenario": {
        "lambda_z_per_km2": 1.0,
        "lambda_c_per_km2": 25.0,
        "lambda_w_per_km2": 100.0,
        "rho_m": 200.0,
        "rho_w_m": 50.0,
        "p_z_w": 1.0,
        "p_c_w": 2.0,
        "p_w_w": 1.0,
        "b_u_mhz": 240.0,
        "b_cl_mhz": 80.0,
        "b_wl_mhz": 80.0,
        "alpha": 4.0,
        "gamma_db": 10.0,
        "self_interference": "laplace",
        "noise": {"model": "none", "noise_figure_db": 10.0},
    },
    "window": {"radius_m": 5000.0},
    "coverage": {"delta_c": 0.7, "delta_w": 0.2, "gamma_db": "-10:20:1"},
    "montecarlo": {
        "n_realizations": 2000,
        "seed": 0,
        "redraw_factor": 100,
        "wifi_association": "serving-distance",
    },
    "game": {
        "mu": 0.1,
        "epsilon": 0.0,
        "seed": 0,
        "burn_in_fraction": 0.2,
        "stop_on_convergence": True,
    },
    "entities": [],
    "compare_random": {
        "runs": 30,
        "ratios": [5.0, 6.0, 7.0],
        "share_min": 0.1,
        "share_max": 0.9,
        "sigma_hat_c_mbps": 30.0,
        "sigma_hat_w_mbps": 100.0,
    },
    "sweep": {
        "thresholds_mbps": [[30.0, 100.0], [30.0, 180.0], [50.0, 100.0], [50.0, 180.0]],
        "theta_ratio": 7.0,
        "draws": 20,
        "rate_grid_mbps": "0:300:10",
    },
}

# Parameter ranges considered realistic for 6-GHz deployments: (low, high), inclusive.
PARAMETER_RANGES = {
    "b_u_mhz": (40.0, 320.0),
    "b_cl_mhz": (20.0, 100.0),
    "b_wl_mhz": (20.0, 160.0),
    "p_z_dbm": (-math.inf, 30.0),
    "p_c_dbm": (-math.inf, 36.0),
    "p_w_dbm": (-math.inf, 36.0),
    "lambda_z_per_km2": (1.0, 1.0),
    "lambda_c_per_km2": (25.0, 250.0),
    "lambda_w_per_km2": (100.0, 400.0),
    "rho_m": (200.0, 200.0),
    "rho_w_m": (50.0, 50.0),
}


@dataclass(frozen=True)
class CoverageSettings:
    delta_c: float
    delta_w: float
    gamma_db: Tuple[float, ...]


@dataclass(frozen=True)
class CompareRandomSettings:
    runs: int
    ratios: Tuple[float, ...]
    share_min: float
    share_max: float
    sigma_hat_c: float
    sigma_hat_w: float


@dataclass(frozen=True)
class SweepSettings:
    thresholds: Tuple[Tuple[float, float], ...]
    theta_ratio: float
    draws: int
    rate_grid: Tuple[float, ...]


@dataclass(frozen=True)
class CaseStudySettings:
    geodata: Path
    bbox: BoundingBox
    n_users: int
    seed: int


@dataclass
class LoadedScenario:
    """Everything a scenario file resolves to, plus the resolved document for the run log."""

    mode: str
    scenario: Scenario
    entities: List[Entity]
    game: GameConfig
    montecarlo: McConfig
    coverage: CoverageSettings
    compare_random: CompareRandomSettings
    sweep: SweepSettings
    casestudy: Optional[CaseStudySettings]
    resolved: Dict[str, Any]
    path: Optional[Path] = None
    warnings: List[str] = field(default_factory=list)


def data_path(name: str) -> Path:
    """Path of a file shipped in the ``data`` package."""
    return Path(str(resources.files("sixghz_coexistence.data").joinpath(name)))


def resolve_config_path(name) -> Path:
    """``name`` itself when it exists, else the shipped scenario of that name."""
    path = Path(name)
    if path.exists():
        return path
    shipped = data_path(path.name)
    if shipped.exists():
        return shipped
    raise ScenarioValidationError({"config": [f"File not found: {name}"]})


def _merge(defaults: Dict[str, Any], document: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(defaults)
    for key, value in document.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def parse_override(text: str) -> Tuple[List[str], Any]:
    """
    Split ``section.key=value``; the value is read as a TOML literal, else kept as a string.

    Raises:
        ScenarioValidationError: If the text has no '=' or no dotted key
    """
    key, sep, raw = text.partition("=")
    path = [part.strip() for part in key.strip().split(".")]
    if not sep or not all(path):
        raise ScenarioValidationError({"override": [f"Expected section.key=value, got '{text}'"]})
    try:
        value = tomllib.loads(f"value = {raw.strip()}")["value"]
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    return path, value


def apply_override(document: Dict[str, Any], text: str) -> Dict[str, Any]:
    """Set one ``section.key=value`` override on a raw document; the key must be in the schema."""
    path, value = parse_override(text)
    if len(path) == 1:
        if path[0] != "mode":
            raise ScenarioValidationError({text: [f"Unknown key '{path[0]}'"]})
        document["mode"] = value
        return document
    section, key = ".".join(path[:-1]), path[-1]
    if section not in SECTIONS or section == "entities" or key not in SECTIONS[section]:
        raise ScenarioValidationError({text: [f"Unknown key '{'.'.join(path)}'"]})
    target = document
    for part in path[:-1]:
        target = target.setdefault(part, {})
    target[key] = value
    return document


def _range(value, name: str) -> Tuple[float, ...]:
    if isinstance(value, str):
        try:
            return tuple(parse_db_range(value))
        except ValueError as e:
            raise ParameterError(f"{name}: {e}")
    if isinstance(value, (list, tuple)) and value:
        return tuple(float(v) for v in value)
    raise ParameterError(f"{name} must be a 'start:stop:step' string or a non-empty list")


class ScenarioForm:
    """
    Validation of a raw scenario document.

    Each ``clean_<section>`` method returns the converted values of one table and records
    field errors with ``add_error``; ``is_valid`` runs them all.
    """

    def __init__(self, data: Dict[str, Any], base_dir: Optional[Path] = None):
        defaults = copy.deepcopy(DEFAULTS)
        given = data.get("scenario", {}) if isinstance(data.get("scenario"), dict) else {}
        for tier in ("z", "c", "w"):
            if f"p_{tier}_dbm" in given:
                defaults["scenario"].pop(f"p_{tier}_w")
        self.data = _merge(defaults, data)
        self.base_dir = base_dir or Path(".")
        self.errors: Dict[str, List[str]] = {}
        self.cleaned_data: Dict[str, Any] = {}
        self.warnings: List[str] = []

    def add_error(self, name: str, message: str):
        self.errors.setdefault(name, []).append(message)

    def _number(self, section: str, key: str, table: Dict[str, Any], kind=float):
        value = table.get(key)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.add_error(f"{section}.{key}", f"Expected a number, got {value!r}")
            return None
        if kind is int and value != int(value):
            self.add_error(f"{section}.{key}", f"Expected an integer, got {value!r}")
            return None
        return kind(value)

    def _unknown_keys(self, section: str, table: Dict[str, Any], allowed=None):
        allowed = SECTIONS[section] if allowed is None else allowed
        for key in sorted(set(table) - allowed):
            self.add_error(f"{section}.{key}", "Unknown key")

    def clean_mode(self):
        mode = self.data.get("mode")
        if mode not in MODES:
            self.add_error("mode", f"Must be one of {', '.join(MODES)}, got {mode!r}")
        return mode

    def _power(self, table: Dict[str, Any], tier: str) -> Optional[float]:
        watts_key, dbm_key = f"p_{tier}_w", f"p_{tier}_dbm"
        if dbm_key in table and watts_key in table:
            self.add_error(f"scenario.{dbm_key}", f"Give either {watts_key} or {dbm_key}")
            return None
        if dbm_key in table:
            dbm = self._number("scenario", dbm_key, table)
            return None if dbm is None else dbm_to_watts(dbm)
        return self._number("scenario", watts_key, table)

    def clean_noise(self, table: Dict[str, Any], b_u: Optional[float]) -> Tuple[float, float]:
        self._unknown_keys("scenario.noise", table)
        model = table.get("model", "none")
        if model == "none":
            return 0.0, 0.0
        if model == "thermal":
            figure = self._number("scenario.noise", "noise_figure_db", table)
            if "bandwidth_mhz" in table:
                bandwidth = self._number("scenario.noise", "bandwidth_mhz", table)
            else:
                bandwidth = b_u
            if figure is None or bandwidth is None:
                return 0.0, 0.0
            try:
                noise = thermal_noise(mhz_to_hz(bandwidth), figure)
            except ValueError as e:
                self.add_error("scenario.noise.bandwidth_mhz", str(e))
                return 0.0, 0.0
            return noise, noise
        if model == "explicit":
            result = []
            for tier in ("c", "w"):
                if f"kappa_{tier}_dbm" in table:
                    dbm = self._number("scenario.noise", f"kappa_{tier}_dbm", table)
                    result.append(0.0 if dbm is None else dbm_to_watts(dbm))
                else:
                    watts = table.get(f"kappa_{tier}_w", 0.0)
                    table = {**table, f"kappa_{tier}_w": watts}
                    value = self._number("scenario.noise", f"kappa_{tier}_w", table)
                    result.append(value or 0.0)
            return result[0], result[1]
        self.add_error("scenario.noise.model", f"Must be none, thermal or explicit, got {model!r}")
        return 0.0, 0.0

    def clean_scenario(self) -> Optional[Scenario]:
        table = self.data["scenario"]
        self._unknown_keys("scenario", table)
        values = {}
        for key in ("lambda_z", "lambda_c", "lambda_w"):
            density = self._number("scenario", f"{key}_per_km2", table)
            values[key] = None if density is None else per_km2_to_per_m2(density)
        for key, name in (("rho", "rho_m"), ("rho_w", "rho_w_m"), ("alpha", "alpha")):
            values[key] = self._number("scenario", name, table)
        for tier in ("z", "c", "w"):
            values[f"p_{tier}"] = self._power(table, tier)
        for key in ("b_u", "b_cl", "b_wl"):
            bandwidth = self._number("scenario", f"{key}_mhz", table)
            values[key] = None if bandwidth is None else mhz_to_hz(bandwidth)
        gamma_db = self._number("scenario", "gamma_db", table)
        values["gamma"] = None if gamma_db is None else db_to_linear(gamma_db)
        convention = table.get("self_interference")
        if convention not in SELF_INTERFERENCE_CONVENTIONS:
            self.add_error(
                "scenario.self_interference",
                f"Must be one of {', '.join(SELF_INTERFERENCE_CONVENTIONS)}, got {convention!r}",
            )
        values["self_interference"] = convention
        b_u_mhz = table.get("b_u_mhz") if isinstance(table.get("b_u_mhz"), (int, float)) else None
        values["noise_c"], values["noise_w"] = self.clean_noise(table.get("noise", {}), b_u_mhz)

        if any(v is None for v in values.values()) or "scenario.self_interference" in self.errors:
            return None
        try:
            scenario = Scenario(**values)
        except ParameterError as e:
            self.add_error("scenario", str(e))
            return None
        self.warnings.extend(range_warnings(table))
        return scenario

    def clean_window(self) -> Optional[Window]:
        table = self.data["window"]
        self._unknown_keys("window", table)
        radius = self._number("window", "radius_m", table)
        if radius is None:
            return None
        try:
            return Window(radius)
        except ParameterError as e:
            self.add_error("window.radius_m", str(e))
            return None

    def clean_coverage(self) -> Optional[CoverageSettings]:
        table = self.data["coverage"]
        self._unknown_keys("coverage", table)
        delta_c = self._number("coverage", "delta_c", table)
        delta_w = self._number("coverage", "delta_w", table)
        try:
            gamma_db = _range(table.get("gamma_db"), "coverage.gamma_db")
        except ParameterError as e:
            self.add_error("coverage.gamma_db", str(e))
            return None
        for name, value in (("delta_c", delta_c), ("delta_w", delta_w)):
            if value is not None and not 0 <= value <= 1:
                self.add_error(f"coverage.{name}", f"Must lie in [0, 1], got {value}")
        if delta_c is None or delta_w is None or "coverage.delta_c" in self.errors:
            return None
        if "coverage.delta_w" in self.errors:
            return None
        return CoverageSettings(delta_c, delta_w, gamma_db)

    def clean_montecarlo(self, window: Optional[Window], gamma_db) -> Optional[McConfig]:
        table = self.data["montecarlo"]
        self._unknown_keys("montecarlo", table)
        n = self._number("montecarlo", "n_realizations", table, int)
        seed = self._number("montecarlo", "seed", table, int)
        redraw = self._number("montecarlo", "redraw_factor", table, int)
        association = table.get("wifi_association")
        if association not in WIFI_ASSOCIATION_MODES:
            self.add_error(
                "montecarlo.wifi_association",
                f"Must be one of {', '.join(WIFI_ASSOCIATION_MODES)}, got {association!r}",
            )
            return None
        if None in (n, seed, redraw) or window is None:
            return None
        try:
            return McConfig(
                n_realizations=n,
                window=window,
                seed=seed,
                gamma_db_grid=gamma_db or DEFAULT_GAMMA_DB,
                redraw_factor=redraw,
                wifi_association=association,
            )
        except ParameterError as e:
            self.add_error("montecarlo", str(e))
            return None

    def clean_game(self) -> Optional[GameConfig]:
        table = self.data["game"]
        self._unknown_keys("game", table)
        mu = self._number("game", "mu", table)
        epsilon = self._number("game", "epsilon", table)
        seed = self._number("game", "seed", table, int)
        burn_in = self._number("game", "burn_in_fraction", table)
        max_activations = None
        if table.get("max_activations") is not None:
            max_activations = self._number("game", "max_activations", table, int)
        stop = table.get("stop_on_convergence")
        if not isinstance(stop, bool):
            self.add_error("game.stop_on_convergence", f"Expected true or false, got {stop!r}")
        if None in (mu, epsilon, seed, burn_in) or not isinstance(stop, bool):
            return None
        try:
            return GameConfig(
                mu=mu,
                epsilon=epsilon,
                max_activations=max_activations,
                seed=seed,
                burn_in_fraction=burn_in,
                stop_on_convergence=stop,
            )
        except ParameterError as e:
            self.add_error("game", str(e))
            return None

    def clean_entities(self) -> List[Entity]:
        tables = self.data.get("entities") or []
        if not isinstance(tables, list):
            self.add_error("entities", "Expected an array of tables ([[entities]])")
            return []
        entities = []
        for index, table in enumerate(tables):
            section = f"entities[{index}]"
            self._unknown_keys(section, table, SECTIONS["entities"])
            table = {
                "sigma_hat_c_mbps": 0.0,
                "sigma_hat_w_mbps": 0.0,
                "theta_c": 1.0,
                "theta_w": 1.0,
                "delta_c": 0.0,
                "delta_w": 0.0,
                **table,
            }
            values = {
                key: self._number(section, key, table)
                for key in (
                    "v_c",
                    "v_w",
                    "sigma_hat_c_mbps",
                    "sigma_hat_w_mbps",
                    "theta_c",
                    "theta_w",
                    "delta_c",
                    "delta_w",
                )
            }
            if any(v is None for v in values.values()):
                continue
            try:
                entities.append(
                    Entity(
                        v_c=values["v_c"],
                        v_w=values["v_w"],
                        sigma_hat_c=mbps_to_bps(values["sigma_hat_c_mbps"]),
                        sigma_hat_w=mbps_to_bps(values["sigma_hat_w_mbps"]),
                        theta_c=values["theta_c"],
                        theta_w=values["theta_w"],
                        action=ActionVector(values["delta_c"], values["delta_w"]),
                        name=str(table.get("name", f"entity-{index + 1}")),
                    )
                )
            except ParameterError as e:
                self.add_error(section, str(e))
        if entities and len(entities) == len(tables):
            try:
                check_shares(entities)
            except ParameterError as e:
                self.add_error("entities", str(e))
        return entities

    def clean_compare_random(self) -> Optional[CompareRandomSettings]:
        table = self.data["compare_random"]
        self._unknown_keys("compare_random", table)
        runs = self._number("compare_random", "runs", table, int)
        share_min = self._number("compare_random", "share_min", table)
        share_max = self._number("compare_random", "share_max", table)
        sigma_c = self._number("compare_random", "sigma_hat_c_mbps", table)
        sigma_w = self._number("compare_random", "sigma_hat_w_mbps", table)
        ratios = table.get("ratios")
        if not isinstance(ratios, list) or not ratios or not all(
            isinstance(r, (int, float)) and r > 0 for r in ratios
        ):
            self.add_error("compare_random.ratios", "Expected a non-empty list of positive numbers")
            return None
        if None in (runs, share_min, share_max, sigma_c, sigma_w):
            return None
        if runs < 1:
            self.add_error("compare_random.runs", f"Must be >= 1, got {runs}")
        if not 0 <= share_min <= share_max <= 1:
            self.add_error("compare_random.share_min", "Need 0 <= share_min <= share_max <= 1")
        if "compare_random.runs" in self.errors or "compare_random.share_min" in self.errors:
            return None
        return CompareRandomSettings(
            runs=runs,
            ratios=tuple(float(r) for r in ratios),
            share_min=share_min,
            share_max=share_max,
            sigma_hat_c=mbps_to_bps(sigma_c),
            sigma_hat_w=mbps_to_bps(sigma_w),
        )

    def clean_sweep(self) -> Optional[SweepSettings]:
        table = self.data["sweep"]
        self._unknown_keys("sweep", table)
        theta_ratio = self._number("sweep", "theta_ratio", table)
        draws = self._number("sweep", "draws", table, int)
        pairs = table.get("thresholds_mbps")
        if not isinstance(pairs, list) or not pairs or not all(
            isinstance(p, list) and len(p) == 2 for p in pairs
        ):
            self.add_error("sweep.thresholds_mbps", "Expected a list of [cellular, wifi] pairs")
            return None
        try:
            rate_grid = _range(table.get("rate_grid_mbps"), "sweep.rate_grid_mbps")
        except ParameterError as e:
            self.add_error("sweep.rate_grid_mbps", str(e))
            return None
        if theta_ratio is None or draws is None:
            return None
        return SweepSettings(
            thresholds=tuple((mbps_to_bps(c), mbps_to_bps(w)) for c, w in pairs),
            theta_ratio=theta_ratio,
            draws=draws,
            rate_grid=tuple(mbps_to_bps(r) for r in rate_grid),
        )

    def clean_casestudy(self) -> Optional[CaseStudySettings]:
        table = self.data.get("casestudy")
        if table is None:
            if self.data.get("mode") == "casestudy":
                self.add_error("casestudy", "Required in casestudy mode")
            return None
        self._unknown_keys("casestudy", table)
        table = {"n_users": 200, "seed": 0, **table}
        bounds = {
            key: self._number("casestudy", key, table)
            for key in ("lat_min", "lat_max", "lon_min", "lon_max")
        }
        n_users = self._number("casestudy", "n_users", table, int)
        seed = self._number("casestudy", "seed", table, int)
        geodata = table.get("geodata")
        if not isinstance(geodata, str) or not geodata:
            self.add_error("casestudy.geodata", "Expected a CSV path")
            return None
        path = Path(geodata)
        if not path.is_absolute():
            path = self.base_dir / path
        if not path.exists():
            self.add_error("casestudy.geodata", f"File not found: {path}")
        if any(v is None for v in bounds.values()) or n_users is None or seed is None:
            return None
        if n_users < 1:
            self.add_error("casestudy.n_users", f"Must be >= 1, got {n_users}")
        try:
            bbox = BoundingBox(**bounds)
        except ParameterError as e:
            self.add_error("casestudy", str(e))
            return None
        if "casestudy.geodata" in self.errors or "casestudy.n_users" in self.errors:
            return None
        return CaseStudySettings(geodata=path, bbox=bbox, n_users=n_users, seed=seed)

    def is_valid(self) -> bool:
        for section in sorted(set(self.data) - set(SECTIONS) - {"mode"}):
            self.add_error(section, "Unknown section")
        mode = self.clean_mode()
        scenario = self.clean_scenario()
        window = self.clean_window()
        coverage = self.clean_coverage()
        self.cleaned_data = {
            "mode": mode,
            "scenario": scenario,
            "window": window,
            "coverage": coverage,
            "montecarlo": self.clean_montecarlo(window, coverage.gamma_db if coverage else None),
            "game": self.clean_game(),
            "entities": self.clean_entities(),
            "compare_random": self.clean_compare_random(),
            "sweep": self.clean_sweep(),
            "casestudy": self.clean_casestudy(),
        }
        return not self.errors


def range_warnings(table: Dict[str, Any]) -> List[str]:
    """Messages for scenario values outside the realistic parameter ranges."""
    values = dict(table)
    for tier in ("z", "c", "w"):
        if f"p_{tier}_dbm" not in values and isinstance(values.get(f"p_{tier}_w"), (int, float)):
            if values[f"p_{tier}_w"] > 0:
                values[f"p_{tier}_dbm"] = watts_to_dbm(values[f"p_{tier}_w"])
    messages = []
    for key, (low, high) in PARAMETER_RANGES.items():
        value = values.get(key)
        if isinstance(value, (int, float)) and not low <= value <= high:
            bounds = f"<= {high:g}" if low == -math.inf else f"[{low:g}, {high:g}]"
            messages.append(f"scenario.{key} = {value:g} is outside the usual range {bounds}")
    return messages


def load_scenario(path=None, overrides: Sequence[str] = ()) -> LoadedScenario:
    """
    Read, override, validate and convert a scenario file.

    ``path`` None loads the built-in defaults. Values outside the usual parameter ranges only
    produce warnings.

    Raises:
        ScenarioValidationError: On a TOML syntax error, an unknown key or an invalid value
    """
    document: Dict[str, Any] = {}
    base_dir = Path(".")
    if path is not None:
        path = resolve_config_path(path)
        base_dir = path.parent
        try:
            with path.open("rb") as handle:
                document = tomllib.load(handle)
        except tomllib.TOMLDecodeError as e:
            raise ScenarioValidationError({str(path): [f"TOML syntax error: {e}"]})
    for text in overrides:
        apply_override(document, text)

    form = ScenarioForm(document, base_dir=base_dir)
    if not form.is_valid():
        raise ScenarioValidationError(form.errors)
    for message in form.warnings:
        logger.warning(message)

    cleaned = form.cleaned_data
    return LoadedScenario(
        mode=cleaned["mode"],
        scenario=cleaned["scenario"],
        entities=cleaned["entities"],
        game=cleaned["game"],
        montecarlo=cleaned["montecarlo"],
        coverage=cleaned["coverage"],
        compare_random=cleaned["compare_random"],
        sweep=cleaned["sweep"],
        casestudy=cleaned["casestudy"],
        resolved=form.data,
        path=path,
        warnings=list(form.warnings),
    )


def format_value(value):
    """Value as written to result files: floats to 9 significant digits, enums by name."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Enum):
        return value.name.lower()
    if isinstance(value, ActionVector):
        return str(value)
    if isinstance(value, float):
        return float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, dict):
        return {str(k): format_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [format_value(v) for v in value]
    if hasattr(value, "item"):
        return format_value(value.item())
    return value


def _columns(records: Sequence[Dict[str, Any]], columns: Optional[Sequence[str]]) -> List[str]:
    if columns is not None:
        return list(columns)
    ordered: List[str] = []
    for record in records:
        ordered.extend(k for k in record if k not in ordered)
    return ordered


def write_results(
    records: Sequence[Dict[str, Any]],
    path,
    fmt: Optional[str] = None,
    columns: Optional[Sequence[str]] = None,
    config: Optional[Dict[str, Any]] = None,
) -> Path:
    """
    Write result rows as CSV, JSON or XLSX.

    Args:
        records: One dict per row
        path: Output file; the format defaults to its suffix
        fmt: "csv", "json" or "xlsx"
        columns: Column order, by default the first-seen key order
        config: Resolved configuration, embedded in JSON and XLSX outputs

    Returns:
        Path: The written file
    """
    from .renderers.csv_renderer import CSVRenderer
    from .renderers.excel_renderer import ExcelRenderer

    path = Path(path)
    fmt = (fmt or path.suffix.lstrip(".") or "csv").lower()
    columns = _columns(records, columns)
    rows = [[format_value(record.get(c)) for c in columns] for record in records]

    if fmt == "csv":
        content = CSVRenderer(columns).render(rows)
    elif fmt == "json":
        document = {
            "columns": columns,
            "records": [dict(zip(columns, row)) for row in rows],
            "config": format_value(config or {}),
        }
        content = (json.dumps(document, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    elif fmt == "xlsx":
        content = ExcelRenderer(columns).render(rows, format_value(config or {}))
    else:
        raise ParameterError(f"Unknown result format '{fmt}' (csv, json or xlsx)")

    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(content)
    logger.info(f"Wrote {len(rows)} record(s) to {path}")
    return path
