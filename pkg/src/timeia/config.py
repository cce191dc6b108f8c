"""
Experiment configuration files.

The format is one ``key = value`` pair per line. Blank lines and lines
starting with ``#`` are ignored. Lists are comma separated, and ``rho``
also accepts a fraction such as ``1/3``::

    mode = satellite
    rho = 0.43
    trials = 10000
    seed = 7
    T_seconds = 25e-6
    sat_longitudes = 24.5, 25, 25.5
    ground_lat_range = 35, 55
    ground_lon_range = -10, 20
"""

from __future__ import annotations

from fractions import Fraction

from .dof import as_rho
from .geo import GeoScenario
from .montecarlo import MODES, ExperimentConfig

DEFAULT_RHO = {"uncoordinated": 0.5, "coordinated": 0.5, "satellite": 0.43}
DEFAULT_TRIALS = {"uncoordinated": 10**6, "coordinated": 10**4, "satellite": 10**4}


class ConfigError(ValueError):
    """Invalid configuration; `where` names the line or field at fault."""

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


def parse_rho(text) -> float:
    return float(Fraction(str(text).strip()))


def _float_list(text):
    return tuple(float(v) for v in text.split(","))


def _pair(text):
    v = _float_list(text)
    if len(v) != 2:
        raise ValueError(f"expected two comma-separated numbers, got {len(v)}")
    return v


def _seed(text):
    return int(text, 0)


FIELDS = {
    "mode": str,
    "rho": parse_rho,
    "trials": int,
    "seed": _seed,
    "grid": int,
    "refine": int,
    "T_seconds": float,
    "sat_longitudes": _float_list,
    "ground_lat_range": _pair,
    "ground_lon_range": _pair,
    "workers": int,
}


def parse_config_text(text, source="<config>") -> dict:
    """Parse key-value text into a dict of typed values."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        where = f"{source}:{lineno}"
        if "=" not in line:
            raise ConfigError("expected 'key = value'", where)
        key, _, val = (part.strip() for part in line.partition("="))
        if key not in FIELDS:
            raise ConfigError(f"unknown key {key!r}", where)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", where)
        try:
            values[key] = FIELDS[key](val)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", where) from None
    return values


def read_config(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read(), str(path))


def build(values: dict, mode: str):
    """
    Resolve parsed values into an ExperimentConfig and, for satellite runs,
    a GeoScenario.
    """
    if "mode" in values and values["mode"] != mode:
        raise ConfigError(f"config is for mode {values['mode']!r}, not {mode!r}", "mode")
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}", "mode")
    scenario = None
    if mode == "satellite":
        defaults = GeoScenario()
        try:
            scenario = GeoScenario(
                satellite_longitudes=values.get("sat_longitudes", defaults.satellite_longitudes),
                lat_range=values.get("ground_lat_range", defaults.lat_range),
                lon_range=values.get("ground_lon_range", defaults.lon_range),
                slot=values.get("T_seconds", defaults.slot),
            )
        except ValueError as exc:
            raise ConfigError(str(exc), "scenario") from None
        if scenario.k != 3:
            raise ConfigError("exactly three satellite longitudes are needed", "sat_longitudes")
    else:
        for key in ("T_seconds", "sat_longitudes", "ground_lat_range", "ground_lon_range"):
            if key in values:
                raise ConfigError(f"{key!r} only applies to satellite mode", key)

    kwargs = dict(
        mode=mode,
        master_seed=values.get("seed", 1),
        trials=values.get("trials", DEFAULT_TRIALS[mode]),
        rho=values.get("rho", DEFAULT_RHO[mode]),
        grid=values.get("grid", 128),
        refine=values.get("refine", 16),
        workers=values.get("workers", 1),
        scenario=scenario,
    )
    try:
        as_rho(kwargs["rho"])
    except ValueError as exc:
        raise ConfigError(str(exc), "rho") from None
    try:
        return ExperimentConfig(**kwargs)
    except ValueError as exc:
        first = str(exc).split()[0]
        raise ConfigError(str(exc), _ERROR_FIELDS.get(first)) from None


_ERROR_FIELDS = {"master_seed": "seed", "trials": "trials", "grid": "grid",
                 "refine": "refine", "workers": "workers", "unknown": "mode"}
