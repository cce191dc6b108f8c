"""
Geostationary multi-satellite scenario.

Satellites sit on the equatorial plane at geostationary radius and
transmit to ground stations on a spherical Earth (forward link). Station
``i`` is the intended receiver of satellite ``i``. Delays are straight-line
distances over the speed of light.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial

import numpy as np

from .align import optimize_delays
from .dof import DelayMatrix, normalize
from .montecarlo import EmpiricalDistribution, ExperimentConfig, map_trials, trial_rng, trial_uniforms

GEO_RADIUS = 42_164_169.0
EARTH_RADIUS = 6_371_000.0
LIGHT_SPEED = 299_792_458.0


@dataclass(frozen=True)
class GroundStation:
    latitude: float
    longitude: float


@dataclass(frozen=True)
class GeoScenario:
    """Satellite longitudes, ground-station box (degrees) and slot length (s)."""

    satellite_longitudes: tuple = (24.5, 25.0, 25.5)
    lat_range: tuple = (35.0, 55.0)
    lon_range: tuple = (-10.0, 20.0)
    slot: float = 25e-6
    geo_radius: float = GEO_RADIUS
    earth_radius: float = EARTH_RADIUS
    light_speed: float = LIGHT_SPEED

    def __post_init__(self):
        lons = tuple(float(v) for v in self.satellite_longitudes)
        object.__setattr__(self, "satellite_longitudes", lons)
        object.__setattr__(self, "lat_range", tuple(float(v) for v in self.lat_range))
        object.__setattr__(self, "lon_range", tuple(float(v) for v in self.lon_range))
        if len(set(lons)) != len(lons) or len(lons) < 2:
            raise ValueError("need at least two distinct satellite longitudes")
        for name, (lo, hi) in (("latitude", self.lat_range), ("longitude", self.lon_range)):
            if not lo < hi:
                raise ValueError(f"ground {name} range is degenerate: ({lo}, {hi})")
        if not (-90.0 <= self.lat_range[0] and self.lat_range[1] <= 90.0):
            raise ValueError("latitudes must lie in [-90, 90]")
        if not self.slot > 0:
            raise ValueError(f"slot length must be positive, got {self.slot!r}")
        if not self.geo_radius > self.earth_radius > 0:
            raise ValueError("orbit radius must exceed Earth radius")

    @property
    def k(self) -> int:
        return len(self.satellite_longitudes)


def _from_uniforms(u, scenario):
    # u[..., 2i] -> latitude of station i, u[..., 2i + 1] -> longitude
    (la, lb), (oa, ob) = scenario.lat_range, scenario.lon_range
    lat = la + (lb - la) * u[..., 0::2]
    lon = oa + (ob - oa) * u[..., 1::2]
    return lat, lon


def sample_ground_stations(rng: np.random.Generator, scenario: GeoScenario) -> list:
    """`scenario.k` stations uniform in latitude and longitude over the box."""
    lat, lon = _from_uniforms(rng.random(2 * scenario.k), scenario)
    return [GroundStation(float(a), float(o)) for a, o in zip(lat, lon)]


def slant_delays(lat, lon, scenario: GeoScenario) -> np.ndarray:
    """
    Delays from every satellite to every station.

    Parameters
    ----------
    lat, lon : ndarray, shape (..., K)
        Station coordinates in degrees.

    Returns
    -------
    ndarray, shape (..., K, K)
        ``out[..., i, j]`` is the delay from satellite ``j`` to station ``i``.
    """
    lat = np.radians(np.asarray(lat, dtype=float))[..., :, None]
    dlon = np.radians(np.asarray(lon, dtype=float)[..., :, None]
                      - np.asarray(scenario.satellite_longitudes)[None, :])
    re, rg = scenario.earth_radius, scenario.geo_radius
    dist2 = re**2 + rg**2 - 2 * re * rg * np.cos(lat) * np.cos(dlon)
    return np.sqrt(dist2) / scenario.light_speed


def delay_matrix(stations, scenario: GeoScenario) -> DelayMatrix:
    if len(stations) != scenario.k:
        raise ValueError(f"expected {scenario.k} stations, got {len(stations)}")
    lat = [s.latitude for s in stations]
    lon = [s.longitude for s in stations]
    return DelayMatrix(slant_delays(lat, lon, scenario), scenario.slot)


def delay_bounds(scenario: GeoScenario):
    """Smallest and largest delay any station in the box can see."""
    lats = list(scenario.lat_range)
    if lats[0] < 0 < lats[1]:
        lats.append(0.0)
    lons = list(scenario.lon_range)
    lons += [s for s in scenario.satellite_longitudes if lons[0] < s < lons[1]]
    lat, lon = np.meshgrid(lats, lons)
    delays = slant_delays(lat.reshape(-1, 1), lon.reshape(-1, 1), scenario)
    return float(delays.min()), float(delays.max())


def sample_delays(master_seed, scenario: GeoScenario, start, stop) -> np.ndarray:
    """Physical delay matrices for trials ``[start, stop)``, shape ``(n, K, K)``."""
    u = trial_uniforms(master_seed, start, stop, 2 * scenario.k)
    lat, lon = _from_uniforms(u, scenario)
    return slant_delays(lat, lon, scenario)


def trial_delay_matrix(master_seed, trial, scenario: GeoScenario) -> DelayMatrix:
    return delay_matrix(sample_ground_stations(trial_rng(master_seed, trial), scenario), scenario)


def _satellite_phis(master_seed, scenario, rho, grid, refine, start, stop):
    a = sample_delays(master_seed, scenario, start, stop)
    out = np.empty(stop - start)
    for n, entries in enumerate(a):
        b = normalize(DelayMatrix(entries, scenario.slot))
        out[n] = optimize_delays(b, rho, grid, refine).phi
    return out


def run_satellite(config: ExperimentConfig, scenario: GeoScenario | None = None,
                  chunk=250) -> EmpiricalDistribution:
    """Optimized sum DoF over random ground-station draws."""
    if config.mode != "satellite":
        raise ValueError(f"expected a satellite config, got mode {config.mode!r}")
    scenario = scenario or config.scenario or GeoScenario()
    if scenario.k != 3:
        raise ValueError("the satellite experiment needs exactly three satellites")
    func = partial(_satellite_phis, config.master_seed, scenario, config.rho,
                   config.grid, config.refine)
    return EmpiricalDistribution(map_trials(func, config.trials, chunk, config.workers))
