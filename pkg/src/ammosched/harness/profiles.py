"""Synthetic wind/PV availability profiles.

Wind is a clipped AR(1) process around a mean capacity factor, PV a
half-sine between sunrise and sunset with multiplicative cloud noise.
Lull windows force both to exactly zero.  Output is deterministic for a
given seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..params import ConfigError


@dataclass(frozen=True)
class ProfileSpec:
    steps: int
    dt: float = 3600.0
    wind_capacity: float = 450e6
    pv_capacity: float = 150e6
    wind_mean: float = 0.35  # capacity factor
    wind_ar: float = 0.9  # lag-1 autocorrelation per hour
    wind_sigma: float = 0.12  # innovation std, capacity-factor units
    pv_peak: float = 0.8
    pv_cloud_sigma: float = 0.15
    sunrise_h: float = 6.0
    sunset_h: float = 18.0
    start_hour: float = 0.0
    # half-open [start, end) windows in hours with zero renewable output
    lulls: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.steps <= 0:
            raise ConfigError("steps", "must be positive")
        if self.dt <= 0:
            raise ConfigError("dt", "must be positive")
        if self.wind_capacity < 0 or self.pv_capacity < 0:
            raise ConfigError("wind_capacity" if self.wind_capacity < 0 else "pv_capacity",
                              "must be non-negative")
        if not 0 <= self.wind_ar < 1:
            raise ConfigError("wind_ar", "must lie in [0, 1)")
        if not 0 <= self.sunrise_h < self.sunset_h <= 24:
            raise ConfigError("sunrise_h", "need 0 <= sunrise < sunset <= 24")
        for lull in self.lulls:
            if len(lull) != 2 or not lull[0] < lull[1]:
                raise ConfigError("lulls", f"bad window {lull!r}")


def gen_profile(spec: ProfileSpec, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Return (wind, pv) in W, one value per step."""
    rng = np.random.default_rng(seed)
    n = spec.steps
    dt_h = spec.dt / 3600.0
    phi = spec.wind_ar ** dt_h
    sigma = spec.wind_sigma * np.sqrt(max(1e-12, 1 - phi ** 2) / max(1e-12, 1 - spec.wind_ar ** 2))
    cf = np.empty(n)
    x = 0.0
    for t in range(n):
        x = phi * x + sigma * rng.standard_normal()
        cf[t] = spec.wind_mean + x
    wind = np.clip(cf, 0.0, 1.0) * spec.wind_capacity

    hours = spec.start_hour + (np.arange(n) + 0.5) * dt_h
    hod = np.mod(hours, 24.0)
    day = (hod > spec.sunrise_h) & (hod < spec.sunset_h)
    shape = np.where(day, np.sin(np.pi * (hod - spec.sunrise_h) / (spec.sunset_h - spec.sunrise_h)), 0.0)
    clouds = np.clip(1.0 + spec.pv_cloud_sigma * rng.standard_normal(n), 0.0, 1.0)
    pv = spec.pv_peak * spec.pv_capacity * shape * clouds

    step_hours = spec.start_hour + np.arange(n) * dt_h
    for start, end in spec.lulls:
        mask = (step_hours >= start) & (step_hours < end)
        wind[mask] = 0.0
        pv[mask] = 0.0
    return wind, pv


# The shipped lull scenario: two days with a sunny, windy first 18 hours and
# a 30 hour wind/PV blackout that runs to the end of the horizon.  The plant
# starts in production at 0.8 load with every storage at its lower bound.
LULL_SPEC = ProfileSpec(steps=48, lulls=((18.0, 48.0),))
LULL_SEED = 1
LULL_INITIAL_LOAD = 0.8


def lull_scenario():
    """Regenerate the bundled lull scenario from its generator settings."""
    from ..sched.scenario import ScenarioProfile

    wind, pv = gen_profile(LULL_SPEC, LULL_SEED)
    return ScenarioProfile(dt=LULL_SPEC.dt, wind=wind, pv=pv, initial_load=LULL_INITIAL_LOAD,
                           name="lull_scenario")
