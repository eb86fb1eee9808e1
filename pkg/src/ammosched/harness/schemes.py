"""Storage configurations layered over the base plant parameters."""

from __future__ import annotations

from dataclasses import dataclass

from ..params import ConfigError, PlantParams

BES_SOC_MIN = 0.1
BES_SOC_MAX = 0.9
HS_FILL_MIN = 0.1
HS_FILL_MAX = 0.9


@dataclass(frozen=True)
class StorageScheme:
    name: str
    has_bes: bool = False
    bes_energy: float = 0.0  # nameplate, J
    bes_power: float = 0.0  # W, both directions
    has_hs: bool = False
    hs_capacity: float = 0.0  # nameplate, Nm3
    has_mstes: bool = False
    ms_volume: float = 0.0  # m3

    def __post_init__(self):
        for flag, attrs in (("has_bes", ("bes_energy", "bes_power")), ("has_hs", ("hs_capacity",)),
                            ("has_mstes", ("ms_volume",))):
            for a in attrs:
                v = getattr(self, a)
                if v < 0:
                    raise ConfigError(a, "must be non-negative")
                if getattr(self, flag) and v <= 0:
                    raise ConfigError(a, f"must be positive when {flag} is set")

    def apply(self, params: PlantParams) -> PlantParams:
        """Return parameters with the storage sizes of this scheme.

        Battery and hydrogen nameplates are split into the usual operating
        windows (10-90 % state of charge, 10-90 % fill).  Absent components
        get zero capacity.
        """
        bes = self.bes_energy if self.has_bes else 0.0
        pw = self.bes_power if self.has_bes else 0.0
        hs = self.hs_capacity if self.has_hs else 0.0
        ms = self.ms_volume if self.has_mstes else 0.0
        return params.replace(
            bes_energy_min=BES_SOC_MIN * bes, bes_energy_max=BES_SOC_MAX * bes,
            bes_charge_max=pw, bes_discharge_max=pw,
            hs_min=HS_FILL_MIN * hs, hs_max=HS_FILL_MAX * hs,
            ms_volume=ms,
        )

    def with_sizes(self, **sizes) -> "StorageScheme":
        """Copy with changed sizes; a positive size switches the component on."""
        kw = dict(self.__dict__)
        kw.update(sizes)
        if "bes_energy" in sizes:
            kw["has_bes"] = sizes["bes_energy"] > 0
            if kw["has_bes"] and kw["bes_power"] <= 0:
                kw["bes_power"] = sizes["bes_energy"] / (4 * 3600.0)
        if "hs_capacity" in sizes:
            kw["has_hs"] = sizes["hs_capacity"] > 0
        if "ms_volume" in sizes:
            kw["has_mstes"] = sizes["ms_volume"] > 0
        return StorageScheme(**kw)


MWH = 3.6e9
HS_NAMEPLATE = 1.5e5
MS_VOLUME = 20.0

SCHEME_1 = StorageScheme("scheme1", has_bes=True, bes_energy=32 * MWH, bes_power=8e6,
                         has_hs=True, hs_capacity=HS_NAMEPLATE)
SCHEME_2 = StorageScheme("scheme2", has_hs=True, hs_capacity=HS_NAMEPLATE)
SCHEME_3 = StorageScheme("scheme3", has_mstes=True, ms_volume=MS_VOLUME)
SCHEME_4 = StorageScheme("scheme4", has_bes=True, bes_energy=32 * MWH, bes_power=8e6,
                         has_hs=True, hs_capacity=HS_NAMEPLATE, has_mstes=True, ms_volume=MS_VOLUME)
SCHEME_5 = StorageScheme("scheme5", has_bes=True, bes_energy=4 * MWH, bes_power=1e6,
                         has_hs=True, hs_capacity=HS_NAMEPLATE, has_mstes=True, ms_volume=MS_VOLUME)
NO_STORAGE = StorageScheme("none")

SCHEMES = {s.name: s for s in (SCHEME_1, SCHEME_2, SCHEME_3, SCHEME_4, SCHEME_5, NO_STORAGE)}
STANDARD_SCHEMES = (SCHEME_1, SCHEME_2, SCHEME_3, SCHEME_4, SCHEME_5)


def get_scheme(name: str) -> StorageScheme:
    key = name.lower().replace("_", "").replace("-", "")
    if key.isdigit():
        key = f"scheme{key}"
    if key not in SCHEMES:
        raise ConfigError("scheme", f"unknown scheme {name!r}; choose from {sorted(SCHEMES)}")
    return SCHEMES[key]
