"""Scheme comparison, metrics, sweeps and rolling evaluation."""

from .schemes import (NO_STORAGE, SCHEME_1, SCHEME_2, SCHEME_3, SCHEME_4, SCHEME_5, SCHEMES,
                      STANDARD_SCHEMES, StorageScheme, get_scheme)

__all__ = ["NO_STORAGE", "SCHEME_1", "SCHEME_2", "SCHEME_3", "SCHEME_4", "SCHEME_5", "SCHEMES",
           "STANDARD_SCHEMES", "StorageScheme", "get_scheme"]
