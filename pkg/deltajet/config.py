"""
Central defaults for deltajet.

Defaults live in one frozen dataclass. A JSON config file may override them
and command-line flags override both.
"""

import json
import logging
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Settings:
    """Working parameters shared by the library entry points and the CLI."""

    p: int = 5
    N: int = 12
    ext_degree: int = 1
    M: int = 32          # series truncation degree
    D: int = 8           # cap on the degree in positive-order jet variables
    r: int = 2           # order of δ-series
    sym_degree: int = 8  # degree bound of the symmetric-function solve
    search_cap: int = 4096
    groebner_max_vars: int = 12
    groebner_max_degree: int = 256
    linear_unknowns_cap: int = 4000
    witt_max_length: int = 5

    @classmethod
    def load(cls, path: Optional[str] = None) -> "Settings":
        """Read overrides from a JSON file; unknown keys are rejected."""
        if path is None:
            return cls()
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        logger.debug("loaded settings overrides %s from %s", data, path)
        return replace(cls(), **data)

    def merged(self, **overrides: Any) -> "Settings":
        """Apply overrides whose value is not None (flags win)."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


DEFAULTS = Settings()
