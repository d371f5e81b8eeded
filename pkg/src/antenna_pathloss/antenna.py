"""Antenna catalog and normalized azimuth power patterns."""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from importlib import resources
from typing import Iterable

import numpy as np

from .errors import OutOfRange, ParseError, UnknownAntenna
from .geometry import wrap_angle

#: Environment variable overriding the catalog file location.
CATALOG_ENV = "ANTENNA_PATHLOSS_CATALOG"

_HALF_POWER_WIDTHS = 2.0 * np.sqrt(2.0 * np.log(2.0))


@dataclass(frozen=True)
class AntennaSpec:
    """A catalog entry.

    ``path_loss_exponent`` may be ``None`` for entries whose log-distance
    exponent is unknown; such antennas can still shape a spectrum but cannot
    be used for the absolute path loss. ``hpbw_az_deg=None`` means
    omnidirectional in azimuth.
    """

    name: str
    path_loss_exponent: float | None
    hpbw_az_deg: float | None = None
    gain_dbi: float | None = None

    def __post_init__(self):
        if self.path_loss_exponent is not None and not self.path_loss_exponent > 0:
            raise OutOfRange(f"{self.name}: path loss exponent must be positive")
        if self.hpbw_az_deg is not None and not 0 < self.hpbw_az_deg < 360:
            raise OutOfRange(f"{self.name}: HPBW must lie in (0, 360) degrees")

    @property
    def omnidirectional(self) -> bool:
        return self.hpbw_az_deg is None

    def pattern(self, boresight_rad: float = 0.0) -> "Pattern":
        if self.omnidirectional:
            return Pattern("omnidirectional", None, boresight_rad)
        return Pattern("gaussian", sigma_from_hpbw(self.hpbw_az_deg), boresight_rad)


@dataclass(frozen=True)
class Pattern:
    kind: str
    sigma_rad: float | None
    boresight_rad: float = 0.0

    def __post_init__(self):
        if self.kind not in ("omnidirectional", "gaussian"):
            raise ValueError(f"unknown pattern kind {self.kind!r}")
        if self.kind == "gaussian" and not (self.sigma_rad or 0) > 0:
            raise ValueError("gaussian pattern needs sigma_rad > 0")

    def gain(self, angle):
        return gain(self, angle)


def sigma_from_hpbw(hpbw_deg: float) -> float:
    """Gaussian standard deviation (rad) whose power pattern is 1/2 at +-HPBW/2."""
    if not 0 < hpbw_deg < 360:
        raise OutOfRange(f"HPBW must lie in (0, 360) degrees, got {hpbw_deg!r}")
    return float(np.radians(hpbw_deg) / _HALF_POWER_WIDTHS)


def gain(pattern: Pattern, angle):
    """Normalized power gain toward absolute ``angle`` (peak 1 at boresight)."""
    angle = np.asarray(angle, dtype=float)
    if pattern.kind == "omnidirectional":
        g = np.ones_like(angle)
    else:
        delta = wrap_angle(angle - pattern.boresight_rad)
        g = np.exp(-0.5 * (delta / pattern.sigma_rad) ** 2)
    return g if g.ndim else float(g)


# --- catalog -----------------------------------------------------------------


def _field(text: str) -> float | None:
    text = text.strip()
    return float(text) if text else None


def parse_catalog(text: str | Iterable[str], source: str = "<catalog>") -> list[AntennaSpec]:
    """Parse ``name,n,hpbw_deg,gain_dbi?`` records; ``#`` starts a comment."""
    lines = io.StringIO(text) if isinstance(text, str) else text
    specs = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if parts[0].lower() == "name":
            continue
        if len(parts) not in (3, 4) or not parts[0]:
            raise ParseError(f"{source}:{lineno}: expected name,n,hpbw_deg[,gain_dbi]")
        try:
            values = [_field(p) for p in parts[1:]]
        except ValueError as exc:
            raise ParseError(f"{source}:{lineno}: {exc}") from None
        values += [None] * (3 - len(values))
        try:
            specs.append(AntennaSpec(parts[0], *values))
        except OutOfRange as exc:
            raise ParseError(f"{source}:{lineno}: {exc}") from None
    return specs


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def dump_catalog(specs: Iterable[AntennaSpec]) -> str:
    """Canonical text form of a catalog; round-trips through :func:`parse_catalog`."""
    rows = ["name,n,hpbw_deg,gain_dbi"]
    for s in specs:
        rows.append(",".join([s.name, _fmt(s.path_loss_exponent), _fmt(s.hpbw_az_deg), _fmt(s.gain_dbi)]))
    return "\n".join(rows) + "\n"


def builtin_catalog() -> list[AntennaSpec]:
    text = resources.files(__package__).joinpath("data/antennas.csv").read_text("utf-8")
    return parse_catalog(text, "antennas.csv")


def load_catalog(path: str | os.PathLike | None = None) -> list[AntennaSpec]:
    """Catalog from ``path``, else ``$ANTENNA_PATHLOSS_CATALOG``, else the builtin one."""
    path = path or os.environ.get(CATALOG_ENV)
    if not path:
        return builtin_catalog()
    with open(path, encoding="utf-8") as fh:
        return parse_catalog(fh.read(), str(path))


def lookup(name: str, catalog: list[AntennaSpec] | None = None) -> AntennaSpec:
    catalog = builtin_catalog() if catalog is None else catalog
    for spec in catalog:
        if spec.name.lower() == name.lower():
            return spec
    raise UnknownAntenna(f"unknown antenna {name!r}; known: {', '.join(s.name for s in catalog)}")
