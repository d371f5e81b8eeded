"""Power delay profiles: CSV parsing, delay scaling and power normalization.

CSV layout (UTF-8)::

    # optional comments
    delay,power_db
    0.0000,0.0
    0.1072,-2.2

``delay`` is either in nanoseconds or normalized to the rms delay spread,
depending on the caller's ``delay_unit``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from importlib import resources

import numpy as np

from .errors import EmptyProfile, MissingScale, ParseError

#: Delay spread and carrier used with the shipped TDL-B table.
DEFAULT_DS_NS = 363.0
DEFAULT_FC_HZ = 2.4e9

DELAY_UNITS = ("ns", "normalized")


@dataclass(frozen=True)
class PowerDelayProfile:
    taps: tuple[tuple[float, float], ...]
    source: str = ""
    ds_ns: float | None = None
    fc_hz: float | None = None

    @property
    def delays(self) -> np.ndarray:
        return np.array([t for t, _ in self.taps], dtype=float)

    @property
    def powers(self) -> np.ndarray:
        return np.array([p for _, p in self.taps], dtype=float)

    def __len__(self) -> int:
        return len(self.taps)


def normalize(pdp: PowerDelayProfile) -> PowerDelayProfile:
    if not pdp.taps:
        raise EmptyProfile(f"{pdp.source or 'profile'}: no taps")
    total = math.fsum(p for _, p in pdp.taps)
    if total == 1.0:
        return pdp
    return replace(pdp, taps=tuple((t, p / total) for t, p in pdp.taps))


def parse_pdp(
    text,
    delay_unit: str = "ns",
    ds_ns: float | None = None,
    source: str = "<pdp>",
    fc_hz: float | None = None,
) -> PowerDelayProfile:
    """Parse a PDP CSV into a unit-power profile with delays in seconds.

    ``text`` may be a string or any text stream.
    """
    if delay_unit not in DELAY_UNITS:
        raise ValueError(f"delay_unit must be one of {DELAY_UNITS}, got {delay_unit!r}")
    if delay_unit == "normalized" and ds_ns is None:
        raise MissingScale(f"{source}: normalized delays need a delay spread (ds_ns)")
    stream = io.StringIO(text) if isinstance(text, str) else text

    scale = 1e-9 * (ds_ns if delay_unit == "normalized" else 1.0)
    taps = []
    for lineno, row in enumerate(csv.reader(stream), 1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if row[0].strip().lower() == "delay":
            continue
        if len(row) != 2:
            raise ParseError(f"{source}:{lineno}: expected 2 columns 'delay,power_db', got {len(row)}")
        try:
            delay, power_db = float(row[0]), float(row[1])
        except ValueError:
            raise ParseError(f"{source}:{lineno}: non-numeric field in {','.join(row)!r}") from None
        if not (math.isfinite(delay) and math.isfinite(power_db)) or delay < 0:
            raise ParseError(f"{source}:{lineno}: delay must be finite and >= 0, power finite")
        taps.append((delay * scale, 10.0 ** (power_db / 10.0)))
    if not taps:
        raise EmptyProfile(f"{source}: no taps")
    taps.sort(key=lambda tap: tap[0])
    return normalize(PowerDelayProfile(tuple(taps), source, ds_ns, fc_hz))


def _canonical(x: float) -> str:
    # 15 digits absorb the ulp noise of the s <-> ns conversion
    return repr(float(f"{x:.15g}"))


def dump_pdp(pdp: PowerDelayProfile) -> str:
    """Canonical CSV (delays in ns, powers in dB); re-parse with ``delay_unit='ns'``."""
    lines = [f"# source: {pdp.source}"]
    if pdp.ds_ns is not None:
        lines.append(f"# ds_ns: {pdp.ds_ns!r}")
    lines.append("delay,power_db")
    for tau, p in pdp.taps:
        lines.append(f"{_canonical(tau * 1e9)},{10.0 * math.log10(p)!r}")
    return "\n".join(lines) + "\n"


def load_pdp(path, delay_unit: str = "ns", ds_ns: float | None = None) -> PowerDelayProfile:
    with open(path, encoding="utf-8") as fh:
        return parse_pdp(fh, delay_unit, ds_ns, source=str(path))


def tdl_b(ds_ns: float = DEFAULT_DS_NS, fc_hz: float = DEFAULT_FC_HZ) -> PowerDelayProfile:
    """The shipped 23-tap TDL-B NLOS profile scaled to ``ds_ns``."""
    text = resources.files(__package__).joinpath("data/tdl_b.csv").read_text("utf-8")
    return parse_pdp(text, "normalized", ds_ns, source="TDL-B", fc_hz=fc_hz)
