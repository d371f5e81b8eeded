"""Log-distance path loss per antenna type and its orientation-corrected form."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .antenna import AntennaSpec
from .errors import InputDataError, InvalidDistance, MixedAntennaTypes
from .geometry import EllipseSet
from .pas import K_MIN, Scenario, raw_correction_factor
from .pdp import PowerDelayProfile


@dataclass(frozen=True)
class AssamConfig:
    """Reference constants of the log-distance model (half-wave dipole reference)."""

    d0_m: float = 5.0
    pl_d0_ref_db: float = 53.1
    valid_range_m: tuple[float, float] = (5.0, 400.0)
    fc_hz: float = 2.4e9

    @classmethod
    def from_file(cls, path) -> "AssamConfig":
        """Load overrides from a JSON object with any of the field names."""
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InputDataError(f"{path}: {exc}") from None
        if not isinstance(data, dict) or set(data) - set(cls.__dataclass_fields__):
            raise InputDataError(f"{path}: expected an object with keys from {sorted(cls.__dataclass_fields__)}")
        if "valid_range_m" in data:
            data["valid_range_m"] = tuple(data["valid_range_m"])
        return cls(**data)

    def in_range(self, d: float) -> bool:
        lo, hi = self.valid_range_m
        return lo <= d <= hi


@dataclass(frozen=True)
class PathLossResult:
    distance_m: float
    pl0_db: float
    k_linear: float
    pl_db: float
    flags: dict = field(default_factory=dict)

    @property
    def k_floored(self) -> bool:
        return self.flags.get("k_floored", False)

    @property
    def out_of_range(self) -> bool:
        return self.flags.get("out_of_range", False)


def assam_pl0(antenna: AntennaSpec, d: float, cfg: AssamConfig = AssamConfig()) -> float:
    """Path loss (dB) at ``d`` for antennas of this type facing each other."""
    if not d > 0:
        raise InvalidDistance(f"distance must be positive, got {d!r}")
    if antenna.path_loss_exponent is None:
        raise ValueError(f"antenna {antenna.name!r} has no path loss exponent")
    return cfg.pl_d0_ref_db + 10.0 * antenna.path_loss_exponent * math.log10(d / cfg.d0_m)


def compose_db(pl0_db: float, k_linear: float) -> float:
    return pl0_db - 10.0 * math.log10(k_linear)


def modified_pl(
    scenario: Scenario,
    pdp: PowerDelayProfile,
    cfg: AssamConfig = AssamConfig(),
    *,
    allow_mixed: bool = False,
    ellipses: EllipseSet | None = None,
) -> PathLossResult:
    """Orientation-corrected path loss for ``scenario``.

    The exponent comes from the Tx antenna type. Mixed Tx/Rx types have no
    empirical exponent and are rejected unless ``allow_mixed`` is set.
    """
    tx, rx = scenario.tx_antenna, scenario.rx_antenna
    if tx != rx and not allow_mixed:
        raise MixedAntennaTypes(f"Tx {tx.name!r} and Rx {rx.name!r} differ; pass allow_mixed to use the Tx exponent")
    d = scenario.distance_m
    pl0 = assam_pl0(tx, d, cfg)
    k_raw = raw_correction_factor(scenario, pdp, ellipses)
    k = max(k_raw, K_MIN)
    flags = {"k_floored": k_raw < K_MIN, "out_of_range": not cfg.in_range(d)}
    return PathLossResult(d, pl0, k, compose_db(pl0, k), flags)
