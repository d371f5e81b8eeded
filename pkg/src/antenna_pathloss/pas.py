"""Azimuth power angular spectrum at the Rx and the orientation correction factor.

The spectrum is the sum of a local scattering cluster around the Rx (von
Mises in AOA, scaled by the Tx gain toward the Rx) and one delayed cluster
per confocal ellipse (Tx pattern as AOD density, carried to AOA through the
ellipse geometry), all weighted by the Rx power pattern.

Orientation convention (degrees, both ends): counterclockwise from the
Rx->Tx direction. ``alpha = 180, beta = 0`` has both antennas facing each
other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import erfc, i0e

from .antenna import AntennaSpec, Pattern, gain
from .geometry import EllipseSet, aoa_to_aod, build_ellipses, wrap_angle
from .pdp import PowerDelayProfile

DEFAULT_KAPPA = 10.0
DEFAULT_GRID_POINTS = 3601
#: Floor applied to K so that the dB form stays finite.
K_MIN = 1e-12

_SQRT2 = math.sqrt(2.0)


def wrap_deg(x: float) -> float:
    """Wrap degrees to ``(-180, 180]``."""
    return 180.0 - (180.0 - float(x)) % 360.0


@dataclass(frozen=True)
class Scenario:
    distance_m: float
    alpha_deg: float
    beta_deg: float
    tx_antenna: AntennaSpec
    rx_antenna: AntennaSpec
    kappa: float = DEFAULT_KAPPA
    grid_points: int = DEFAULT_GRID_POINTS
    # fraction of the zero-delay cluster carried by a direct ray at phi = 0
    los_fraction: float = 0.0

    def __post_init__(self):
        if not self.distance_m > 0:
            raise ValueError(f"distance must be positive, got {self.distance_m!r}")
        if not self.kappa >= 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa!r}")
        if self.grid_points < 361 or self.grid_points % 2 == 0:
            raise ValueError("grid_points must be odd and >= 361")
        if not 0.0 <= self.los_fraction <= 1.0:
            raise ValueError("los_fraction must lie in [0, 1]")
        object.__setattr__(self, "alpha_deg", wrap_deg(self.alpha_deg))
        object.__setattr__(self, "beta_deg", wrap_deg(self.beta_deg))

    def oriented(self, alpha_deg: float, beta_deg: float) -> "Scenario":
        return Scenario(
            self.distance_m, alpha_deg, beta_deg, self.tx_antenna, self.rx_antenna,
            self.kappa, self.grid_points, self.los_fraction,
        )

    def reference(self) -> "Scenario":
        return self.oriented(180.0, 0.0)

    @property
    def tx_offset_rad(self) -> float:
        """Tx boresight relative to the Tx->Rx direction (the AOD frame)."""
        return wrap_angle(math.radians(self.alpha_deg) - math.pi)

    def tx_pattern(self) -> Pattern:
        return self.tx_antenna.pattern(self.tx_offset_rad)

    def rx_pattern(self) -> Pattern:
        return self.rx_antenna.pattern(math.radians(self.beta_deg))


@dataclass(frozen=True)
class AngularGrid:
    """Uniform closed grid over [-pi, pi]; the two end nodes are the same direction."""

    points: int

    @property
    def step(self) -> float:
        return 2.0 * math.pi / (self.points - 1)

    @property
    def nodes(self) -> np.ndarray:
        m = (self.points - 1) // 2
        out = (np.arange(self.points) - m) * self.step
        out[0], out[-1] = -math.pi, math.pi
        return out

    @property
    def weights(self) -> np.ndarray:
        w = np.full(self.points, self.step)
        w[0] = w[-1] = 0.5 * self.step
        return w

    @property
    def cell_edges(self) -> np.ndarray:
        """Finite-volume cell boundaries; node ``j`` owns ``[edges[j], edges[j+1]]``."""
        m = (self.points - 1) // 2
        inner = (np.arange(1, self.points) - m - 0.5) * self.step
        return np.concatenate([[-math.pi], inner, [math.pi]])


@dataclass
class AngularSpectrum:
    grid_deg: np.ndarray
    density: np.ndarray
    discrete_terms: list[tuple[float, float]] = field(default_factory=list)

    @property
    def grid(self) -> AngularGrid:
        return AngularGrid(len(self.grid_deg))


def total_power(spectrum: AngularSpectrum) -> float:
    """Trapezoidal integral over the periodic grid plus any discrete terms."""
    w = spectrum.grid.weights
    return math.fsum(w * spectrum.density) + math.fsum(p for _, p in spectrum.discrete_terms)


def local_cluster_density(kappa: float, grid) -> np.ndarray:
    """Von Mises AOA density with mean direction 0 (toward the Tx)."""
    phi = grid.nodes if isinstance(grid, AngularGrid) else np.asarray(grid, dtype=float)
    return np.exp(kappa * (np.cos(phi) - 1.0)) / (2.0 * math.pi * i0e(kappa))


def _std_normal_mass(lo, hi):
    """P(lo < Z < hi) for Z ~ N(0, 1), accurate in both tails."""
    lo, hi = np.broadcast_arrays(np.asarray(lo, float), np.asarray(hi, float))
    q_lo = 0.5 * erfc(np.abs(lo) / _SQRT2)
    q_hi = 0.5 * erfc(np.abs(hi) / _SQRT2)
    return np.where(lo >= 0, q_lo - q_hi, np.where(hi <= 0, q_hi - q_lo, 1.0 - (q_lo + q_hi)))


def aod_arc_mass(pattern: Pattern, start, width):
    """Probability of the AOD density on the arcs ``[start, start + width]``.

    The AOD density is the Tx power pattern normalized over the circle: a
    Gaussian in the wrapped boresight offset, truncated to ``(-pi, pi]``.
    ``width`` must lie in ``[0, 2*pi)``.
    """
    start = np.asarray(start, float)
    width = np.asarray(width, float)
    if pattern.kind == "omnidirectional":
        return width / (2.0 * math.pi)
    s = pattern.sigma_rad
    u0 = wrap_angle(start - pattern.boresight_rad)
    u1 = u0 + width
    mass = _std_normal_mass(u0 / s, np.minimum(u1, math.pi) / s)
    wraps = u1 > math.pi
    if np.any(wraps):
        mass[wraps] += _std_normal_mass(-math.pi / s, (u1[wraps] - 2.0 * math.pi) / s)
    norm = float(_std_normal_mass(-math.pi / s, math.pi / s))
    return mass / norm


#: Each AOA cell is split into this many sub-cells (odd) when weighting by the Rx gain.
SUBCELLS = 3


def aod_cell_masses(pattern: Pattern, edges: np.ndarray) -> np.ndarray:
    """AOD probability between consecutive increasing angles ``edges`` (last axis).

    Same result as :func:`aod_arc_mass` on each ``[edges[j], edges[j+1]]``,
    but the tail probability at every edge is computed once and shared by
    the two cells it bounds.
    """
    if pattern.kind == "omnidirectional":
        return np.diff(edges, axis=-1) / (2.0 * math.pi)
    s = pattern.sigma_rad
    u = wrap_angle(edges - pattern.boresight_rad)
    q = 0.5 * erfc(np.abs(u) / (s * _SQRT2))
    lo, hi = u[..., :-1], u[..., 1:]
    q_lo, q_hi = q[..., :-1], q[..., 1:]
    mass = np.where(lo >= 0, q_lo - q_hi, np.where(hi <= 0, q_hi - q_lo, 1.0 - (q_lo + q_hi)))
    # the cell straddling the antipode of the boresight
    wraps = hi < lo
    if np.any(wraps):
        mass[wraps] = aod_arc_mass(pattern, edges[..., :-1][wraps], np.diff(edges, axis=-1)[wraps])
        mass[wraps] *= float(_std_normal_mass(-math.pi / s, math.pi / s))
    return mass / float(_std_normal_mass(-math.pi / s, math.pi / s))


@lru_cache(maxsize=64)
def _preimage_edges(ellipses: EllipseSet, points: int) -> np.ndarray:
    """Unwrapped AOD of every AOA cell edge, shape ``(n_ellipses, points + 1)``."""
    edges = AngularGrid(points).cell_edges
    return np.array([np.unwrap(aoa_to_aod(ell, edges)) for ell in ellipses])


def _coarsen(fine: np.ndarray, points: int) -> np.ndarray:
    """Sum sub-cell values back onto the cells of a ``points`` grid (last axis)."""
    k = SUBCELLS
    idx = np.concatenate([[0], k * np.arange(1, points) - k // 2])
    return np.add.reduceat(fine, idx, axis=-1)


def _fine_grid(grid: AngularGrid) -> AngularGrid:
    return AngularGrid(SUBCELLS * (grid.points - 1) + 1)


def delayed_cluster_mass(ellipses: EllipseSet, tx_pattern: Pattern, grid: AngularGrid) -> np.ndarray:
    """Exact AOA-cell probabilities for every ellipse, shape ``(n_ellipses, points)``.

    Each AOA cell's mass is the AOD probability of its preimage arc under the
    (closed-form, monotone) inverse map, so every row sums to 1 up to rounding.
    """
    return aod_cell_masses(tx_pattern, _preimage_edges(ellipses, grid.points))


def delayed_cluster_density(ellipse, tx_pattern: Pattern, grid: AngularGrid) -> np.ndarray:
    """AOA density (per radian, cell-averaged at each node) of one ellipse."""
    if not isinstance(ellipse, EllipseSet):
        ellipse = EllipseSet((ellipse,), ellipse.link_distance_m)
    return delayed_cluster_mass(ellipse, tx_pattern, grid)[0] / grid.weights


def _split_powers(pdp: PowerDelayProfile, ellipses: EllipseSet) -> tuple[float, np.ndarray]:
    powers = pdp.powers
    delayed = {e.tap_index for e in ellipses}
    local = math.fsum(p for i, p in enumerate(powers) if i not in delayed)
    return local, np.array([powers[e.tap_index] for e in ellipses])


def compose_pas(
    scenario: Scenario, pdp: PowerDelayProfile, ellipses: EllipseSet | None = None
) -> AngularSpectrum:
    if ellipses is None:
        ellipses = build_ellipses(pdp, scenario.distance_m)
    grid = AngularGrid(scenario.grid_points)
    phi = grid.nodes
    tx = scenario.tx_pattern()
    rx = scenario.rx_pattern()

    p_local, p_delayed = _split_powers(pdp, ellipses)
    tx_toward_rx = gain(tx, 0.0)

    fine = _fine_grid(grid)
    delayed = (p_delayed @ delayed_cluster_mass(ellipses, tx, fine)) * gain(rx, fine.nodes)
    density = _coarsen(delayed, grid.points) / grid.weights
    local = local_cluster_density(scenario.kappa, grid) * gain(rx, phi)
    density += (1.0 - scenario.los_fraction) * p_local * tx_toward_rx * local

    discrete = []
    if scenario.los_fraction > 0:
        discrete.append((0.0, scenario.los_fraction * p_local * tx_toward_rx * gain(rx, 0.0)))
    return AngularSpectrum(np.degrees(phi), density, discrete)


def received_power(scenario: Scenario, pdp: PowerDelayProfile, ellipses: EllipseSet | None = None) -> float:
    return total_power(compose_pas(scenario, pdp, ellipses))


@lru_cache(maxsize=256)
def _reference_power(ref: Scenario, pdp: PowerDelayProfile, ellipses: EllipseSet) -> float:
    return received_power(ref, pdp, ellipses)


def raw_correction_factor(
    scenario: Scenario, pdp: PowerDelayProfile, ellipses: EllipseSet | None = None
) -> float:
    """``P(alpha, beta) / P(180, 0)`` without the floor."""
    if ellipses is None:
        ellipses = build_ellipses(pdp, scenario.distance_m)
    return received_power(scenario, pdp, ellipses) / _reference_power(scenario.reference(), pdp, ellipses)


def correction_factor(
    scenario: Scenario, pdp: PowerDelayProfile, ellipses: EllipseSet | None = None
) -> float:
    return max(raw_correction_factor(scenario, pdp, ellipses), K_MIN)
