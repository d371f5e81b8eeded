"""Confocal scattering ellipses and the AOD <-> AOA mapping.

Frame: Tx at the origin, Rx at ``(d, 0)``. The angle of departure ``theta``
is measured at the Tx counterclockwise from the Tx->Rx direction; the angle
of arrival ``phi`` is measured at the Rx counterclockwise from the Rx->Tx
direction. Both live in ``(-pi, pi]``.

With these conventions a ray leaving the Tx straight at the Rx
(``theta = 0``) hits the far vertex behind the Rx, which the Rx sees at
``phi = pi``; ``theta = pi`` hits the near vertex behind the Tx, seen at
``phi = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import speed_of_light

from .errors import InvalidDistance, NoDelayedTaps

#: Taps with less excess delay than this merge into the local cluster (s).
TAU_MIN_S = 0.1e-9


def wrap_angle(x):
    """Wrap radians to ``(-pi, pi]``."""
    out = np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2.0 * np.pi)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class Ellipse:
    semi_major_m: float
    semi_minor_m: float
    focal_half_m: float
    eccentricity: float
    tap_index: int

    @classmethod
    def from_delay(cls, d: float, tau: float, tap_index: int = 0) -> "Ellipse":
        """Ellipse of all scatterers whose Tx->S->Rx path exceeds ``d`` by ``c*tau``."""
        a = 0.5 * (d + speed_of_light * tau)
        c = 0.5 * d
        b = np.sqrt((a - c) * (a + c))
        return cls(float(a), float(b), float(c), float(c / a), tap_index)

    @property
    def link_distance_m(self) -> float:
        return 2.0 * self.focal_half_m

    @property
    def semi_latus_rectum_m(self) -> float:
        # a(1 - e^2) == b^2 / a, the latter without cancellation
        return self.semi_minor_m**2 / self.semi_major_m


@dataclass(frozen=True)
class EllipseSet:
    ellipses: tuple[Ellipse, ...]
    link_distance_m: float

    def __len__(self) -> int:
        return len(self.ellipses)

    def __iter__(self):
        return iter(self.ellipses)


def build_ellipses(pdp, d: float, tau_min: float = TAU_MIN_S) -> EllipseSet:
    """One confocal ellipse per tap whose excess delay exceeds ``tau_min``.

    Taps at or below ``tau_min`` belong to the local cluster around the Rx
    and get no ellipse.
    """
    if not d > 0:
        raise InvalidDistance(f"link distance must be positive, got {d!r}")
    delays = [tau for tau, _ in pdp.taps]
    if any(tau < 0 for tau in delays):
        raise ValueError("excess delays must be nonnegative")
    if any(b < a for a, b in zip(delays, delays[1:])):
        raise ValueError("excess delays must be sorted ascending")
    ellipses = tuple(
        Ellipse.from_delay(d, tau, i) for i, tau in enumerate(delays) if tau > tau_min
    )
    if not ellipses:
        raise NoDelayedTaps(f"no tap exceeds the {tau_min:g} s degeneracy threshold")
    return EllipseSet(ellipses, float(d))


def _one_minus_e_cos(ellipse: Ellipse, angle):
    # 1 - e cos(x) without cancellation as e -> 1; a - c is exact (Sterbenz)
    a, c = ellipse.semi_major_m, ellipse.focal_half_m
    return (a - c) / a + 2.0 * ellipse.eccentricity * np.sin(0.5 * angle) ** 2


def focal_radius_tx(ellipse: Ellipse, theta):
    """Distance Tx -> scatterer for departure angle ``theta``."""
    theta = np.asarray(theta, dtype=float)
    r = ellipse.semi_latus_rectum_m / _one_minus_e_cos(ellipse, theta)
    return r if r.ndim else float(r)


def focal_radius_rx(ellipse: Ellipse, phi):
    """Distance Rx -> scatterer for arrival angle ``phi`` (same polar form)."""
    return focal_radius_tx(ellipse, phi)


def scatterer_position(ellipse: Ellipse, theta) -> np.ndarray:
    """Cartesian scatterer position(s), shape ``(..., 2)``."""
    theta = np.asarray(theta, dtype=float)
    r = focal_radius_tx(ellipse, theta)
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)


def aod_to_aoa(ellipse: Ellipse, theta):
    theta = np.asarray(theta, dtype=float)
    r = focal_radius_tx(ellipse, theta)
    vx = r * np.cos(theta) - ellipse.link_distance_m
    vy = r * np.sin(theta)
    # angle of Rx->S relative to the -x axis
    return wrap_angle(np.arctan2(-vy, -vx))


def aoa_to_aod(ellipse: Ellipse, phi):
    """Closed-form inverse of :func:`aod_to_aoa`, by focal symmetry."""
    phi = np.asarray(phi, dtype=float)
    r = focal_radius_rx(ellipse, phi)
    sx = ellipse.link_distance_m - r * np.cos(phi)
    sy = -r * np.sin(phi)
    return wrap_angle(np.arctan2(sy, sx))


def aoa_jacobian(ellipse: Ellipse, theta):
    """``|dphi/dtheta| = r_T / r_R``, from the reflection property.

    Evaluated as ``(1 - e^2) / ((1 - e)^2 + 4 e sin^2(theta/2))``, which is
    ``r_T / (2a - r_T)`` rearranged to stay accurate for thin ellipses.
    """
    theta = np.asarray(theta, dtype=float)
    a, b = ellipse.semi_major_m, ellipse.semi_minor_m
    e = ellipse.eccentricity
    one_minus_e = (a - ellipse.focal_half_m) / a
    j = (b / a) ** 2 / (one_minus_e**2 + 4.0 * e * np.sin(0.5 * theta) ** 2)
    return j if j.ndim else float(j)
