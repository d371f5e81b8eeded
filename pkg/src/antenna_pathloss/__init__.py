"""Path loss for arbitrary antenna orientations.

A log-distance model fitted per antenna type (antennas facing each other)
is corrected by ``K(alpha, beta)``, the ratio of received power at the given
orientations to that at the facing orientation. The received power comes from
a multi-elliptical geometric channel model driven by a power delay profile.
"""

from .antenna import AntennaSpec, Pattern, builtin_catalog, gain, lookup, sigma_from_hpbw
from .geometry import Ellipse, EllipseSet, aoa_jacobian, aod_to_aoa, build_ellipses, focal_radius_tx
from .oracle import OracleConfig, mc_correction_factor
from .pas import AngularSpectrum, Scenario, compose_pas, correction_factor, total_power
from .pathloss import AssamConfig, PathLossResult, assam_pl0, modified_pl
from .pdp import PowerDelayProfile, normalize, parse_pdp, tdl_b

__all__ = [
    "AngularSpectrum", "AntennaSpec", "AssamConfig", "Ellipse", "EllipseSet", "OracleConfig",
    "PathLossResult", "Pattern", "PowerDelayProfile", "Scenario", "aoa_jacobian", "aod_to_aoa",
    "assam_pl0", "build_ellipses", "builtin_catalog", "compose_pas", "correction_factor",
    "focal_radius_tx", "gain", "lookup", "mc_correction_factor", "modified_pl", "normalize",
    "parse_pdp", "sigma_from_hpbw", "tdl_b", "total_power",
]
