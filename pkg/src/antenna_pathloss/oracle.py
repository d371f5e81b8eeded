"""Monte-Carlo estimate of the correction factor K.

Independent of the quadrature path in :mod:`.pas`: AODs are sampled from the
Tx pattern and pushed through the forward geometry map, local-cluster AOAs
are drawn from a von Mises law, and each sample is weighted by the Rx gain.
The reference orientation reuses the same random numbers, so the ratio has
low variance and ``K(180, 0)`` is exactly 1.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .antenna import gain
from .geometry import aod_to_aoa, build_ellipses
from .pas import Scenario
from .pdp import PowerDelayProfile, normalize

MIN_SAMPLES = 10_000
DEFAULT_BLOCK = 1 << 20


@dataclass(frozen=True)
class OracleConfig:
    scenario: Scenario
    pdp: PowerDelayProfile
    samples: int = 1_000_000
    seed: int = 0
    block_size: int = DEFAULT_BLOCK
    workers: int = 1

    def __post_init__(self):
        if self.samples < MIN_SAMPLES:
            raise ValueError(f"samples must be >= {MIN_SAMPLES}")


def sample_von_mises(rng: np.random.Generator, kappa: float, size: int) -> np.ndarray:
    """Best-Fisher rejection sampler (wrapped Cauchy envelope), mean 0."""
    if kappa < 1e-8:
        return rng.uniform(-math.pi, math.pi, size)
    tau = 1.0 + math.sqrt(1.0 + 4.0 * kappa * kappa)
    rho = (tau - math.sqrt(2.0 * tau)) / (2.0 * kappa)
    r = (1.0 + rho * rho) / (2.0 * rho)
    out = np.empty(0)
    while out.size < size:
        n = int(1.3 * (size - out.size)) + 16
        u1, u2, u3 = rng.random((3, n))
        z = np.cos(math.pi * u1)
        f = np.clip((1.0 + r * z) / (r + z), -1.0, 1.0)
        c = kappa * (r - f)
        with np.errstate(divide="ignore"):
            ok = (c * (2.0 - c) - u2 > 0) | (np.log(c / u2) + 1.0 - c >= 0)
        theta = np.where(u3[ok] > 0.5, 1.0, -1.0) * np.arccos(f[ok])
        out = np.concatenate([out, theta])
    return out[:size]


def sample_truncated_normal(rng: np.random.Generator, limit: float, size: int) -> np.ndarray:
    """Standard normal draws conditioned on ``|z| <= limit`` (rejection)."""
    out = np.empty(0)
    while out.size < size:
        z = rng.standard_normal(int(1.1 * (size - out.size)) + 16)
        out = np.concatenate([out, z[np.abs(z) <= limit]])
    return out[:size]


def sample_aod_offsets(rng: np.random.Generator, pattern, size: int) -> np.ndarray:
    """AOD offsets from boresight drawn from the normalized Tx pattern."""
    if pattern.kind == "omnidirectional":
        return rng.uniform(-math.pi, math.pi, size)
    s = pattern.sigma_rad
    return s * sample_truncated_normal(rng, math.pi / s, size)


def _allocate(total: int, weights: np.ndarray) -> np.ndarray:
    """Largest-remainder split of ``total`` proportional to ``weights``, at least 2 each."""
    raw = total * weights / weights.sum()
    n = np.floor(raw).astype(int)
    n[np.argsort(n - raw)[: total - n.sum()]] += 1
    return np.maximum(n, 2)


class _Strata:
    """Per-stratum sums needed for the ratio estimate and its standard error."""

    FIELDS = ("n", "w", "w0", "ww", "w0w0", "ww0")

    def __init__(self, count: int):
        self.parts = {k: [[] for _ in range(count)] for k in self.FIELDS}

    def add(self, i: int, w: np.ndarray, w0: np.ndarray):
        p = self.parts
        p["n"][i].append(float(w.size))
        p["w"][i].append(math.fsum(w))
        p["w0"][i].append(math.fsum(w0))
        p["ww"][i].append(math.fsum(w * w))
        p["w0w0"][i].append(math.fsum(w0 * w0))
        p["ww0"][i].append(math.fsum(w * w0))

    def merge(self, other: "_Strata"):
        for k in self.FIELDS:
            for mine, theirs in zip(self.parts[k], other.parts[k]):
                mine.extend(theirs)

    def totals(self, key: str) -> np.ndarray:
        return np.array([math.fsum(v) for v in self.parts[key]])


def mc_correction_factor(cfg: OracleConfig) -> tuple[float, float]:
    """Return ``(K_estimate, standard_error)``."""
    sc = cfg.scenario
    pdp = normalize(cfg.pdp)
    ellipses = build_ellipses(pdp, sc.distance_m)
    ref = sc.reference()

    powers = pdp.powers
    delayed_idx = [e.tap_index for e in ellipses]
    p_zero = math.fsum(p for i, p in enumerate(powers) if i not in set(delayed_idx))
    p_local = (1.0 - sc.los_fraction) * p_zero
    strata_power = np.array([p_local] + [powers[i] for i in delayed_idx])

    tx, tx0 = sc.tx_pattern(), ref.tx_pattern()
    rx, rx0 = sc.rx_pattern(), ref.rx_pattern()
    g_t, g_t0 = gain(tx, 0.0), gain(tx0, 0.0)

    active = strata_power > 0
    counts = np.zeros(len(strata_power), dtype=int)
    counts[active] = _allocate(cfg.samples, strata_power[active])
    n_blocks = max(1, -(-int(counts.sum()) // cfg.block_size))
    seeds = np.random.SeedSequence(cfg.seed).spawn(n_blocks)

    def run_block(b: int) -> _Strata:
        rng = np.random.default_rng(seeds[b])
        acc = _Strata(len(strata_power))
        for i, n_total in enumerate(counts):
            n = n_total // n_blocks + (1 if b < n_total % n_blocks else 0)
            if n == 0:
                continue
            if i == 0:
                phi = sample_von_mises(rng, sc.kappa, n)
                acc.add(0, g_t * gain(rx, phi), g_t0 * gain(rx0, phi))
            else:
                ell = ellipses.ellipses[i - 1]
                offset = sample_aod_offsets(rng, tx, n)
                phi = aod_to_aoa(ell, tx.boresight_rad + offset)
                phi0 = aod_to_aoa(ell, tx0.boresight_rad + offset)
                acc.add(i, gain(rx, phi), gain(rx0, phi0))
        return acc

    strata = _Strata(len(strata_power))
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(run_block, range(n_blocks)))
    else:
        results = [run_block(b) for b in range(n_blocks)]
    for r in results:
        strata.merge(r)

    n = np.maximum(strata.totals("n"), 1.0)
    mean_w, mean_w0 = strata.totals("w") / n, strata.totals("w0") / n
    direct = sc.los_fraction * p_zero
    p = math.fsum(strata_power * mean_w) + direct * g_t * gain(rx, 0.0)
    p0 = math.fsum(strata_power * mean_w0) + direct * g_t0 * gain(rx0, 0.0)
    k = p / p0

    # delta-method variance of the ratio, per stratum
    second = (strata.totals("ww") - 2 * k * strata.totals("ww0") + k * k * strata.totals("w0w0")) / n
    var = np.maximum(second - (mean_w - k * mean_w0) ** 2, 0.0) * n / np.maximum(n - 1, 1)
    se = math.sqrt(math.fsum(strata_power**2 * var / n)) / p0
    return k, se
