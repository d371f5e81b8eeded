"""Command-line sweeps of the orientation-corrected path loss.

Examples::

    antenna-pathloss --fig 2 --out fig2.csv
    antenna-pathloss --antenna PG --d-min 10 --d-max 400 --d-steps 40 \\
        --alpha 180 --beta 0,30,60 --kappa 10
    antenna-pathloss --dump-pdp --pdp my.csv --delay-unit normalized --ds-ns 363
    antenna-pathloss --oracle --samples 1000000 --seed 42 --antenna CR \\
        --d-min 100 --d-max 100 --d-steps 1 --alpha 180 --beta 60

Exit codes: 0 success, 2 usage error, 3 input data error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import antenna as ant
from .errors import PathLossError
from .geometry import build_ellipses
from .oracle import OracleConfig, mc_correction_factor
from .pas import DEFAULT_GRID_POINTS, DEFAULT_KAPPA, Scenario
from .pathloss import AssamConfig, assam_pl0, compose_db, modified_pl
from .pdp import DEFAULT_DS_NS, dump_pdp, load_pdp, tdl_b

log = logging.getLogger("antenna_pathloss")

EXIT_USAGE = 2
EXIT_DATA = 3

HEADER = ("antenna", "d_m", "alpha_deg", "beta_deg", "K_linear", "PL0_db", "PL_db", "k_floored")
ORACLE_HEADER = HEADER + ("K_stderr",)

DEFAULT_DISTANCES = tuple(float(d) for d in range(10, 401, 10))

# Each preset sweeps one orientation family over 10..400 m.
FIGURE_PRESETS = {
    2: dict(antennas=("CR",), alphas=(180.0,), betas=(0.0, 30.0, 60.0, 90.0, 120.0)),
    3: dict(antennas=("CR",), alphas=(180.0,), betas=(0.0, 30.0, 60.0, 90.0, 120.0)),
    4: dict(antennas=("CR",), alphas=(180.0, 150.0, 120.0, 90.0, 60.0), betas=(0.0,)),
    5: dict(antennas=("CR",), alphas=(180.0, 150.0, 120.0, 90.0, 60.0), betas=(0.0,)),
    6: dict(antennas=("CR", "PG"), alphas=(180.0,), betas=(0.0, 15.0, 30.0, 45.0)),
    7: dict(antennas=("CR", "PG"), alphas=(180.0, 165.0, 150.0), betas=(0.0, 15.0, 30.0)),
}


@dataclass(frozen=True)
class SweepSpec:
    antennas: tuple[str, ...] = ("CR",)
    distances_m: tuple[float, ...] = DEFAULT_DISTANCES
    alphas_deg: tuple[float, ...] = (180.0,)
    betas_deg: tuple[float, ...] = (0.0,)
    pdp_path: str | None = None
    delay_unit: str = "normalized"
    ds_ns: float | None = DEFAULT_DS_NS
    kappa: float = DEFAULT_KAPPA
    grid_points: int = DEFAULT_GRID_POINTS
    los_fraction: float = 0.0
    catalog_path: str | None = None
    config: AssamConfig = field(default_factory=AssamConfig)
    workers: int = 1

    def __post_init__(self):
        for name in ("antennas", "distances_m", "alphas_deg", "betas_deg"):
            if not getattr(self, name):
                raise ValueError(f"{name} must not be empty")
        if any(not d > 0 for d in self.distances_m):
            raise ValueError("distances must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        # surface kappa/grid/los errors as usage errors before any work starts
        probe = ant.AntennaSpec("probe", None, None, None)
        Scenario(self.distances_m[0], 180.0, 0.0, probe, probe, self.kappa, self.grid_points, self.los_fraction)

    def load_pdp(self):
        if self.pdp_path is None:
            return tdl_b(self.ds_ns if self.ds_ns is not None else DEFAULT_DS_NS)
        return load_pdp(self.pdp_path, self.delay_unit, self.ds_ns)

    def tuples(self):
        """(antenna, d, alpha, beta) in output order: antenna, then d, alpha, beta."""
        for name in self.antennas:
            for d in self.distances_m:
                for a in self.alphas_deg:
                    for b in self.betas_deg:
                        yield name, d, a, b


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _row(name, d, a, b, k, pl0, pl, floored, *extra) -> str:
    cols = [name, _fmt(d), _fmt(a), _fmt(b), _fmt(k), _fmt(pl0), _fmt(pl), str(int(floored))]
    return ",".join(cols + [_fmt(x) for x in extra])


def _evaluate_distance(args) -> list[str]:
    spec, antenna, pdp, d = args
    ellipses = build_ellipses(pdp, d)
    rows = []
    for a in spec.alphas_deg:
        for b in spec.betas_deg:
            sc = Scenario(d, a, b, antenna, antenna, spec.kappa, spec.grid_points, spec.los_fraction)
            res = modified_pl(sc, pdp, spec.config, ellipses=ellipses)
            rows.append(_row(antenna.name, d, a, b, res.k_linear, res.pl0_db, res.pl_db, res.k_floored))
    return rows


def run_sweep(spec: SweepSpec) -> list[str]:
    """CSV lines (header first) for every sweep tuple, in deterministic order."""
    catalog = ant.load_catalog(spec.catalog_path)
    antennas = [ant.lookup(n, catalog) for n in spec.antennas]
    pdp = spec.load_pdp()
    for d in spec.distances_m:
        if not spec.config.in_range(d):
            log.warning("d = %g m lies outside the model's validity range %s m", d, spec.config.valid_range_m)
    jobs = [(spec, a, pdp, d) for a in antennas for d in spec.distances_m]
    if spec.workers > 1:
        with ProcessPoolExecutor(spec.workers) as pool:
            chunks = list(pool.map(_evaluate_distance, jobs))
    else:
        chunks = [_evaluate_distance(job) for job in jobs]
    lines = [",".join(HEADER)]
    for chunk in chunks:
        lines.extend(chunk)
    return lines


def run_oracle_sweep(spec: SweepSpec, samples: int, seed: int) -> list[str]:
    catalog = ant.load_catalog(spec.catalog_path)
    pdp = spec.load_pdp()
    lines = [",".join(ORACLE_HEADER)]
    for name, d, a, b in spec.tuples():
        antenna = ant.lookup(name, catalog)
        sc = Scenario(d, a, b, antenna, antenna, spec.kappa, spec.grid_points, spec.los_fraction)
        k, se = mc_correction_factor(OracleConfig(sc, pdp, samples, seed, workers=spec.workers))
        pl0 = assam_pl0(antenna, d, spec.config)
        lines.append(_row(name, d, a, b, k, pl0, compose_db(pl0, k), False, se))
    return lines


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="antenna-pathloss",
        description="Path loss versus distance for arbitrary Tx/Rx antenna orientations.",
    )
    p.add_argument("--fig", type=int, choices=sorted(FIGURE_PRESETS), help="run a preset sweep")
    p.add_argument("--antenna", help="catalog antenna name(s), comma-separated (default CR)")
    p.add_argument("--catalog", help=f"antenna catalog file (default ${ant.CATALOG_ENV} or builtin)")
    p.add_argument("--d-min", type=float, default=10.0)
    p.add_argument("--d-max", type=float, default=400.0)
    p.add_argument("--d-steps", type=int, default=40)
    p.add_argument("--log", action="store_true", help="log-spaced distances")
    p.add_argument("--alpha", type=_floats, help="Tx boresight(s), degrees")
    p.add_argument("--beta", type=_floats, help="Rx boresight(s), degrees")
    p.add_argument("--pdp", help="PDP CSV (default: shipped TDL-B)")
    p.add_argument("--delay-unit", choices=("ns", "normalized"), default=None)
    p.add_argument("--ds-ns", type=float, default=None, help=f"delay spread for normalized delays (default {DEFAULT_DS_NS:g})")
    p.add_argument("--kappa", type=float, default=DEFAULT_KAPPA, help="von Mises concentration")
    p.add_argument("--grid", type=int, default=DEFAULT_GRID_POINTS, help="odd number of AOA grid nodes")
    p.add_argument("--los-fraction", type=float, default=0.0)
    p.add_argument("--config", help="JSON file overriding the reference constants")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--dump-pdp", action="store_true", help="print the parsed PDP canonically and exit")
    p.add_argument("--dump-catalog", action="store_true", help="print the antenna catalog and exit")
    p.add_argument("--oracle", action="store_true", help="estimate K by Monte Carlo instead")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, help="RNG seed (required with --oracle)")
    return p


def spec_from_args(args) -> SweepSpec:
    preset = FIGURE_PRESETS.get(args.fig, {})
    if args.d_steps < 1 or not 0 < args.d_min <= args.d_max:
        raise ValueError("need 0 < d-min <= d-max and d-steps >= 1")
    if preset and args.d_min == 10.0 and args.d_max == 400.0 and args.d_steps == 40 and not args.log:
        distances = DEFAULT_DISTANCES
    elif args.log:
        distances = tuple(np.geomspace(args.d_min, args.d_max, args.d_steps).tolist())
    else:
        distances = tuple(np.linspace(args.d_min, args.d_max, args.d_steps).tolist())
    delay_unit = args.delay_unit or ("ns" if args.pdp else "normalized")
    ds_ns = args.ds_ns
    if ds_ns is None and args.pdp is None:
        ds_ns = DEFAULT_DS_NS
    return SweepSpec(
        antennas=tuple(args.antenna.split(",")) if args.antenna else preset.get("antennas", ("CR",)),
        distances_m=distances,
        alphas_deg=args.alpha or preset.get("alphas", (180.0,)),
        betas_deg=args.beta or preset.get("betas", (0.0,)),
        pdp_path=args.pdp,
        delay_unit=delay_unit,
        ds_ns=ds_ns,
        kappa=args.kappa,
        grid_points=args.grid,
        los_fraction=args.los_fraction,
        catalog_path=args.catalog,
        config=AssamConfig.from_file(args.config) if args.config else AssamConfig(),
        workers=args.workers,
    )


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        try:
            spec = spec_from_args(args)
        except ValueError as exc:
            if isinstance(exc, PathLossError):
                raise
            parser.print_usage(sys.stderr)
            print(f"antenna-pathloss: error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        if args.dump_catalog:
            _emit(ant.dump_catalog(ant.load_catalog(spec.catalog_path)), args.out)
            return 0
        if args.dump_pdp:
            _emit(dump_pdp(spec.load_pdp()), args.out)
            return 0
        if args.oracle:
            if args.seed is None:
                parser.print_usage(sys.stderr)
                print("antenna-pathloss: error: --oracle requires --seed", file=sys.stderr)
                return EXIT_USAGE
            lines = run_oracle_sweep(spec, args.samples, args.seed)
        else:
            lines = run_sweep(spec)
            floored = sum(line.endswith(",1") for line in lines[1:])
            if floored:
                log.warning("%d row(s) had K floored at the minimum", floored)
    except (PathLossError, OSError) as exc:
        print(f"antenna-pathloss: input error: {exc}", file=sys.stderr)
        return EXIT_DATA
    _emit("\n".join(lines) + "\n", args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
