"""
wwbirkhoff CLI

Command-line interface for the water-waves normal form engine.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 runtime abort (blowup, non-convergence, I/O).
"""

import argparse
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .config import ConfigError, RunConfig, default_threads, describe_keys, load_config

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_ABORT = 3

logger = logging.getLogger(__name__)


def main(argv: Optional[list] = None) -> int:
    """Main CLI entry point."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Path to a key = value run file")
    common.add_argument("--out", help="Output directory (overrides output_dir)")
    common.add_argument("--no-header", action="store_true", help="Omit the '# wwbirkhoff ...' header line")
    common.add_argument("--threads", type=int, default=None,
                        help="Worker threads for scans (default: WWBIRKHOFF_THREADS or 1)")
    common.add_argument("--verbose", action="store_true", help="Log progress to stderr")

    parser = argparse.ArgumentParser(
        prog="wwbirkhoff",
        description="Birkhoff normal form of Fourier-truncated deep-water gravity waves.",
        epilog=describe_keys(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--version", "-v",
        action="store_true",
        help="Show version"
    )

    subparsers = parser.add_subparsers(dest="command", help="Commands")
    subparsers.add_parser("expand", parents=[common], help="Write H2/H3/H4 term dumps")
    subparsers.add_parser("resonances", parents=[common], help="Enumerate resonances, cubic minimum or small-divisor scan")
    subparsers.add_parser("birkhoff-verify", parents=[common], help="Check the normal form against the closed form")
    simulate_parser = subparsers.add_parser("simulate", parents=[common], help="Integrate the ww or zd flow")
    simulate_parser.add_argument("--growth", action="store_true",
                                 help="Run the norm-growth experiment up to min(horizon, eps^-3)")
    subparsers.add_parser("coeffs", parents=[common], help="Probe expansion coefficients against closed forms")

    args = parser.parse_args(argv)

    if args.version:
        from . import __version__
        print(f"wwbirkhoff {__version__}")
        return EXIT_OK

    if args.command is None:
        parser.print_help()
        return EXIT_OK

    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )

    try:
        config = load_config(args.config) if args.config else RunConfig()
    except ConfigError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_CONFIG

    if args.threads is not None and args.threads < 1:
        print(f"ERROR: threads: must be >= 1, got {args.threads}", file=sys.stderr)
        return EXIT_CONFIG

    handlers = {
        "expand": cmd_expand,
        "resonances": cmd_resonances,
        "birkhoff-verify": cmd_birkhoff_verify,
        "simulate": cmd_simulate,
        "coeffs": cmd_coeffs,
    }

    from .birkhoff import NormalFormError
    from .dynamics import BlowupError, ConvergenceError, DynamicsError
    from .poly_hamiltonian import HamiltonianError
    from .resonance import ResonanceError
    from .spectral_core import SpectralError
    from .ww_expansion import ExpansionError

    try:
        return handlers[args.command](args, config)
    except ConfigError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (BlowupError, ConvergenceError) as e:
        print(f"ERROR: run aborted: {e}", file=sys.stderr)
        return EXIT_ABORT
    except DynamicsError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResonanceError, ExpansionError, HamiltonianError, NormalFormError, SpectralError) as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_ABORT


# =============================================================================
# HELPERS
# =============================================================================

def header_line(config: RunConfig) -> str:
    """`wwbirkhoff <version> <UTC timestamp> config=<sha3-256>` without the '# '."""
    from . import __version__
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return f"wwbirkhoff {__version__} {stamp} config={config.digest()}"


def _header(args, config: RunConfig) -> Optional[str]:
    return None if args.no_header else header_line(config)


def _out_dir(args, config: RunConfig) -> Path:
    out = Path(args.out if args.out else config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _threads(args) -> int:
    return args.threads if args.threads is not None else default_threads()


def _emit_header(header: Optional[str]) -> None:
    if header:
        print(f"# {header}")


# =============================================================================
# COMMANDS
# =============================================================================

def cmd_expand(args, config: RunConfig) -> int:
    """Write H2, H3, H4 at truncation M in the dumps line format."""
    from .poly_hamiltonian import dumps
    from .ww_expansion import build_hamiltonian

    out = _out_dir(args, config)
    header = _header(args, config)
    _emit_header(header)
    for degree in (2, 3, 4):
        H = build_hamiltonian(config.M, degree)
        path = out / f"H{degree}_M{config.M}.txt"
        with path.open("w") as f:
            if header:
                f.write(f"# {header}\n")
            f.write(dumps(H))
        print(f"H{degree}: {len(H)} terms -> {path}")
    return EXIT_OK


def cmd_resonances(args, config: RunConfig) -> int:
    """Enumerate quartic resonances, find the cubic minimum or scan small divisors."""
    from .resonance import (
        ResonanceKind,
        cubic_minimizer,
        enumerate_quartic,
        small_divisor_scan,
        write_enumeration_csv,
        write_small_divisor_csv,
    )

    header = _header(args, config)
    workers = _threads(args)

    if config.mode == "cubic-min":
        value, t = cubic_minimizer(config.N)
        _emit_header(header)
        print(f"min_cubic_phase N={config.N}: {value!r} at {t}")
        return EXIT_OK

    out = _out_dir(args, config)
    if config.mode == "enumerate":
        entries = enumerate_quartic(config.N, workers)
        path = out / f"resonances_N{config.N}.csv"
        with path.open("w", newline="") as f:
            write_enumeration_csv(f, entries, header)
        others = sum(1 for _, c in entries if c.kind == ResonanceKind.OTHER)
        print(f"{len(entries)} resonant tuples ({others} Other) -> {path}")
        return EXIT_OK if others == 0 else EXIT_FAIL

    table = small_divisor_scan(config.N, config.bucket_width, workers)
    path = out / f"small_divisors_N{config.N}.csv"
    with path.open("w", newline="") as f:
        write_small_divisor_csv(f, table, header)
    print(f"N0 ~ {table.exponent:.4f}, c ~ {table.constant:.4e} -> {path}")
    return EXIT_OK


def cmd_birkhoff_verify(args, config: RunConfig) -> int:
    """Compare the normal form with the closed form; exit 1 on failure."""
    from .birkhoff import verify_identity

    report = verify_identity(
        config.M,
        tol=config.tol,
        seed=config.seed,
        null_tol=config.null_tol,
        workers=_threads(args),
    )
    ok, message = report.validate_schema(require_schema=True)
    if not ok:
        print(f"ERROR: report failed schema validation: {message}", file=sys.stderr)
        return EXIT_FAIL

    out = _out_dir(args, config)
    path = out / f"birkhoff_M{config.M}.json"
    path.write_text(report.to_json() + "\n")
    _emit_header(_header(args, config))
    print(report.to_json())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_simulate(args, config: RunConfig) -> int:
    """Integrate the configured flow from a random datum and write its trajectory."""
    import time

    from .dynamics import (
        WaterWavesFlow,
        ZakharovDyachenkoFlow,
        integrate,
        norm_growth_experiment,
        random_initial_datum,
    )

    header = _header(args, config)
    cfg = config.integrator()

    if getattr(args, "growth", False):
        summary = norm_growth_experiment(
            config.epsilon, config.s, config.M, config.horizon, cfg,
            seed=config.seed, system=config.system, wall_budget=config.budget,
        )
        _emit_header(header)
        print(json.dumps(summary.to_dict(), indent=2))
        return EXIT_ABORT if summary.blowup else EXIT_OK

    datum = random_initial_datum(config.M, config.epsilon, config.s, config.seed)
    if config.system == "ww":
        flow = WaterWavesFlow(config.M, config.degree)
    else:
        flow = ZakharovDyachenkoFlow(config.M)
    deadline = time.monotonic() + config.budget if config.budget else None
    record = integrate(flow, datum, cfg, config.s, deadline=deadline)

    out = _out_dir(args, config)
    path = record.to_csv(out / f"trajectory_{config.system}_M{config.M}.csv", header=header)
    _emit_header(header)
    print(
        f"t={record.times[-1]:g} energy_drift={record.relative_energy_drift():.3e} "
        f"momentum_drift={record.relative_momentum_drift():.3e} "
        f"action_drift={record.max_action_drift():.3e} -> {path}"
    )
    return EXIT_OK


def cmd_coeffs(args, config: RunConfig) -> int:
    """Print probed coefficients against closed forms for 1 <= n <= M."""
    from .ww_expansion import TABLE_LABELS, coefficient_table

    _emit_header(_header(args, config))
    print("table,signs,modes,re,im,closed,abs_error")
    worst = 0.0
    for label in TABLE_LABELS:
        table = coefficient_table(label, config.M)
        for row in table.to_rows():
            print(",".join(row))
        worst = max(worst, table.max_error())
    print(f"# max abs error {worst:.3e} (tol {config.tol:g})")
    return EXIT_OK if worst <= config.tol else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
