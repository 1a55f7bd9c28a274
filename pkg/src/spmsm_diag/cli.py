"""Command-line entry point ``spmsm-diag``.

Exit codes: 0 success, 1 configuration or input error, 2 one or more
scenarios failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .config import load_scenario
from .diagnosis import Thresholds, baseline_delta, classify, rank_pd_variants
from .errors import ConfigError, SpmsmError
from .fault_model import fault_frequency_pattern
from .runner import run
from .spectral import HarmonicTable
from .synthesis import SimConfig, calibrate

EXIT_OK, EXIT_CONFIG, EXIT_SCENARIO = 0, 1, 2


def _cmd_run(args) -> int:
    cfg = load_scenario(args.config)
    if args.output_dir:
        cfg = replace(cfg, output_dir=args.output_dir)
    manifest = run(cfg, workers=args.workers)
    for name, status in manifest.status.items():
        print(f"{name:<16} {status:<7} {manifest.timings[name]:.3f} s")
    for note in manifest.notes:
        print(f"note: {note}")
    print(f"outputs in {Path(cfg.output_dir).resolve()}")
    return manifest.exit_code


def _cmd_calibrate(args) -> int:
    sim = SimConfig(samples_per_mechanical_period=args.samples)
    cal = calibrate(sim=sim, flux_target=args.flux, emf_target=args.emf)
    print(f"airgap_flux_density_t  {cal.airgap_flux_density!r}")
    print(f"turns_per_phase        {cal.turns_per_phase!r}")
    print(f"flux_peak_wb           {cal.flux_peak!r}")
    print(f"emf_peak_v             {cal.emf_peak!r}")
    print(f"mean_torque_nm         {cal.mean_torque!r}")
    return EXIT_OK


def _cmd_frequencies(args) -> int:
    for kind in ("eccentricity", "partial_demag", "healthy"):
        pat = fault_frequency_pattern(kind, args.fs, args.p, args.kmax)
        print(f"{kind:<14} " + " ".join(repr(f) for f in pat.frequencies))
    return EXIT_OK


def _cmd_classify(args) -> int:
    try:
        text = Path(args.table).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {args.table}: {exc.strerror}") from None
    table = HarmonicTable.from_csv(text)
    lookup = {label.lower(): label for label in table.labels}
    base = lookup.get(args.baseline.lower())
    if base is None:
        raise ConfigError(f"baseline row {args.baseline!r} not found in {list(table.labels)}")
    thresholds = Thresholds(args.detect_db, args.pd_floor_db, args.mixed_f1_db)
    healthy = table.row(base)
    reports = {}
    for label, vec in table.rows:
        reports[label] = classify(baseline_delta(vec, healthy), thresholds)
    if args.json:
        print(json.dumps({k: r.to_dict() for k, r in reports.items()}, indent=2))
    else:
        for label, rep in reports.items():
            print(f"{label:<16} {rep.label:<13} severity {rep.severity_score:+.2f} dB")
        pd = [(k, table.row(k)) for k, r in reports.items()
              if r.label == "PartialDemag"]
        if len(pd) >= 2:
            print("PD ranking: " + ", ".join(rank_pd_variants(pd)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spmsm-diag",
        description="Simulate SPMSM fault signatures and diagnose them from EMF sidebands.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run every scenario of a config file")
    p.add_argument("config", help="scenario file (JSON)")
    p.add_argument("--workers", type=int, default=None, help="parallel worker processes")
    p.add_argument("--output-dir", default=None, help="override the config's output_dir")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("calibrate", help="solve for B_PM and turns from the flux/EMF targets")
    p.add_argument("--flux", type=float, default=0.00589, help="flux fundamental peak (Wb)")
    p.add_argument("--emf", type=float, default=697.0, help="EMF fundamental peak (V)")
    p.add_argument("--samples", type=int, default=4096, help="samples per revolution")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("frequencies", help="print the characteristic frequency patterns")
    p.add_argument("--fs", type=float, default=188.3, help="supply frequency (Hz)")
    p.add_argument("--p", type=int, default=4, help="pole pairs")
    p.add_argument("--kmax", type=int, default=4, help="highest order k")
    p.set_defaults(func=_cmd_frequencies)

    p = sub.add_parser("classify", help="classify rows of a harmonic table CSV")
    p.add_argument("--table", required=True, help="CSV with a 'scenario' column")
    p.add_argument("--baseline", default="healthy", help="label of the healthy row")
    p.add_argument("--detect-db", type=float, default=5.0)
    p.add_argument("--pd-floor-db", type=float, default=20.0)
    p.add_argument("--mixed-f1-db", type=float, default=5.0)
    p.add_argument("--json", action="store_true", help="print full reports as JSON")
    p.set_defaults(func=_cmd_classify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SpmsmError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
