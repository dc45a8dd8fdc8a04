"""
Command-line entry point::

    spdcmodes <subcommand> --config FILE --out DIR [--preset desk|paper] [--threads N]

Each subcommand writes CSV or JSON files into ``DIR``.  On failure an
``error.json`` record is written there (and echoed on stderr) and the exit
status is nonzero: 2 for configuration errors, 1 for computation errors.
"""
import argparse
import json
import os
import sys
import traceback

import numpy as np

from . import __version__
from .io import ConfigError, expand_values, parse_config, write_csv, write_json
from .metrics import EFFICIENCY_COLUMNS, efficiency_rows, heralding
from .overlap import build_table, normalized_overlap
from .purity import PumpSpectrum, build_jsa, jsa_rows, optimize_pump_bandwidth
from .sweep import (fit_tradeoff, grid_sweep, length_scaling, strategy_fixed_collection,
                    strategy_fixed_pump, strategy_max_H_at_B)

SUBCOMMANDS = ("spectrum", "overlap", "sweep", "tradeoff", "purity", "scaling", "fit")
STRATEGY_COLUMNS = ("strategy", "xi_p", "xi_s", "phi_tilde", "B", "H")


def _meta(opts, subcommand):
    return {"config_hash": opts.config_hash, "preset": opts.preset, "subcommand": subcommand,
            "tool": "spdcmodes", "version": __version__}


def _sweep(opts, threads):
    sw = opts.section("sweep")
    lo, hi = sw["log_xi"]
    return grid_sweep(opts.source, (lo, hi, sw["step"]), expand_values(sw["phi_values"]),
                      window=opts.window, threads=threads)


def _strategies(opts, sweep):
    targets = expand_values(opts.section("tradeoff")["B_targets"])
    band = opts.section("tradeoff")["band"]
    return {
        "fixed_collection": strategy_fixed_collection(sweep),
        "fixed_pump": strategy_fixed_pump(sweep),
        "max_H_at_B": strategy_max_H_at_B(sweep, targets, band),
    }


def cmd_spectrum(opts, out, threads):
    table = build_table(opts.source)
    meta = _meta(opts, "spectrum")
    pm = table.p_max
    pairs = [(a, b) for a in range(pm + 1) for b in range(pm + 1)]
    scale = opts.source.omega_scale()
    cols = ["omega_dimensionless", "omega_rad_per_s"] + [f"P_{a}_{b}" for a, b in pairs]
    rows = [[w, w * scale] + [float(table.density(a, b)[k]) for a, b in pairs]
            for k, w in enumerate(table.omega)]
    write_csv(os.path.join(out, "spectrum.csv"), cols, rows, meta)
    table_meta = dict(meta)
    table_meta["source_hash"] = opts.source.config_hash()
    cols = ["p_s", "p_i", "omega_dimensionless", "re_C", "im_C"]
    rows = [(a, b, w, table.amplitudes[a, b, k].real, table.amplitudes[a, b, k].imag)
            for a, b in pairs for k, w in enumerate(table.omega)]
    write_csv(os.path.join(out, "amplitudes.csv"), cols, rows, table_meta)
    rep = heralding(table, opts.window)
    write_csv(os.path.join(out, "efficiency.csv"), EFFICIENCY_COLUMNS,
              efficiency_rows([(opts.source, opts.window, rep)]), meta)


def cmd_overlap(opts, out, threads):
    table = build_table(opts.source)
    pm = table.p_max
    pairs = [(0, p) for p in range(pm + 1)] + [(p, 0) for p in range(1, pm + 1)]
    rows = []
    for a in pairs:
        for b in pairs:
            try:
                val = normalized_overlap(table, a, b)
            except ValueError:
                val = None
            rows.append((a[0], a[1], b[0], b[1], val))
    write_csv(os.path.join(out, "overlap.csv"),
              ["p_s_a", "p_i_a", "p_s_b", "p_i_b", "overlap"], rows, _meta(opts, "overlap"))


def cmd_sweep(opts, out, threads):
    sweep = _sweep(opts, threads)
    meta = _meta(opts, "sweep")
    write_csv(os.path.join(out, "sweep.csv"), ["xi_p", "xi_s", "phi_tilde", "B", "H"],
              sweep.rows(), meta)
    best = sweep.point(sweep.argmax)
    write_json(os.path.join(out, "sweep_summary.json"),
               {"argmax": best.__dict__, "grid": {"log_xi": list(sweep.grid_spec[0]),
                                                  "z_nodes": sweep.grid_spec[1]},
                "source_hash": sweep.config_hash}, meta)
    return sweep


def cmd_tradeoff(opts, out, threads):
    sweep = _sweep(opts, threads)
    rows = []
    for name, pts in _strategies(opts, sweep).items():
        rows.extend((name, p.xi_p, p.xi_s, p.phi_tilde, p.B, p.H) for p in pts)
    write_csv(os.path.join(out, "tradeoff.csv"), STRATEGY_COLUMNS, rows,
              _meta(opts, "tradeoff"))


def cmd_fit(opts, out, threads):
    sweep = _sweep(opts, threads)
    curve = _strategies(opts, sweep)["max_H_at_B"]
    fits = {}
    for target in opts.section("fit")["targets"]:
        f = fit_tradeoff(curve, target)
        fits[target] = {"coefficients": list(f.coefficients), "residual_rms": f.residual_rms,
                        "n_points": f.n_points}
    write_json(os.path.join(out, "fit.json"), fits, _meta(opts, "fit"))


def cmd_purity(opts, out, threads):
    p = opts.section("purity")
    interval = tuple(p["search_interval"]) if p["search_interval"] else None
    res = optimize_pump_bandwidth(opts.source, p["n_grid"], interval, p["rank_cap"])
    meta = _meta(opts, "purity")
    write_json(os.path.join(out, "purity.json"),
               {"purity": res.purity, "sigma_p_rad_per_s": res.sigma_p_used,
                "pump_width_dimensionless": res.extra["dimensionless_width"],
                "schmidt_coefficients": list(res.schmidt_coefficients[:16]),
                "warning": res.warning}, meta)
    if p["dump_jsa"]:
        jsa = build_jsa(opts.source, PumpSpectrum.gaussian(res.sigma_p_used), p["n_grid"])
        write_csv(os.path.join(out, "jsa.csv"), ["omega_s", "omega_i", "re", "im"],
                  jsa_rows(jsa), meta)


def cmd_scaling(opts, out, threads):
    s = opts.section("scaling")
    res = length_scaling(opts.source, s["lengths"], s["filtered"], s["narrow_width"])
    write_json(os.path.join(out, "scaling.json"),
               {"exponent": res.exponent, "stderr": res.stderr, "lengths_m": list(res.lengths),
                "S2_relative": list(res.S2), "filter_width_rad_per_s": res.filter_width},
               _meta(opts, "scaling"))


COMMANDS = {
    "spectrum": cmd_spectrum, "overlap": cmd_overlap, "sweep": cmd_sweep,
    "tradeoff": cmd_tradeoff, "purity": cmd_purity, "scaling": cmd_scaling, "fit": cmd_fit,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="spdcmodes", description=__doc__.split("\n\n")[0])
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("--config", required=True, help="JSON configuration file")
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--preset", choices=("desk", "paper"), default="desk")
    ap.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    ap.add_argument("--version", action="version", version=f"spdcmodes {__version__}")
    return ap


def _error(out, subcommand, kind, exc):
    record = {"status": "error", "subcommand": subcommand, "error_type": type(exc).__name__,
              "kind": kind, "message": str(exc)}
    text = json.dumps(record, sort_keys=True)
    print(text, file=sys.stderr)
    try:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, "error.json"), "w") as fh:
            fh.write(text + "\n")
    except OSError:
        pass


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        _error(args.out, args.subcommand, "config", ValueError("--threads must be >= 1"))
        return 2
    try:
        with open(args.config) as fh:
            opts = parse_config(fh.read(), args.preset)
    except (OSError, ConfigError) as exc:
        _error(args.out, args.subcommand, "config", exc)
        return 2
    try:
        os.makedirs(args.out, exist_ok=True)
        with np.errstate(all="ignore"):
            COMMANDS[args.subcommand](opts, args.out, args.threads)
    except Exception as exc:  # noqa: BLE001 - every module error becomes a record
        if os.environ.get("SPDCMODES_TRACEBACK"):
            traceback.print_exc()
        _error(args.out, args.subcommand, "computation", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
