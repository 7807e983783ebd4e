"""Command-line front end emitting figure-ready CSV/JSON artifacts.

Exit status: 0 on success, 2 on configuration or usage errors, 3 when a
verification step fails.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, data
from .coupling import CouplingParams
from .distributions import PhononDistribution
from .optimizer import OptimizationSpec, optimize, verify_table
from .profiles import alpha_of, band_by_reference, calibrate_band_coupling, profile
from .protocols import (
    NoiseModel,
    coherent_scan,
    confusion_matrix,
    single_shot_exact,
    single_shot_statistics,
)
from .pulses import PhaseSequence

EXIT_CONFIG = 2
EXIT_VERIFY = 3


class ConfigError(Exception):
    pass


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(f"{v:.17g}" if isinstance(v, float) else str(v)
                              for v in row))
    _write_atomic(path, "\n".join(lines) + "\n")


def _write_manifest(out_dir: Path, command: str, args: argparse.Namespace,
                    outputs: list[str], t0: float, extra: dict | None = None) -> None:
    doc = {
        "command": command,
        "argv": sys.argv[1:],
        "config": getattr(args, "config", None),
        "seed": getattr(args, "seed", None),
        "outputs": outputs,
        "version": __version__,
        "wall_clock_s": round(time.monotonic() - t0, 3),
    }
    if extra:
        doc.update(extra)
    _write_atomic(out_dir / "manifest.json", json.dumps(doc, indent=2) + "\n")


def _load_config(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}")


def _config_get(cfg: dict, key: str, path: str):
    if key not in cfg:
        raise ConfigError(f"{path}: missing required key {key!r}")
    return cfg[key]


def _resolve_sequence(args) -> PhaseSequence:
    if getattr(args, "phases_file", None):
        return PhaseSequence.load(args.phases_file)
    if getattr(args, "seq", None):
        try:
            return data.get_sequence(args.seq)
        except KeyError as exc:
            raise ConfigError(str(exc))
    raise ConfigError("need --seq or --phases-file")


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_profile(args) -> int:
    t0 = time.monotonic()
    seq = _resolve_sequence(args)
    if not (args.area_min_pi < args.area_max_pi):
        raise ConfigError("need area-min-pi < area-max-pi")
    prof = profile(seq, args.area_min_pi * np.pi, args.area_max_pi * np.pi,
                   args.points)
    out = _out_dir(args)
    _write_csv(out / "profile.csv", ["area_pi", "excitation"], prof.to_rows())
    _write_manifest(out, "profile", args, ["profile.csv"], t0,
                    {"sequence": seq.to_json_dict()})
    print(f"wrote {out / 'profile.csv'} ({args.points} points, "
          f"sequence {seq.name or 'custom'})")
    return 0


def cmd_alpha(args) -> int:
    t0 = time.monotonic()
    out = _out_dir(args)
    rows = []
    failed = False
    if args.all:
        entries = [(data.get_sequence(e["name"]), e["alpha"])
                   for e in data.table_entries()]
        report = verify_table(entries, threshold=args.threshold, tol=args.tol)
        for row in report:
            rows.append(row)
            status = "ok" if row["passed"] else "FAIL"
            print(f"{row['name']:>6}  claimed {row['claimed_alpha']:.3f}  "
                  f"computed {row['computed_alpha']:.4f}  {status}")
            failed |= args.verify and not row["passed"]
    else:
        seq = _resolve_sequence(args)
        result = alpha_of(seq, args.threshold)
        rows.append({"name": seq.name or "custom",
                     "computed_alpha": result.alpha,
                     "certified": result.certified,
                     "max_outside": result.max_outside})
        print(f"{seq.name or 'custom'}: alpha = {result.alpha:.4f} "
              f"(threshold {args.threshold:g}, certified {result.certified})")
    _write_atomic(out / "alpha.json", json.dumps(rows, indent=2) + "\n")
    _write_manifest(out, "alpha", args, ["alpha.json"], t0)
    return EXIT_VERIFY if failed else 0


def cmd_optimize(args) -> int:
    t0 = time.monotonic()
    spec = OptimizationSpec(n_pulses=args.n_pulses, threshold=args.threshold,
                            restarts=args.restarts, seed=args.seed)
    seq, result = optimize(spec)
    out = _out_dir(args)
    doc = seq.to_json_dict()
    doc["alpha"] = result.alpha
    doc["certified"] = result.certified
    doc["max_outside"] = result.max_outside
    _write_atomic(out / f"optimized_{args.n_pulses}.json",
                  json.dumps(doc, indent=2) + "\n")
    _write_manifest(out, "optimize", args, [f"optimized_{args.n_pulses}.json"], t0)
    print(f"N={args.n_pulses}: alpha = {result.alpha:.4f} "
          f"(certified {result.certified})")
    return 0


def _parse_coupling(cfg: dict, path: str) -> CouplingParams:
    doc = _config_get(cfg, "coupling", path)
    try:
        return CouplingParams.from_json_dict(doc)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"{path}: bad coupling block: {exc}")


def _parse_noise(cfg: dict, path: str) -> NoiseModel:
    try:
        return NoiseModel.from_json_dict(cfg.get("noise", {}))
    except ValueError as exc:
        raise ConfigError(f"{path}: bad noise block: {exc}")


def cmd_confusion(args) -> int:
    t0 = time.monotonic()
    cfg = _load_config(args.config)
    seq = data.get_sequence(_config_get(cfg, "sequence", args.config))
    cp = _parse_coupling(cfg, args.config)
    noise = _parse_noise(cfg, args.config)
    m_lo, m_hi = _config_get(cfg, "prepared_range", args.config)
    n_lo, n_hi = _config_get(cfg, "probed_range", args.config)
    mat = confusion_matrix(range(m_lo, m_hi + 1), range(n_lo, n_hi + 1),
                           seq, cp, noise)
    out = _out_dir(args)
    header = ["prepared_m"] + [f"probe_{n}" for n in range(n_lo, n_hi + 1)]
    rows = [[m] + [float(v) for v in mat[i]]
            for i, m in enumerate(range(m_lo, m_hi + 1))]
    _write_csv(out / "confusion.csv", header, rows)
    _write_manifest(out, "confusion", args, ["confusion.csv"], t0)
    print(f"wrote {out / 'confusion.csv'} "
          f"(diagonal min {np.diag(mat).min():.4f})")
    return 0


def cmd_single_shot(args) -> int:
    t0 = time.monotonic()
    cfg = _load_config(args.config)
    dist = PhononDistribution.from_json_dict(
        _config_get(cfg, "distribution", args.config))
    probes = [(int(p["n"]), data.get_sequence(p["sequence"]))
              for p in _config_get(cfg, "probes", args.config)]
    cp = _parse_coupling(cfg, args.config)
    noise = _parse_noise(cfg, args.config)
    runs = args.runs if args.runs is not None else int(cfg.get("runs", 100000))
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    stats = single_shot_statistics(dist, probes, noise, cp, runs, seed)
    if noise.phase_jitter_sigma == 0.0:
        stats["exact"] = single_shot_exact(dist, probes, noise, cp)
    out = _out_dir(args)
    _write_atomic(out / "single_shot.json", json.dumps(stats, indent=2) + "\n")
    _write_csv(out / "single_shot.csv",
               ["probe_n", "reached", "positives", "conditional_freq"],
               zip(stats["probe_n"], stats["reached"], stats["positives"],
                   [float(c) for c in stats["conditional_freq"]]))
    _write_manifest(out, "single-shot", args,
                    ["single_shot.json", "single_shot.csv"], t0,
                    {"runs": runs, "seed": seed})
    print(f"{runs} runs: positives per probe {stats['positives']}")
    return 0


def cmd_filter_scan(args) -> int:
    t0 = time.monotonic()
    cfg = _load_config(args.config)
    seq = data.get_sequence(_config_get(cfg, "sequence", args.config))
    carrier = data.get_sequence(cfg.get("carrier_sequence", "UN3"))
    band = tuple(_config_get(cfg, "band", args.config))
    noise = _parse_noise(cfg, args.config)
    grid_cfg = _config_get(cfg, "nbar_grid", args.config)
    nbar_grid = np.arange(grid_cfg["start"], grid_cfg["stop"] + 1e-9,
                          grid_cfg["step"])
    cp, omega_ref = calibrate_band_coupling(
        seq, band, omega_car=float(cfg.get("omega_car_hz", 1.0)),
        mode_label=cfg.get("mode", ""))
    got = band_by_reference(seq, omega_ref, cp)
    curve = coherent_scan(nbar_grid, seq, cp, noise, carrier_seq=carrier,
                          omega_ref=omega_ref,
                          amplitude_scale=float(cfg.get("amplitude_scale", 1.0)))
    out = _out_dir(args)
    _write_csv(out / "filter_scan.csv", ["nbar", "pass_probability"],
               zip(nbar_grid.tolist(), curve.tolist()))
    summary = {
        "band_requested": list(band),
        "band_calibrated": list(got),
        "eta": cp.eta,
        "omega_ref": omega_ref,
        "mode": cp.mode_label,
    }
    _write_atomic(out / "filter_scan.json", json.dumps(summary, indent=2) + "\n")
    _write_manifest(out, "filter-scan", args,
                    ["filter_scan.csv", "filter_scan.json"], t0, summary)
    print(f"calibrated eta = {cp.eta:.4f}, band {got} (requested {band})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unpulse",
        description="Design ultra-narrowband composite pulses and simulate "
                    "motional-state detection protocols.")
    parser.add_argument("--threads", type=int, default=None,
                        help="cap internal parallelism (recorded; the library "
                             "is single-threaded)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out-dir", default="out", help="output directory")

    p = sub.add_parser("profile", help="tabulate an excitation profile")
    p.add_argument("--seq", help="bundled sequence name (e.g. UN5, single)")
    p.add_argument("--phases-file", help="JSON file with custom phases")
    p.add_argument("--points", type=int, default=4096)
    p.add_argument("--area-min-pi", type=float, default=0.0)
    p.add_argument("--area-max-pi", type=float, default=2.0)
    add_common(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("alpha", help="measure band narrowness")
    p.add_argument("--seq")
    p.add_argument("--phases-file")
    p.add_argument("--all", action="store_true",
                   help="process every bundled sequence")
    p.add_argument("--verify", action="store_true",
                   help="fail (exit 3) if tabulated values are not reproduced")
    p.add_argument("--threshold", type=float, default=0.01)
    p.add_argument("--tol", type=float, default=0.002)
    add_common(p)
    p.set_defaults(func=cmd_alpha)

    p = sub.add_parser("optimize", help="search for narrowband phases")
    p.add_argument("-N", "--n-pulses", type=int, required=True)
    p.add_argument("--restarts", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float, default=0.01)
    add_common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("confusion", help="Fock-state confusion matrix")
    p.add_argument("--config", required=True)
    add_common(p)
    p.set_defaults(func=cmd_confusion)

    p = sub.add_parser("single-shot", help="sequential probing Monte Carlo")
    p.add_argument("--config", required=True)
    p.add_argument("--runs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    add_common(p)
    p.set_defaults(func=cmd_single_shot)

    p = sub.add_parser("filter-scan", help="triple-detection band scan")
    p.add_argument("--config", required=True)
    add_common(p)
    p.set_defaults(func=cmd_filter_scan)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (KeyError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
