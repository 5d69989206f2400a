"""Batch command line: sweeps, resonance search, validation, oracle comparison, field maps.

Exit codes: 0 success, 1 validation failure, 2 configuration or I/O error.
CSV output uses '.' decimals, LF line endings and 17 significant digits.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .fdfd import fdfd_half_solve, fdfd_solve
from .fields import field_map
from .resonance import FrequencyBand, find_resonances, sweep
from .solver import ModeMatchSolver
from .validate import run_all


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_lines(path: Path, lines: list[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines))
        if lines:
            fh.write("\n")


def _out_path(args, config: RunConfig, key: str, default: str) -> Path:
    if args.out:
        return Path(args.out)
    return Path(config.output.get(key, default))


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    solver = ModeMatchSolver(config.geometry, config.N, config.M)
    rows = sweep(solver, config.band)
    lines = ["k,re_r1,im_r1,re_t1,im_t1,R,T,energy_defect,h_res"]
    for r in rows:
        lines.append(",".join(_fmt(v) for v in (
            r.k, r.r1.real, r.r1.imag, r.t1.real, r.t1.imag,
            r.R, r.T, r.energy_defect, r.h_res)))
    _write_lines(_out_path(args, config, "sweep", "sweep.csv"), lines)
    return 0


def cmd_resonance(args) -> int:
    config = load_config(args.config)
    solver = ModeMatchSolver(config.geometry, config.N, config.M)
    report = {"resonances": [], "band": {"kmin": config.band.kmin,
                                         "kmax": config.band.kmax}}
    for kind in ("D", "N"):
        for res in find_resonances(solver, config.band, kind):
            report["resonances"].append({
                "kind": res.kind,
                "k_res": res.k_res,
                "residual": res.residual,
                "re_r1": res.r1_at_res.real, "im_r1": res.r1_at_res.imag,
                "re_t1": res.t1_at_res.real, "im_t1": res.t1_at_res.imag,
                "bracket": list(res.bracket),
                "closed_cavity_prediction": res.closed_cavity_prediction,
            })
    if not report["resonances"]:
        report["note"] = "none found"
    path = _out_path(args, config, "resonance", "resonance.json")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    return 0


def cmd_validate(args) -> int:
    config = load_config(args.config)
    checks = run_all(config)
    ok = all(c.passed for c in checks)
    report = {"passed": ok, "checks": [c.to_dict() for c in checks]}
    path = _out_path(args, config, "validate", "validate.json")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.value:.3e} "
              f"(threshold {c.threshold:.3e})")
    return 0 if ok else 1


def _compare_points(config: RunConfig) -> list[float]:
    if config.k_values:
        return list(config.k_values)
    # default: 10 points kept clear of the band edges and of short-lead trouble
    lo = config.band.kmin
    hi = config.band.kmax
    return list(np.linspace(lo + 0.05 * (hi - lo), lo + 0.75 * (hi - lo), 10))


def cmd_compare_oracle(args) -> int:
    config = load_config(args.config)
    if config.oracle is None:
        raise ConfigError("compare-oracle needs an 'oracle' block in the config")
    solver = ModeMatchSolver(config.geometry, config.N, config.M)
    ks = [args.k] if args.k is not None else _compare_points(config)
    if args.half:
        lines = ["k,re_r1D_modal,im_r1D_modal,re_r1D_fdfd,im_r1D_fdfd,abs_diff_r1D,"
                 "re_r1N_modal,im_r1N_modal,re_r1N_fdfd,im_r1N_fdfd,abs_diff_r1N"]
    else:
        lines = ["k,re_r1_modal,im_r1_modal,re_t1_modal,im_t1_modal,"
                 "re_r1_fdfd,im_r1_fdfd,re_t1_fdfd,im_t1_fdfd,abs_diff_r1,abs_diff_t1"]
    for k in ks:
        sc = solver.scattering(float(k))
        if args.half:
            rDf = fdfd_half_solve(config.geometry, float(k), config.oracle, "D")
            rNf = fdfd_half_solve(config.geometry, float(k), config.oracle, "N")
            lines.append(",".join(_fmt(v) for v in (
                k, sc.r1D.real, sc.r1D.imag, rDf.real, rDf.imag, abs(sc.r1D - rDf),
                sc.r1N.real, sc.r1N.imag, rNf.real, rNf.imag, abs(sc.r1N - rNf))))
        else:
            oracle = fdfd_solve(config.geometry, float(k), config.oracle)
            lines.append(",".join(_fmt(v) for v in (
                k, sc.r1.real, sc.r1.imag, sc.t1.real, sc.t1.imag,
                oracle.r1.real, oracle.r1.imag, oracle.t1.real, oracle.t1.imag,
                abs(sc.r1 - oracle.r1), abs(sc.t1 - oracle.t1))))
    _write_lines(_out_path(args, config, "compare", "compare.csv"), lines)
    return 0


def cmd_field(args) -> int:
    config = load_config(args.config)
    if args.k is None:
        raise ConfigError("field needs --k <wavenumber>")
    geometry = config.geometry
    solver = ModeMatchSolver(geometry, config.N, config.M)
    result = solver.scattering(args.k)
    x = np.linspace(0.0, geometry.H, 81)
    z = np.linspace(-1.0, geometry.L + geometry.w + 1.0, 241)
    field, _ = field_map(geometry, result, solver.basis, x, z)
    lines = ["x,z,re_u,im_u"]
    for i, xi in enumerate(x):
        for j, zj in enumerate(z):
            lines.append(",".join(_fmt(v) for v in (xi, zj, field[i, j].real,
                                                    field[i, j].imag)))
    # cavity enhancement relative to the inlet lead, recorded as footer metadata
    cav = (z > geometry.w) & (z < geometry.L)
    inlet = z < 0.0
    enh = float(np.sqrt(np.mean(np.abs(field[:, cav]) ** 2)
                        / np.mean(np.abs(field[:, inlet]) ** 2)))
    lines.append(f"# k={_fmt(args.k)}")
    lines.append(f"# cavity_enhancement={_fmt(enh)}")
    _write_lines(_out_path(args, config, "field", "field.csv"), lines)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ductbarrier",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    specs = (("sweep", cmd_sweep), ("resonance", cmd_resonance),
             ("validate", cmd_validate), ("compare-oracle", cmd_compare_oracle),
             ("field", cmd_field))
    for name, fun in specs:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON configuration file")
        sp.add_argument("--out", default=None, help="output path override")
        sp.add_argument("--k", type=float, default=None,
                        help="wavenumber (field; single-point compare-oracle)")
        if name == "compare-oracle":
            sp.add_argument("--half", action="store_true",
                            help="compare the half-problem reflections instead")
        sp.set_defaults(fun=fun)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fun(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
