"""Command-line entry point.

Exit codes: 0 ok, 2 config/validation error, 3 model construction failure,
4 optimizer did not converge.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .circuit import PassivityError, SingularNetworkError, frequency_grid
from .config import ConfigError, DesignConfig, load_config
from .core_em import OutOfRangeError, microstrip_impedance, phase_velocity
from .design import AntennaModel, model_trace
from .geometry import GeometryValidationError, build_geometry, circular_patch_radius, export_json, export_svg
from .notch import (
    band_rejection_report,
    notch_frequency_from_length,
    resonator_element,
    size_discrepancy,
    slot_length_for_frequency,
)
from .optimizer import TuneError, TuneProblem, match_centers, notch_centers, round_sig, tune, tune_report
from .taper import (
    TaperSpec,
    analytic_reflection,
    beta_l,
    impedance_at,
    min_length_for_reflection,
    numeric_reflection,
    taper_exponent,
)

EXIT_OK, EXIT_CONFIG, EXIT_MODEL, EXIT_CONVERGENCE = 0, 2, 3, 4

# reference slot sizes more than this far from the half-wave length are flagged
DISCREPANCY_FLAG = 0.015

REQUIREMENT_ROWS = (
    ("VSWR Bandwidth", "3.1 - 10.6 GHz"),
    ("Radiation Efficiency", "High (>70%)"),
    ("Phase", "Linear; Constant Delay"),
    ("Radiation Pattern", "Omni directional"),
    ("Directivity and Gain", "Low"),
    ("Half Power Beamwidth", "Wide (>60 deg)"),
    ("Physical Profile", "Small, Compact, Planar"),
)


class CommandError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write(out: Path, files: dict[str, str]) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text)


def _table(rows, header) -> str:
    cells = [header, *[[str(c) for c in r] for r in rows]]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _geometry(cfg: DesignConfig):
    try:
        return build_geometry(cfg.params)
    except GeometryValidationError as exc:
        raise CommandError(EXIT_CONFIG, "geometry validation failed:\n" + "\n".join(f"  - {v}" for v in exc.violations))


def _trace(cfg: DesignConfig):
    try:
        return model_trace(cfg.params, cfg.freqs)
    except (ValueError, ArithmeticError, PassivityError, SingularNetworkError) as exc:
        raise CommandError(EXIT_MODEL, f"model construction failed: {exc}")


def _slot_rows(cfg: DesignConfig) -> list[dict]:
    p = cfg.params
    rows = []
    for i, n in enumerate(p.notches):
        dev = size_discrepancy(n, p.eps_eff)
        rows.append(
            {
                "slot": i + 1,
                "band": n.band.name,
                "kind": n.slot_kind.value,
                "target_hz": n.target_center,
                "half_wave_length_mm": slot_length_for_frequency(n.target_center, p.eps_eff),
                "slot_length_mm": n.slot_length_mm,
                "notch_frequency_hz": notch_frequency_from_length(n.slot_length_mm, p.eps_eff),
                "reference_size_mm": n.reference_size_mm,
                "reference_deviation": dev,
                "flagged": dev is not None and abs(dev) > DISCREPANCY_FLAG,
            }
        )
    return rows


# -- commands -------------------------------------------------------------------

def cmd_design(cfg: DesignConfig, out: Path) -> int:
    p = cfg.params
    geom = _geometry(cfg)
    slots = _slot_rows(cfg)
    report = {
        "schema_version": 1,
        "eps_eff": p.eps_eff,
        "feed": {
            "length_mm": p.feed_length_mm,
            "width_mm": p.feed_width_mm,
            "impedance_ohm": microstrip_impedance(p.feed_width_mm, p.substrate),
        },
        "taper": {
            "z0_ohm": p.taper.z0_ohm,
            "zl_ohm": p.taper.zl_ohm,
            "length_mm": p.taper.length_mm,
            "exponent_per_mm": taper_exponent(p.taper),
            "exponent_product": taper_exponent(p.taper) * p.taper.length_mm,
        },
        "patch": {
            "radius_mm": p.patch_radius_mm,
            "design_frequency_hz": cfg.patch_design_frequency_hz,
            "cavity_model_radius_mm": circular_patch_radius(cfg.patch_design_frequency_hz, p.substrate),
        },
        "slots": slots,
    }
    _write(out, {"design.json": _dump(report), "geometry.json": export_json(geom), "layout.svg": export_svg(geom)})

    base = [
        ("substrate L x W", f"{p.substrate_length_mm:g} x {p.substrate_width_mm:g} mm"),
        ("substrate h / eps_r", f"{p.substrate.height_mm:g} mm / {p.substrate.eps_r:g}"),
        ("eps_eff (slots)", f"{p.eps_eff:g}"),
        ("patch radius", f"{p.patch_radius_mm:g} mm"),
        ("feed length / width", f"{p.feed_length_mm:g} / {p.feed_width_mm:.3f} mm ({report['feed']['impedance_ohm']:.1f} ohm)"),
        ("taper", f"{p.taper.z0_ohm:g} -> {p.taper.zl_ohm:.4g} ohm over {p.taper.length_mm:g} mm, aL = {report['taper']['exponent_product']:.4f}"),
        ("ground L x W (cut)", f"{p.ground_length_mm:g} x {p.ground_width_mm:g} mm ({p.ground_cut_mm:g} mm)"),
    ]
    print(_table(base, ["parameter", "value"]))
    print()
    rows = [
        (
            s["slot"],
            s["band"],
            s["kind"],
            f"{s['target_hz'] / 1e9:g}",
            f"{s['half_wave_length_mm']:.2f}",
            f"{s['slot_length_mm']:.2f}",
            "-" if s["reference_size_mm"] is None else f"{s['reference_size_mm']:g}",
            "-" if s["reference_deviation"] is None else f"{100 * s['reference_deviation']:+.1f}%" + (" !" if s["flagged"] else ""),
        )
        for s in slots
    ]
    print(_table(rows, ["slot", "band", "kind", "f (GHz)", "L half-wave", "L used", "reference", "deviation"]))
    if any(s["flagged"] for s in slots):
        print(f"\n! reference size differs from the half-wave length by more than {100 * DISCREPANCY_FLAG:g}%")
    print(f"\nwrote design.json, geometry.json, layout.svg to {out}")
    return EXIT_OK


def cmd_analyze(cfg: DesignConfig, out: Path) -> int:
    trace = _trace(cfg)
    report = band_rejection_report(trace, cfg.bands, cfg.uwb_band)
    _write(out, {"s11.csv": trace.to_csv(), "bands.json": _dump({"schema_version": 1, **report.to_dict()})})
    rows = [(b.name, f"{b.f_lo / 1e9:g}-{b.f_hi / 1e9:g}", "yes" if b.rejected else "no", f"{b.min_vswr:.2f}") for b in report.bands]
    print(_table(rows, ["band", "GHz", "rejected", "min VSWR"]))
    print(f"UWB span outside notches matched: {'yes' if report.uwb_matched else 'no'}")
    print(f"wrote s11.csv ({len(trace)} rows), bands.json to {out}")
    return EXIT_OK


def cmd_taper(args) -> int:
    spec = TaperSpec(args.z0, args.zl if args.zl is not None else args.z0 * math.exp(args.a_l), args.length, args.segments)
    v = phase_velocity(args.eps_eff)
    n = 9
    prof = [(spec.length_mm * k / (n - 1), impedance_at(spec.length_mm * k / (n - 1), spec)) for k in range(n)]
    print(f"a = {taper_exponent(spec):.6g} /mm, aL = {taper_exponent(spec) * spec.length_mm:.6g}")
    print(_table([(f"{z:.4f}", f"{zz:.4f}") for z, zz in prof], ["z (mm)", "Z (ohm)"]))
    freqs = frequency_grid(*args.sweep)
    bl = beta_l(spec, freqs, v)
    ga = np.abs(analytic_reflection(bl, spec.z0_ohm, spec.zl_ohm))
    gn = np.abs(numeric_reflection(spec, freqs, v))
    print()
    print(
        _table(
            [(f"{f / 1e9:g}", f"{b:.4f}", f"{a:.5f}", f"{g:.5f}") for f, b, a, g in zip(freqs, bl, ga, gn)],
            ["f (GHz)", "beta*l", "|G| analytic", "|G| numeric"],
        )
    )
    if args.gamma_max is not None:
        length = min_length_for_reflection(spec.z0_ohm, spec.zl_ohm, args.gamma_max, args.f_low, v)
        print(f"\nminimum length for |G| <= {args.gamma_max:g} above {args.f_low / 1e9:g} GHz: {length:.4f} mm")
    return EXIT_OK


def cmd_notch(cfg: DesignConfig, out: Path) -> int:
    p = cfg.params
    rows = []
    for s, n in zip(_slot_rows(cfg), p.notches):
        r = resonator_element(n, p.taper.z0_ohm, p.eps_eff)
        rows.append(
            (
                s["slot"],
                s["band"],
                f"{s['target_hz'] / 1e9:g}",
                f"{s['half_wave_length_mm']:.2f}",
                f"{s['notch_frequency_hz'] / 1e9:.4f}",
                f"{n.q_factor:g}",
                f"{r.l * 1e9:.4f}",
                f"{r.c * 1e12:.5f}",
            )
        )
    print(_table(rows, ["slot", "band", "target GHz", "L half-wave mm", "f0 GHz", "Q", "L (nH)", "C (pF)"]))
    return EXIT_OK


def cmd_optimize(cfg: DesignConfig, out: Path) -> int:
    p = cfg.params
    if not p.notches:
        raise CommandError(EXIT_CONFIG, "no notches to optimize")
    try:
        model = AntennaModel(p, cfg.freqs)
        x0 = [n.slot_length_mm for n in p.notches]
        problem = TuneProblem(
            initial_lengths_mm=x0,
            targets=[n.target_center for n in p.notches],
            bounds_mm=[((1 - cfg.bounds_fraction) * x, (1 + cfg.bounds_fraction) * x) for x in x0],
            sweep=cfg.freqs,
            trace_for=model.trace,
            tolerance_hz=cfg.tolerance_hz,
            uwb_band=cfg.uwb_band,
            max_iterations=cfg.max_iterations,
        )
    except ValueError as exc:
        raise CommandError(EXIT_CONFIG, str(exc))
    code = EXIT_OK
    try:
        result = tune(problem)
    except TuneError as exc:
        result, code = exc.result, EXIT_CONVERGENCE
    report = tune_report(problem, result)
    _write(out, {"tune.json": _dump(report)})
    rows = [
        (f"{t / 1e9:g}", f"{a:.4f}", f"{b:.4f}", "-" if c is None else f"{c / 1e9:.4f}")
        for t, a, b, c in zip(problem.targets, x0, result.tuned_lengths_mm, result.achieved_centers)
    ]
    print(_table(rows, ["target GHz", "initial mm", "tuned mm", "achieved GHz"]))
    print(f"iterations: {result.iterations}, objective: {round_sig(result.objective_value):g}, converged: {result.converged}")
    if code:
        print("optimizer did not converge; best-so-far written", file=sys.stderr)
    return code


def cmd_export(cfg: DesignConfig, out: Path) -> int:
    geom = _geometry(cfg)
    _write(out, {"geometry.json": export_json(geom), "layout.svg": export_svg(geom)})
    print(f"wrote geometry.json, layout.svg to {out}")
    return EXIT_OK


def requirements_report(cfg: DesignConfig, trace) -> dict:
    bands = band_rejection_report(trace, cfg.bands, cfg.uwb_band)
    rows = []
    for name, requirement in REQUIREMENT_ROWS:
        if name == "VSWR Bandwidth":
            ok = bands.uwb_matched
            rows.append(
                {
                    "parameter": name,
                    "requirement": requirement,
                    "status": "PASS" if ok else "FAIL",
                    "detail": "VSWR < 2 across the UWB span outside the protected bands"
                    if ok
                    else f"VSWR >= 2 outside protected bands at {[[round_sig(a), round_sig(b)] for a, b in bands.spurious_stopbands]} Hz",
                }
            )
        else:
            rows.append({"parameter": name, "requirement": requirement, "status": "not modeled", "detail": ""})
    # a notch row passes only when its own notch sits in its band and the band is rejected
    notches = cfg.params.notches
    achieved = match_centers(notch_centers(trace, cfg.uwb_band), [n.target_center for n in notches])
    notch_rows = []
    for i, (n, center) in enumerate(zip(notches, achieved)):
        status = bands.band(n.band.name)
        ok = status.rejected and center is not None and n.band.contains(center)
        notch_rows.append(
            {
                "slot": i + 1,
                "band": n.band.name,
                "f_lo_hz": n.band.f_lo,
                "f_hi_hz": n.band.f_hi,
                "target_hz": n.target_center,
                "achieved_center_hz": None if center is None else round_sig(center),
                "band_rejected": status.rejected,
                "status": "PASS" if ok else "FAIL",
                "min_vswr": round_sig(status.min_vswr) if math.isfinite(status.min_vswr) else "inf",
            }
        )
    return {"schema_version": 1, "requirements": rows, "notch_bands": notch_rows}


def cmd_report(cfg: DesignConfig, out: Path) -> int:
    report = requirements_report(cfg, _trace(cfg))
    _write(out, {"requirements.json": _dump(report)})
    print(_table([(r["parameter"], r["requirement"], r["status"]) for r in report["requirements"]], ["parameter", "requirement", "model"]))
    print()
    print(
        _table(
            [
                (
                    r["slot"],
                    r["band"],
                    f"{r['f_lo_hz'] / 1e9:g}-{r['f_hi_hz'] / 1e9:g} GHz",
                    "-" if r["achieved_center_hz"] is None else f"{r['achieved_center_hz'] / 1e9:.4f}",
                    r["status"],
                )
                for r in report["notch_bands"]
            ],
            ["slot", "notch band", "span", "center GHz", "status"],
        )
    )
    return EXIT_OK


# -- argument parsing --------------------------------------------------------------

def _sweep_arg(text: str):
    from .config import parse_sweep

    try:
        return parse_sweep(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON design config (defaults to the reference design)")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: ./out)")
    common.add_argument("--sweep", help="frequency sweep lo:hi:step in GHz, overrides the config")

    parser = argparse.ArgumentParser(prog="uwbnotch", description="Slot-notched UWB monopole design and circuit-model analysis.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("design", "synthesize dimensions, write design report and layout"),
        ("analyze", "sweep the circuit model, write S11 CSV and band report"),
        ("notch", "print slot sizing and resonator values"),
        ("optimize", "tune slot lengths onto the notch targets"),
        ("export", "write geometry JSON and SVG"),
        ("report", "check the model against the UWB requirements table"),
    ):
        sub.add_parser(name, parents=[common], help=help_text)

    tp = sub.add_parser("taper", help="exponential taper profile and reflection")
    tp.add_argument("--z0", type=float, default=50.0, help="source impedance, ohm")
    group = tp.add_mutually_exclusive_group()
    group.add_argument("--zl", type=float, help="load impedance, ohm")
    group.add_argument("--a-l", type=float, default=2.37, help="exponent times length (default 2.37)")
    tp.add_argument("--length", type=float, default=5.42, help="taper length, mm")
    tp.add_argument("--segments", type=int, default=1024)
    tp.add_argument("--eps-eff", type=float, default=2.7, help="effective permittivity for beta")
    tp.add_argument("--gamma-max", type=float, help="reflection budget for the minimum-length calculation")
    tp.add_argument("--f-low", type=float, help="lowest frequency (Hz) the budget must hold at")
    tp.add_argument("--sweep", type=_sweep_arg, default=(1e9, 12e9, 1e9), help="lo:hi:step in GHz")
    return parser


COMMANDS = {
    "design": cmd_design,
    "analyze": cmd_analyze,
    "notch": cmd_notch,
    "optimize": cmd_optimize,
    "export": cmd_export,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "taper":
            if (args.gamma_max is None) != (args.f_low is None):
                parser.error("--gamma-max and --f-low must be given together")
            try:
                return cmd_taper(args)
            except (ValueError, OutOfRangeError) as exc:
                parser.error(str(exc))
        try:
            cfg = load_config(args.config, sweep=args.sweep)
        except ConfigError as exc:
            raise CommandError(EXIT_CONFIG, "invalid config:\n" + "\n".join(f"  - {p}" for p in exc.problems))
        return COMMANDS[args.command](cfg, args.out)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
