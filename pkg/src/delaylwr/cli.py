"""Command-line entry point.

Exit codes: 0 completed, 1 usage/config error, 2 feasibility abort,
3 adaptive time-step collapse.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from delaylwr.core import ConfigError
from delaylwr.experiments import (
    PRESET_NAMES,
    compare_delayed_undelayed,
    delay_sweep,
    preset,
    record_row,
)
from delaylwr.io import RunSetup, parse_config, write_run
from delaylwr.solver import FinalTime, run

EXIT_CODES = {"completed": 0, "feasibility_abort": 2, "cfl_collapse": 3}
SWEEP_COLUMNS = ("delay_steps", "final_amplitude", "wave_count", "overshoot_step", "sg_flag", "status")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="delaylwr", description="Delayed LWR traffic simulator")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run from a YAML config (or a previous manifest)")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("preset", help="run a named preset")
    p.add_argument("name")
    p.add_argument("--out", required=True)
    p.add_argument("--t-final", type=float)
    p.add_argument("--delay", type=int)
    p.add_argument("--snapshot-every", type=int, default=5)

    p = sub.add_parser("compare", help="preset against its undelayed twin")
    p.add_argument("--preset", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("sweep", help="run a preset over a range of delays")
    p.add_argument("--preset", required=True)
    p.add_argument("--delays", required=True, help="K1..K2 or a comma list")
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    return ap


def parse_delays(text: str) -> list:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            delays = list(range(int(lo), int(hi) + 1))
        else:
            delays = [int(k) for k in text.split(",") if k.strip()]
    except ValueError:
        raise UsageError(f"cannot parse delays {text!r}; use K1..K2 or K1,K2,...") from None
    if not delays:
        raise UsageError(f"empty delay list {text!r}")
    return delays


def _lookup(name):
    if name not in PRESET_NAMES:
        raise UsageError(f"unknown preset {name!r}; valid presets: {', '.join(PRESET_NAMES)}")
    return preset(name)


def _run_and_write(setup: RunSetup, out) -> int:
    traj = run(setup.config, setup.initial_field(), setup.model, setup.snapshot_every)
    manifest = write_run(setup, traj, out)
    m = manifest["metrics"]
    print(
        f"{traj.termination.status}: t={m['final_time']:.6g} mass={m['final_mass']:.12g} "
        f"amplitude={m['final_amplitude']:.6g} waves={m['wave_count']} "
        f"first_overshoot={m['first_overshoot_step']} -> {out}"
    )
    return EXIT_CODES[traj.termination.status]


def cmd_run(args) -> int:
    return _run_and_write(parse_config(args.config), args.out)


def cmd_preset(args) -> int:
    p = _lookup(args.name)
    if args.delay is not None:
        if args.delay < 0:
            raise UsageError("--delay must be >= 0")
        p = p.with_delay(args.delay)
    if args.t_final is not None:
        p = p.with_final_time(args.t_final)
    setup = RunSetup.from_preset(p, args.snapshot_every)
    setup.config.check_initial(setup.initial_field())
    return _run_and_write(setup, args.out)


def cmd_compare(args) -> int:
    p = _lookup(args.preset)
    report = compare_delayed_undelayed(p)
    out = Path(args.out)
    write_run(RunSetup.from_preset(p), report.delayed, out / "delayed")
    write_run(RunSetup.from_preset(p.with_delay(0)), report.undelayed, out / "undelayed")
    with open(out / "amplitude.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "time", "amplitude_delayed", "amplitude_undelayed"])
        for i, (t, a, b) in enumerate(zip(report.times, report.series_delayed, report.series_undelayed)):
            w.writerow([i, format(t, ".17g"), format(a, ".17g"), format(b, ".17g")])
    summary = {
        "preset": p.name,
        "delay_steps": p.solver_config.t_delay_steps,
        "initial_amplitude": report.initial_amplitude,
        "amplitude_delayed": report.amplitude_delayed,
        "amplitude_undelayed": report.amplitude_undelayed,
        "ratio": report.ratio,
    }
    (out / "comparison.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(
        f"{p.name}: initial={report.initial_amplitude:.6g} delayed={report.amplitude_delayed:.6g} "
        f"undelayed={report.amplitude_undelayed:.6g} ratio={report.ratio:.6g}"
    )
    return EXIT_CODES[report.delayed.termination.status]


def cmd_sweep(args) -> int:
    p = _lookup(args.preset)
    records = delay_sweep(p, parse_delays(args.delays), workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for rec in records:
            row = record_row(rec)
            row["final_amplitude"] = format(row["final_amplitude"], ".17g")
            row["overshoot_step"] = "" if row["overshoot_step"] is None else row["overshoot_step"]
            row["sg_flag"] = int(row["sg_flag"])
            w.writerow([row[c] for c in SWEEP_COLUMNS])
            print(f"delay={rec.delay_steps:3d} amplitude={rec.final_amplitude:.4f} "
                  f"waves={rec.wave_count} overshoot={rec.overshoot_step} sg={rec.sg_flag} {rec.status}")
    return 0


COMMANDS = {"run": cmd_run, "preset": cmd_preset, "compare": cmd_compare, "sweep": cmd_sweep}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.ERROR,
            format="%(levelname)s %(name)s: %(message)s",
        )
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"delaylwr: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"delaylwr: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
