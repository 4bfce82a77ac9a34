"""Run every preset, the test0 comparison and the delay windows; print a summary.

    python scripts/reproduce_numerics.py --out runs/ [--workers 4]
"""

import argparse
from pathlib import Path

from delaylwr.diagnostics import amplitude, count_waves
from delaylwr.experiments import (
    PRESET_NAMES,
    compare_delayed_undelayed,
    delay_sweep,
    max_density_reached,
    preset,
)
from delaylwr.io import RunSetup, write_run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out)

    print(f"{'preset':16s} {'delay':>5s} {'amp0':>7s} {'amp_f':>7s} {'peak':>7s} {'waves':>5s} overshoot")
    for name in PRESET_NAMES:
        p = preset(name)
        traj = p.run()
        write_run(RunSetup.from_preset(p), traj, out / name)
        print(
            f"{name:16s} {p.solver_config.t_delay_steps:5d} {amplitude(p.initial_field()):7.4f} "
            f"{amplitude(traj.final):7.4f} {max_density_reached(traj):7.4f} "
            f"{count_waves(traj.final):5d} {traj.first_overshoot_step}"
        )

    rep = compare_delayed_undelayed(preset("test0"))
    print(f"\ntest0 vs LWR: delayed {rep.amplitude_delayed:.4f}, undelayed {rep.amplitude_undelayed:.4f}, "
          f"ratio {rep.ratio:.2f}")

    for name, delays in (("test1-k1", range(10, 18)), ("test1-k2", range(16, 24)), ("test2", range(4, 13))):
        print(f"\n{name} delay sweep")
        for rec in delay_sweep(preset(name), delays, workers=args.workers):
            print(f"  T={rec.delay_steps:2d} amp={rec.final_amplitude:.4f} waves={rec.wave_count:2d} "
                  f"overshoot={rec.overshoot_step} sg={rec.sg_flag}")


if __name__ == "__main__":
    main()
