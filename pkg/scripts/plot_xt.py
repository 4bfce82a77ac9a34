"""Heat map of a density.csv in the (x, t) plane. Needs matplotlib."""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("density_csv")
    ap.add_argument("--out", default="xt.png")
    args = ap.parse_args()

    with open(args.density_csv) as fh:
        x = np.array([float(v) for v in fh.readline().strip().split(",")[1:]])
    data = np.loadtxt(args.density_csv, delimiter=",", skiprows=1, ndmin=2)
    t, rho = data[:, 0], data[:, 1:]

    fig, ax = plt.subplots(figsize=(6, 4.5))
    mesh = ax.pcolormesh(x, t, rho, shading="nearest", cmap="jet")
    fig.colorbar(mesh, ax=ax, label="density")
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
