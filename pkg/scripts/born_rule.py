"""Fraction of GRW trajectories that end on the right of a symmetric cat state.

    python scripts/born_rule.py --trajectories 2000 --weight 0.7
"""
import argparse
import time

import numpy as np

from collapsesim import grw
from collapsesim.propagator import Hamiltonian
from collapsesim.state import Grid1D, gaussian_packet, superpose


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trajectories", type=int, default=2000)
    ap.add_argument("--half-separation", type=float, default=10.0, help="in units of r_c")
    ap.add_argument("--weight", type=float, default=0.5, help="probability assigned to the right packet")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    grid = Grid1D.centered(args.half_separation + 6.0, 2048)
    a = args.half_separation
    psi = superpose(gaussian_packet(grid, a, 0.1), gaussian_packet(grid, -a, 0.1),
                    np.sqrt(args.weight), np.sqrt(1 - args.weight))
    h = Hamiltonian.free(1e4)  # heavy: negligible spreading over the run
    t0 = time.perf_counter()
    right = sum(
        grw.run_trajectory(psi, h, 10.0, 1.0, 1.0, dt=0.25, seed=args.seed, stream=i,
                           record_stride=100).observables["mean_position"][-1] > 0
        for i in range(args.trajectories))
    frac = right / args.trajectories
    err = np.sqrt(args.weight * (1 - args.weight) / args.trajectories)
    print(f"right fraction {frac:.4f} +- {err:.4f} (Born weight {args.weight}); "
          f"{time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
