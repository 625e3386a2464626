"""Homomorphy residuals for the nine scalar cells over a few kappa values."""
import argparse

import numpy as np

from popa.scalar_homs import ALL_PARAMS, BoMap, bo_cell_continuity, bo_hom_residual, sample_domain


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--pairs", type=int, default=1000)
    ap.add_argument("--kappas", default="-2,-0.5,0.5,1,3")
    args = ap.parse_args()
    kappas = [float(k) for k in args.kappas.split(",")]
    rng = np.random.default_rng(args.seed)
    print(f"{'rho':>5} {'sigma':>5}  max residual over kappa in {kappas}")
    for rho in ALL_PARAMS:
        for sigma in ALL_PARAMS:
            s, t = sample_domain(rho, args.pairs, rng), sample_domain(rho, args.pairs, rng)
            worst = max(bo_hom_residual(BoMap(rho, sigma, k), list(zip(s, t))).metrics["max_residual"]
                        for k in kappas)
            print(f"{str(rho):>5} {str(sigma):>5}  {worst:.3e}")
    print("\ncontinuity as sigma -> 0 (sigma_eps = 1e-8), t = 0.7, kappa = 1:")
    for rho in ALL_PARAMS:
        print(f"  rho = {str(rho):>4}: {bo_cell_continuity(rho, 0.7, 1.0, 1e-8):.3e}")


if __name__ == "__main__":
    main()
