#!/usr/bin/env python3
"""Print the adapted dimension of the stock example spectra over a margin grid."""

import argparse

import numpy as np

from margin_spectra.dist import paper_example
from margin_spectra.spectral import k_gamma


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=100, help="ambient dimension")
    ap.add_argument("--v", type=float, default=4.0, help="mixture separation")
    ap.add_argument("--gammas", type=float, nargs="+",
                    default=[0.25, 0.5, 1.0, 2.0, 4.0])
    args = ap.parse_args()

    specs = {
        "spiky": paper_example("spiky", d=args.d),
        "bernoulli": paper_example("bernoulli", d=args.d),
        "gaussian_mixture": paper_example("gaussian_mixture", d=args.d, v=args.v),
    }
    print(f"{'example':<18}" + "".join(f"k(g={g:g})".rjust(12) for g in args.gammas))
    for name, spec in specs.items():
        s = spec.spectrum()
        row = [k_gamma(s, g).k for g in args.gammas]
        print(f"{name:<18}" + "".join(f"{k:>12d}" for k in row))
    print(f"\ntrace (bernoulli) = {np.sum(specs['bernoulli'].spectrum().eigenvalues):g}")


if __name__ == "__main__":
    main()
