"""Create tensor files for trying the CLI.

Usage:
    python scripts/make_tensor.py out.kten --shape 4,16 [--kind ramp|random|zeros]
    python scripts/make_tensor.py out.kten --from-csv data.csv
"""

import argparse
import sys

import numpy as np

from kcdm import tensorio


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("out")
    parser.add_argument("--shape", help="comma-separated dims")
    parser.add_argument("--kind", choices=["ramp", "random", "zeros"], default="ramp")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--from-csv", help="import a CSV instead of synthesizing")
    args = parser.parse_args()

    if args.from_csv:
        x = tensorio.read_csv(args.from_csv)
    else:
        if not args.shape:
            parser.error("--shape required unless --from-csv is given")
        shape = tuple(int(s) for s in args.shape.split(","))
        count = int(np.prod(shape))
        if args.kind == "ramp":
            x = np.linspace(-1.0, 1.0, count).reshape(shape)
        elif args.kind == "zeros":
            x = np.zeros(shape)
        else:
            x = np.random.default_rng(args.seed).uniform(-1.0, 1.0, size=shape)
    tensorio.write_tensor(args.out, x)
    print(f"wrote {args.out}: shape {'x'.join(map(str, x.shape))}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
