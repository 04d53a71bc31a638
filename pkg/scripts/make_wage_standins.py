"""Generate the synthetic annual-wage stand-ins shipped in ``data/``.

Two lognormal samples with a small point mass of part-time low earners,
rounded to cents.  They only mimic the shape of survey wage microdata
(right skew, ~1e5 rows, ties from rounding); no real records are involved.

    python scripts/make_wage_standins.py [--seed 2018] [--outdir data]
"""

import argparse
from pathlib import Path

import numpy as np


def wages(rng, n, mu, sigma, low_share, low_mu):
    x = np.exp(mu + sigma * rng.standard_normal(n))
    low = rng.random(n) < low_share
    x[low] = np.exp(low_mu + 0.5 * rng.standard_normal(low.sum()))
    return np.round(x, 2)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--seed", type=int, default=2018)
    p.add_argument("--outdir", default="data")
    args = p.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    groups = {
        "wages_group_a.csv": wages(rng, 94_168, 9.95, 0.55, 0.08, 8.9),
        "wages_group_b.csv": wages(rng, 122_558, 10.15, 0.60, 0.04, 8.9),
    }
    for name, x in groups.items():
        with open(out / name, "w", encoding="utf-8") as fh:
            fh.write("wage\n")
            fh.writelines(f"{v:.2f}\n" for v in x.tolist())
        print(f"{out / name}: n={x.size} mean={x.mean():.2f}")


if __name__ == "__main__":
    main()
