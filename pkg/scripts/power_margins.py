"""Exact power of the median- and mean-marginal tests for every prior setting."""

import argparse

import numpy as np

from medmarg import compare_power, power_curve
from medmarg.power import PRIOR_SETTINGS, normal_mean_tests


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--mu", type=float, nargs="+", default=[-3.0, -2.0, -1.0, -0.5])
    a = p.parse_args(argv)

    mus = np.asarray(a.mu)
    for setting in PRIOR_SETTINGS:
        med, mean = normal_mean_tests(setting, a.alpha)
        pa, pb = power_curve(med, mus), power_curve(mean, mus)
        print(f"{setting}: c_median={med.threshold:.4f} c_mean={mean.threshold:.4f} "
              f"verdict={compare_power(pa, pb).verdict}")
        for mu, x, y in zip(mus, pa.power, pb.power):
            print(f"  mu={mu:+.2f}  median={x:.4f}  mean={y:.4f}  diff={x - y:+.4f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
