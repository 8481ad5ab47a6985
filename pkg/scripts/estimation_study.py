"""Bias / variance / MSE of the marginal MLE and the median-marginal pseudo-MLE.

Data are N(theta, sigma^2) with a fresh sigma^2 per observation drawn from
the generating prior; both estimators assume the fitting prior.
"""

import argparse
import time

from medmarg import PriorSpec, simulation_study

PRIORS = {"exp1": PriorSpec.exponential, "uniform01": PriorSpec.uniform}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--n", type=int, nargs="+", default=[10, 50, 200])
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--prior", choices=tuple(PRIORS), default="exp1", help="generating and fitting prior")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    a = p.parse_args(argv)

    prior = PRIORS[a.prior]()
    print(f"{'N':>5} {'estimator':>16} {'bias':>10} {'variance':>10} {'mse':>10} {'fail':>5}")
    for n in a.n:
        t0 = time.perf_counter()
        table = simulation_study(a.theta, prior, N=n, replications=a.reps, seed=a.seed,
                                 workers=a.workers)
        for r in table.rows:
            print(f"{n:>5} {r.name:>16} {r.bias:>10.5f} {r.variance:>10.5f} {r.mse:>10.5f} "
                  f"{r.failures:>5}")
        print(f"      ({time.perf_counter() - t0:.1f}s)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
