"""Command-line front end.

    medmarg marginal --family exp --prior uniform01 --x 2 --kind median
    medmarg approx   --family exp --prior exp1 --algorithm m1 b1 --k 1000 --seed 1
    medmarg power    --prior exp-on-variance --alpha 0.05 --grid -3:0:61
    medmarg estimate --data=-1,0,1 --prior exp1 --bounds=-5:5
    medmarg verify   --family exp --prior uniform01 --kind median --grid 0:20:500
    medmarg figures  --which 1 --k 1000 --seed 42

Exit status: 0 on success, 1 on usage errors, 2 on numerical failures.
Defaults may come from a ``key=value`` file given with ``--config``; the
output directory defaults to ``$MEDMARG_OUTPUT_DIR`` or the working
directory.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .distributions import ConditionalFamily, PriorSpec
from .errors import MedmargError, NumericalError
from .estimation import OBJECTIVES, EstimationProblem, estimate, simulation_study
from .experiments import (
    EXAMPLE_PRIORS,
    FIG12_GRID,
    FIG34_GRID,
    FIG_SETTINGS,
    marginal_curves,
    power_columns,
)
from .marginal import mean_marginal, median_marginal, verify_distribution_function
from .montecarlo import McConfig, run_algorithm
from .output import Panel, write_csv, write_svg
from .power import PRIOR_SETTINGS

OUTPUT_ENV = "MEDMARG_OUTPUT_DIR"
SUBCOMMANDS = ("marginal", "approx", "power", "estimate", "verify", "figures")
# options whose values may start with '-'
_VALUE_OPTIONS = {"--grid", "--x", "--theta", "--bounds", "--far", "--true-theta", "--data"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunSpec:
    subcommand: str
    family: Optional[str] = None
    prior: Optional[str] = None
    theta: Optional[float] = None
    grid: Optional[str] = None
    K: Optional[int] = None
    L: Optional[int] = None
    seed: Optional[int] = None
    alpha: Optional[float] = None
    output_dir: str = "."
    options: dict = field(default_factory=dict)

    def metadata(self) -> dict:
        meta = {k: v for k, v in asdict(self).items() if k != "options"}
        for k, v in self.options.items():
            meta[f"opt.{k}"] = v
        meta["tool"] = f"medmarg {__version__}"
        return {k: ("" if v is None else v) for k, v in meta.items()}


# ---------------------------------------------------------------------------
# parsing helpers


def parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise UsageError(f"grid must look like min:max:points, got {text!r}") from None
    if n < 2 or not hi > lo:
        raise UsageError("grid needs at least 2 points and max > min")
    return np.linspace(lo, hi, n)


def parse_pair(text: str, what: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"{what} must look like lo:hi, got {text!r}") from None
    if not b > a:
        raise UsageError(f"{what} needs hi > lo")
    return a, b


def make_family(name: str, theta: Optional[float]) -> ConditionalFamily:
    if name == "exp":
        return ConditionalFamily.exponential()
    t = 0.0 if theta is None else theta
    if name == "normal-var":
        return ConditionalFamily.normal_var(t)
    if name == "normal-sd":
        return ConditionalFamily.normal_sd(t)
    raise UsageError(f"unknown family {name!r}")


def make_prior(name: str) -> PriorSpec:
    if name == "uniform01":
        return PriorSpec.uniform()
    if name == "exp1":
        return PriorSpec.exponential()
    if name.startswith("point:"):
        try:
            return PriorSpec.point(float(name.split(":", 1)[1]))
        except ValueError:
            raise UsageError(f"bad point-mass prior {name!r}") from None
    raise UsageError(f"unknown prior {name!r} (uniform01, exp1, point:V)")


def read_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{n}: expected key=value")
            out[key.strip().replace("-", "_")] = val.strip()
    return out


def _normalise_argv(argv: Sequence[str]) -> list[str]:
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_OPTIONS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def _add_model_args(p, kind=True):
    p.add_argument("--family", default="exp", choices=("exp", "normal-var", "normal-sd"))
    p.add_argument("--theta", type=float, default=None, help="location for normal families")
    p.add_argument("--prior", default="uniform01", help="uniform01 | exp1 | point:V")
    if kind:
        p.add_argument("--kind", default="median", choices=("median", "mean", "both"))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file of default options")
    common.add_argument("--out", default=None, help=f"output directory (default ${OUTPUT_ENV} or .)")
    common.add_argument("--seed", type=int, default=0)

    parser = _Parser(prog="medmarg", description="Median-based marginal distributions.")
    parser.add_argument("--version", action="version", version=f"medmarg {__version__}")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)

    p = sub.add_parser("marginal", parents=[common], help="evaluate a marginal CDF")
    _add_model_args(p)
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--grid", default=None, help="min:max:points; writes a CSV")
    p.add_argument("--method", default=None,
                   choices=("closed_form", "monotone_fast_path", "quadrature", "quantile_solve"))

    p = sub.add_parser("approx", parents=[common], help="Monte Carlo approximations M1/M2/B1/B2")
    _add_model_args(p, kind=False)
    p.add_argument("--algorithm", nargs="+", default=["m1", "b1"], choices=("m1", "m2", "b1", "b2"))
    p.add_argument("--k", type=int, default=1000)
    p.add_argument("--l", type=int, default=None, help="conditional draws per nu (default K)")
    p.add_argument("--grid", default="0:10:201")
    p.add_argument("--isotonic", action="store_true")
    p.add_argument("--per-x", action="store_true", help="fresh prior draws at every grid point")

    p = sub.add_parser("power", parents=[common], help="power functions of the normal-mean tests")
    p.add_argument("--prior", default="exp-on-variance", choices=tuple(PRIOR_SETTINGS))
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--grid", default="-3:0:61")
    p.add_argument("--mode", default="exact", choices=("exact", "mc"))
    p.add_argument("--mc-samples", type=int, default=100_000)

    p = sub.add_parser("estimate", parents=[common], help="(pseudo-)maximum likelihood for theta")
    p.add_argument("--family", default="normal-var", choices=("normal-var", "normal-sd"))
    p.add_argument("--prior", default="exp1")
    p.add_argument("--data", default=None, help="comma-separated observations")
    p.add_argument("--data-file", default=None, help="one observation per line")
    p.add_argument("--bounds", default=None, help="lo:hi (default: data range +- 1)")
    p.add_argument("--objective", default="both", choices=("mean", "median", "both"))
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--study", action="store_true", help="run a simulation study instead")
    p.add_argument("--true-theta", type=float, default=0.0)
    p.add_argument("--true-prior", default=None, help="generating prior (default --prior)")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--reps", type=int, default=1000)

    p = sub.add_parser("verify", parents=[common], help="check distribution-function properties")
    _add_model_args(p)
    p.add_argument("--grid", default=None, help="min:max:points probe grid")
    p.add_argument("--far", default=None, help="lo:hi far probes")
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("figures", parents=[common], help="reproduce figures 1-4 as CSV + SVG")
    p.add_argument("--which", default="all", choices=("1", "2", "3", "4", "all"))
    p.add_argument("--k", type=int, default=1000)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--with-m2", action="store_true", help="also write M2/B2 curves")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--mode", default="exact", choices=("exact", "mc"))
    p.add_argument("--mc-samples", type=int, default=100_000)
    return parser


def _apply_config(parser, argv):
    """Re-parse with ``--config`` values as defaults for the chosen subcommand."""
    args = parser.parse_args(argv)
    if getattr(args, "config", None) is None:
        return args
    cfg = read_config(args.config)
    subparser = parser._subparsers._group_actions[0].choices[args.subcommand]
    known = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, val in cfg.items():
        if key not in known:
            raise UsageError(f"unknown config key {key!r} for {args.subcommand}")
        action = known[key]
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = val.lower() in ("1", "true", "yes", "on")
        elif action.nargs in ("+", "*"):
            defaults[key] = val.split()
        else:
            defaults[key] = action.type(val) if action.type else val
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


# ---------------------------------------------------------------------------
# subcommands


def _out_dir(args) -> Path:
    d = Path(args.out or os.environ.get(OUTPUT_ENV) or ".")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _spec(args, **fields) -> RunSpec:
    ignore = {"config", "out", "subcommand", "seed", "func"} | set(fields)
    opts = {k: (" ".join(v) if isinstance(v, list) else v)
            for k, v in sorted(vars(args).items()) if k not in ignore}
    return RunSpec(subcommand=args.subcommand, seed=args.seed,
                   output_dir=str(_out_dir(args)), options=opts, **fields)


def _marginal_for(kind, fam, prior, method=None):
    if kind == "median":
        return median_marginal(fam, prior, method=method)
    return mean_marginal(fam, prior, method=method)


def cmd_marginal(args) -> int:
    fam, prior = make_family(args.family, args.theta), make_prior(args.prior)
    kinds = ("median", "mean") if args.kind == "both" else (args.kind,)
    if args.x is None and args.grid is None:
        raise UsageError("marginal needs --x or --grid")
    models = {k: _marginal_for(k, fam, prior, args.method) for k in kinds}
    if args.x is not None:
        for k in kinds:
            val = float(models[k].cdf(args.x))
            print(f"{val:.6f}" if len(kinds) == 1 else f"{k}={val:.6f}")
    if args.grid is not None:
        xs = parse_grid(args.grid)
        spec = _spec(args, family=args.family, prior=args.prior, theta=args.theta, grid=args.grid)
        cols = {"x": xs}
        for k in kinds:
            cols[k] = np.asarray(models[k].cdf(xs))
        path = Path(spec.output_dir) / "marginal.csv"
        write_csv(path, cols, spec.metadata())
        print(path)
    return 0


def cmd_approx(args) -> int:
    fam, prior = make_family(args.family, args.theta), make_prior(args.prior)
    xs = parse_grid(args.grid)
    spec = _spec(args, family=args.family, prior=args.prior, theta=args.theta, grid=args.grid,
                 K=args.k, L=args.l)
    meta = spec.metadata()
    out = Path(spec.output_dir)
    curves = {}
    for alg in args.algorithm:
        cfg = McConfig(K=args.k, L=args.l, seed=args.seed, x_grid=tuple(xs),
                       resample_per_x=args.per_x, isotonic=args.isotonic)
        curves[alg] = run_algorithm(alg.upper(), fam, prior, cfg).values
        write_csv(out / f"approx_{alg}.csv", {"x": xs, alg: curves[alg]}, meta)
    write_svg(out / "approx.svg", [Panel(f"{args.family} | {args.prior}", xs, curves)], meta)
    for alg in args.algorithm:
        print(out / f"approx_{alg}.csv")
    return 0


def _power_panel(title, mus, cols):
    return Panel(title, mus, cols, xlabel="mu")


def cmd_power(args) -> int:
    mus = parse_grid(args.grid)
    spec = _spec(args, prior=args.prior, grid=args.grid, alpha=args.alpha)
    mode = "monte_carlo" if args.mode == "mc" else "exact"
    cols = power_columns(args.prior, args.alpha, mus, mode, args.mc_samples, args.seed)
    out = Path(spec.output_dir)
    path = out / f"power_{args.prior}.csv"
    write_csv(path, {"mu": mus, **cols}, spec.metadata())
    write_svg(out / f"power_{args.prior}.svg", [_power_panel(args.prior, mus, cols)],
              spec.metadata())
    print(path)
    return 0


def _read_data(args) -> np.ndarray:
    if args.data is not None:
        try:
            return np.array([float(v) for v in args.data.split(",") if v.strip()])
        except ValueError:
            raise UsageError("--data must be comma-separated numbers") from None
    if args.data_file is not None:
        return np.loadtxt(args.data_file, dtype=float, ndmin=1)
    raise UsageError("estimate needs --data, --data-file or --study")


def cmd_estimate(args) -> int:
    fam, prior = make_family(args.family, 0.0), make_prior(args.prior)
    if args.study:
        true_prior = make_prior(args.true_prior or args.prior)
        spec = _spec(args, family=args.family, prior=args.prior)
        table = simulation_study(args.true_theta, true_prior, args.n, args.reps, args.seed,
                                 family=fam, prior=prior, tol=args.tol)
        rows = table.rows
        cols = {"estimator": np.arange(len(rows)),
                "bias": [r.bias for r in rows], "variance": [r.variance for r in rows],
                "mse": [r.mse for r in rows], "failures": [r.failures for r in rows]}
        meta = spec.metadata()
        meta["estimator_index"] = " ".join(f"{i}:{r.name}" for i, r in enumerate(rows))
        path = Path(spec.output_dir) / "estimation_study.csv"
        write_csv(path, cols, meta)
        for r in rows:
            print(f"{r.name}: bias={r.bias:.6g} variance={r.variance:.6g} mse={r.mse:.6g} "
                  f"failures={r.failures}")
        print(path)
        return 0
    data = _read_data(args)
    if data.size == 0:
        raise UsageError("no observations given")
    bounds = parse_pair(args.bounds, "--bounds") if args.bounds else (
        float(data.min()) - 1.0, float(data.max()) + 1.0)
    kinds = OBJECTIVES if args.objective == "both" else (f"{args.objective}_marginal",)
    for kind in kinds:
        res = estimate(EstimationProblem(tuple(data), fam, prior, bounds, kind), tol=args.tol)
        print(f"{kind}: theta_hat={res.theta_hat:.9g} log_objective={res.log_objective:.9g} "
              f"evaluations={res.evaluations} converged={res.converged}")
    return 0


def _default_probe(fam, model):
    lo, hi = float(model.ppf(1e-9)), float(model.ppf(1 - 1e-9))
    if fam.family_id.value == "exponential_rate":
        lo = 0.0
    return lo, hi


def cmd_verify(args) -> int:
    fam, prior = make_family(args.family, args.theta), make_prior(args.prior)
    kinds = ("median", "mean") if args.kind == "both" else (args.kind,)
    ok = True
    for k in kinds:
        model = _marginal_for(k, fam, prior)
        if args.grid:
            xs = parse_grid(args.grid)
        else:
            lo, hi = _default_probe(fam, model)
            xs = np.linspace(lo, hi, 500)
        if args.far:
            far = parse_pair(args.far, "--far")
        else:
            span = float(xs[-1] - xs[0])
            far = (float(xs[0]) - 1e6 * span, float(xs[-1]) + 1e6 * span)
        rep = verify_distribution_function(model, xs, far, tol=args.tol)
        print(f"[{model.label}] {'all-pass' if rep.passed else 'FAILED'}")
        for line in rep.lines():
            print(f"  {line}")
        ok &= rep.passed
    if not ok:
        print("verify_distribution_function: violations found", file=sys.stderr)
        return 2
    return 0


def cmd_figures(args) -> int:
    which = (1, 2, 3, 4) if args.which == "all" else (int(args.which),)
    spec = _spec(args, K=args.k, L=args.l, alpha=args.alpha)
    out = Path(spec.output_dir)
    written = []
    for fig in which:
        meta = dict(spec.metadata(), figure=fig)
        if fig in (1, 2):
            lo, hi, n = FIG12_GRID
            xs = np.linspace(lo, hi, n)
            meta["grid"] = f"{lo:g}:{hi:g}:{n}"
            curves = marginal_curves(fig, args.k, args.seed, L=args.l, x_grid=xs,
                                     with_m2=args.with_m2)
            for name, vals in curves.items():
                written.append(write_csv(out / f"fig{fig}_{name}.csv", {"x": xs, name: vals}, meta))
            title = f"exp family, {EXAMPLE_PRIORS[fig].label} prior, K={args.k}"
            written.append(write_svg(out / f"fig{fig}.svg", [Panel(title, xs, curves)], meta))
        else:
            lo, hi, n = FIG34_GRID
            mus = np.linspace(lo, hi, n)
            meta["grid"] = f"{lo:g}:{hi:g}:{n}"
            mode = "monte_carlo" if args.mode == "mc" else "exact"
            panels = []
            for setting in FIG_SETTINGS[fig]:
                cols = power_columns(setting, args.alpha, mus, mode, args.mc_samples, args.seed)
                tag = setting.split("-on-")[0]
                written.append(write_csv(out / f"fig{fig}_{tag}.csv", {"mu": mus, **cols},
                                         dict(meta, prior=setting)))
                panels.append(_power_panel(setting, mus, cols))
            written.append(write_svg(out / f"fig{fig}.svg", panels, meta))
    for w in written:
        print(w)
    return 0


COMMANDS = {
    "marginal": cmd_marginal,
    "approx": cmd_approx,
    "power": cmd_power,
    "estimate": cmd_estimate,
    "verify": cmd_verify,
    "figures": cmd_figures,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = _normalise_argv(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        if args.subcommand is None:
            parser.print_help(sys.stderr)
            return 1
        return COMMANDS[args.subcommand](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"medmarg: error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        op = exc.operation or "unknown operation"
        print(f"medmarg: numerical failure in {op}: {exc}", file=sys.stderr)
        return 2
    except (MedmargError, ValueError, OSError) as exc:
        parser.print_usage(sys.stderr)
        print(f"medmarg: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
