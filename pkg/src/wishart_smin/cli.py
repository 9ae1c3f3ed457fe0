"""Command-line entry point: ``wishart-smin <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import platform
import re
import sys
import time
from fractions import Fraction
from importlib import metadata
from pathlib import Path

import numpy as np

from .exact import (
    EnsembleParams,
    NormalizationError,
    cdf,
    eval_density,
    form_to_json,
    moment,
    smin_closed_form,
)
from .fixed_trace import eval_ft_density, ft_cdf, ft_closed_form, ft_moment, r_delta, r_delta_exact
from .grid import GridDensity, format_float, parse_grid
from .kicked_tops import DEFAULT_INITIAL_CONDITIONS, CoherentAngles, TopParams, run_ensemble
from .marginals import grid_density
from .montecarlo import EigensolverError, histogram, ks_statistic, smallest_eig_samples
from .tracy_widom import QuadratureError, rescaled_smin_density, tw2_grid_density, tw_scaling

EXIT_USAGE = 2
EXIT_NUMERIC = 3

MARGINAL_KINDS = ["regular", "fixed-trace", "scaled", "marchenko-pastur"]


class UsageError(ValueError):
    pass


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _versions() -> dict:
    out = {"artifact": _version(), "python": platform.python_version()}
    for mod in ("numpy", "scipy", "mpmath", "gmpy2", "matplotlib"):
        try:
            out[mod] = metadata.version(mod)
        except metadata.PackageNotFoundError:
            out[mod] = "unknown"
    return out


def _exact_str(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _params(args) -> EnsembleParams:
    try:
        return EnsembleParams(args.n, args.m)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None


def _grid(spec: str) -> np.ndarray:
    try:
        return parse_grid(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _columns_csv(header: list, columns: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in zip(*columns):
        w.writerow([format_float(v) for v in row])
    return buf.getvalue()


def _grid_text(gd: GridDensity, fmt: str) -> str:
    return gd.to_json() + "\n" if fmt == "json" else gd.to_csv()


class Run:
    """Collects outputs and writes the sidecar manifest."""

    def __init__(self, args, argv):
        self.args = args
        self.argv = argv
        self.start = time.perf_counter()
        self.outputs: list[str] = []
        self.results: dict = {}

    def emit(self, text: str, path=None):
        path = path if path is not None else self.args.output
        if path is None:
            sys.stdout.write(text)
        else:
            Path(path).write_text(text)
            self.outputs.append(str(path))

    def sidecar(self, suffix: str):
        """``<output>.<suffix>`` when writing to a file, else ``None``."""
        if self.args.output is None:
            return None
        return f"{self.args.output}.{suffix}"

    def finish(self):
        target = self.args.manifest or (f"{self.args.output}.manifest.json" if self.args.output else None)
        if target is None:
            return
        flags = {k: v for k, v in vars(self.args).items() if k != "func"}
        data = {
            "subcommand": self.args.command,
            "argv": self.argv,
            "flags": flags,
            "versions": _versions(),
            "outputs": self.outputs,
            "results": self.results,
            "wall_time_s": round(time.perf_counter() - self.start, 3),
        }
        Path(target).write_text(json.dumps(data, indent=1, default=str) + "\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_density(run: Run):
    args = run.args
    params = _params(args)
    form = smin_closed_form(params)
    doc = form_to_json(form)
    if args.exact_at is not None:
        x = _parse_rational(args.exact_at)
        if x < 0:
            raise UsageError("--exact-at must be non-negative")
        doc["exact_at"] = {
            "x": _exact_str(x),
            "polynomial_value": _exact_str(form.polynomial()(x)),
            "exponential_factor": f"exp(-{_exact_str(params.n * x)})",
            "density_float": format_float(eval_density(form, float(x))),
        }
    if args.grid:
        xs = _grid(args.grid)
        if xs.min() < 0:
            raise UsageError("density grid must be non-negative")
        gd = GridDensity(xs, eval_density(form, xs), {"n": params.n, "m": params.m, "kind": "smin-regular"})
        _attach_grid(run, doc, gd)
    run.emit(json.dumps(doc, indent=1) + "\n")


def _attach_grid(run: Run, doc: dict, gd: GridDensity):
    path = run.args.grid_csv or run.sidecar("grid.csv")
    if path is None:
        doc["grid"] = {"x": gd.xs.tolist(), "density": gd.ys.tolist()}
    else:
        run.emit(gd.to_csv(), path)
        doc["grid_csv"] = str(path)


def cmd_ft_density(run: Run):
    args = run.args
    params = _params(args)
    form = ft_closed_form(params)
    doc = form_to_json(form)
    doc["prefactors"] = {str(j): _exact_str(a) for j, a in sorted(form.prefactors.items()) if a}
    if args.exact_at is not None:
        x = _parse_rational(args.exact_at)
        if not 0 <= x <= Fraction(1, params.n):
            raise UsageError("--exact-at must lie in [0, 1/n]")
        doc["exact_at"] = {"x": _exact_str(x), "density": _exact_str(form.polynomial()(x))}
    if args.r_delta is not None:
        delta = _parse_rational(args.r_delta)
        try:
            val = r_delta_exact(params, delta) if args.exact_r else None
            approx = r_delta(params, delta)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        doc["r_delta"] = {"delta": _exact_str(delta), "value": str(approx)}
        if val is not None:
            doc["r_delta"]["exact"] = _exact_str(val)
    if args.grid:
        xs = _grid(args.grid)
        gd = GridDensity(xs, eval_ft_density(form, xs), {"n": params.n, "m": params.m, "kind": "smin-fixed-trace"})
        _attach_grid(run, doc, gd)
    run.emit(json.dumps(doc, indent=1) + "\n")


def cmd_moments(run: Run):
    args = run.args
    params = _params(args)
    eta = _parse_rational(args.eta)
    if eta.denominator == 1:
        eta = int(eta)
    else:
        eta = float(eta)
    try:
        val = ft_moment(params, eta) if args.fixed_trace else moment(smin_closed_form(params), eta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = _exact_str(val) if isinstance(val, Fraction) else format_float(val)
    run.results["moment"] = text
    run.emit(text + "\n")


def cmd_marginal(run: Run):
    args = run.args
    params = _params(args)
    xs = _grid(args.grid)
    kinds = MARGINAL_KINDS if args.kind == "all" else [args.kind]
    try:
        grids = [grid_density(params, k, xs) for k in kinds]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if len(grids) == 1:
        run.emit(_grid_text(grids[0], args.format))
    elif args.format == "json":
        run.emit(json.dumps({"x": xs.tolist(), **{g.metadata["kind"]: g.ys.tolist() for g in grids}}) + "\n")
    else:
        run.emit(_columns_csv(["x"] + kinds, [xs] + [g.ys for g in grids]))


def cmd_mc(run: Run):
    args = run.args
    params = _params(args)
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    samples = smallest_eig_samples(params, args.count, args.seed, args.fixed_trace)
    run.emit(samples.to_csv())
    summary = {"count": samples.count, "mean": format_float(samples.values.mean())}
    if params.n > 1 or not args.fixed_trace:
        if args.fixed_trace:
            form = ft_closed_form(params)
            summary["ks"] = ks_statistic(samples, lambda x: ft_cdf(form, x))
        else:
            form = smin_closed_form(params)
            summary["ks"] = ks_statistic(samples, lambda x: cdf(form, x))
    if args.bins:
        hist = histogram(samples, args.bins)
        path = run.sidecar("hist.csv")
        if path:
            run.emit(hist.to_csv(), path)
        else:
            summary["histogram"] = {"x": hist.xs.tolist(), "density": hist.ys.tolist()}
    run.results.update(summary)
    sys.stderr.write(json.dumps(summary) + "\n")


def cmd_tw(run: Run):
    args = run.args
    params = _params(args)
    if params.m == params.n:
        raise UsageError("tw needs m > n")
    xs = _grid(args.grid)
    scaling = tw_scaling(params)
    try:
        tw = tw2_grid_density(xs, nodes=args.nodes)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    form = ft_closed_form(params) if args.fixed_trace else smin_closed_form(params)
    resc = rescaled_smin_density(form, scaling, xs)
    run.results.update(
        eta_shift=scaling.eta_shift,
        sigma=scaling.sigma,
        ensemble="fixed-trace" if args.fixed_trace else "regular",
        sup_distance=float(np.max(np.abs(resc.ys - tw.ys))),
    )
    run.emit(_columns_csv(["x", "tw2", "rescaled_smin"], [xs, tw.ys, resc.ys]))


def _angles(args):
    base = DEFAULT_INITIAL_CONDITIONS[args.initial]
    try:
        a1 = CoherentAngles(
            base[0].theta if args.theta1 is None else args.theta1,
            base[0].phi if args.phi1 is None else args.phi1,
        )
        a2 = CoherentAngles(
            base[1].theta if args.theta2 is None else args.theta2,
            base[1].phi if args.phi2 is None else args.phi2,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return a1, a2


def cmd_kicked(run: Run):
    args = run.args
    try:
        params = TopParams(_parse_rational(args.j1), _parse_rational(args.j2), args.k1, args.k2, args.eps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    a1, a2 = _angles(args)
    try:
        res = run_ensemble(params, a1, a2, args.skip, args.stride, args.count)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    header = ["period"] + [f"mu{i + 1}" for i in range(params.n1)]
    rows = [[p] + list(s.mu) for p, s in zip(res.periods, res.spectra)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([r[0]] + [format_float(v) for v in r[1:]])
    run.emit(buf.getvalue())
    summary = {
        "n1": params.n1,
        "n2": params.n2,
        "theta1": a1.theta,
        "phi1": a1.phi,
        "theta2": a2.theta,
        "phi2": a2.phi,
        "renormalisations": res.renormalisations,
        "max_norm_drift": res.max_norm_drift,
    }
    if params.n1 > 1:
        form = ft_closed_form(EnsembleParams(params.n1, params.n2))
        summary["ks_smallest"] = ks_statistic(res.smallest(), lambda x: ft_cdf(form, x))
    run.results.update(summary)
    path = args.summary or run.sidecar("summary.json")
    if path:
        run.emit(json.dumps(summary, indent=1) + "\n", path)
    else:
        sys.stderr.write(json.dumps(summary) + "\n")


def cmd_report(run: Run):
    from .report import build_report

    args = run.args
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    files, summary = build_report(outdir, count=args.count, seed=args.seed, full=args.full, kicked_count=args.kicked_count)
    run.outputs.extend(str(f) for f in files)
    run.results.update(summary)
    if args.manifest is None:
        args.manifest = str(outdir / "report.manifest.json")
    sys.stdout.write("\n".join(str(f) for f in files) + "\n")


# ---------------------------------------------------------------------------
# parser


def _add_common(p: argparse.ArgumentParser, output=True):
    if output:
        p.add_argument("-o", "--output", help="output file (default: stdout)")
    p.add_argument("--manifest", help="manifest path (default: <output>.manifest.json)")


def _add_nm(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wishart-smin", description=__doc__)
    parser.add_argument("--version", action="version", version=_version())
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="exact smallest-eigenvalue density (regular ensemble)")
    _add_nm(p)
    p.add_argument("--grid", help="a:b:N evaluation grid")
    p.add_argument("--grid-csv", help="where to write the grid CSV")
    p.add_argument("--exact-at", help="rational point for an exact evaluation")
    _add_common(p)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("ft-density", help="exact smallest-eigenvalue density (fixed trace)")
    _add_nm(p)
    p.add_argument("--grid")
    p.add_argument("--grid-csv")
    p.add_argument("--exact-at")
    p.add_argument("--r-delta", help="report P(lambda_min > 1/n - delta)")
    p.add_argument("--exact-r", action="store_true", help="also give R(delta) as an exact rational")
    _add_common(p)
    p.set_defaults(func=cmd_ft_density)

    p = sub.add_parser("moments", help="moment <lambda_min^eta>")
    _add_nm(p)
    p.add_argument("--eta", required=True)
    p.add_argument("--fixed-trace", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("marginal", help="one-level eigenvalue density")
    _add_nm(p)
    p.add_argument("--kind", choices=MARGINAL_KINDS + ["all"], default="fixed-trace")
    p.add_argument("--grid", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_common(p)
    p.set_defaults(func=cmd_marginal)

    p = sub.add_parser("mc", help="Monte Carlo smallest eigenvalues")
    _add_nm(p)
    p.add_argument("--count", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fixed-trace", action="store_true")
    p.add_argument("--bins", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("tw", help="Tracy-Widom comparison")
    _add_nm(p)
    p.add_argument("--grid", default="-10:6:512")
    p.add_argument("--nodes", type=int, default=60)
    p.add_argument("--fixed-trace", action="store_true", help="rescale the fixed-trace density instead")
    _add_common(p)
    p.set_defaults(func=cmd_tw)

    p = sub.add_parser("kicked", help="coupled kicked tops Schmidt spectra")
    p.add_argument("--j1", default="5")
    p.add_argument("--j2", default="10")
    p.add_argument("--k1", type=float, default=7.0)
    p.add_argument("--k2", type=float, default=8.0)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--initial", choices=sorted(DEFAULT_INITIAL_CONDITIONS), default="A")
    for name in ("theta1", "phi1", "theta2", "phi2"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--skip", type=int, default=500)
    p.add_argument("--stride", type=int, default=20)
    p.add_argument("--count", type=int, default=2000)
    p.add_argument("--seedless", action="store_true", help="accepted for symmetry; the dynamics use no RNG")
    p.add_argument("--summary", help="summary JSON path")
    _add_common(p)
    p.set_defaults(func=cmd_kicked)

    p = sub.add_parser("report", help="render all figures and their data tables")
    p.add_argument("--outdir", default="report")
    p.add_argument("--count", type=int, default=20000, help="Monte Carlo draws per panel")
    p.add_argument("--kicked-count", type=int, default=2000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--full", action="store_true", help="include the n=25, m=425 and n=50 Tracy-Widom panels")
    _add_common(p, output=False)
    p.set_defaults(func=cmd_report, output=None)
    return parser


_NEGATIVE_VALUE = re.compile(r"^-\.?\d")


def _join_negative_values(argv: list) -> list:
    """``--grid -10:6:512`` -> ``--grid=-10:6:512`` so argparse does not read a flag."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and _NEGATIVE_VALUE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    argv = _join_negative_values(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    run = Run(args, argv)
    try:
        args.func(run)
    except UsageError as exc:
        sys.stderr.write(f"wishart-smin {args.command}: {exc}\n")
        return EXIT_USAGE
    except (NormalizationError, QuadratureError, EigensolverError, ArithmeticError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"wishart-smin {args.command}: numerical failure: {exc}\n")
        return EXIT_NUMERIC
    run.finish()
    return 0


if __name__ == "__main__":
    sys.exit(main())
