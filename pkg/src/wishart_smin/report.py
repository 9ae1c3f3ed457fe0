"""Figure-style report: each panel is written as a CSV table plus a PNG."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .exact import EnsembleParams, cdf, eval_density, smin_closed_form
from .fixed_trace import eval_ft_density, ft_cdf, ft_closed_form
from .grid import GridDensity, format_float
from .kicked_tops import DEFAULT_INITIAL_CONDITIONS, TopParams, run_ensemble
from .marginals import marginal_ft, marginal_mp, marginal_scaled
from .montecarlo import histogram, ks_statistic, smallest_eig_samples
from .plotting import plot_panels
from .tracy_widom import rescaled_smin_density, tw2_grid_density, tw_scaling

__all__ = ["build_report"]


def _write_table(path: Path, header: list, columns: list) -> Path:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(format_float(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def _hist_panel(hist: GridDensity, xs, ys, title: str, label: str = "closed form") -> dict:
    return {"curves": {label: (xs, ys)}, "hist": hist, "title": title}


def _smallest_panels(outdir: Path, count: int, seed: int, fixed_trace: bool):
    panels, summary, files = [], {}, []
    tag = "ft" if fixed_trace else "regular"
    for n in (8, 15):
        for alpha in (0, 2, 4):
            params = EnsembleParams(n, n + alpha)
            samples = smallest_eig_samples(params, count, seed + 97 * n + alpha, fixed_trace)
            if fixed_trace:
                form = ft_closed_form(params)
                density, dist = (lambda x, f=form: eval_ft_density(f, x)), (lambda x, f=form: ft_cdf(f, x))
            else:
                form = smin_closed_form(params)
                density, dist = (lambda x, f=form: eval_density(f, x)), (lambda x, f=form: cdf(f, x))
            hist = histogram(samples, 40)
            xs = np.linspace(0, hist.metadata["edges"][-1], 300)
            ys = density(xs)
            ks = ks_statistic(samples, dist)
            summary[f"ks_{tag}_n{n}_a{alpha}"] = ks
            files.append(
                _write_table(
                    outdir / f"smallest_{tag}_n{n}_a{alpha}.csv",
                    ["x", "density", "hist_x", "hist_density"],
                    [xs, ys, hist.xs, hist.ys],
                )
            )
            panels.append(_hist_panel(hist, xs, ys, f"n={n}, m={n + alpha}, KS={ks:.4f}"))
    files.append(plot_panels(outdir / f"smallest_{tag}.png", panels))
    return files, summary


def _marginal_ft_panels(outdir: Path, count: int, seed: int):
    panels, files = [], []
    n = 8
    for alpha in (0, 2, 4):
        params = EnsembleParams(n, n + alpha)
        rng = np.random.Generator(np.random.Philox(key=[seed, alpha + 1]))
        draws = max(1, count // n)
        a = (rng.standard_normal((draws, n, n + alpha)) + 1j * rng.standard_normal((draws, n, n + alpha))) / np.sqrt(2)
        w = a @ np.conj(np.swapaxes(a, 1, 2))
        ev = np.linalg.eigvalsh(w) / np.real(np.trace(w, axis1=1, axis2=2))[:, None]
        hist = histogram(ev.ravel(), 50)
        xs = np.linspace(0, min(0.999, hist.metadata["edges"][-1]), 300)
        ys = marginal_ft(params, xs)
        files.append(
            _write_table(outdir / f"marginal_ft_n{n}_a{alpha}.csv", ["x", "density", "hist_x", "hist_density"], [xs, ys, hist.xs, hist.ys])
        )
        panels.append(_hist_panel(hist, xs, ys, f"fixed-trace marginal, n={n}, m={n + alpha}"))
    files.append(plot_panels(outdir / "marginal_ft.png", panels))
    return files


def _scaled_panels(outdir: Path):
    panels, files, summary = [], [], {}
    for n, m in ((15, 15), (20, 30), (25, 75)):
        params = EnsembleParams(n, m)
        xs = np.linspace(0, 4.5 / n, 600)
        exact, scaled, mp = marginal_ft(params, xs), marginal_scaled(params, xs), marginal_mp(params, xs)
        summary[f"l1_scaled_n{n}_m{m}"] = float(np.trapezoid(np.abs(exact - scaled), xs))
        summary[f"l1_mp_n{n}_m{m}"] = float(np.trapezoid(np.abs(exact - mp), xs))
        files.append(_write_table(outdir / f"scaled_n{n}_m{m}.csv", ["x", "exact", "scaled", "marchenko_pastur"], [xs, exact, scaled, mp]))
        panels.append({"curves": {"exact": (xs, exact), "scaled": (xs, scaled), "Marchenko-Pastur": (xs, mp)}, "title": f"n={n}, m={m}"})
    files.append(plot_panels(outdir / "scaled.png", panels))
    return files, summary


def _tw_panels(outdir: Path, full: bool):
    cases = [(25, 125), (25, 225)]
    if full:
        cases += [(25, 425), (50, 250)]
    xs = np.linspace(-6, 4, 201)
    tw = tw2_grid_density(xs)
    panels, files, summary = [], [], {}
    for n, m in cases:
        params = EnsembleParams(n, m)
        sc = tw_scaling(params)
        reg = rescaled_smin_density(smin_closed_form(params), sc, xs)
        ft = rescaled_smin_density(ft_closed_form(params), sc, xs)
        summary[f"sup_tw_regular_n{n}_m{m}"] = float(np.max(np.abs(reg.ys - tw.ys)))
        summary[f"sup_tw_ft_n{n}_m{m}"] = float(np.max(np.abs(ft.ys - tw.ys)))
        files.append(_write_table(outdir / f"tw_n{n}_m{m}.csv", ["x", "tw2", "rescaled_regular", "rescaled_fixed_trace"], [xs, tw.ys, reg.ys, ft.ys]))
        panels.append({"curves": {"TW2": (xs, tw.ys), "regular": (xs, reg.ys), "fixed trace": (xs, ft.ys)}, "title": f"n={n}, m={m}"})
    files.append(plot_panels(outdir / "tracy_widom.png", panels, ncols=2))
    return files, summary


def _kicked_panels(outdir: Path, count: int):
    n1, n2 = 11, 21
    form = ft_closed_form(EnsembleParams(n1, n2))
    panels, files, summary = [], [], {}
    for k1, k2 in ((0.5, 1.0), (0.5, 8.0), (2.5, 3.0), (7.0, 8.0)):
        params = TopParams.from_dims(n1, n2, k1, k2, 1.0)
        xs = np.linspace(0, 1 / n1, 300)
        curves = {"fixed trace": (xs, eval_ft_density(form, xs))}
        columns, header = [xs, curves["fixed trace"][1]], ["x", "fixed_trace"]
        for name, (a1, a2) in DEFAULT_INITIAL_CONDITIONS.items():
            res = run_ensemble(params, a1, a2, count=count)
            small = res.smallest()
            summary[f"ks_k{k1}_{k2}_{name}"] = ks_statistic(small, lambda x: ft_cdf(form, x))
            counts, edges = np.histogram(small, bins=30, range=(0, 1 / n1))
            dens = counts / (counts.sum() * np.diff(edges))
            centres = 0.5 * (edges[:-1] + edges[1:])
            curves[f"tops, set {name}"] = (centres, dens)
            header += [f"hist_x_{name}", f"hist_{name}"]
            columns += [centres, dens]
        files.append(_write_table(outdir / f"kicked_k{k1}_{k2}.csv", header, columns))
        panels.append({"curves": curves, "title": f"N1={n1}, N2={n2}, k=({k1}, {k2})", "xlabel": "smallest Schmidt eigenvalue"})
    files.append(plot_panels(outdir / "kicked_tops.png", panels, ncols=2))
    return files, summary


def build_report(outdir, count: int = 20000, seed: int = 1, full: bool = False, kicked_count: int = 2000):
    outdir = Path(outdir)
    files, summary = [], {}
    for ft in (False, True):
        f, s = _smallest_panels(outdir, count, seed, ft)
        files += f
        summary.update(s)
    files += _marginal_ft_panels(outdir, count, seed)
    f, s = _scaled_panels(outdir)
    files += f
    summary.update(s)
    f, s = _tw_panels(outdir, full)
    files += f
    summary.update(s)
    f, s = _kicked_panels(outdir, kicked_count)
    files += f
    summary.update(s)
    path = outdir / "summary.json"
    path.write_text(json.dumps(summary, indent=1, sort_keys=True) + "\n")
    files.append(path)
    return files, summary
