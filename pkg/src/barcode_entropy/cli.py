"""Command line entry point: barcode, entropy, crofton, toric and verify.

Every command computes all of its outputs in memory and writes them only
once the computation succeeded, each file through a temporary rename.
Exit codes: 0 success, 1 error, 2 a bound certificate or check failed.
"""
from __future__ import annotations

import functools
import math
import os
import re
import sys
from pathlib import Path

import click
import numpy as np

from . import dynamics as dyn
from . import integral_geometry as ig
from . import novikov as nv
from . import persistence as pc
from . import toric
from .growth import GrowthSeries, barcode_entropy_estimate, exp_growth_rate, poly_degree_fit
from .io import (InputError, atomic_write, barcode_csv, barcode_json, complex_from_json, dumps_json, growth_csv,
                 polyline_csv, read_barcode_dir, read_growth_csv, read_polyline_csv, spec_from_json, unpinned_csv)
from .seeding import derive_seed

OUT_ENV = "BARCODE_ENTROPY_OUT"
DEFAULT_OUT = "barcode_entropy_out"

EXIT_OK, EXIT_ERROR, EXIT_CERT = 0, 1, 2

BUILTIN_SYSTEMS = ("cat", "doubling", "rotation", "shift", "perturbed_torus")


class CertificateFailed(Exception):
    pass


def parse_grid(text: str) -> list[float]:
    """Comma-separated values; each is a number or a power written 2^-3."""
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        m = re.fullmatch(r"(\d+(?:\.\d*)?)\^(-?\d+)", tok)
        try:
            v = float(m.group(1)) ** int(m.group(2)) if m else float(tok)
        except ValueError:
            raise click.BadParameter(f"not a number: {tok!r}") from None
        if not v > 0 or not math.isfinite(v):
            raise click.BadParameter(f"grid values must be positive and finite, got {tok!r}")
        out.append(v)
    if not out:
        raise click.BadParameter("empty grid")
    return out


def _out_dir(out: str | None, command: str) -> Path:
    return Path(out or os.environ.get(OUT_ENV) or DEFAULT_OUT) / command


def _commit(root: Path, files: dict[str, str | bytes]) -> None:
    for rel in sorted(files):
        atomic_write(root / rel, files[rel])


def _guard(fn):
    """Map errors to exit code 1 and certificate failures to 2."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            fn(*args, **kwargs)
        except CertificateFailed as e:
            click.echo(f"certificate failed: {e}", err=True)
            sys.exit(EXIT_CERT)
        except (InputError, ValueError, KeyError, TypeError, OSError, ig.NonTransverse) as e:
            msg = e.args[0] if isinstance(e, KeyError) and e.args else e
            click.echo(f"error: {msg}", err=True)
            sys.exit(EXIT_ERROR)

    return wrapper


def _common(fn):
    fn = click.option("--seed", type=int, default=0, show_default=True, help="Master seed for every random substream.")(fn)
    fn = click.option("--out", type=click.Path(file_okay=False), default=None,
                      help=f"Output root (default ${OUT_ENV} or ./{DEFAULT_OUT}); each command writes to a subdirectory.")(fn)
    fn = click.option("--plots/--no-plots", default=True, show_default=True, help="Also render PNG figures.")(fn)
    return fn


class _Group(click.Group):
    """Usage errors exit with 1 so that 2 always means a failed certificate."""

    def main(self, *args, **kwargs):
        kwargs["standalone_mode"] = False
        try:
            rv = super().main(*args, **kwargs)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_ERROR)
        except click.Abort:
            click.echo("aborted", err=True)
            sys.exit(EXIT_ERROR)
        sys.exit(rv if isinstance(rv, int) else EXIT_OK)


@click.group(cls=_Group, context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Barcode counting, entropy estimation, Crofton checks and toric models."""


# ---------------------------------------------------------------------------


@main.command()
@click.argument("complex_json", type=click.Path(dir_okay=False))
@click.option("--eps-grid", default="1,0.5,0.25,0.125", show_default=True, help="ε values for b_ε.")
@click.option("--s-max", type=float, default=None, help="Count only bars born below this action (F2 complexes).")
@_common
@_guard
def barcode(complex_json, eps_grid, s_max, seed, out, plots):
    """Barcode of a filtered complex given as JSON."""
    c = complex_from_json(complex_json)
    eps = parse_grid(eps_grid)
    files: dict[str, str | bytes] = {}
    if isinstance(c, nv.NovikovComplex):
        bc = nv.unpinned_barcode(c)
        files["unpinned.csv"] = unpinned_csv(bc)
        files["unpinned.json"] = dumps_json({"lengths": list(bc.lengths)})
        counts = {e: nv.b_eps_unpinned(bc, e) for e in eps}
        report = {"coefficients": "Novikov-F2", "generators": len(c), "bars": len(bc), "b_eps": counts}
        if plots:
            from .plotting import barcode_figure
            files["barcode.png"] = barcode_figure([x for x in bc.lengths], "unpinned barcode")
    else:
        bc = pc.barcode(c)
        files["barcode.csv"] = barcode_csv(bc)
        files["barcode.json"] = dumps_json(barcode_json(bc))
        s = math.inf if s_max is None else s_max
        counts = {e: pc.barcode_function(bc, e, s) for e in eps}
        report = {"coefficients": "F2", "generators": len(c), "bars": len(bc), "b_eps": counts, "s_max": s}
        if plots:
            from .plotting import barcode_figure
            files["barcode.png"] = barcode_figure(bc)
    files["report.json"] = dumps_json(report)
    root = _out_dir(out, "barcode")
    _commit(root, files)
    click.echo(f"{report['bars']} bars; b_eps " + ", ".join(f"{e:g}:{n}" for e, n in counts.items()) + f" -> {root}")


# ---------------------------------------------------------------------------


def _system(arg: str) -> tuple[dyn.DynamicalSystem, dict]:
    if arg in BUILTIN_SYSTEMS:
        spec = {"kind": arg}
    else:
        spec = spec_from_json(arg, ("linear_torus", "cat", "doubling", "rotation", "shift", "perturbed_torus", "custom_grid"))
    try:
        return dyn.system_from_spec(spec), spec
    except KeyError as e:
        raise InputError(arg, f"missing parameter {e.args[0]!r}", field=str(e.args[0])) from None


@main.command()
@click.argument("system", required=False)
@click.option("--growth", "growth_csv_path", type=click.Path(dir_okay=False), help="Fit a growth CSV (index,count) instead.")
@click.option("--barcodes", "barcode_dir", type=click.Path(file_okay=False), help="Fit a directory of barcode CSVs named by index.")
@click.option("--pinned", is_flag=True, help="With --barcodes: the index is an action level s.")
@click.option("--eps-grid", default="2^-3,2^-4,2^-5,2^-6", show_default=True)
@click.option("--k-max", type=int, default=16, show_default=True, help="Largest iterate.")
@click.option("--samples", type=int, default=1 << 16, show_default=True, help="Sample budget for separated sets.")
@_common
@_guard
def entropy(system, growth_csv_path, barcode_dir, pinned, eps_grid, k_max, samples, seed, out, plots):
    """Entropy of a dynamical system (builtin name or spec JSON), a growth CSV or a barcode directory."""
    sources = [x for x in (system, growth_csv_path, barcode_dir) if x]
    if len(sources) != 1:
        raise ValueError("give exactly one of SYSTEM, --growth or --barcodes")
    if k_max < 4:
        raise ValueError("--k-max must be at least 4")
    eps = parse_grid(eps_grid)
    files: dict[str, str | bytes] = {}
    if growth_csv_path:
        ser = read_growth_csv(growth_csv_path)
        r, d = exp_growth_rate(ser), poly_degree_fit(ser)
        report = {"rate": r.rate, "rate_residual": r.residual, "degree": d.degree, "window": list(r.window), "value": r.rate}
        if plots:
            from .plotting import growth_figure
            files["growth.png"] = growth_figure(ser)
    elif barcode_dir:
        index, bcs = read_barcode_dir(barcode_dir)
        est = barcode_entropy_estimate(bcs, index, eps, pinned_at_index=pinned)
        report = {"rates": {e: f.rate for e, f in est.per_eps}, "value": est.value, "eps_used": est.eps_used,
                  "monotone": est.monotone, "notes": list(est.notes)}
        if plots:
            from .plotting import entropy_profile_figure
            files["profile.png"] = entropy_profile_figure([(e, f.rate) for e, f in est.per_eps])
    else:
        sys_, spec = _system(system)
        est = dyn.htop_estimate(sys_, eps, range(1, k_max + 1), budget=samples, seed=derive_seed(seed, "entropy", "dynamics", "sample"))
        report = {"value": est.value, "per_eps": [list(p) for p in est.per_eps], "k_range": list(est.k_range),
                  "diagnostics": {"flags": list(est.diagnostics["flags"]), "monotone": est.diagnostics["monotone"]},
                  "system": spec}
        try:
            per = dyn.periodic_series(sys_, range(1, k_max + 1))
        except ValueError:
            per = None
        if per is not None:
            files["periodic.csv"] = growth_csv(per, "k")
            report["periodic_rate"] = dyn.orbit_growth_entropy(per)
        if plots:
            from .plotting import entropy_profile_figure
            files["profile.png"] = entropy_profile_figure(est.per_eps, spec["kind"])
    files["entropy.json"] = dumps_json(report)
    root = _out_dir(out, "entropy")
    _commit(root, files)
    click.echo(f"value {report['value']:.4f} -> {root}")


# ---------------------------------------------------------------------------


@main.command()
@click.argument("target_csv", type=click.Path(dir_okay=False))
@click.option("--tomograph", default="lines", show_default=True, help="'lines' or a tomograph spec JSON.")
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True, help="Threads for Monte Carlo shards; results do not depend on it.")
@_common
@_guard
def crofton(target_csv, tomograph, samples, workers, seed, out, plots):
    """Crofton inequality and formula check for a target polyline."""
    if tomograph == "lines":
        t = ig.line_tomograph()
    else:
        spec = spec_from_json(tomograph, ("lines", "translation", "cylinder"))
        try:
            t = ig.tomograph_from_spec(spec)
        except KeyError as e:
            raise InputError(tomograph, f"missing parameter {e.args[0]!r}", field=str(e.args[0])) from None
    target = read_polyline_csv(target_csv)
    dens = ig.pushforward_density(t, seed=derive_seed(seed, "crofton", "integral_geometry", "density"))
    res = ig.crofton_mc(t, target, samples, seed=derive_seed(seed, "crofton", "integral_geometry", "mc"), density=dens, workers=workers)
    di, dse = dens.integrate(target)
    fc = ig.CroftonFormulaCheck(res.integral, res.stderr, di, dse)
    report = res.as_dict()
    report.update({"samples": samples, "non_transverse": res.non_transverse,
                   "formula": {"density_integral": di, "density_stderr": dse, "z": fc.z, "pass": fc.passed()}})
    files: dict[str, str | bytes] = {"crofton.json": dumps_json(report), "target.csv": polyline_csv(target)}
    root = _out_dir(out, "crofton")
    _commit(root, files)
    click.echo(f"integral {res.integral:.5g} ± {res.stderr:.2g}, bound {res.const * res.volume:.5g} -> {root}")
    if not res.passed:
        raise CertificateFailed(f"integral {res.integral:.6g} exceeds const·volume {res.const * res.volume:.6g} by more than 3 standard errors")


# ---------------------------------------------------------------------------


@main.command(name="toric")
@click.argument("spec_json", type=click.Path(dir_okay=False))
@click.option("--k-max", type=int, default=50, show_default=True, help="Largest iterate for profile counts.")
@click.option("--s-max", type=float, default=1000.0, show_default=True, help="Largest action level for ellipsoids and flat tori.")
@click.option("--degree", type=float, default=None, help="Degree to certify (default: the model's dimension).")
@_common
@_guard
def toric_cmd(spec_json, k_max, s_max, degree, seed, out, plots):
    """Counts and polynomial certificates for a profile, ellipsoid or flat torus spec."""
    spec = spec_from_json(spec_json)
    files: dict[str, str | bytes] = {}
    if "a" in spec:
        e = toric.EllipsoidSpec(spec["a"])
        s_grid = _s_grid(s_max)
        ser = toric.ellipsoid_count_series(e, s_grid)
        gen = toric.ellipsoid_generator_bound(e, s_grid)
        cert = toric.toric_bound_check(ser, 1 if degree is None else degree)
        report = {"model": "ellipsoid", "a": list(e.a), "slope": toric.linear_slope(ser), "entropy_estimate": exp_growth_rate(gen).rate,
                  "rationally_independent": e.rationally_independent}
        files["generators.csv"] = growth_csv(gen)
    elif spec.get("kind") == "flat_torus":
        basis = toric.LatticeBasis(spec["v1"], spec["v2"])
        s_grid = _s_grid(s_max)
        ser = toric.flat_torus_count_series(basis, s_grid)
        cert = toric.toric_bound_check(ser, 1 if degree is None else degree)
        report = {"model": "flat_torus", "entropy_estimate": exp_growth_rate(ser).rate}
        files["barcode.csv"] = barcode_csv(toric.flat_torus_loop_barcode(basis, min(s_max, 100.0)))
    else:
        try:
            prof = toric.profile_from_spec(spec)
        except KeyError as e:
            raise InputError(spec_json, f"missing parameter {e.args[0]!r}", field=str(e.args[0])) from None
        if k_max < 4:
            raise ValueError("--k-max must be at least 4")
        counts = [toric.rational_tori_count(prof, k) for k in range(1, k_max + 1)]
        ser = GrowthSeries(range(1, k_max + 1), [c.total for c in counts])
        cert = toric.toric_bound_check(ser, prof.n if degree is None else degree)
        report = {"model": "profile", "kind": spec.get("kind"), "interior": [c.interior for c in counts],
                  "degree_fit": poly_degree_fit(ser).degree}
    report["certificate"] = {"n": cert.n, "c_n": cert.c_n, "c_0": cert.c_0, "margin": cert.margin,
                             "max_violation": cert.max_violation, "pass": cert.passed}
    files["counts.csv"] = growth_csv(ser)
    files["report.json"] = dumps_json(report)
    if plots:
        from .plotting import growth_figure
        files["counts.png"] = growth_figure(ser, log=False)
    root = _out_dir(out, "toric")
    _commit(root, files)
    click.echo(f"certificate {'passed' if cert.passed else 'FAILED'} (degree {cert.n:g}) -> {root}")
    if not cert.passed:
        raise CertificateFailed(f"polynomial envelope of degree {cert.n:g} violated by {cert.max_violation:.6g}")


def _s_grid(s_max: float) -> np.ndarray:
    if not s_max >= 4:
        raise ValueError("--s-max must be at least 4")
    n = int(min(s_max, 10_000))
    return np.linspace(s_max / n, s_max, n)


# ---------------------------------------------------------------------------


@main.command()
@click.argument("suite", default="all")
@click.option("--workers", type=int, default=1, show_default=True, help="Run checks in this many processes.")
@click.option("--seed", type=int, default=0, show_default=True, help="Master seed for every random substream.")
@click.option("--out", type=click.Path(file_okay=False), default=None, help=f"Output root (default ${OUT_ENV} or ./{DEFAULT_OUT}).")
def verify(suite, workers, seed, out):
    """Run the acceptance checks: 'all', 'fast' or a comma-separated id list."""
    from . import verify as vf

    try:
        checks = vf.select(suite)
    except ValueError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_ERROR)
    root = _out_dir(out, "verify") / suite.replace(",", "_")

    def show(r):
        tag = "PASS" if r.passed else "FAIL"
        extra = f" [{r.error}]" if r.error else ""
        click.echo(f"{tag} {r.check.id:2d} {r.check.name} ({r.elapsed:.1f} s, limit {r.check.limit_s:g} s){extra}")

    runs = vf.run_checks(checks, seed, workers, root, on_result=show)
    n_ok = sum(r.passed for r in runs)
    click.echo(f"{n_ok}/{len(runs)} passed -> {root}")
    if any(r.error for r in runs) and not any(r.outcome is not None and not r.passed for r in runs):
        sys.exit(EXIT_ERROR)
    sys.exit(EXIT_OK if n_ok == len(runs) else EXIT_CERT)


if __name__ == "__main__":
    main()
