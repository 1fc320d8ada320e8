"""Command-line front end: solvers, simulator, and report files.

Each subcommand writes a CSV (one row per sweep point, values with 17
significant digits, unit-annotated header comments) plus a JSON sidecar
holding the run manifest and the same rows; ``--plot`` additionally renders a
PNG next to the CSV.  Outputs carry no timestamps, so re-running the same
command line reproduces byte-identical files.

Exit codes: 0 success, 1 usage error, 2 domain or parameter error,
3 comparison verdict failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .ballot import starvation_pmf, starvation_probability
from .core import IppParams, QueueParams, ScenarioSpec, SlotParams
from .fluid import (
    Exponential,
    FluidScenario,
    LogNormal,
    Pareto,
    fluid_starvation_probability,
    match_means,
    no_starvation_horizon,
)
from .qoe import (
    QoeWeights,
    optimize_file_level,
    optimize_finite,
    optimize_infinite_subcritical,
    optimize_infinite_supercritical,
)
from .recursive import ipp_kernel, mm1_kernel, starvation_pmf_recursive
from .sim import SimConfig, simulate
from .takacs import SlottedScenario, takacs_pmf, takacs_starvation_probability

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_VERDICT = 3

SCHEMA_VERSION = 1


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility record embedded in every JSON sidecar."""

    subcommand: str
    params: dict
    version: str
    seed: int | None
    output_sha256: str
    schema_version: int = SCHEMA_VERSION


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def _jsonable(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def _out_paths(args, subcommand: str):
    base = args.out if args.out else f"playout-{subcommand}"
    if base.endswith(".csv"):
        base = base[:-4]
    parent = os.path.dirname(base)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return base + ".csv", base + ".json", base + ".png"


def _csv_text(subcommand: str, columns, units, rows) -> str:
    lines = [f"# playout {subcommand} v{__version__}"]
    lines.append("# " + "; ".join(f"{c} [{units.get(c, '-')}]" for c in columns))
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _emit(args, subcommand, columns, units, rows, manifest_params, extra=None):
    """Write the CSV/JSON pair per --format and return the CSV checksum."""
    csv_path, json_path, _ = _out_paths(args, subcommand)
    csv_text = _csv_text(subcommand, columns, units, rows)
    digest = hashlib.sha256(csv_text.encode()).hexdigest()
    fmt = args.format
    if fmt in ("csv", "both"):
        with open(csv_path, "w") as fh:
            fh.write(csv_text)
    if fmt in ("json", "both"):
        manifest = RunManifest(
            subcommand=subcommand,
            params=manifest_params,
            version=__version__,
            seed=getattr(args, "seed", None),
            output_sha256=digest,
        )
        payload = {
            "manifest": asdict(manifest),
            "columns": list(columns),
            "units": units,
            "rows": [[_jsonable(v) for v in row] for row in rows],
        }
        if extra:
            payload.update(extra)
        with open(json_path, "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
    return digest


def _queue_params(args) -> QueueParams:
    if getattr(args, "rho", None) is not None:
        if getattr(args, "lam", None) is not None:
            raise _UsageError("--rho is mutually exclusive with --lambda")
        return QueueParams.from_rho(args.rho, args.mu)
    if getattr(args, "lam", None) is None:
        raise _UsageError("provide either --rho or --lambda (with optional --mu)")
    return QueueParams(args.lam, args.mu)


def _parse_sweep(text: str, integral: bool):
    parts = text.split(":")
    if len(parts) != 3:
        raise _UsageError(f"sweep must look like start:end:step, got {text!r}")
    try:
        start, end, step = (float(p) for p in parts)
    except ValueError:
        raise _UsageError(f"non-numeric sweep bounds in {text!r}") from None
    if step <= 0 or end < start:
        raise _UsageError(f"sweep needs start <= end and step > 0, got {text!r}")
    values = []
    k = 0
    while True:
        v = start + k * step
        if v > end + 1e-9:
            break
        values.append(int(round(v)) if integral else v)
        k += 1
    return values


def _axis(point, sweep, name: str, integral: bool):
    """Resolve one of --<name>/-<name>-sweep into a list of values."""
    if point is not None and sweep is not None:
        raise _UsageError(f"--{name} and --{name}-sweep are mutually exclusive")
    if sweep is not None:
        return _parse_sweep(sweep, integral)
    if point is not None:
        return [point]
    raise _UsageError(f"provide --{name} or --{name}-sweep")


def _maybe_plot(args, render):
    if getattr(args, "plot", False):
        render(_out_paths(args, args.subcommand)[2])


def _pmf_columns(jmax: int):
    return [f"pmf_{j}" for j in range(jmax + 1)]


def _padded_pmf(pmf, jmax: int):
    return [pmf[j] if j < len(pmf) else 0.0 for j in range(jmax + 1)]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_exact(args) -> int:
    params = _queue_params(args)
    ns = _axis(args.n, args.n_sweep, "n", True)
    x1s = _axis(args.x1, args.x1_sweep, "x1", True)
    jmax = args.jmax
    columns = ["n", "x1", "lambda", "mu", "rho", "ps"] + _pmf_columns(jmax)
    units = {"n": "packets", "x1": "packets", "lambda": "packets/s", "mu": "packets/s",
             "rho": "-", "ps": "probability"}
    units.update({c: "probability" for c in _pmf_columns(jmax)})
    rows = []
    for x1 in x1s:
        for n in ns:
            spec = ScenarioSpec(n, x1)
            ps = starvation_probability(params, spec)
            dist = starvation_pmf(params, spec, j_max=min(jmax, spec.max_starvations), mode=args.mode)
            rows.append([n, x1, params.lam, params.mu, params.rho, ps]
                        + _padded_pmf(dist.pmf, jmax))
    _emit(args, "exact", columns, units, rows,
          {"lambda": params.lam, "mu": params.mu, "x1": x1s, "n": ns,
           "jmax": jmax, "mode": args.mode or "auto"})

    def render(png):
        from .plots import line_figure
        xs = ns if len(ns) > 1 else x1s
        xlabel = "file size [packets]" if len(ns) > 1 else "threshold [packets]"
        series = {}
        for j in range(jmax + 1):
            col = 6 + j
            series[f"P({j} starvations)"] = [r[col] for r in rows]
        line_figure(xs, series, xlabel, "probability", png)

    _maybe_plot(args, render)
    return EXIT_OK


def cmd_recursive(args) -> int:
    params = _queue_params(args)
    if (args.alpha is None) != (args.beta is None):
        raise _UsageError("--alpha and --beta must be given together")
    ipp = IppParams(args.alpha, args.beta) if args.alpha is not None else None
    ns = _axis(args.n, args.n_sweep, "n", True)
    x1s = _axis(args.x1, args.x1_sweep, "x1", True)
    jmax = args.jmax
    columns = ["n", "x1", "lambda", "mu", "alpha", "beta"] + _pmf_columns(jmax)
    units = {"n": "packets", "x1": "packets", "lambda": "packets/s", "mu": "packets/s",
             "alpha": "1/s (0 = ungated)", "beta": "1/s (0 = ungated)"}
    units.update({c: "probability" for c in _pmf_columns(jmax)})
    kern_size = max(ns)
    kernel = (ipp_kernel(params, ipp, kern_size) if ipp
              else mm1_kernel(params, kern_size))
    rows = []
    for x1 in x1s:
        for n in ns:
            dist = starvation_pmf_recursive(kernel, n, x1, j_max=min(jmax, n // x1))
            rows.append([n, x1, params.lam, params.mu,
                         ipp.alpha if ipp else 0.0, ipp.beta if ipp else 0.0]
                        + _padded_pmf(dist.pmf, jmax))
    _emit(args, "recursive", columns, units, rows,
          {"lambda": params.lam, "mu": params.mu, "x1": x1s, "n": ns, "jmax": jmax,
           "alpha": args.alpha, "beta": args.beta})

    def render(png):
        from .plots import line_figure
        xs = ns if len(ns) > 1 else x1s
        xlabel = "file size [packets]" if len(ns) > 1 else "threshold [packets]"
        series = {f"P({j} starvations)": [r[6 + j] for r in rows] for j in range(jmax + 1)}
        line_figure(xs, series, xlabel, "probability", png)

    _maybe_plot(args, render)
    return EXIT_OK


def cmd_takacs(args) -> int:
    if args.lam is None:
        raise _UsageError("slotted playback needs --lambda")
    if args.slot_d is None:
        raise _UsageError("slotted playback needs --slot-d")
    ns = _axis(args.n, args.n_sweep, "n", True)
    x1s = _axis(args.x1, args.x1_sweep, "x1", True)
    jmax = args.jmax
    columns = ["n", "x1", "lambda", "slot_d", "lambda_d", "ps"] + _pmf_columns(jmax)
    units = {"n": "packets", "x1": "packets", "lambda": "packets/s", "slot_d": "s",
             "lambda_d": "packets/slot", "ps": "probability"}
    units.update({c: "probability" for c in _pmf_columns(jmax)})
    rows = []
    for x1 in x1s:
        for n in ns:
            scn = SlottedScenario(lam=args.lam, d=args.slot_d, file_size=n, threshold=x1)
            ps = takacs_starvation_probability(scn)
            dist = takacs_pmf(scn, j_max=min(jmax, scn.max_starvations))
            rows.append([n, x1, args.lam, args.slot_d, scn.mean_per_slot, ps]
                        + _padded_pmf(dist.pmf, jmax))
    _emit(args, "takacs", columns, units, rows,
          {"lambda": args.lam, "slot_d": args.slot_d, "x1": x1s, "n": ns, "jmax": jmax})

    def render(png):
        from .plots import line_figure
        xs = ns if len(ns) > 1 else x1s
        xlabel = "file size [packets]" if len(ns) > 1 else "threshold [packets]"
        series = {f"P({j} starvations)": [r[6 + j] for r in rows] for j in range(jmax + 1)}
        line_figure(xs, series, xlabel, "probability", png)

    _maybe_plot(args, render)
    return EXIT_OK


def _fluid_distribution(args):
    mean = (1.0 / args.theta) if args.theta is not None else None
    if args.dist == "exp":
        if args.theta is None:
            raise _UsageError("exponential sizes need --theta")
        return Exponential(args.theta)
    if args.dist == "pareto":
        if args.nm is not None and args.upsilon is not None:
            return Pareto(n_m=args.nm, upsilon=args.upsilon)
        if args.nm is not None and mean is not None:
            return match_means(mean, "pareto", n_m=args.nm)
        if args.upsilon is not None and mean is not None:
            return match_means(mean, "pareto", upsilon=args.upsilon)
        raise _UsageError("pareto sizes need --nm and --upsilon, or one of them with --theta")
    if args.dist == "lognormal":
        if args.varrho is not None and args.sigma is not None:
            return LogNormal(varrho=args.varrho, sigma=args.sigma)
        if args.varrho is not None and mean is not None:
            return match_means(mean, "lognormal", varrho=args.varrho)
        if args.sigma is not None and mean is not None:
            return match_means(mean, "lognormal", sigma=args.sigma)
        raise _UsageError("lognormal sizes need --varrho and --sigma, or one of them with --theta")
    raise _UsageError(f"unknown --dist {args.dist!r}")


def _load_sizes_csv(path: str) -> np.ndarray:
    sizes = []
    try:
        with open(path) as fh:
            for line_no, line in enumerate(fh, 1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                if line_no == 1 and text == "file_size_packets":
                    continue
                try:
                    value = int(text)
                except ValueError:
                    raise ValueError(
                        f"{path}:{line_no}: expected one positive integer per line, got {text!r}"
                    ) from None
                if value < 1:
                    raise ValueError(f"{path}:{line_no}: file size must be >= 1, got {value}")
                sizes.append(value)
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from None
    if not sizes:
        raise ValueError(f"{path}: no file sizes found")
    return np.asarray(sizes, dtype=np.float64)


def cmd_fluid(args) -> int:
    params = _queue_params(args)
    x1s = _axis(args.x1, args.x1_sweep, "x1", True)
    empirical = None
    if args.sizes_csv is not None:
        empirical = _load_sizes_csv(args.sizes_csv)
        label = "empirical"
        theta = upsilon = nm = varrho = sigma = 0.0
    else:
        if args.dist is None:
            raise _UsageError("provide --dist or --sizes-csv")
        dist = _fluid_distribution(args)
        label = args.dist
        theta = dist.theta if isinstance(dist, Exponential) else 0.0
        nm = dist.n_m if isinstance(dist, Pareto) else 0.0
        upsilon = dist.upsilon if isinstance(dist, Pareto) else 0.0
        varrho = dist.varrho if isinstance(dist, LogNormal) else 0.0
        sigma = dist.sigma if isinstance(dist, LogNormal) else 0.0
    columns = ["x1", "lambda", "mu", "n_p", "dist", "theta", "nm", "upsilon",
               "varrho", "sigma", "p_starve"]
    units = {"x1": "packets", "lambda": "packets/s", "mu": "packets/s",
             "n_p": "packets", "dist": "-", "theta": "1/packets", "nm": "packets",
             "upsilon": "-", "varrho": "log-packets", "sigma": "log-packets",
             "p_starve": "probability"}
    rows = []
    for x1 in x1s:
        scn = FluidScenario(lam=params.lam, mu=params.mu, threshold=x1)
        horizon = no_starvation_horizon(scn)
        if empirical is not None:
            p = float(np.mean(empirical > horizon))
        else:
            p = fluid_starvation_probability(scn, dist)
        rows.append([x1, params.lam, params.mu, horizon, label, theta, nm, upsilon,
                     varrho, sigma, p])
    _emit(args, "fluid", columns, units, rows,
          {"lambda": params.lam, "mu": params.mu, "x1": x1s, "dist": label,
           "sizes_csv": args.sizes_csv})

    def render(png):
        from .plots import line_figure
        line_figure(x1s, {label: [r[-1] for r in rows]},
                    "threshold [packets]", "starvation probability", png)

    _maybe_plot(args, render)
    return EXIT_OK


def cmd_qoe(args) -> int:
    if args.rho is not None:
        if args.lam is not None or args.lambda_sweep is not None:
            raise _UsageError("--rho is mutually exclusive with --lambda/--lambda-sweep")
        lams = [args.rho * args.mu]
    else:
        lams = _axis(args.lam, args.lambda_sweep, "lambda", False)
    gammas = _axis(args.gamma, args.gamma_sweep, "gamma", False)
    columns = ["scenario", "lambda", "mu", "gamma", "delta", "theta", "n",
               "x1_star", "x1_star_int", "cost"]
    units = {"scenario": "-", "lambda": "packets/s", "mu": "packets/s", "gamma": "-",
             "delta": "-", "theta": "1/packets", "n": "packets",
             "x1_star": "packets", "x1_star_int": "packets", "cost": "-"}
    rows = []
    for gamma in gammas:
        weights = QoeWeights(gamma=gamma, delta=args.delta)
        for lam in lams:
            if args.scenario == "finite":
                if args.n is None:
                    raise _UsageError("finite scenario needs --n")
                params = QueueParams(lam, args.mu)
                res = optimize_finite(params, args.n, weights, mode=args.mode)
                n_val = args.n
            elif args.scenario == "infinite-super":
                res = optimize_infinite_supercritical(QueueParams(lam, args.mu), weights)
                n_val = 0
            elif args.scenario == "infinite-sub":
                res = optimize_infinite_subcritical(QueueParams(lam, args.mu), weights)
                n_val = 0
            elif args.scenario == "file-level":
                if args.theta is None:
                    raise _UsageError("file-level scenario needs --theta")
                res = optimize_file_level(lam, args.mu, args.theta, weights)
                n_val = 0
            else:
                raise _UsageError(f"unknown scenario {args.scenario!r}")
            rows.append([args.scenario, lam, args.mu, gamma, args.delta,
                         args.theta if args.theta is not None else 0.0, n_val,
                         res.x1_star, res.x1_star_int, res.cost_at_optimum])
    _emit(args, "qoe", columns, units, rows,
          {"scenario": args.scenario, "lambda": lams, "mu": args.mu,
           "gamma": gammas, "delta": args.delta, "theta": args.theta, "n": args.n})

    def render(png):
        from .plots import line_figure
        if len(lams) > 1:
            series = {}
            for gi, gamma in enumerate(gammas):
                block = rows[gi * len(lams):(gi + 1) * len(lams)]
                series[f"gamma={gamma:g}"] = [r[7] for r in block]
            line_figure(lams, series, "arrival rate [packets/s]",
                        "optimal threshold [packets]", png)
        else:
            series = {f"lambda={lams[0]:g}": [rows[gi * len(lams)][7] for gi in range(len(gammas))]}
            line_figure(gammas, series, "delay weight", "optimal threshold [packets]", png)

    _maybe_plot(args, render)
    return EXIT_OK


def _arrival_model(args):
    if (args.alpha is None) != (args.beta is None):
        raise _UsageError("--alpha and --beta must be given together")
    if args.alpha is not None and args.slot_d is not None:
        raise _UsageError("--alpha/--beta and --slot-d are mutually exclusive")
    if args.alpha is not None:
        return IppParams(args.alpha, args.beta)
    if args.slot_d is not None:
        return SlotParams(args.slot_d)
    return None


def cmd_simulate(args) -> int:
    params = _queue_params(args)
    if args.n is None or args.x1 is None:
        raise _UsageError("simulation needs --n and --x1")
    spec = ScenarioSpec(args.n, args.x1, arrival=_arrival_model(args))
    config = SimConfig(params=params, spec=spec, replications=args.replications,
                       master_seed=args.seed, parallel=args.parallel)
    report = simulate(config)
    columns = ["j", "count", "freq", "se"]
    units = {"j": "starvations", "count": "replications", "freq": "probability",
             "se": "probability"}
    rows = [[j, report.histogram.get(j, 0),
             report.empirical_pmf[j], report.standard_errors[j]]
            for j in range(len(report.empirical_pmf))]
    extra = {
        "mean_interstarvation_s": report.mean_interstarvation,
        "interstarvation_se_s": report.interstarvation_se,
        "interval_count": report.interval_count,
        "total_events": report.total_events,
    }
    _emit(args, "simulate", columns, units, rows,
          {"lambda": params.lam, "mu": params.mu, "n": args.n, "x1": args.x1,
           "replications": args.replications, "alpha": args.alpha, "beta": args.beta,
           "slot_d": args.slot_d, "parallel": args.parallel}, extra=extra)

    def render(png):
        from .plots import histogram_figure
        histogram_figure([r[0] for r in rows], [r[2] for r in rows],
                         [r[3] for r in rows], "starvations", png)

    _maybe_plot(args, render)
    return EXIT_OK


def cmd_compare(args) -> int:
    params = _queue_params(args)
    if args.n is None or args.x1 is None:
        raise _UsageError("comparison needs --n and --x1")
    spec = ScenarioSpec(args.n, args.x1)
    jmax = min(args.jmax, spec.max_starvations)
    analytic = starvation_pmf(params, spec, j_max=jmax, mode=args.mode)
    kernel = mm1_kernel(params, args.n)
    state = starvation_pmf_recursive(kernel, args.n, args.x1, j_max=jmax)
    config = SimConfig(params=params, spec=spec, replications=args.replications,
                       master_seed=args.seed, parallel=args.parallel)
    report = simulate(config)
    columns = ["j", "analytic_pmf", "recursive_pmf", "mc_freq", "mc_se", "z_score",
               "within_3se"]
    units = {"j": "starvations", "analytic_pmf": "probability",
             "recursive_pmf": "probability", "mc_freq": "probability",
             "mc_se": "probability", "z_score": "-", "within_3se": "bool"}
    rows = []
    all_within = True
    max_diff = 0.0
    for j in range(jmax + 1):
        pa = analytic.pmf[j]
        pr = state.pmf[j]
        emp = report.empirical_pmf[j] if j < len(report.empirical_pmf) else 0.0
        se = report.standard_errors[j] if j < len(report.standard_errors) else 0.0
        max_diff = max(max_diff, abs(pa - pr))
        # z against the analytic-null standard error, which is well defined
        # even when the empirical bin is empty
        se_model = math.sqrt(pa * (1.0 - pa) / report.replications)
        if se_model == 0.0:
            within = emp == pa
            z = 0.0 if within else math.inf
        else:
            z = abs(emp - pa) / se_model
            within = z <= 3.0
        all_within = all_within and within
        rows.append([j, pa, pr, emp, se, z, within])
    verdict_pass = all_within and max_diff <= 1e-6
    verdict = "PASS" if verdict_pass else "FAIL"
    extra = {"verdict": verdict, "max_abs_method_diff": max_diff}
    _emit(args, "compare", columns, units, rows,
          {"lambda": params.lam, "mu": params.mu, "n": args.n, "x1": args.x1,
           "jmax": jmax, "replications": args.replications,
           "parallel": args.parallel, "mode": args.mode or "auto"}, extra=extra)
    print(f"compare verdict: {verdict} (max analytic/recursive diff {max_diff:.3e})")

    def render(png):
        from .plots import compare_figure
        compare_figure([r[0] for r in rows], [r[1] for r in rows],
                       [r[2] for r in rows], [r[3] for r in rows],
                       [r[4] for r in rows], png)

    _maybe_plot(args, render)
    return EXIT_OK if verdict_pass else EXIT_VERDICT


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(p: _Parser, *, rates=True, scenario_axes=True, jmax_default=2):
    if rates:
        p.add_argument("--lambda", dest="lam", type=float, help="arrival rate [packets/s]")
        p.add_argument("--mu", type=float, default=1.0, help="service rate [packets/s], default 1")
        p.add_argument("--rho", type=float, help="traffic intensity (mutually exclusive with --lambda)")
    if scenario_axes:
        p.add_argument("--n", type=int, help="file size [packets]")
        p.add_argument("--n-sweep", help="file-size sweep start:end:step")
        p.add_argument("--x1", type=int, help="start-up threshold [packets]")
        p.add_argument("--x1-sweep", help="threshold sweep start:end:step")
        p.add_argument("--jmax", type=int, default=jmax_default,
                       help=f"largest starvation count reported (default {jmax_default})")
    p.add_argument("--out", help="output path stem (or .csv path)")
    p.add_argument("--format", choices=["csv", "json", "both"], default="both")
    p.add_argument("--plot", action="store_true", help="render a PNG next to the CSV")


def _build_parser() -> _Parser:
    parser = _Parser(prog="playout",
                     description="Playout-buffer starvation analytics and simulation")
    parser.add_argument("--version", action="version", version=f"playout {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("exact", help="lattice-path pmf for Poisson arrivals")
    _add_common(p)
    p.add_argument("--mode", choices=["exact", "gaussian"], default=None)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("recursive", help="state-recursion pmf (Poisson or ON/OFF arrivals)")
    _add_common(p)
    p.add_argument("--alpha", type=float, help="ON->OFF rate [1/s] (with --beta)")
    p.add_argument("--beta", type=float, help="OFF->ON rate [1/s] (with --alpha)")
    p.set_defaults(func=cmd_recursive)

    p = sub.add_parser("takacs", help="slotted-playback pmf (one departure per slot)")
    _add_common(p)
    p.add_argument("--slot-d", type=float, help="slot duration [s]")
    p.set_defaults(func=cmd_takacs)

    p = sub.add_parser("fluid", help="fluid-limit starvation probability over file sizes")
    _add_common(p, scenario_axes=False)
    p.add_argument("--x1", type=int, help="start-up threshold [packets]")
    p.add_argument("--x1-sweep", help="threshold sweep start:end:step")
    p.add_argument("--dist", choices=["exp", "pareto", "lognormal"])
    p.add_argument("--theta", type=float, help="exponential rate (1/mean size)")
    p.add_argument("--nm", type=float, help="minimum size for pareto [packets]")
    p.add_argument("--upsilon", type=float, help="pareto exponent")
    p.add_argument("--varrho", type=float, help="lognormal log-scale mean")
    p.add_argument("--sigma", type=float, help="lognormal log-scale stddev")
    p.add_argument("--sizes-csv", help="observed sizes, one positive integer per line")
    p.set_defaults(func=cmd_fluid)

    p = sub.add_parser("qoe", help="optimal start-up thresholds for the QoE cost")
    _add_common(p, scenario_axes=False)
    p.add_argument("--scenario", required=True,
                   choices=["finite", "infinite-super", "infinite-sub", "file-level"])
    p.add_argument("--n", type=int, help="file size for the finite scenario [packets]")
    p.add_argument("--gamma", type=float, help="delay weight")
    p.add_argument("--gamma-sweep", help="delay-weight sweep start:end:step")
    p.add_argument("--lambda-sweep", dest="lambda_sweep", help="arrival-rate sweep start:end:step")
    p.add_argument("--delta", type=float, default=1.0, help="playback-run weight, default 1")
    p.add_argument("--theta", type=float, help="exponential size rate for file-level")
    p.add_argument("--mode", choices=["exact", "gaussian"], default=None,
                   help="pmf mode for the finite scan")
    p.set_defaults(func=cmd_qoe)

    p = sub.add_parser("simulate", help="Monte Carlo starvation histogram")
    _add_common(p, jmax_default=2)
    p.add_argument("--alpha", type=float, help="ON->OFF rate [1/s] (with --beta)")
    p.add_argument("--beta", type=float, help="OFF->ON rate [1/s] (with --alpha)")
    p.add_argument("--slot-d", type=float, help="slot duration [s] for slotted playback")
    p.add_argument("--replications", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--parallel", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="analytic vs recursive vs Monte Carlo on one scenario")
    _add_common(p)
    p.add_argument("--mode", choices=["exact", "gaussian"], default=None)
    p.add_argument("--replications", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--parallel", action="store_true")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
