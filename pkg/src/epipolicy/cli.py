"""Command-line entry points (thin wrappers over the same core the service uses).

Exit codes: 0 success, 1 input/validation error, 2 inference did not converge.
"""
from __future__ import annotations

import argparse
import datetime as dt
import json
import sys
from pathlib import Path

from .changepoint import default_cfg, draws_csv, fit_changepoint, fit_report, plot_data_csv
from .data_io import Field, parse_case_csv, sample_data_path, select_series, to_log_cumulative
from .errors import EpipolicyError, InvalidSchedule, NotConverged
from .mcmc import McmcConfig
from .runner import (
    loss_csv,
    scenario_from_dict,
    search_results_csv,
    summary_dict,
    trajectory_csv,
)
from .scenario import SearchSpace, preset_schedules, run_scenario, search_policies
from .seird_inference import average_reports, fit_seird
from .seird_inference import fit_report as seird_fit_report
from .service import AppConfig, create_app


def _date(text: str) -> dt.date:
    return dt.date.fromisoformat(text)


def _load_table(path: str):
    source = sample_data_path() if path == "sample" else Path(path)
    return parse_case_csv(source.read_bytes())


def _add_window_args(p: argparse.ArgumentParser):
    p.add_argument("--csv", required=True,
                   help="case CSV path, or 'sample' for the bundled extract")
    p.add_argument("--country", required=True)
    p.add_argument("--from", dest="date_from", type=_date, required=True)
    p.add_argument("--to", dest="date_to", type=_date, required=True)


def _add_mcmc_args(p: argparse.ArgumentParser, warmup=1000, samples=1000):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--warmup", type=int, default=warmup)
    p.add_argument("--samples", type=int, default=samples)
    p.add_argument("--chains", type=int, default=4)


def cmd_fit_changepoint(args) -> int:
    table = _load_table(args.csv)
    series = select_series(table, args.country, (args.date_from, args.date_to),
                           Field(args.field))
    reg = to_log_cumulative(series)
    cfg = default_cfg(seed=args.seed, num_warmup=args.warmup,
                      num_samples=args.samples, num_chains=args.chains)
    try:
        posterior = fit_changepoint(reg, cfg)
    except NotConverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        for name, value in sorted(exc.rhat.items()):
            print(f"  rhat[{name}] = {value:.4f}", file=sys.stderr)
        return 2
    report = fit_report(posterior, args.country, args.policy_start)
    Path(args.out).write_text(json.dumps(report, indent=2) + "\n")
    if args.draws_csv:
        Path(args.draws_csv).write_text(draws_csv(posterior))
    if args.plot_csv:
        Path(args.plot_csv).write_text(plot_data_csv(posterior))
    print(f"wrote {args.out}: change_date={report['change_date']} "
          f"efficiency={report['efficiency']:.4f}")
    return 0


def cmd_fit_virus(args) -> int:
    table = _load_table(args.csv)
    window = (args.date_from, args.date_to)
    confirmed = select_series(table, args.country, window, Field.CONFIRMED)
    deaths = (select_series(table, args.country, window, Field.DEATHS)
              if not args.no_deaths else None)
    reports = []
    for run in range(args.runs):
        cfg = McmcConfig(num_warmup=args.warmup, num_samples=args.samples,
                         num_chains=args.chains, seed=args.seed + run,
                         leapfrog_steps=10, init_step_size=0.05)
        try:
            posterior = fit_seird(confirmed, deaths, n=args.population, cfg=cfg,
                                  dispersion=args.dispersion)
        except NotConverged as exc:
            print(f"error (run {run}): {exc}", file=sys.stderr)
            return 2
        reports.append(seird_fit_report(posterior))
    report = reports[0] if args.runs == 1 else average_reports(reports)
    Path(args.out).write_text(json.dumps(report, indent=2) + "\n")
    print(f"wrote {args.out}")
    return 0


def _scenario_from_args(args) -> dict:
    if args.scenario:
        data = json.loads(Path(args.scenario).read_text())
    else:
        data = {}
    for key, attr in (("population", "population"),
                      ("gdp_per_capita", "gdp"),
                      ("horizon", "horizon"),
                      ("seed_infected", "seed_infected"),
                      ("substeps", "substeps")):
        value = getattr(args, attr, None)
        if value is not None:
            data[key] = value
    if getattr(args, "preset", None):
        presets = preset_schedules(int(data.get("horizon", 90)))
        data["schedule"] = presets[args.preset].to_json_dict()
        data.setdefault("label", args.preset)
    elif getattr(args, "schedule", None):
        data["schedule"] = json.loads(Path(args.schedule).read_text())
    return data


def cmd_simulate(args) -> int:
    scenario = scenario_from_dict(_scenario_from_args(args))
    result = run_scenario(scenario)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "trajectory.csv").write_text(trajectory_csv(result))
    (out / "loss.csv").write_text(loss_csv(result))
    (out / "summary.json").write_text(
        json.dumps(summary_dict(result), indent=2) + "\n")
    print(f"wrote {out}/: cases={result.total_cases:.0f} "
          f"deaths={result.total_deaths:.0f} loss=${result.total_loss:,.0f}")
    return 0


def cmd_search(args) -> int:
    base = scenario_from_dict(_scenario_from_args(args))
    space = SearchSpace(block_length=args.block_length)
    results = search_policies(space, base, cap=args.cap, workers=args.workers,
                              top_k=args.top_k)
    Path(args.out).write_text(search_results_csv(results))
    best = results[0]
    print(f"wrote {args.out}: best={best.encoding} "
          f"loss=${best.total_loss:,.0f}")
    return 0


def cmd_serve(args) -> int:
    import dataclasses

    import uvicorn

    config = AppConfig.from_env()
    overrides = {}
    if args.port is not None:
        overrides["port"] = args.port
    if args.host is not None:
        overrides["host"] = args.host
    if overrides:
        config = dataclasses.replace(config, **overrides)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epipolicy",
        description="Epidemic transmission inference and policy simulation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit-changepoint",
                       help="fit the change-point model to a country window")
    _add_window_args(p)
    p.add_argument("--field", default="confirmed",
                   choices=[f.value for f in Field])
    p.add_argument("--policy-start", type=_date, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--draws-csv", default=None)
    p.add_argument("--plot-csv", default=None)
    _add_mcmc_args(p)
    p.set_defaults(func=cmd_fit_changepoint)

    p = sub.add_parser("fit-virus",
                       help="infer virus parameters from an early window")
    _add_window_args(p)
    p.add_argument("--population", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--runs", type=int, default=1,
                   help="average the report over this many seeds")
    p.add_argument("--dispersion", type=float, default=40.0)
    p.add_argument("--no-deaths", action="store_true")
    _add_mcmc_args(p, warmup=500, samples=500)
    p.set_defaults(func=cmd_fit_virus)

    p = sub.add_parser("simulate", help="run one policy scenario")
    p.add_argument("--scenario", default=None, help="scenario JSON path")
    p.add_argument("--schedule", default=None, help="schedule JSON path")
    p.add_argument("--preset", default=None,
                   choices=sorted(preset_schedules().keys()))
    p.add_argument("--population", type=float, default=None)
    p.add_argument("--gdp", type=float, default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--seed-infected", type=float, default=None)
    p.add_argument("--substeps", type=int, default=None)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("search", help="exhaustively rank policy schedules")
    p.add_argument("--scenario", default=None)
    p.add_argument("--population", type=float, default=None)
    p.add_argument("--gdp", type=float, default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--seed-infected", type=float, default=None)
    p.add_argument("--substeps", type=int, default=None)
    p.add_argument("--block-length", type=int, default=30)
    p.add_argument("--top-k", type=int, default=None)
    p.add_argument("--cap", type=int, default=2_000_000)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=None,
                   help="overrides PPL_PORT (default 8080)")
    p.add_argument("--host", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidSchedule as exc:
        print("error: schedule validation failed", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return 1
    except (EpipolicyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
