"""Command-line front end.

Subcommands
-----------
* ``thresholds``: derive the modcod table and write it as CSV.
* ``region --snr1 --snr2``: rate region of one receiver pair.
* ``sweep --min --max --step``: hierarchical/classical throughput-ratio grid.
* ``beam --snr-max --delta``: six-receiver beam, all grouping strategies.
* ``plan --scenario <file>``: full plan for a scenario's receiver set.

Every flag is also a scenario-file field; flags win.  The output directory
can be overridden with the ``HMPLAN_OUT_DIR`` environment variable.  Report
commands write CSV files and render matching figures next to them (disable
with ``--no-plots``).
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

import numpy as np

from . import plots
from .allocation import classical_plan, evaluate_groupings, pair_equal_rate
from .capacity import IntegrationSpec
from .errors import PlannerError
from .rate_region import achievable_points, equal_rate_point, upper_hull
from .scenario import Scenario, beam_receivers, load_scenario, override
from .thresholds import (
    ModCodTable,
    build_modcod_table,
    read_modcod_csv,
    read_reference_csv,
    reconstruct_references,
    shipped_references,
    write_reference_csv,
    PUBLISHED_THRESHOLDS_DB,
)

OUT_DIR_ENV = "HMPLAN_OUT_DIR"


def resolve_table(scenario: Scenario, table_csv: Path | None) -> ModCodTable:
    """Load a prebuilt table or derive one from reference operating points."""
    if table_csv is not None:
        return read_modcod_csv(table_csv)
    if scenario.reference_csv is not None:
        references = read_reference_csv(scenario.reference_csv)
    else:
        references = shipped_references()
    return build_modcod_table(
        scenario.alphas, references, scenario.pilot_offset_db, scenario.integration
    )


def _fmt(x: float) -> str:
    return repr(float(x))


def run_region(snr1_db: float, snr2_db: float, table: ModCodTable, out_dir: Path, plot: bool) -> dict:
    """Region points, hull, and both equal-rate crosses for one receiver pair."""
    lo, hi = sorted((snr1_db, snr2_db))
    points = achievable_points(lo, hi, table)
    region = upper_hull(points)
    hier = equal_rate_point(region)
    classical_region = upper_hull([p for p in points if p.kind == "classical"] or points)
    classical = equal_rate_point(classical_region)

    out_dir.mkdir(parents=True, exist_ok=True)
    region.write_csv(out_dir / "region_points.csv")
    with open(out_dir / "region_summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["quantity", "value", "detail"])
        writer.writerow(["snr_lo_db", _fmt(lo), ""])
        writer.writerow(["snr_hi_db", _fmt(hi), ""])
        writer.writerow(["classical_equal_rate", _fmt(classical.rate), ""])
        writer.writerow(["hierarchical_equal_rate", _fmt(hier.rate), ""])
        for vertex, weight in hier.mix:
            writer.writerow(["mix", _fmt(weight), vertex.provenance()])
    if plot:
        plots.plot_region(region, classical.rate, hier.rate, out_dir / "region.png")
    return {
        "classical_rate": classical.rate,
        "hierarchical_rate": hier.rate,
        "mix": hier.mix,
        "region": region,
    }


def sweep_ratio_matrix(
    min_db: float, max_db: float, step_db: float, table: ModCodTable
) -> tuple[np.ndarray, np.ndarray]:
    """Grid of R_hm / R_ts over all SNR pairs; undecodable cells are NaN.

    The matrix is exactly symmetric: each unordered pair is evaluated once.
    """
    if step_db <= 0:
        raise PlannerError("sweep step must be positive")
    n = int(round((max_db - min_db) / step_db)) + 1
    if n < 1:
        raise PlannerError("empty sweep grid")
    grid = min_db + step_db * np.arange(n)
    ratio = np.full((n, n), np.nan)
    for i in range(n):
        for j in range(i, n):
            ts = pair_equal_rate(grid[i], grid[j], table, hierarchical=False)
            if ts.degenerate or ts.rate <= 0.0:
                continue
            hm = pair_equal_rate(grid[i], grid[j], table, hierarchical=True)
            ratio[i, j] = ratio[j, i] = hm.rate / ts.rate
    return grid, ratio


def run_sweep(
    min_db: float, max_db: float, step_db: float, table: ModCodTable, out_dir: Path, plot: bool
) -> tuple[np.ndarray, np.ndarray]:
    grid, ratio = sweep_ratio_matrix(min_db, max_db, step_db, table)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "sweep_ratio.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["snr1_db\\snr2_db"] + [_fmt(v) for v in grid])
        for i, row in enumerate(ratio):
            writer.writerow([_fmt(grid[i])] + [("nan" if np.isnan(v) else _fmt(v)) for v in row])
    if plot:
        plots.plot_sweep(grid, ratio, out_dir / "sweep.png")
    return grid, ratio


def run_beam_comparison(
    snr_max_db: float, delta_db: float, table: ModCodTable, out_dir: Path | None, plot: bool
) -> dict:
    """Classical throughput plus every grouping strategy's throughput and gain."""
    receivers = beam_receivers(snr_max_db, delta_db)
    baseline = classical_plan(receivers, table)
    ranked = evaluate_groupings(receivers, table)
    rows = []
    for index, (grouping, plan) in enumerate(ranked):
        gain = (plan.common_rate - baseline.common_rate) / baseline.common_rate
        rows.append(
            {
                "strategy": chr(ord("A") + index),
                "pairs": grouping.describe(),
                "common_rate": plan.common_rate,
                "gain_percent": 100.0 * gain,
                "plan": plan,
            }
        )
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "beam_comparison.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["strategy", "pairs", "common_rate", "gain_percent", "gain_percent_rounded"])
            writer.writerow(["classical", "", _fmt(baseline.common_rate), _fmt(0.0), "0"])
            for row in rows:
                writer.writerow(
                    [
                        row["strategy"],
                        row["pairs"],
                        _fmt(row["common_rate"]),
                        _fmt(row["gain_percent"]),
                        str(int(round(row["gain_percent"]))),
                    ]
                )
        if plot:
            plots.plot_beam(rows, baseline.common_rate, out_dir / "beam.png")
    return {"classical": baseline, "strategies": rows}


def write_plan_csv(plan, baseline, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "plan_schedule.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["receivers", "modcods", "alpha", "stream_rates", "time_fraction"])
        for entry in plan.schedule:
            writer.writerow(
                [
                    "+".join(entry.receiver_ids),
                    " + ".join(mc.label() for mc in entry.modcods),
                    "" if entry.alpha() is None else repr(entry.alpha()),
                    " ".join(_fmt(r) for r in entry.stream_rates()),
                    _fmt(entry.time_fraction),
                ]
            )
    gain = (plan.common_rate - baseline.common_rate) / baseline.common_rate
    with open(out_dir / "plan_summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["quantity", "value"])
        writer.writerow(["common_rate", _fmt(plan.common_rate)])
        writer.writerow(["classical_rate", _fmt(baseline.common_rate)])
        writer.writerow(["gain_percent", _fmt(100.0 * gain)])
        writer.writerow(["grouping", plan.grouping.describe() if plan.grouping else ""])


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hmplan",
        description="Broadcast schedule planning with time sharing and hierarchical modulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--scenario", type=Path, help="scenario JSON file")
        p.add_argument("--out", type=Path, help="output directory (overrides scenario and env)")
        p.add_argument("--references", type=Path, help="reference operating-point CSV")
        p.add_argument("--table", type=Path, help="prebuilt modcod table CSV (skips derivation)")
        p.add_argument("--alphas", type=float, nargs="+", help="constellation ratios to include")
        p.add_argument("--pilot-offset-db", type=float, help="dB offset added to every threshold")
        p.add_argument("--gh-nodes", type=int, help="Gauss-Hermite nodes per axis")
        p.add_argument("--no-plots", action="store_true", help="skip figure rendering")

    p = sub.add_parser("thresholds", help="derive and export the modcod table")
    add_common(p)
    p.add_argument("--emit-references", action="store_true",
                   help="also reconstruct references from the published grid and export them")

    p = sub.add_parser("region", help="rate region for one receiver pair")
    add_common(p)
    p.add_argument("--snr1", type=float, help="receiver 1 SNR in dB")
    p.add_argument("--snr2", type=float, help="receiver 2 SNR in dB")

    p = sub.add_parser("sweep", help="throughput-ratio grid over SNR pairs")
    add_common(p)
    p.add_argument("--min", dest="snr_min", type=float, help="grid start in dB")
    p.add_argument("--max", dest="snr_max", type=float, help="grid end in dB")
    p.add_argument("--step", type=float, help="grid step in dB")

    p = sub.add_parser("beam", help="six-receiver beam comparison")
    add_common(p)
    p.add_argument("--snr-max", type=float, help="SNR at the beam center in dB")
    p.add_argument("--delta", type=float, help="attenuation step in dB")

    p = sub.add_parser("plan", help="equal-rate plan for a scenario")
    add_common(p)
    return parser


def _scenario_from_args(args: argparse.Namespace) -> Scenario:
    scenario = load_scenario(args.scenario) if args.scenario else Scenario()
    integration = scenario.integration
    if args.gh_nodes is not None:
        integration = IntegrationSpec(
            method=integration.method,
            nodes_per_axis=args.gh_nodes,
            sample_count=integration.sample_count,
            rng_seed=integration.rng_seed,
        )
    out_dir = args.out or (Path(os.environ[OUT_DIR_ENV]) if os.environ.get(OUT_DIR_ENV) else None)
    scenario = override(
        scenario,
        alphas=tuple(args.alphas) if args.alphas else None,
        reference_csv=args.references,
        pilot_offset_db=args.pilot_offset_db,
        integration=integration,
        output_dir=out_dir,
    )
    if args.no_plots:
        scenario = override(scenario, plots=False)
    return scenario


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        scenario = _scenario_from_args(args)
        out_dir = scenario.output_dir
        if args.command == "thresholds":
            out_dir.mkdir(parents=True, exist_ok=True)
            if args.emit_references:
                references, anomalies = reconstruct_references(
                    PUBLISHED_THRESHOLDS_DB, scenario.integration
                )
                write_reference_csv(out_dir / "reference_qpsk.csv", references)
                with open(out_dir / "reference_anomalies.csv", "w", newline="") as fh:
                    writer = csv.writer(fh)
                    writer.writerow(["coding_rate", "alpha", "stream", "published_db", "implied_db"])
                    for a in anomalies:
                        writer.writerow(
                            [str(a.coding_rate), repr(a.alpha), a.stream.value,
                             _fmt(a.published_db), _fmt(a.implied_db)]
                        )
            table = resolve_table(scenario, args.table)
            table.write_csv(out_dir / "modcod_table.csv")
            print(f"wrote {out_dir / 'modcod_table.csv'} ({len(table.entries)} entries)")
        elif args.command == "region":
            snr1, snr2 = _require_region_params(args, scenario)
            table = resolve_table(scenario, args.table)
            summary = run_region(snr1, snr2, table, out_dir, scenario.plots)
            print(
                f"classical equal rate {summary['classical_rate']:.4f}, "
                f"hierarchical {summary['hierarchical_rate']:.4f} bit/symbol -> {out_dir}"
            )
        elif args.command == "sweep":
            lo, hi, step = _require_sweep_params(args, scenario)
            table = resolve_table(scenario, args.table)
            run_sweep(lo, hi, step, table, out_dir, scenario.plots)
            print(f"wrote {out_dir / 'sweep_ratio.csv'}")
        elif args.command == "beam":
            if args.snr_max is not None and args.delta is not None:
                beam = (args.snr_max, args.delta)
            elif scenario.beam is not None:
                beam = scenario.beam
            else:
                raise PlannerError("beam needs --snr-max/--delta or a scenario beam block")
            table = resolve_table(scenario, args.table)
            result = run_beam_comparison(beam[0], beam[1], table, out_dir, scenario.plots)
            best = result["strategies"][0]
            print(
                f"classical {result['classical'].common_rate:.4f}, best strategy "
                f"{best['strategy']} ({best['pairs']}) gain {best['gain_percent']:.1f}%"
            )
        elif args.command == "plan":
            receivers = scenario.channel_receivers()
            table = resolve_table(scenario, args.table)
            baseline = classical_plan(receivers, table)
            _grouping, plan = evaluate_groupings(receivers, table)[0]
            write_plan_csv(plan, baseline, out_dir)
            if scenario.plots:
                plots.plot_plan(plan, out_dir / "plan.png")
            gain = 100.0 * (plan.common_rate - baseline.common_rate) / baseline.common_rate
            print(
                f"common rate {plan.common_rate:.4f} bit/symbol "
                f"(classical {baseline.common_rate:.4f}, gain {gain:.1f}%) -> {out_dir}"
            )
    except PlannerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def _require_region_params(args, scenario: Scenario) -> tuple[float, float]:
    if args.snr1 is not None and args.snr2 is not None:
        return args.snr1, args.snr2
    if scenario.region is not None:
        return scenario.region
    raise PlannerError("region needs --snr1/--snr2 or a scenario region block")


def _require_sweep_params(args, scenario: Scenario) -> tuple[float, float, float]:
    if args.snr_min is not None and args.snr_max is not None and args.step is not None:
        return args.snr_min, args.snr_max, args.step
    if scenario.sweep is not None:
        return scenario.sweep
    raise PlannerError("sweep needs --min/--max/--step or a scenario sweep block")


if __name__ == "__main__":
    sys.exit(main())
