"""Command-line front end; a thin client over the service layer.

All subcommands build the same request documents the HTTP service
accepts. By default handlers run in-process (no server needed, fully
offline); pass --server to send the request to a running instance
instead. Exit codes: 2 for usage errors, 3 for infeasible or impossible
requests (placement failure, uncoverable structure, no feasible
iteration), 1 for internal errors.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import httpx

from . import storage
from .coverage import CoverageError
from .scenario import PlacementError
from .service import (CoverageRequest, CoverageResponse,
                      GenerateScenarioRequest, PlanRequest, PlanResponse,
                      compute_coverage, compute_plan, generate_scenario)
from .storage import SchemaError

EXIT_INFEASIBLE = 3


def _fail(message: str, code: int = EXIT_INFEASIBLE) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _post(server: str, route: str, request, response_model):
    url = server.rstrip("/") + route
    response = httpx.post(url, json=request.model_dump(mode="json"), timeout=3600.0)
    if response.status_code == 409:
        _fail(response.json().get("detail", response.text))
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise click.UsageError(f"{url} -> {response.status_code}: {detail}")
    return response_model.model_validate(response.json())


@click.group()
@click.version_option()
def main() -> None:
    """Plan time-budgeted inspection routes over distributed structures."""


@main.command()
@click.option("--count", type=int, required=True, help="Number of structures.")
@click.option("--bounds", nargs=3, type=float, default=(200.0, 200.0, 50.0),
              show_default=True, metavar="DX DY DZ", help="Area bounds in meters.")
@click.option("--margin", type=float, default=5.0, show_default=True,
              help="Minimum horizontal gap between structures.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--archetypes", type=str, default=None,
              help="Comma-separated archetype names (default: all built-ins).")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path),
              default=Path("scenario.json"), show_default=True)
@click.option("--server", type=str, default=None,
              help="Base URL of a running service; default runs in-process.")
def gen(count: int, bounds, margin: float, seed: int, archetypes: str | None,
        out: Path, server: str | None) -> None:
    """Generate a random scenario and write it to a file."""
    if count < 1:
        raise click.UsageError("--count must be >= 1")
    names = [n.strip() for n in archetypes.split(",")] if archetypes else None
    request = GenerateScenarioRequest(count=count, bounds=tuple(bounds),
                                      margin=margin, seed=seed,
                                      archetype_names=names)
    try:
        if server:
            from .schemas import ScenarioDocument
            doc = _post(server, "/scenario/generate", request, ScenarioDocument)
        else:
            doc = generate_scenario(request)
    except PlacementError as err:
        _fail(str(err))
    except ValueError as err:
        raise click.UsageError(str(err))
    storage.write_scenario(doc, out)
    click.echo(f"wrote {out} ({count} structures, seed {seed})")


@main.command()
@click.option("--scenario", "scenario_path", required=True,
              type=click.Path(exists=False, dir_okay=False, path_type=Path))
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path),
              default=Path("."), show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--server", type=str, default=None)
def cover(scenario_path: Path, out_dir: Path, seed: int,
          server: str | None) -> None:
    """Compute a full-coverage path file for every structure."""
    try:
        scenario_doc = storage.read_scenario(scenario_path)
    except SchemaError as err:
        raise click.UsageError(str(err))
    request = CoverageRequest(scenario=scenario_doc, seed=seed)
    try:
        if server:
            response = _post(server, "/coverage/plan", request, CoverageResponse)
        else:
            response = compute_coverage(request)
    except CoverageError as err:
        _fail(str(err))
    for doc in response.paths:
        path = out_dir / f"{doc.structure_id}.coverage.json"
        storage.write_coverage_path(doc, path)
    click.echo(f"wrote {len(response.paths)} coverage paths to {out_dir}")


@main.command()
@click.option("--scenario", "scenario_path", required=True,
              type=click.Path(dir_okay=False, path_type=Path))
@click.option("--coverage-dir", type=click.Path(file_okay=False, path_type=Path),
              default=Path("."), show_default=True,
              help="Directory holding <structure_id>.coverage.json files.")
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path),
              default=Path("."), show_default=True)
@click.option("--t-max", type=float, default=None, help="Budget override [s].")
@click.option("--iterations", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--closed-route/--open-route", "closed_route", default=None)
@click.option("--include-prob", type=float, default=None,
              help="Per-structure subset inclusion probability override.")
@click.option("--server", type=str, default=None)
def plan(scenario_path: Path, coverage_dir: Path, out_dir: Path,
         t_max: float | None, iterations: int | None, seed: int | None,
         closed_route: bool | None, include_prob: float | None,
         server: str | None) -> None:
    """Run the planner and write plan, report and plot data."""
    try:
        scenario_doc = storage.read_scenario(scenario_path)
        coverage_docs = [
            storage.read_coverage_path(coverage_dir / f"{s.id}.coverage.json")
            for s in scenario_doc.structures
        ]
    except SchemaError as err:
        raise click.UsageError(str(err))
    request = PlanRequest(scenario=scenario_doc, coverage_paths=coverage_docs,
                          t_max=t_max, iterations=iterations, seed=seed,
                          closed_route=closed_route,
                          include_probability=include_prob)
    try:
        if server:
            response = _post(server, "/plan/compute", request, PlanResponse)
        else:
            response = compute_plan(request)
    except ValueError as err:
        raise click.UsageError(str(err))

    storage.write_report(response.report, out_dir / "report.json")
    storage.emit_plot_data(response.report,
                           [row.model_dump() for row in response.timings],
                           out_dir)
    if not response.feasible:
        _fail(f"no feasible iteration within t_max="
              f"{response.report.t_max}s (report written to {out_dir})")
    assert response.plan is not None
    storage.write_plan(response.plan, out_dir / "plan.json")
    click.echo(
        f"plan: reward {response.plan.r_total:.2f}, "
        f"duration {response.plan.t_total:.1f}s of {response.plan.t_max:.0f}s, "
        f"{len(response.plan.structures)} structures "
        f"(best iteration {response.plan.best_iteration})")


@main.command()
@click.option("--protocol", "protocol_path", required=True,
              type=click.Path(dir_okay=False, path_type=Path))
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path),
              default=Path("batch-out"), show_default=True)
def batch(protocol_path: Path, out_dir: Path) -> None:
    """Run gen+cover+plan for every protocol case and aggregate statistics."""
    try:
        protocol = storage.read_protocol(protocol_path)
    except SchemaError as err:
        raise click.UsageError(str(err))

    per_count: dict[int, list] = {}
    timing_aggregate: list[dict] = []
    for case in protocol.cases:
        reports = per_count.setdefault(case.count, [])
        iter_seconds: list[float] = []
        tsp_fractions: list[float] = []
        for case_seed in case.seeds:
            run_dir = out_dir / f"n{case.count:03d}-seed{case_seed}"
            scenario_doc = generate_scenario(GenerateScenarioRequest(
                count=case.count, bounds=protocol.bounds,
                margin=protocol.margin, seed=case_seed))
            storage.write_scenario(scenario_doc, run_dir / "scenario.json")
            coverage = compute_coverage(CoverageRequest(
                scenario=scenario_doc, seed=case_seed))
            response = compute_plan(PlanRequest(
                scenario=scenario_doc, coverage_paths=coverage.paths,
                t_max=protocol.t_max, iterations=protocol.iterations,
                seed=case_seed, closed_route=protocol.closed_route,
                include_probability=protocol.include_probability))
            storage.write_report(response.report, run_dir / "report.json")
            storage.write_timings_csv(
                [row.model_dump() for row in response.timings],
                run_dir / "timings.csv")
            if response.plan is not None:
                storage.write_plan(response.plan, run_dir / "plan.json")
            reports.append(response.report)
            total = sum(row.total_s for row in response.timings)
            iter_seconds.append(total / max(len(response.timings), 1))
            tsp_total = sum(row.tsp_s for row in response.timings)
            tsp_fractions.append(tsp_total / total if total > 0 else 0.0)
            click.echo(f"done n={case.count} seed={case_seed}: "
                       f"coverage {response.report.coverage_percent:.1f}%")
        timing_aggregate.append({
            "structure_count": case.count,
            "runs": len(case.seeds),
            "mean_iteration_seconds": sum(iter_seconds) / len(iter_seconds),
            "mean_tsp_fraction": sum(tsp_fractions) / len(tsp_fractions),
        })

    summary_rows = storage.aggregate_coverage_rows(per_count)
    storage.write_csv(summary_rows, out_dir / "batch_summary.csv")
    storage.write_csv(timing_aggregate, out_dir / "batch_timings.csv")
    click.echo(f"aggregated {sum(r['runs'] for r in summary_rows)} runs "
               f"into {out_dir / 'batch_summary.csv'}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
