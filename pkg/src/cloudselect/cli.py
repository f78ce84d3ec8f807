"""Operator command line: validation, quoting, recommendation, Pareto
exploration, workload estimation, history inspection, and serving.

Exit codes: 0 on success, 1 on a domain error (validation failure,
inconsistent judgments, bad inputs), 2 on a usage error.
"""

from __future__ import annotations

import csv
import functools
import sys
from pathlib import Path

import click

from .catalog import load_catalog_file, parse_catalog_document, validate_catalog
from .config import EngineConfig, load_config
from .cost import UsageVector
from .errors import CloudSelectError
from .estimate import (
    BatchWorkload,
    TrafficWorkload,
    estimate_batch_runtime,
    estimate_monthly_traffic,
    required_parallelism,
)
from .ga import GAParams, PenaltyConfig
from .history import HistoryStore
from .matching import RequirementSpec
from .mcdm import PairwiseMatrix
from .recommend import hybrid_recommend, pareto_search, rank_by_cost
from .service.app import _parse_criteria, _parse_pairwise


def domain_errors(fn):
    """Translate engine errors into exit code 1 with a message on stderr."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CloudSelectError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def engine_options(fn):
    fn = click.option("--catalog", "catalog_path", type=click.Path(exists=True),
                      default=None, help="Catalog document (JSON).")(fn)
    fn = click.option("--config", "config_path", type=click.Path(exists=True),
                      default=None, help="Engine configuration file.")(fn)
    return fn


def usage_options(fn):
    options = [
        click.option("--storage", type=float, default=None, help="Storage usage in GB."),
        click.option("--duration", type=int, default=31, show_default=True,
                     help="Usage duration in days (max 31)."),
        click.option("--upload", type=float, default=None, help="Data upload in GB."),
        click.option("--download", type=float, default=None, help="Data download in GB."),
        click.option("--vms", type=int, default=1, show_default=True, help="VM count."),
        click.option("--vm-hours", type=float, default=24.0, show_default=True,
                     help="VM hours per day."),
        click.option("--currency", default="USD", show_default=True),
        click.option("--continent", "continents", multiple=True,
                     help="Restrict to continent(s); repeatable."),
        click.option("--min-cores", type=int, default=1, show_default=True),
        click.option("--min-memory", type=float, default=0.0, show_default=True),
        click.option("--os-family", default=None),
        click.option("--vague-storage", type=click.Choice(["small", "medium", "large"]),
                     default=None),
        click.option("--vague-compute", type=click.Choice(["small", "medium", "large"]),
                     default=None),
        click.option("--vague-traffic", type=click.Choice(["small", "medium", "large"]),
                     default=None),
        click.option("--criteria", default=None,
                     help="Comma separated, e.g. total_cost,memory:max."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _load_engine(config_path, catalog_path):
    config = load_config(config_path)
    path = catalog_path or config.catalog_path
    return config, load_catalog_file(path)


def _build_spec(storage, duration, upload, download, vms, vm_hours, currency,
                continents, min_cores, min_memory, os_family,
                vague_storage, vague_compute, vague_traffic, criteria) -> RequirementSpec:
    vague_levels = {}
    if vague_storage:
        vague_levels["storage"] = vague_storage
    if vague_compute:
        vague_levels["compute"] = vague_compute
    if vague_traffic:
        vague_levels["traffic"] = vague_traffic
    return RequirementSpec(
        usage=UsageVector(
            storage=storage,
            duration_days=duration,
            data_upload=upload if upload is not None else 0.0,
            data_download=download,
            vm_count=vms,
            vm_hours_per_day=vm_hours,
        ),
        continents=frozenset(continents),
        os_family=os_family,
        min_cores=min_cores,
        min_memory=min_memory,
        vague_levels=vague_levels,
        currency=currency,
        criteria=_parse_criteria(criteria),
    )


def _bundle_label(bundle) -> str:
    return "/".join(bundle.key)


def _breakdown_row(rec) -> str:
    b = rec.breakdown
    return (
        f"{b.compute:>12.2f} {b.storage:>12.2f} {b.transfer_in:>12.2f} "
        f"{b.transfer_out:>12.2f} {b.promotion_adjustment:>12.2f} {b.total:>12.2f}"
    )


@click.group()
def main():
    """Decision support for bundling cloud infrastructure services."""


@main.command()
@engine_options
@domain_errors
def validate(config_path, catalog_path):
    """Check a catalog document against every invariant."""
    config = load_config(config_path)
    path = catalog_path or config.catalog_path
    catalog = parse_catalog_document(Path(path).read_text(encoding="utf-8"))
    violations = validate_catalog(catalog)
    if violations:
        for violation in violations:
            click.echo(str(violation))
        sys.exit(1)
    click.echo(
        f"catalog OK: {len(catalog.providers)} providers, {len(catalog.regions)} regions, "
        f"{len(catalog.compute_offers) + len(catalog.storage_offers) + len(catalog.transfer_offers)} offers"
    )


@main.command()
@engine_options
@usage_options
@click.option("--limit", type=int, default=None, help="Show only the best N bundles.")
@domain_errors
def quote(config_path, catalog_path, limit, **usage_kwargs):
    """Cost breakdown table for every compatible bundle, cheapest first."""
    config, snapshot = _load_engine(config_path, catalog_path)
    spec = _build_spec(**usage_kwargs)
    ranked = rank_by_cost(snapshot, spec, policy=config.compatibility_policy,
                          vague_mapping=config.vague_mapping, limit=limit)
    currency = spec.currency
    click.echo(
        f"{'bundle':<42} {'compute':>12} {'storage':>12} {'in':>12} "
        f"{'out':>12} {'promo':>12} {'total':>12}  {currency}"
    )
    for rec in ranked:
        click.echo(f"{_bundle_label(rec.bundle):<42} {_breakdown_row(rec)}  {currency}")
    if not ranked:
        click.echo("no compatible bundles")


@main.command()
@engine_options
@usage_options
@click.option("--pairwise", default=None,
              help="Criterion comparison matrix, rows ';'-separated: '1,3;1/3,1'.")
@click.option("--seed", type=int, default=None, help="Search seed override.")
@click.option("--top", "limit", type=int, default=10, show_default=True)
@domain_errors
def recommend(config_path, catalog_path, pairwise, seed, limit, **usage_kwargs):
    """Ranked bundles by weighted criteria (pairwise judgments, stated once)."""
    config, snapshot = _load_engine(config_path, catalog_path)
    spec = _build_spec(**usage_kwargs)
    criteria = spec.criteria
    n = len(criteria) if criteria else 1
    matrix = _parse_pairwise(pairwise) or PairwiseMatrix.from_rows(
        [[1.0] * n for _ in range(n)]
    )
    params = config.ga if seed is None else GAParams(
        population_size=config.ga.population_size,
        generations=config.ga.generations,
        crossover_rate=config.ga.crossover_rate,
        mutation_rate=config.ga.mutation_rate,
        tournament_size=config.ga.tournament_size,
        seed=seed,
    )
    ranked = hybrid_recommend(
        snapshot, spec, matrix, params,
        policy=config.compatibility_policy,
        vague_mapping=config.vague_mapping,
        cr_threshold=config.cr_threshold,
        limit=limit,
    )
    click.echo(f"{'rank':>4} {'score':>8} {'total':>12} {'currency':<8} bundle")
    for position, rec in enumerate(ranked, start=1):
        click.echo(
            f"{position:>4} {rec.score:>8.4f} {rec.breakdown.total:>12.2f} "
            f"{rec.breakdown.currency:<8} {_bundle_label(rec.bundle)}"
        )
    if not ranked:
        click.echo("no feasible bundles")


@main.command()
@engine_options
@usage_options
@click.option("--seed", type=int, default=None, help="Search seed override.")
@click.option("--budget", type=float, default=None, help="Feasibility cap on total cost.")
@click.option("--require-continent", "required_continents", multiple=True,
              help="Feasibility constraint; repeatable.")
@click.option("--plot-data", type=click.Path(), default=None,
              help="Write the front's objective values as CSV.")
@click.option("--plot", "plot_path", type=click.Path(), default=None,
              help="Render the front as a scatter image (requires matplotlib).")
@domain_errors
def pareto(config_path, catalog_path, seed, budget, required_continents,
           plot_data, plot_path, **usage_kwargs):
    """Non-dominated bundle set under the chosen objectives."""
    config, snapshot = _load_engine(config_path, catalog_path)
    spec = _build_spec(**usage_kwargs)
    penalties = PenaltyConfig(
        budget_cap=budget,
        required_continents=frozenset(required_continents),
    )
    params = config.ga if seed is None else GAParams(
        population_size=config.ga.population_size,
        generations=config.ga.generations,
        crossover_rate=config.ga.crossover_rate,
        mutation_rate=config.ga.mutation_rate,
        tournament_size=config.ga.tournament_size,
        seed=seed,
    )
    result = pareto_search(
        snapshot, spec, penalties=penalties, params=params,
        policy=config.compatibility_policy, vague_mapping=config.vague_mapping,
    )
    criteria = spec.criteria or tuple()
    names = [c.name for c in criteria] if criteria else ["total_cost"]
    click.echo(
        f"front size {len(result.recommendations)} "
        f"(generations {result.front.generation}, seed {result.front.seed})"
    )
    header = " ".join(f"{name:>18}" for name in names)
    click.echo(f"{'bundle':<42} {header}")
    for rec in result.recommendations:
        values = " ".join(
            f"{rec.bundle.criteria_values[name]:>18.6f}" for name in names
        )
        click.echo(f"{_bundle_label(rec.bundle):<42} {values}")

    if plot_data:
        with open(plot_data, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["compute_id", "storage_id", "transfer_id", *names])
            for rec in result.recommendations:
                writer.writerow(
                    [*rec.bundle.key, *(rec.bundle.criteria_values[n] for n in names)]
                )
        click.echo(f"wrote {plot_data}")

    if plot_path:
        try:
            import matplotlib

            matplotlib.use("Agg")
            import matplotlib.pyplot as plt
        except ImportError:
            raise CloudSelectError(
                "matplotlib is not installed; install the 'plot' extra for images"
            )
        xs = [rec.bundle.criteria_values[names[0]] for rec in result.recommendations]
        ys = [
            rec.bundle.criteria_values[names[1] if len(names) > 1 else names[0]]
            for rec in result.recommendations
        ]
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.scatter(xs, ys)
        ax.set_xlabel(names[0])
        ax.set_ylabel(names[1] if len(names) > 1 else names[0])
        ax.set_title("Pareto front")
        fig.tight_layout()
        fig.savefig(plot_path)
        click.echo(f"wrote {plot_path}")


@main.command()
@click.option("--tasks", type=float, default=None, help="Batch task count.")
@click.option("--per-task-ms", type=float, default=None, help="Milliseconds per task.")
@click.option("--per-task-seconds", type=float, default=None, help="Seconds per task.")
@click.option("--vms", type=int, default=1, show_default=True)
@click.option("--threads", type=int, default=1, show_default=True,
              help="Threads per VM.")
@click.option("--deadline-hours", type=float, default=None,
              help="Also report the minimum workers to meet this deadline.")
@click.option("--visitors", type=float, default=None, help="Monthly unique visitors.")
@click.option("--page-kib", type=float, default=None, help="Average page size in KiB.")
@click.option("--pages", type=float, default=1.0, show_default=True,
              help="Pages per visitor per month.")
@domain_errors
def estimate(tasks, per_task_ms, per_task_seconds, vms, threads, deadline_hours,
             visitors, page_kib, pages):
    """Translate a workload into requirement quantities."""
    batch_mode = tasks is not None
    traffic_mode = visitors is not None
    if batch_mode == traffic_mode:
        raise click.UsageError("give either --tasks (batch) or --visitors (traffic)")

    if batch_mode:
        if per_task_ms is None and per_task_seconds is None:
            raise click.UsageError("batch mode needs --per-task-ms or --per-task-seconds")
        per_task = per_task_seconds if per_task_seconds is not None else per_task_ms / 1000.0
        workload = BatchWorkload(task_count=tasks, per_task_time=per_task,
                                 vm_count=vms, threads_per_vm=threads)
        hours = estimate_batch_runtime(workload)
        click.echo(f"{hours:.1f} hours")
        if deadline_hours is not None:
            workers = required_parallelism(workload, deadline_hours)
            click.echo(f"minimum workers for {deadline_hours:g} h deadline: {workers}")
    else:
        if page_kib is None:
            raise click.UsageError("traffic mode needs --page-kib")
        workload = TrafficWorkload(monthly_visitors=visitors, page_size_kib=page_kib,
                                   pages_per_visitor=pages)
        click.echo(f"{estimate_monthly_traffic(workload):.3f} GB/month")


@main.command()
@click.option("--log", "log_path", type=click.Path(), required=True,
              help="History log file.")
@click.option("--offer", "offers", multiple=True, help="Filter to offer id(s).")
@click.option("--compact", is_flag=True, help="Fold the log into its snapshot file.")
@domain_errors
def history(log_path, offers, compact):
    """Popularity counts derived from the selection history log."""
    store = HistoryStore(log_path)
    if compact:
        store.compact()
        click.echo("compacted")
    stats = store.stats(offer_ids=offers or None)
    click.echo(f"{'offer':<28} {'recommended':>12} {'selected':>10}")
    for offer_id in sorted(stats.counts):
        rec, sel = stats.counts[offer_id]
        click.echo(f"{offer_id:<28} {rec:>12} {sel:>10}")


@main.command()
@engine_options
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--history", "history_path", type=click.Path(), default=None)
@click.option("--static", "static_dir", type=click.Path(), default=None,
              help="Directory of built web UI assets to serve at /.")
@domain_errors
def serve(config_path, catalog_path, host, port, history_path, static_dir):
    """Run the REST service."""
    import uvicorn

    from .service import create_app

    config = load_config(config_path)
    overrides = {}
    if catalog_path:
        overrides["catalog_path"] = catalog_path
    if history_path:
        overrides["history_path"] = history_path
    if host:
        overrides["host"] = host
    if port:
        overrides["port"] = port
    if overrides:
        from dataclasses import replace

        config = replace(config, **overrides)
    if static_dir is None and Path("frontend/dist").is_dir():
        static_dir = "frontend/dist"
    app = create_app(config=config, static_dir=static_dir)
    uvicorn.run(app, host=config.host, port=config.port)


if __name__ == "__main__":
    main()
