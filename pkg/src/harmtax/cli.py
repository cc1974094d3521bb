"""Operator CLI: ingestion, taxonomy management, rounds, reports, serving.

Machine output is JSON on stdout (byte-identical to the matching HTTP
endpoint body); diagnostics go to stderr. Exit codes: 0 success, 1 validation
or runtime failure, 2 usage error.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .errors import HarmtaxError, TaxonomyInvalid
from .incidents import IncidentQuery
from .jsonio import to_json_bytes
from .service import Config, Service, load_config
from .taxonomy import diff_taxonomies, load_taxonomy, parse_taxonomy, validate_taxonomy


def fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def emit(payload: bytes) -> None:
    sys.stdout.buffer.write(payload)
    sys.stdout.buffer.flush()


def open_service(ctx: click.Context) -> Service:
    try:
        return Service(ctx.obj)
    except HarmtaxError as exc:
        fail(exc.message)
    except OSError as exc:
        fail(str(exc))


@click.group()
@click.option("--data", "data_path", envvar="HARMTAX_DATA", default=None,
              help="Path to the database file.")
@click.option("--taxonomy", "taxonomy_path", envvar="HARMTAX_TAXONOMY", default=None,
              help="Taxonomy document to register on startup (defaults to the bundled seed).")
@click.option("--config", "config_file", default=None,
              help="Optional JSON config file; flags win over it.")
@click.pass_context
def main(ctx, data_path, taxonomy_path, config_file):
    """Harms-taxonomy annotation platform."""
    try:
        ctx.obj = load_config(
            config_file, data_path=data_path, taxonomy_path=taxonomy_path
        )
    except HarmtaxError as exc:
        fail(exc.message)


def _read_file(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        fail(str(exc))


@main.command()
@click.argument("file")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None,
              help="Defaults by file suffix.")
@click.pass_context
def ingest(ctx, file, fmt):
    """Ingest incidents from a CSV or JSON file (upsert by id)."""
    data = _read_file(file)
    if fmt is None:
        fmt = "json" if file.endswith(".json") else "csv"
    service = open_service(ctx)
    try:
        report = service.incidents.ingest(data, fmt)
    except HarmtaxError as exc:
        fail(exc.message)
    emit(to_json_bytes(report.as_dict()))


@main.group()
def taxonomy():
    """Validate, diff, and register taxonomy documents."""


@taxonomy.command("validate")
@click.argument("file")
def taxonomy_validate(file):
    """Print violations as JSON; exit 1 if the document is invalid."""
    data = _read_file(file)
    try:
        t = parse_taxonomy(data)
    except HarmtaxError as exc:
        fail(exc.message)
    violations = validate_taxonomy(t)
    emit(to_json_bytes({"violations": [v.as_dict() for v in violations]}))
    if violations:
        sys.exit(1)


@taxonomy.command("diff")
@click.argument("old_file")
@click.argument("new_file")
def taxonomy_diff(old_file, new_file):
    """Structural diff between two taxonomy documents."""
    try:
        old = load_taxonomy(_read_file(old_file))
        new = load_taxonomy(_read_file(new_file))
    except TaxonomyInvalid as exc:
        fail(exc.message)
    except HarmtaxError as exc:
        fail(exc.message)
    emit(to_json_bytes(diff_taxonomies(old, new).as_dict()))


@taxonomy.command("coverage")
@click.argument("mapping_file", required=False, default=None)
@click.option("--taxonomy-file", "taxonomy_file", default=None,
              help="Taxonomy document to compare against (defaults to the bundled seed).")
def taxonomy_coverage(mapping_file, taxonomy_file):
    """Harm-type coverage matrix against external taxonomies."""
    from .taxonomy import coverage_matrix, seed_coverage_mapping, seed_taxonomy

    try:
        t = load_taxonomy(_read_file(taxonomy_file)) if taxonomy_file else seed_taxonomy()
        mapping = _read_file(mapping_file) if mapping_file else seed_coverage_mapping()
        matrix = coverage_matrix(t, mapping)
    except HarmtaxError as exc:
        fail(exc.message)
    emit(to_json_bytes(matrix.as_dict()))


@taxonomy.command("load")
@click.argument("file")
@click.pass_context
def taxonomy_load(ctx, file):
    """Register a taxonomy version in the data store."""
    data = _read_file(file)
    service = open_service(ctx)
    try:
        t = service.engine.register_taxonomy(data)
    except HarmtaxError as exc:
        fail(exc.message)
    emit(to_json_bytes({"version": t.version, "harm_types": len(t.harm_types)}))


@main.group()
def annotator():
    """Manage annotators and their bearer tokens."""


@annotator.command("add")
@click.argument("annotator_id")
@click.option("--name", required=True)
@click.option("--expires", default=None, help="Token expiry, ISO-8601 UTC.")
@click.option("--secret", envvar="HARMTAX_TOKEN_SECRET", default=None,
              help="Token secret (must match the serving config).")
@click.pass_context
def annotator_add(ctx, annotator_id, name, expires, secret):
    """Create or re-key an annotator; prints the bearer token once."""
    service = open_service(ctx)
    token_secret = secret or service.config.token_secret
    token = service.engine.register_annotator(annotator_id, name, token_secret, expires)
    emit(to_json_bytes({"annotator_id": annotator_id, "token": token}))


@main.group(name="round")
def round_group():
    """Open, close, and list annotation rounds."""


@round_group.command("open")
@click.option("--label", required=True)
@click.option("--taxonomy-version", "taxonomy_version", required=True)
@click.option("--incidents", "incident_csv", default=None,
              help="Comma-separated incident ids.")
@click.option("--all", "all_incidents", is_flag=True, default=False,
              help="Include every stored incident.")
@click.pass_context
def round_open(ctx, label, taxonomy_version, incident_csv, all_incidents):
    service = open_service(ctx)
    if all_incidents:
        incident_ids = service.incidents.all_ids()
    elif incident_csv:
        incident_ids = [i.strip() for i in incident_csv.split(",") if i.strip()]
    else:
        raise click.UsageError("pass --incidents or --all")
    try:
        rnd = service.engine.open_round(label, taxonomy_version, incident_ids)
    except HarmtaxError as exc:
        fail(exc.message)
    emit(to_json_bytes(rnd.as_dict()))


@round_group.command("close")
@click.argument("round_id")
@click.pass_context
def round_close(ctx, round_id):
    service = open_service(ctx)
    try:
        rnd = service.engine.close_round(round_id)
    except HarmtaxError as exc:
        fail(exc.message)
    emit(to_json_bytes(rnd.as_dict()))


@round_group.command("list")
@click.pass_context
def round_list(ctx):
    service = open_service(ctx)
    emit(to_json_bytes([r.as_dict() for r in service.engine.list_rounds()]))


@main.group()
def report():
    """Agreement, summary, Sankey, and trend reports."""


@report.command("alpha")
@click.option("--round", "round_id", required=True)
@click.option("--mode", type=click.Choice(["set", "binary"]), default="set")
@click.option("--status", "status_handling", type=click.Choice(["ignore", "distinguish"]),
              default="ignore")
@click.option("--ci", is_flag=True, default=False, help="Attach a bootstrap interval.")
@click.option("--resamples", type=int, default=1000)
@click.option("--confidence", type=float, default=0.95)
@click.option("--seed", type=int, default=0)
@click.pass_context
def report_alpha(ctx, round_id, mode, status_handling, ci, resamples, confidence, seed):
    service = open_service(ctx)
    try:
        payload = service.agreement_export(
            round_id, mode=mode, status_handling=status_handling,
            ci=ci, resamples=resamples, confidence=confidence, seed=seed,
        )
    except HarmtaxError as exc:
        fail(exc.message)
    emit(payload)


@report.command("summary")
@click.option("--round", "round_id", required=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.pass_context
def report_summary(ctx, round_id, fmt):
    service = open_service(ctx)
    try:
        payload = service.summary_export(round_id, fmt)
    except HarmtaxError as exc:
        fail(exc.message)
    emit(payload)


@report.command("sankey")
@click.option("--round", "round_id", required=True)
@click.option("--incident", "incident_id", required=True)
@click.pass_context
def report_sankey(ctx, round_id, incident_id):
    service = open_service(ctx)
    try:
        payload = service.sankey_export(round_id, incident_id)
    except HarmtaxError as exc:
        fail(exc.message)
    emit(payload)


@report.command("trend")
@click.option("--rounds", "rounds_csv", default=None,
              help="Comma-separated round ids; defaults to all closed rounds.")
@click.pass_context
def report_trend(ctx, rounds_csv):
    service = open_service(ctx)
    round_ids = [r.strip() for r in rounds_csv.split(",") if r.strip()] if rounds_csv else None
    try:
        payload = service.trend_export(round_ids)
    except HarmtaxError as exc:
        fail(exc.message)
    emit(payload)


@main.group()
def export():
    """Bulk data exports."""


@export.command("annotations")
@click.pass_context
def export_annotations(ctx):
    """All annotations as JSON lines, ordered (round, incident, annotator)."""
    service = open_service(ctx)
    emit(service.engine.export_annotations())


@main.command()
@click.argument("query_text", required=False, default=None)
@click.option("--sector", default=None)
@click.option("--limit", type=int, default=50)
@click.option("--offset", type=int, default=0)
@click.pass_context
def incidents(ctx, query_text, sector, limit, offset):
    """List stored incidents (optional text filter)."""
    service = open_service(ctx)
    try:
        page = service.incident_page_dict(
            IncidentQuery(text=query_text, sector=sector, offset=offset, limit=limit)
        )
    except HarmtaxError as exc:
        fail(exc.message)
    emit(to_json_bytes(page))


@main.command()
@click.option("--host", envvar="HARMTAX_HOST", default=None)
@click.option("--port", envvar="HARMTAX_PORT", type=int, default=None)
@click.option("--static", "static_dir", envvar="HARMTAX_STATIC", default=None,
              help="Directory of built UI assets to serve at /.")
@click.pass_context
def serve(ctx, host, port, static_dir):
    """Run the HTTP service."""
    from .api import serve as run_server

    base: Config = ctx.obj
    overrides = {k: v for k, v in
                 {"host": host, "port": port, "static_dir": static_dir}.items()
                 if v is not None}
    config = load_config(None, data_path=base.data_path,
                         taxonomy_path=base.taxonomy_path, **overrides)
    click.echo(f"serving on http://{config.host}:{config.port}", err=True)
    run_server(config)


if __name__ == "__main__":
    main()
