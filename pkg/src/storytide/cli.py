"""Operator command line: serve, ingest, sessions, media, export, plan, verify."""
from __future__ import annotations

import functools
import json
import re
import sys
import time
from pathlib import Path

import click

from . import __version__
from .archive import init_archive
from .config import ServiceConfig, load_config, validate_bind
from .errors import StorytideError
from .export import ExportConfig, export_csv
from .ingest import ingest_har, ingest_ndjson
from .media import DEFAULT_TIMEOUT_S, fetch_pending, verify_media
from .patterns import PatternTable
from .tides import coverage_report, expected_observations, plan_sessions

_DURATION_RE = re.compile(r"(\d+)([smhdw])", re.IGNORECASE)
_UNIT_S = {"s": 1, "m": 60, "h": 3600, "d": 86400, "w": 604800}


def parse_duration(text: str) -> int:
    """Seconds from '43200', '12h', '90m', '7d', or compounds like '1h30m'."""
    text = text.strip()
    if text.isdigit():
        return int(text)
    parts = _DURATION_RE.findall(text)
    if not parts or "".join(f"{n}{u}" for n, u in parts).lower() != text.lower():
        raise StorytideError(f"cannot parse duration {text!r}")
    return sum(int(n) * _UNIT_S[u.lower()] for n, u in parts)


def _fail(exc: Exception) -> None:
    line = json.dumps({"error": type(exc).__name__, "message": str(exc)})
    click.echo(line, err=True)
    sys.exit(1)


def cli_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (StorytideError, OSError, ValueError) as exc:
            _fail(exc)

    return wrapper


def _emit(payload: dict) -> None:
    click.echo(json.dumps(payload, ensure_ascii=False))


class Duration(click.ParamType):
    name = "duration"

    def convert(self, value, param, ctx):
        try:
            return parse_duration(str(value))
        except StorytideError as exc:
            self.fail(str(exc), param, ctx)


DURATION = Duration()


@click.group()
@click.version_option(version=__version__)
@click.option(
    "--archive",
    "archive_root",
    type=click.Path(path_type=Path),
    default=Path("archive"),
    show_default=True,
    help="Archive directory.",
)
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, path_type=Path),
    default=None,
    help="JSON config file.",
)
@click.pass_context
def main(ctx, archive_root, config_path):
    """Capture, archive, and export ephemeral stories from a local daemon."""
    ctx.ensure_object(dict)
    overrides = {}
    if ctx.get_parameter_source("archive_root") is not click.core.ParameterSource.DEFAULT:
        overrides["archive_root"] = str(archive_root)
    ctx.obj["config"] = load_config(config_path, **overrides)


def _open_archive(ctx):
    return init_archive(ctx.obj["config"].archive_root)


def _pattern_table(config: ServiceConfig, override: Path | None) -> PatternTable:
    path = override or config.pattern_table_path
    if path:
        return PatternTable.from_file(path)
    return PatternTable.default()


@main.command()
@click.option("--bind", default=None, help="host:port (default 127.0.0.1:8089).")
@click.option("--token", default=None, help="Shared secret (or TIDAL_TOKEN env).")
@click.option("--allow-non-loopback", is_flag=True, default=False)
@click.option("--patterns", type=click.Path(exists=True, path_type=Path), default=None)
@click.pass_context
@cli_errors
def serve(ctx, bind, token, allow_non_loopback, patterns):
    """Run the local ingestion daemon."""
    import uvicorn

    from .service import create_app

    config: ServiceConfig = ctx.obj["config"]
    if bind:
        config.bind_address = bind
    if token:
        config.auth_token = token
    if allow_non_loopback:
        config.allow_non_loopback = True
    validate_bind(config)
    if not config.auth_token:
        raise StorytideError("no auth token configured; set TIDAL_TOKEN or pass --token")
    table = _pattern_table(config, patterns)
    archive = init_archive(config.archive_root)
    host, port = config.host_port
    app = create_app(archive, config, table)
    click.echo(f"storytide daemon on http://{host}:{port} (archive: {config.archive_root})")
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.argument("path", type=click.Path(exists=True, path_type=Path))
@click.option("--patterns", type=click.Path(exists=True, path_type=Path), default=None)
@click.pass_context
@cli_errors
def ingest(ctx, path, patterns):
    """Replay captured envelopes from an NDJSON or HAR file."""
    table = _pattern_table(ctx.obj["config"], patterns)
    with _open_archive(ctx) as archive:
        if path.suffix.lower() == ".har":
            summary = ingest_har(path, table, archive)
        else:
            summary = ingest_ndjson(path, table, archive)
    _emit(summary.to_dict())


@main.group()
def session():
    """Capture session management."""


@session.command("new")
@click.option("--label", required=True)
@click.option("--at", "started_at", type=int, default=None, help="Epoch seconds.")
@click.pass_context
@cli_errors
def session_new(ctx, label, started_at):
    """Begin a capture session; later observations attach to it."""
    with _open_archive(ctx) as archive:
        created = archive.begin_session(label, started_at or int(time.time()))
    _emit(created.to_dict())


@main.command("fetch-media")
@click.option("--concurrency", type=int, default=4, show_default=True)
@click.option("--max-retries", type=int, default=2, show_default=True)
@click.option("--timeout", "timeout_s", type=float, default=DEFAULT_TIMEOUT_S, show_default=True)
@click.pass_context
@cli_errors
def fetch_media(ctx, concurrency, max_retries, timeout_s):
    """Download queued media with retry and content verification."""
    with _open_archive(ctx) as archive:
        report = fetch_pending(
            archive, concurrency=concurrency, max_retries=max_retries, timeout_s=timeout_s
        )
    _emit(report.to_dict())


@main.command()
@click.option(
    "--out",
    type=click.Path(path_type=Path),
    default=None,
    help="Output CSV path (default: <archive>/export/stories.csv).",
)
@click.option("--pseudonymize", is_flag=True, default=False)
@click.option("--figures", is_flag=True, default=False, help="Render summary figures next to the CSV.")
@click.pass_context
@cli_errors
def export(ctx, out, pseudonymize, figures):
    """Write the analysis CSV (and, optionally, summary figures)."""
    config: ServiceConfig = ctx.obj["config"]
    with _open_archive(ctx) as archive:
        out = out or Path(config.archive_root) / "export" / "stories.csv"
        out.parent.mkdir(parents=True, exist_ok=True)
        export_config = ExportConfig(
            pseudonymize=pseudonymize, pseudonym_key=config.pseudonym_key
        )
        with open(out, "w", encoding="utf-8", newline="") as fh:
            rows = export_csv(archive, export_config, fh)
        result = {"rows": rows, "out": str(out)}
        if figures:
            from .figures import archive_figures

            written = archive_figures(archive, out.parent, stem=out.stem)
            result["figures"] = [str(p) for p in written]
    _emit(result)


@main.command()
@click.pass_context
@cli_errors
def stats(ctx):
    """Archive counters: items, observations, sessions, pending media."""
    with _open_archive(ctx) as archive:
        _emit(archive.stats())


@main.command()
@click.option("--interval", type=DURATION, required=True, help="Time between sessions, e.g. 12h.")
@click.option("--lifetime", type=DURATION, default="24h", show_default=True)
@click.option("--horizon", type=DURATION, default="7d", show_default=True)
@click.option("--anchor", type=int, default=0, show_default=True, help="First session, epoch seconds.")
@click.option("--json", "json_only", is_flag=True, default=False, help="Emit only the JSON report.")
@click.option("--figure", type=click.Path(path_type=Path), default=None, help="Render the coverage figure to this file.")
@cli_errors
def plan(interval, lifetime, horizon, anchor, json_only, figure):
    """Coverage analysis for a capture schedule."""
    schedule = plan_sessions(anchor, interval, horizon)
    report = coverage_report(schedule, lifetime)
    expected = expected_observations(schedule, lifetime)
    doc = {
        "anchor": schedule.anchor,
        "interval_s": schedule.interval_s,
        "horizon_s": schedule.horizon_s,
        "session_count": len(schedule.sessions),
        "lifetime_s": lifetime,
        "expected_observations": expected,
        "analysis": "steady-state interior; live window is half-open [post, post+lifetime)",
        **report.to_dict(),
    }
    if figure is not None:
        from .figures import coverage_figure

        coverage_figure(schedule, lifetime, figure)
        doc["figure"] = str(figure)
    if not json_only:
        rows = [
            ("sessions", f"{len(schedule.sessions)} (every {interval} s over {horizon} s)"),
            ("lifetime", f"{lifetime} s"),
            ("observations per story", f"min {report.min_observations}, max {report.max_observations}"),
            ("expected (uniform posting)", f"{expected:.2f}"),
            ("margin", f"{report.margin_s} s"),
            ("survives one missed session", "yes" if report.single_miss_safe else "no"),
        ]
        width = max(len(name) for name, _ in rows)
        for name, value in rows:
            click.echo(f"{name.ljust(width)}  {value}")
        click.echo("")
    click.echo(json.dumps(doc, ensure_ascii=False, indent=2 if not json_only else None))


@main.command()
@click.pass_context
@cli_errors
def verify(ctx):
    """Re-hash downloaded media and report discrepancies."""
    with _open_archive(ctx) as archive:
        discrepancies = verify_media(archive)
    _emit({"discrepancies": [d.to_dict() for d in discrepancies]})


if __name__ == "__main__":
    main()
