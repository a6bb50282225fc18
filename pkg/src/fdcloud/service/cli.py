"""Command-line interface.

Local commands (serve, ingest, annotate, search, loadgen, corpus-gen) open
the data directory directly; job commands (submit, watch, metrics, plugin)
talk HTTP to a running server so they see the same scheduler the UI does.
"""

from __future__ import annotations

import json
import mimetypes
import os
import secrets
from pathlib import Path
from urllib.parse import quote

import click

from ..annotate import compile_matcher, default_pipeline, emit_rdf, load_lexicon, run_pipeline
from ..docstore import DocumentStore, Query, demo_lexicon, generate_corpus
from ..errors import FdcError
from ..jobs import Scheduler, SchedulerConfig, run_loadgen
from .app import AppConfig, create_app, load_app_config
from .auth import Authenticator

DEFAULT_ADDR = "127.0.0.1:8472"


def _data_dir(override: str | None) -> str:
    return override or os.environ.get("FDC_DATA_DIR", "fdc-data")


def _app_config(path: str | None) -> AppConfig:
    path = path or os.environ.get("FDC_CONFIG")
    return load_app_config(path) if path else AppConfig()


def _base_url(server: str | None) -> str:
    addr = server or os.environ.get("FDC_LISTEN_ADDR", DEFAULT_ADDR)
    return addr if addr.startswith("http") else f"http://{addr}"


def _checked(response):
    if response.status_code >= 400:
        try:
            body = response.json()
            message = f"{body['code']}: {body['message']}"
        except Exception:
            message = f"HTTP {response.status_code}"
        raise click.ClickException(message)
    return response


def _token(base: str, user: str, password: str, token: str | None) -> str:
    if token:
        return token
    import httpx

    response = _checked(
        httpx.post(
            f"{base}/login",
            json={"username": user, "password": password},
            timeout=10.0,
        )
    )
    return response.json()["token"]


def _bearer(token: str) -> dict[str, str]:
    return {"authorization": f"Bearer {token}"}


_server_opts = [
    click.option("--server", default=None, help=f"server URL (default {DEFAULT_ADDR})"),
    click.option("--user", default="admin", show_default=True),
    click.option("--password", default="", help="password for --user"),
    click.option("--token", default=None, help="skip login, use this bearer token"),
]


def server_options(fn):
    for opt in reversed(_server_opts):
        fn = opt(fn)
    return fn


class _Group(click.Group):
    """Turns package errors into clean one-line CLI failures."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except FdcError as exc:
            raise click.ClickException(f"{exc.code}: {exc}") from exc


@click.group(cls=_Group)
def main() -> None:
    """Document store, annotation pipeline, and job scheduler."""


# -- local commands -----------------------------------------------------------


@main.command()
@click.option("--listen", default=None, help="host:port to bind")
@click.option("--data-dir", default=None)
@click.option("--config", "config_path", default=None, help="JSON config file")
def serve(listen: str | None, data_dir: str | None, config_path: str | None) -> None:
    """Run the HTTP API."""
    import uvicorn

    config = _app_config(config_path)
    auth = None
    if not config.credential_file:
        password = secrets.token_urlsafe(12)
        auth = Authenticator({}, ttl_s=config.token_ttl_s)
        auth.add_user("admin", password, "admin")
        click.echo(
            f"no credential file configured; admin password for this run: {password}",
            err=True,
        )
    app = create_app(config, _data_dir(data_dir), auth=auth)
    addr = listen or os.environ.get("FDC_LISTEN_ADDR", DEFAULT_ADDR)
    addr = addr.removeprefix("http://")
    host, _, port = addr.partition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8472), log_level="warning")


@main.command()
@click.argument("paths", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--data-dir", default=None)
@click.option("--title", default="")
@click.option("--author", default="")
@click.option("--date", default="")
@click.option("--media-type", default=None, help="default: guessed from the suffix")
@click.option("--uri", default="")
def ingest(paths, data_dir, title, author, date, media_type, uri) -> None:
    """Register files in the document store; prints one doc id per file."""
    store = DocumentStore(_data_dir(data_dir))
    for path in paths:
        p = Path(path)
        mt = media_type or mimetypes.guess_type(path)[0] or "text/plain"
        doc_id = store.ingest(
            p.read_bytes(),
            {
                "uri": uri,
                "title": title or p.stem,
                "author": author,
                "date": date,
                "media_type": mt,
            },
        )
        click.echo(f"{doc_id}  {path}")


@main.command()
@click.argument("doc_id")
@click.option("--data-dir", default=None)
@click.option("--lexicon", "lexicon_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--rdf/--no-rdf", default=True, help="print the triples")
def annotate(doc_id, data_dir, lexicon_path, rdf) -> None:
    """Run the annotation pipeline over a stored document."""
    store = DocumentStore(_data_dir(data_dir))
    record = store.get(doc_id)
    lexicon = load_lexicon(lexicon_path) if lexicon_path else demo_lexicon()
    pipeline = default_pipeline(
        compile_matcher(lexicon), lexicon.ambiguous, doc_id=doc_id
    )
    _, spans = run_pipeline(pipeline, record.text)
    store.set_spans(doc_id, tuple(spans))
    concepts = {s.concept for s in spans}
    store.add_tags(doc_id, concepts)
    if rdf and spans:
        tag_map = {
            c: f"http://fdcloud.example/tags/{quote(c, safe='')}" for c in concepts
        }
        click.echo(emit_rdf(doc_id, record.uri, spans, tag_map), nl=False)
    click.echo(f"{len(spans)} spans, {len(concepts)} concepts", err=True)


@main.command()
@click.argument("terms")
@click.option("--data-dir", default=None)
@click.option("--author", default=None)
@click.option("--date-from", default=None)
@click.option("--date-to", default=None)
@click.option("--limit", default=10, show_default=True)
def search(terms, data_dir, author, date_from, date_to, limit) -> None:
    """Conjunctive search over the local store."""
    store = DocumentStore(_data_dir(data_dir))
    date_range = (date_from, date_to) if date_from and date_to else None
    query = Query(
        terms=tuple(terms.split()),
        author_filter=author,
        date_range=date_range,
        limit=limit,
    )
    for doc_id, score in store.search(query):
        record = store.get(doc_id)
        click.echo(f"{doc_id}  {score:8.3f}  {record.title}")


@main.command("corpus-gen")
@click.option("--seed", default=0, show_default=True)
@click.option("--count", default=800, show_default=True)
@click.option("--data-dir", default=None)
def corpus_gen(seed, count, data_dir) -> None:
    """Generate and ingest a deterministic synthetic corpus."""
    store = DocumentStore(_data_dir(data_dir))
    for data, metadata in generate_corpus(seed, count):
        store.ingest(data, metadata)
    click.echo(f"ingested {count} documents into {store.data_dir} ({len(store)} total)")


@main.command()
@click.option("--jobs", default=1000, show_default=True)
@click.option("--nodes", default=13, show_default=True)
@click.option("--duration", default=120.0, show_default=True, help="simulated seconds")
@click.option("--seed", default=0, show_default=True)
@click.option("--sample-every", default=1.0, show_default=True, help="seconds")
def loadgen(jobs, nodes, duration, seed, sample_every) -> None:
    """Sustain a target in-flight job count on a simulated cluster."""
    config = SchedulerConfig(
        node_count=nodes,
        node_slots=2,
        exec_ms_base=150,
        exec_ms_jitter=50,
        fault_seed=seed,
    )
    scheduler = Scheduler(config)
    report = run_loadgen(
        scheduler,
        jobs=jobs,
        duration_ms=duration * 1000.0,
        sample_every_ms=sample_every * 1000.0,
    )
    click.echo(json.dumps(report.to_dict(), indent=2))
    click.echo(scheduler.metrics((0.0, duration * 1000.0)).to_text(), nl=False)
    if not report.ok:
        raise click.ClickException("loadgen invariants violated")


# -- HTTP client commands ------------------------------------------------------


@main.command()
@server_options
@click.option("--plugin", "plugin_id", required=True)
@click.option("--param", "params", multiple=True, help="key=value, repeatable")
@click.option("--input", "inputs", multiple=True, required=True, help="doc or file id")
@click.option("--output", "outputs", multiple=True, help="requested output names")
def submit(server, user, password, token, plugin_id, params, inputs, outputs) -> None:
    """Submit a job to a running server; prints the job id."""
    import httpx

    split = {}
    for pair in params:
        key, sep, value = pair.partition("=")
        if not sep:
            raise click.ClickException(f"--param needs key=value, got {pair!r}")
        split[key] = value
    base = _base_url(server)
    tok = _token(base, user, password, token)
    response = _checked(
        httpx.post(
            f"{base}/jobs",
            json={
                "plugin_id": plugin_id,
                "params": split,
                "input_refs": list(inputs),
                "output_names": list(outputs),
            },
            headers=_bearer(tok),
            timeout=10.0,
        )
    )
    click.echo(response.json()["job_id"])


@main.command()
@server_options
@click.argument("job_id")
@click.option("--last-seen", default=0, show_default=True)
def watch(server, user, password, token, job_id, last_seen) -> None:
    """Stream a job's progress events until it reaches a terminal state."""
    import httpx

    base = _base_url(server)
    tok = _token(base, user, password, token)
    with httpx.stream(
        "GET",
        f"{base}/jobs/{job_id}/events",
        params={"last_seen": last_seen},
        headers=_bearer(tok),
        timeout=60.0,
    ) as response:
        if response.status_code >= 400:
            response.read()
            _checked(response)
        for line in response.iter_lines():
            if line.startswith("data:"):
                event = json.loads(line[len("data:"):])
                detail = {
                    k: v
                    for k, v in event.items()
                    if k not in ("seq", "job_id", "state", "at_ms")
                }
                suffix = f"  {json.dumps(detail)}" if detail else ""
                click.echo(f"{event['seq']:3d}  {event['state']}{suffix}")


@main.command()
@server_options
@click.option("--text", "as_text", is_flag=True, help="plain-text scrape format")
def metrics(server, user, password, token, as_text) -> None:
    """Fetch a metrics snapshot from a running server."""
    import httpx

    base = _base_url(server)
    tok = _token(base, user, password, token)
    params = {"format": "text"} if as_text else {}
    response = _checked(
        httpx.get(f"{base}/metrics", params=params, headers=_bearer(tok), timeout=10.0)
    )
    if as_text:
        click.echo(response.text, nl=False)
    else:
        click.echo(json.dumps(response.json(), indent=2))


@main.group()
def plugin() -> None:
    """Inspect and reset plugins."""


@plugin.command("list")
@server_options
def plugin_list(server, user, password, token) -> None:
    import httpx

    base = _base_url(server)
    tok = _token(base, user, password, token)
    response = _checked(
        httpx.get(f"{base}/plugins", headers=_bearer(tok), timeout=10.0)
    )
    for row in response.json()["plugins"]:
        click.echo(
            f"{row['id']:20s} {row['status']:17s} "
            f"failures={row['consecutive_critical_failures']} K={row['threshold']}"
        )


@plugin.command("reset")
@server_options
@click.argument("plugin_id")
@click.option("--force", is_flag=True)
def plugin_reset(server, user, password, token, plugin_id, force) -> None:
    import httpx

    base = _base_url(server)
    tok = _token(base, user, password, token)
    response = _checked(
        httpx.post(
            f"{base}/plugins/{plugin_id}/reset",
            json={"force": force},
            headers=_bearer(tok),
            timeout=10.0,
        )
    )
    click.echo(f"{plugin_id} -> {response.json()['status']}")


if __name__ == "__main__":
    main()
