"""liveref command line: analyze, apply, export-html, watch, serve."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .candidates import Config, analyze_source
from .document import build_document, document_bytes
from .extraction import NameCollisionError, StaleCandidateError
from .htmlreport import export_html
from .session import LiveSession, WorkspaceWatcher, load_config


def _load_cfg(config_path: str | None, mode: str | None) -> Config:
    if config_path:
        data = json.loads(Path(config_path).read_text(encoding="utf-8"))
        cfg = Config.from_dict(data)
    else:
        cfg = Config()
    if mode:
        cfg = cfg.with_mode(mode)
    return cfg


def _analyze_paths(paths, cfg: Config):
    """Yields (path, text, unit, result); exits 1 on a missing path."""
    for path in paths:
        p = Path(path)
        if not p.exists():
            click.echo(f"liveref: no such file: {path}", err=True)
            sys.exit(1)
        text = p.read_text(encoding="utf-8")
        unit, result = analyze_source(text, str(path), cfg)
        yield str(path), text, unit, result


@click.group()
def main():
    """Live Extract Method refactoring engine for Java source."""


@main.command()
@click.argument("paths", nargs=-1, required=True, type=click.Path())
@click.option("--json", "as_json", is_flag=True, help="Emit canonical AnalysisDocument JSON.")
@click.option("--config", "config_path", type=click.Path(exists=True), help="Config JSON file.")
@click.option("--mode", type=click.Choice(["all", "top1"]), default=None, help="Candidate display mode.")
def analyze(paths, as_json, config_path, mode):
    """Analyze files and print their candidates."""
    cfg = _load_cfg(config_path, mode)
    had_parse_errors = False
    for path, text, unit, result in _analyze_paths(paths, cfg):
        if not unit.parse_ok:
            had_parse_errors = True
        doc = build_document(path, text, result, cfg)
        if as_json:
            click.echo(document_bytes(doc).decode("utf-8"))
        else:
            _print_human(doc)
    sys.exit(2 if had_parse_errors else 0)


def _print_human(doc: dict):
    click.echo(f"{doc['file']}: {len(doc['candidates'])} candidate(s)")
    for err in doc["diagnostics"]["errors"]:
        click.echo(f"  parse error at line {err[0]}: {err[1]}")
    for cand in doc["candidates"]:
        lines = f"{cand['line_range'][0]}-{cand['line_range'][1]}"
        click.echo(
            f"  #{cand['rank']} severity {cand['severity']:>2}  {cand['method_name']}"
            f"  lines {lines}  ({cand['stmt_count']} statements)  id={cand['id']}"
        )
    if doc["eligible_methods"] and not doc["candidates"]:
        click.echo(f"  eligible but no legal fragments: {', '.join(doc['eligible_methods'])}")


@main.command()
@click.argument("file", type=click.Path())
@click.argument("candidate_id")
@click.option("--name", default=None, help="Name for the extracted method.")
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--workspace", type=click.Path(), default=".", help="Workspace root (log location).")
def apply(file, candidate_id, name, config_path, workspace):
    """Apply one candidate (id from a fresh `analyze` of identical content)."""
    p = Path(file)
    if not p.exists():
        click.echo(f"liveref: no such file: {file}", err=True)
        sys.exit(1)
    cfg = _load_cfg(config_path, None)
    session = LiveSession(workspace, cfg=cfg)
    session.on_focus(file)
    try:
        record = session.apply_refactoring(file, candidate_id, name=name)
    except StaleCandidateError as exc:
        click.echo(f"liveref: stale candidate: {exc}", err=True)
        sys.exit(3)
    except NameCollisionError as exc:
        click.echo(f"liveref: bad name: {exc}", err=True)
        sys.exit(4)
    click.echo(json.dumps(record.to_dict(), sort_keys=True))
    sys.exit(0)


@main.command("export-html")
@click.argument("paths", nargs=-1, required=True, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Output directory.")
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(["all", "top1"]), default=None)
def export_html_cmd(paths, out_dir, config_path, mode):
    """Write a self-contained HTML candidate report."""
    cfg = _load_cfg(config_path, mode)
    docs = [build_document(path, text, result, cfg) for path, text, unit, result in _analyze_paths(paths, cfg)]
    try:
        target = export_html(docs, out_dir)
    except OSError as exc:
        click.echo(f"liveref: cannot write report: {exc}", err=True)
        sys.exit(1)
    click.echo(str(target))


@main.command()
@click.argument("workspace", type=click.Path(exists=True, file_okay=False), default=".")
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--interval", type=float, default=0.5, show_default=True, help="Poll interval (s).")
def watch(workspace, config_path, interval):
    """Re-analyze on every significant change, printing candidate summaries."""
    cfg = _load_cfg(config_path, None) if config_path else load_config(Path(workspace))
    session = LiveSession(workspace, cfg=cfg, debounce=0.3)
    q = session.subscribe()
    watcher = WorkspaceWatcher(session, interval=interval)

    import threading

    thread = threading.Thread(target=watcher.run, daemon=True)
    thread.start()
    click.echo(f"watching {workspace} (Ctrl-C to stop)")
    try:
        while True:
            event = q.get()
            if event["type"] == "analysis":
                doc = event["document"]
                click.echo(f"[analysis] {doc['file']}: {len(doc['candidates'])} candidate(s)")
            elif event["type"] == "applied":
                rec = event["record"]
                click.echo(f"[applied] {rec['file']}: {rec['method_name']} -> {rec['candidate_id']}")
    except KeyboardInterrupt:
        watcher.stop()


@main.command()
@click.argument("workspace", type=click.Path(exists=True, file_okay=False), default=".")
@click.option("--port", type=int, default=8077, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--no-watch", is_flag=True, help="Do not poll the workspace for edits.")
def serve(workspace, port, host, config_path, no_watch):
    """Run the analysis/refactoring service the UI consumes."""
    import threading

    import uvicorn

    from .server import create_app

    cfg = _load_cfg(config_path, None) if config_path else load_config(Path(workspace))
    session = LiveSession(workspace, cfg=cfg, debounce=0.3)
    if not no_watch:
        watcher = WorkspaceWatcher(session)
        threading.Thread(target=watcher.run, daemon=True).start()
    uvicorn.run(create_app(session), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
