"""Command-line entry points: evaluate, train, test, serve."""

from __future__ import annotations

import json
from pathlib import Path

import click

from . import engine as eng
from .corpus import load_corpus, record_from_obj
from .engine import EngineState
from .harness import (
    _CAUSAL_FLAGS,
    _NONCAUSAL_FLAGS,
    report_to_csv,
    report_to_doc,
    run_rq1,
    run_rq2,
)
from .service import ServiceRuntime, create_app
from .store import read_store_files, write_store_files


def parse_seeds(spec: str) -> list[int]:
    """Seed list syntax: '1..10' (inclusive range) or '1,2,5'."""
    spec = spec.strip()
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in spec.split(",") if part.strip()]


@click.group()
def main():
    """Cause-effect pattern learning over pre-parsed sentences."""


@main.command()
@click.option("--rq1", "want_rq1", is_flag=True, help="Run each artifact from an empty engine.")
@click.option("--rq2", "want_rq2", is_flag=True, help="Pre-train on all other artifacts first.")
@click.option(
    "--corpus", "corpus_paths", multiple=True, required=True,
    type=click.Path(exists=True), help="Artifact file or directory of *.jsonl.",
)
@click.option("--seeds", default="1..10", show_default=True, help="Seed list, e.g. 1..10 or 3,7.")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Report directory.")
def evaluate(want_rq1, want_rq2, corpus_paths, seeds, out_dir):
    """Run the flag-based evaluation and write JSON + CSV reports."""
    if not (want_rq1 or want_rq2):
        raise click.UsageError("choose at least one of --rq1 / --rq2")
    try:
        corpus = load_corpus(corpus_paths)
        seed_list = parse_seeds(seeds)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    if not corpus:
        raise click.ClickException("corpus is empty")
    if want_rq2 and len(corpus) < 2:
        raise click.UsageError("--rq2 needs at least two artifacts")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = []
    if want_rq1:
        jobs.append(("rq1", run_rq1))
    if want_rq2:
        jobs.append(("rq2", run_rq2))
    for mode, runner in jobs:
        report = runner(corpus, seed_list)
        json_path = out / f"{mode}_report.json"
        csv_path = out / f"{mode}_runs.csv"
        json_path.write_text(
            json.dumps(report_to_doc(report), indent=2) + "\n", encoding="utf-8"
        )
        csv_path.write_text(report_to_csv(report), encoding="utf-8")
        click.echo(
            f"{mode}: {len(report.runs)} runs, precision {report.prf.precision:.4f} "
            f"recall {report.prf.recall:.4f} f1 {report.prf.f1:.4f} -> {json_path}"
        )


def _load_state(store_path: Path) -> EngineState:
    if not store_path.exists():
        return EngineState.empty()
    return read_store_files(store_path)


def _iter_records(input_path: Path):
    with open(input_path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            yield record_from_obj(json.loads(line), path=input_path, lineno=lineno)


@main.command()
@click.option(
    "--store", "store_path", required=True, envvar="CEGLEARN_STORE",
    type=click.Path(), help="Pattern store file (created if missing).",
)
@click.option(
    "--input", "input_path", required=True, type=click.Path(exists=True),
    help="Record file: one JSON record per line.",
)
def train(store_path, input_path):
    """Train the store with annotated records and persist it."""
    store_path = Path(store_path)
    try:
        state = _load_state(store_path)
        records = list(_iter_records(Path(input_path)))
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    for record in records:
        if not record.engine_processable:
            click.echo(f"{record.id}: unprocessable ({record.unprocessable_reason})")
            continue
        if record.is_causal:
            outcome = eng.train_causal(state, record.sentence, record.gold)
            flag = _CAUSAL_FLAGS[outcome]
        else:
            outcome = eng.train_noncausal(state, record.sentence)
            flag = _NONCAUSAL_FLAGS[outcome]
        suffix = ""
        for pattern in state.patterns:
            if record.id in pattern.accepted:
                suffix = f" (pattern {pattern.id})"
                break
        click.echo(f"{record.id}: {outcome.value} [{flag.value}]{suffix}")
    write_store_files(state, store_path)
    click.echo(f"store saved to {store_path}")


@main.command(name="test")
@click.option(
    "--store", "store_path", required=True, envvar="CEGLEARN_STORE",
    type=click.Path(exists=True), help="Pattern store file.",
)
@click.option(
    "--input", "input_path", required=True, type=click.Path(exists=True),
    help="Record file: one JSON record per line.",
)
def test_cmd(store_path, input_path):
    """Detect cause-effect graphs for records; read-only."""
    try:
        state = _load_state(Path(store_path))
        records = list(_iter_records(Path(input_path)))
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    for record in records:
        if not record.engine_processable:
            click.echo(f"{record.id}: unprocessable ({record.unprocessable_reason})")
            continue
        result = eng.detect(state, record.sentence)
        if result.ceg is not None:
            ceg = result.ceg
            click.echo(
                f"{record.id}: pattern {result.matched_pattern_id} "
                f"cause=[{ceg.cause.start},{ceg.cause.end}) {ceg.cause.text!r} "
                f"effect=[{ceg.effect.start},{ceg.effect.end}) {ceg.effect.text!r}"
            )
        elif result.matched_pattern_id is not None:
            click.echo(
                f"{record.id}: pattern {result.matched_pattern_id} "
                f"extraction failed: {result.failure}"
            )
        else:
            click.echo(f"{record.id}: no-match")


@main.command()
@click.option(
    "--store", "store_path", default=None, envvar="CEGLEARN_STORE",
    type=click.Path(), help="Pattern store to load at startup and save on demand.",
)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8701, show_default=True, type=int)
def serve(store_path, host, port):
    """Run the interactive annotation service."""
    import uvicorn

    runtime = ServiceRuntime(store_path=store_path)
    if store_path and Path(store_path).exists():
        runtime.load(store_path)
        click.echo(f"loaded store from {store_path}")
    uvicorn.run(create_app(runtime), host=host, port=port)


if __name__ == "__main__":
    main()
