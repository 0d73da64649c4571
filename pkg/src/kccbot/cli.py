"""Single-binary CLI: ingest, stats, build-index, dump, chat, serve, eval."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from kccbot import corpus as corpus_mod
from kccbot import evalharness, ingest
from kccbot.dialogue import DialoguePolicy, policy_from_file
from kccbot.errors import KccBotError
from kccbot.gateway import ChatService, InboundMessage, create_app, load_config
from kccbot.retrieval import (
    build_index,
    dump_term,
    kernel_name,
    load_index,
    save_index,
)


def _load_records(path) -> list[ingest.KccRecord]:
    """Records from a JSONL corpus or a raw CSV (rejects reported to stderr)."""
    text = str(path)
    if text.endswith((".jsonl", ".ndjson")):
        return ingest.load_jsonl(path)
    result = ingest.load_csv(path)
    if result.rejects:
        click.echo(f"note: {len(result.rejects)} rows rejected during load", err=True)
    return result.records


def _norm_config(stopwords_path, min_token_len) -> corpus_mod.NormalizationConfig:
    stopwords = (
        corpus_mod.load_stopwords(stopwords_path)
        if stopwords_path
        else corpus_mod.default_stopwords()
    )
    return corpus_mod.NormalizationConfig(stopwords=stopwords, min_token_len=min_token_len)


def _index_from_corpus(corpus_path, config, smoothed):
    records = _load_records(corpus_path)
    docs, excluded = corpus_mod.build_corpus(records, config)
    if excluded:
        click.echo(f"note: {excluded} records normalized to zero tokens", err=True)
    return build_index(docs, smoothed_idf=smoothed, norm_config=config)


def _resolve_policy(policy_path, call_center_number, threshold) -> DialoguePolicy:
    if policy_path:
        return policy_from_file(policy_path)
    if not call_center_number:
        raise click.UsageError("--call-center-number is required without --policy")
    return DialoguePolicy(
        call_center_number=call_center_number, confidence_threshold=threshold
    )


@click.group()
@click.version_option()
def main():
    """Agricultural Q&A chatbot over the Kisan Call Center open dataset."""


@main.command("ingest")
@click.option("--csv", "csv_paths", multiple=True, type=click.Path(exists=True))
@click.option(
    "--fetch",
    "fetch_args",
    multiple=True,
    metavar="SS:DDDD:MM:YYYY",
    help="Fetch one endpoint catalogue, e.g. 02:0201:01:2015.",
)
@click.option("--seed-corpus", is_flag=True, help="Include the bundled sample corpus.")
@click.option("--years", type=int, default=0, help="Keep only the newest N calendar years.")
@click.option("--out", required=True, type=click.Path())
@click.option("--rejects", "rejects_path", type=click.Path(), default=None)
def ingest_cmd(csv_paths, fetch_args, seed_corpus, years, out, rejects_path):
    """Load KCC records from CSV files and/or the endpoint into a JSONL corpus."""
    records: list[ingest.KccRecord] = []
    rejects: list[ingest.RejectedRow] = []
    if seed_corpus:
        records.extend(ingest.load_csv(corpus_mod.seed_corpus_path()).records)
    for path in csv_paths:
        result = ingest.load_csv(path)
        records.extend(result.records)
        rejects.extend(result.rejects)
    for arg in fetch_args:
        parts = arg.split(":")
        if len(parts) != 4:
            raise click.UsageError(f"--fetch expects SS:DDDD:MM:YYYY, got {arg!r}")
        spec = ingest.FetchSpec(*parts)
        records.extend(ingest.fetch_records(spec, ingest.requests_transport))
    if years:
        records = ingest.filter_window(records, years)
    ingest.save_jsonl(records, out)
    if rejects_path:
        ingest.save_rejects_csv(rejects, rejects_path)
    click.echo(f"accepted={len(records)} rejected={len(rejects)} -> {out}")


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--csv-out", type=click.Path(), default=None)
def stats(corpus_path, csv_out):
    """Print corpus breakdowns (season, sector, query type, category) as JSON."""
    snapshot = corpus_mod.corpus_stats(_load_records(corpus_path))
    click.echo(corpus_mod.stats_to_json(snapshot))
    if csv_out:
        corpus_mod.write_stats_csv(snapshot, csv_out)


@main.command("build-index")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--stopwords", "stopwords_path", type=click.Path(exists=True), default=None)
@click.option("--min-token-len", type=int, default=1)
@click.option("--smoothed-idf", is_flag=True, help="Use the 1+df denominator variant.")
def build_index_cmd(corpus_path, out, stopwords_path, min_token_len, smoothed_idf):
    """Build a TF-IDF index snapshot from a corpus file."""
    config = _norm_config(stopwords_path, min_token_len)
    index = _index_from_corpus(corpus_path, config, smoothed_idf)
    save_index(index, out)
    click.echo(
        f"indexed {index.n_docs} docs, {len(index.vocabulary)} terms "
        f"({len(index.zero_vector_docs)} zero vectors, kernel={kernel_name()}) -> {out}"
    )


@main.command()
@click.option("--index", "index_path", required=True, type=click.Path(exists=True))
@click.option("--term", required=True)
def dump(index_path, term):
    """Print df and idf for one vocabulary term."""
    info = dump_term(load_index(index_path), term)
    if info is None:
        click.echo(f"term {term!r} not in vocabulary", err=True)
        sys.exit(1)
    click.echo(json.dumps(info, indent=2))


@main.command()
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), default=None)
@click.option("--index", "index_path", type=click.Path(exists=True), default=None)
@click.option("--policy", "policy_path", type=click.Path(exists=True), default=None)
@click.option("--call-center-number", default=None)
@click.option("--threshold", type=float, default=0.7)
def chat(corpus_path, index_path, policy_path, call_center_number, threshold):
    """Local REPL against the engine, no server."""
    if index_path:
        index = load_index(index_path)
    elif corpus_path:
        index = _index_from_corpus(corpus_path, corpus_mod.NormalizationConfig(), False)
    else:
        raise click.UsageError("one of --corpus or --index is required")
    policy = _resolve_policy(policy_path, call_center_number, threshold)
    service = ChatService(index, policy)
    click.echo(f"{index.n_docs} docs loaded; type 'exit' to quit.")
    while True:
        try:
            text = click.prompt("you", prompt_suffix="> ")
        except (EOFError, click.Abort):
            break
        if text.strip().lower() in {"exit", "quit"}:
            break
        bundle = service.handle_message(InboundMessage(sender_id="local", text=text))
        for reply in bundle.replies:
            click.echo(f"bot> {reply}")
        if bundle.confidence is not None:
            click.echo(f"     (confidence {bundle.confidence:.2f})")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), default=None)
@click.option("--index", "index_path", type=click.Path(exists=True), default=None)
@click.option("--policy", "policy_path", type=click.Path(exists=True), default=None)
@click.option("--call-center-number", default=None)
@click.option("--threshold", type=float, default=0.7)
@click.option("--port", type=int, default=None)
@click.option("--host", default="127.0.0.1")
@click.option("--idle-limit", type=float, default=None, help="Session idle limit, seconds.")
@click.option("--webchat-dir", type=click.Path(), default=None)
def serve(
    config_path,
    corpus_path,
    index_path,
    policy_path,
    call_center_number,
    threshold,
    port,
    host,
    idle_limit,
    webchat_dir,
):
    """Run the HTTP chat gateway."""
    import uvicorn

    cfg = load_config(config_path)
    corpus_path = corpus_path or cfg.corpus_path
    index_path = index_path or cfg.index_path
    policy_path = policy_path or cfg.policy_path
    port = port if port is not None else cfg.port
    idle_limit = idle_limit if idle_limit is not None else cfg.idle_limit_seconds
    webchat_dir = webchat_dir or cfg.webchat_dir

    if index_path:
        index = load_index(index_path)
    elif corpus_path:
        index = _index_from_corpus(corpus_path, corpus_mod.NormalizationConfig(), False)
    else:
        raise click.UsageError("one of --corpus/--index (or config equivalents) is required")
    policy = _resolve_policy(policy_path, call_center_number, threshold)
    service = ChatService(index, policy, idle_limit=idle_limit)
    if cfg.session_store_path and Path(cfg.session_store_path).exists():
        restored = service.load_sessions(cfg.session_store_path)
        click.echo(f"restored {restored} sessions", err=True)
    app = create_app(service, webchat_dir=webchat_dir)
    if cfg.session_store_path:
        app.add_event_handler(
            "shutdown", lambda: service.save_sessions(cfg.session_store_path)
        )
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command("eval")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--test-fraction", type=float, default=0.2)
@click.option("--seed", type=int, default=42)
@click.option("--threshold", type=float, default=0.7)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--perturb", is_flag=True)
@click.option("--svg", is_flag=True)
@click.option("--stopwords", "stopwords_path", type=click.Path(exists=True), default=None)
@click.option("--min-token-len", type=int, default=1)
def eval_cmd(
    corpus_path, test_fraction, seed, threshold, out_dir, perturb, svg, stopwords_path, min_token_len
):
    """Evaluate retrieval over a stratified split and write the report files."""
    config = _norm_config(stopwords_path, min_token_len)
    records = _load_records(corpus_path)
    docs, _ = corpus_mod.build_corpus(records, config)
    index = build_index(docs, norm_config=config)
    split = evalharness.make_split(docs, test_fraction, seed, perturb=perturb)
    # Referral texts never render during eval; the number is a placeholder.
    policy = DialoguePolicy(call_center_number="n/a", confidence_threshold=threshold)
    report = evalharness.evaluate(split, index, policy)
    written = evalharness.render_report(report, out_dir, svg=svg)
    click.echo(
        f"n_test={report.n_test} accuracy={report.accuracy:.3f} "
        f"answer_rate={report.answer_rate:.3f}"
    )
    for path in written:
        click.echo(f"wrote {path}")


def _entry():
    try:
        main(standalone_mode=True)
    except KccBotError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    _entry()
