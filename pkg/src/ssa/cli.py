"""``ssa`` command-line front door.

Every command prints JSON to stdout. Exit codes: 0 success, 1 validation
or unknown-id errors, 2 internal failures.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .agent import Agent
from .config import CONFIG_FILENAME, AgentConfig
from .errors import SsaError, StorageError
from .explanation import render_text
from .synthetic import (
    SyntheticSpec,
    evaluate_pipeline,
    generate_synthetic,
    read_dataset,
    write_dataset,
)


def _emit(doc) -> None:
    click.echo(json.dumps(doc, indent=2, default=str))


def _load_config(store: str) -> AgentConfig:
    path = Path(store) / CONFIG_FILENAME
    if path.exists():
        config = AgentConfig.load(path)
        config.store_dir = store
        return config
    return AgentConfig(store_dir=store)


def _agent(ctx: click.Context) -> Agent:
    return Agent(_load_config(ctx.obj["store"]))


def _run(fn) -> None:
    try:
        fn()
    except SsaError as exc:
        _emit(exc.to_dict())
        sys.exit(2 if isinstance(exc, StorageError) else 1)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        _emit({"error_code": "internal_error", "message": str(exc)})
        sys.exit(2)


@click.group()
@click.option(
    "--store",
    envvar="SSA_STORE",
    default=".ssa",
    show_default=True,
    help="State directory (config, event log, snapshots).",
)
@click.pass_context
def main(ctx: click.Context, store: str):
    ctx.ensure_object(dict)
    ctx.obj["store"] = store


@main.command()
@click.pass_context
def init(ctx):
    """Create the store directory with a default config."""

    def go():
        store = Path(ctx.obj["store"])
        store.mkdir(parents=True, exist_ok=True)
        config = AgentConfig(store_dir=str(store))
        config.save(store / CONFIG_FILENAME)
        _emit({"store": str(store), "config": config.to_dict()})

    _run(go)


@main.group()
def contact():
    """Manage the social background model."""


@contact.command("add")
@click.option("-f", "--file", "path", type=click.Path(exists=True), default=None)
@click.option("--json", "text", default=None, help="Inline JSON payload.")
@click.pass_context
def contact_add(ctx, path, text):
    def go():
        payload = json.loads(Path(path).read_text("utf-8") if path else text)
        agent = _agent(ctx)
        contact_id = agent.register_contact(payload)
        _emit({"contact_id": contact_id})

    _run(go)


@contact.command("list")
@click.pass_context
def contact_list(ctx):
    def go():
        agent = _agent(ctx)
        _emit({"contacts": [c.to_dict() for c in agent.state.contacts.all()]})

    _run(go)


@main.group()
def situation():
    """Record social situations."""


@situation.command("add")
@click.option("-f", "--file", "path", type=click.Path(exists=True), required=True)
@click.pass_context
def situation_add(ctx, path):
    def go():
        payload = json.loads(Path(path).read_text("utf-8"))
        agent = _agent(ctx)
        _emit(agent.add_situation(payload))

    _run(go)


@main.command()
@click.argument("situation_id")
@click.pass_context
def profile(ctx, situation_id):
    """Situation profile (Level-2 comprehension)."""

    def go():
        agent = _agent(ctx)
        result = agent.comprehension_result(situation_id)
        _emit({"situation_id": situation_id, **result.to_dict()})

    _run(go)


@main.command()
@click.pass_context
def conflicts(ctx):
    """List overlapping meetings on the agenda."""

    def go():
        agent = _agent(ctx)
        _emit({"conflicts": [c.to_dict() for c in agent.conflicts()]})

    _run(go)


@main.command()
@click.argument("conflict_id")
@click.pass_context
def suggest(ctx, conflict_id):
    """Suggest which meeting to keep for a conflict."""

    def go():
        agent = _agent(ctx)
        record = agent.suggestion_for(conflict_id)
        _emit({"decision_id": record.decision_id, **record.suggestion.to_dict()})

    _run(go)


@main.command()
@click.argument("decision_id")
@click.option("--depth", type=click.IntRange(1, 3), default=1, show_default=True)
@click.pass_context
def explain(ctx, decision_id, depth):
    """Layered explanation for a decision."""

    def go():
        agent = _agent(ctx)
        node = agent.explanation_for(decision_id, depth)
        _emit(
            {
                "decision_id": decision_id,
                "depth": depth,
                "explanation": node.to_dict(),
                "rendered": render_text(node),
            }
        )

    _run(go)


@main.command()
@click.argument("decision_id")
@click.option("--verdict", type=click.Choice(["accept", "reject"]), required=True)
@click.option("--priority", type=float, default=None, help="Corrected priority in [1, 7].")
@click.option("--profile", "profile_json", default=None, help="Corrected profile as JSON.")
@click.option("--reason", default="", help="Free-text reason.")
@click.pass_context
def feedback(ctx, decision_id, verdict, priority, profile_json, reason):
    """Record a verdict on a suggestion; corrections retrain the models."""

    def go():
        agent = _agent(ctx)
        payload: dict = {"verdict": verdict}
        if priority is not None:
            payload["corrected_priority"] = priority
        if profile_json:
            payload["corrected_profile"] = json.loads(profile_json)
        if reason:
            payload["reason"] = reason
        _emit(agent.feedback(decision_id, payload))

    _run(go)


@main.group()
def elicit():
    """Question queue for missing or uncertain information."""


@elicit.command("list")
@click.pass_context
def elicit_list(ctx):
    def go():
        agent = _agent(ctx)
        _emit({"pending": [r.to_dict() for r in agent.pending_elicitations()]})

    _run(go)


@elicit.command("answer")
@click.argument("request_id")
@click.option("-f", "--file", "path", type=click.Path(exists=True), default=None)
@click.option("--set", "pairs", multiple=True, help="field=value answer (repeatable).")
@click.pass_context
def elicit_answer(ctx, request_id, path, pairs):
    def go():
        if path:
            answers = json.loads(Path(path).read_text("utf-8"))
        else:
            answers = {}
            for pair in pairs:
                key, _, value = pair.partition("=")
                try:
                    answers[key] = json.loads(value)
                except json.JSONDecodeError:
                    answers[key] = value
        agent = _agent(ctx)
        _emit(agent.answer_elicitation(request_id, answers))

    _run(go)


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--noise", default="0,0", show_default=True, help="sigma1,sigma2")
@click.option("--out", type=click.Path(), default=None, help="Write JSON-lines dataset here.")
def simulate(n, seed, noise, out):
    """Generate a labeled synthetic dataset."""

    def go():
        sigma1, sigma2 = (float(s) for s in noise.split(","))
        records = generate_synthetic(SyntheticSpec(n=n, seed=seed, sigma1=sigma1, sigma2=sigma2))
        if out:
            write_dataset(records, out)
            _emit({"written": out, "n": len(records)})
        else:
            _emit([r.to_dict() for r in records])

    _run(go)


@main.command()
@click.option("--data", type=click.Path(exists=True), required=True)
@click.option("--split", type=float, default=0.8, show_default=True)
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def evaluate(data, split, k, seed):
    """Evaluate the two-hop pipeline on a recorded dataset."""

    def go():
        records = read_dataset(data)
        _emit(evaluate_pipeline(records, split=split, k=k, seed=seed))

    _run(go)


@main.command()
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.pass_context
def serve(ctx, port, host):
    """Run the HTTP API."""

    def go():
        import uvicorn

        from .service import create_app

        agent = Agent(_load_config(ctx.obj["store"]))
        uvicorn.run(create_app(agent), host=host, port=port, log_level="warning")

    _run(go)


if __name__ == "__main__":
    main()
