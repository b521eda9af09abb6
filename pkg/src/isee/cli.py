"""Command-line access to the engine: validate fixtures, run queries,
produce adaptation plans and administer the case base without the service.

Every subcommand reads the same JSON documents as the HTTP API and, with
--json, emits byte-identical payloads. Exit codes: 0 success, 1 engine
error, 2 usage error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .bt import BehaviorTree
from .config import Config
from .engine import Engine
from .errors import IseeError
from .payloads import (
    coverage_payload,
    dumps_canonical,
    explainer_ranking_payload,
    outcome_payload,
    plan_payload,
    retrieval_payload,
    subtree_ranking_payload,
    trace_payload,
    validation_payload,
)
from .retention import feedback_from_doc
from .service import parse_subtree


def _read_json(path: str):
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def _emit(ctx: click.Context, payload: dict, human: str) -> None:
    if ctx.obj["json"]:
        sys.stdout.write(dumps_canonical(payload))
    else:
        click.echo(human)


def _engine(ctx: click.Context) -> Engine:
    if ctx.obj.get("engine") is None:
        ctx.obj["engine"] = Engine(ctx.obj["config"])
    return ctx.obj["engine"]


def _load_query(engine: Engine, path: str):
    doc = _read_json(path)
    if "description" in doc:
        return engine.parse_case(doc)
    return engine.parse_query(doc)


@click.group()
@click.option("--data-dir", type=click.Path(), default=None, help="Data directory (default: packaged fixtures or ISEE_DATA_DIR).")
@click.option("--json", "as_json", is_flag=True, help="Emit machine-readable JSON payloads.")
@click.pass_context
def main(ctx: click.Context, data_dir: str | None, as_json: bool):
    """Explanation-experience workbench."""
    config = Config()
    if data_dir:
        config = Config(data_dir=Path(data_dir))
    ctx.obj = {"config": config, "json": as_json, "engine": None}


@main.command()
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--token", default=None)
@click.pass_context
def serve(ctx: click.Context, host: str | None, port: int | None, token: str | None):
    """Run the HTTP service."""
    from . import service

    config = ctx.obj["config"]
    if host:
        config.host = host
    if port:
        config.port = port
    if token:
        config.token = token
    service.run(config)


@main.command()
@click.option("-q", "--query", "query_path", required=True, type=click.Path(exists=True))
@click.option("-k", type=int, default=3, show_default=True)
@click.pass_context
def query(ctx: click.Context, query_path: str, k: int):
    """Retrieve the k most similar cases for a query description."""
    engine = _engine(ctx)
    result = engine.retrieve(_load_query(engine, query_path), k)
    lines = [f"{'rank':>4}  {'case id':28s} {'score':>7}"]
    for rank, entry in enumerate(result.ranked, start=1):
        lines.append(f"{rank:>4}  {entry.case_id:28s} {entry.score:7.4f}")
    _emit(ctx, retrieval_payload(result), "\n".join(lines))


@main.command()
@click.option("-q", "--query", "query_path", required=True, type=click.Path(exists=True))
@click.option("--cases", "case_ids", required=True, help="Comma-separated case ids, best first.")
@click.option("--intent", required=True)
@click.pass_context
def adapt(ctx: click.Context, query_path: str, case_ids: str, intent: str):
    """Build a failure-driven adaptation plan from chosen neighbours."""
    engine = _engine(ctx)
    case = _load_query(engine, query_path)
    ids = [cid.strip() for cid in case_ids.split(",") if cid.strip()]
    topk = engine.rescore(case, ids)
    plan = engine.adapt(case, topk, intent)
    lines = [f"base case: {plan.base_case}", f"unmet: {', '.join(sorted(plan.unmet)) or '-'}"]
    for match in plan.matches:
        lines.append(f"  {match.provenance}")
    lines.append(f"residual unmet: {', '.join(sorted(plan.residual_unmet)) or '-'}")
    _emit(ctx, plan_payload(plan), "\n".join(lines))


@main.group()
def substitute():
    """Substitution rankings for explainers and subtrees."""


@substitute.command("explainer")
@click.option("--target", required=True, help="Explainer id to substitute.")
@click.option("-q", "--query", "query_path", required=True, type=click.Path(exists=True))
@click.pass_context
def substitute_explainer(ctx: click.Context, target: str, query_path: str):
    engine = _engine(ctx)
    case = _load_query(engine, query_path)
    ranking = engine.rank_explainer_substitutes(target, case)
    lines = [f"substitutes for {target}:"]
    for entry in ranking.ranked[:10]:
        badge = "" if entry.applicability.applicable else "  [warnings]"
        lines.append(f"  {entry.candidate_id:24s} {entry.score:6.4f}{badge}")
    _emit(ctx, explainer_ranking_payload(ranking), "\n".join(lines))


@substitute.command("subtree")
@click.option("--subtree", "subtree_path", required=True, type=click.Path(exists=True))
@click.option("-k", type=int, default=5, show_default=True)
@click.pass_context
def substitute_subtree(ctx: click.Context, subtree_path: str, k: int):
    engine = _engine(ctx)
    target = parse_subtree(_read_json(subtree_path))
    ranking = engine.rank_subtree_substitutes(target, k)
    lines = [f"subtree substitutes for {ranking.target_question}:"]
    for entry in ranking.ranked:
        lines.append(f"  {entry.origin_case:28s} {entry.question:32s} {entry.score:6.4f}")
    _emit(ctx, subtree_ranking_payload(ranking), "\n".join(lines))


@main.group()
def bt():
    """Strategy tree tools."""


@bt.command("validate")
@click.argument("tree_path", type=click.Path(exists=True))
@click.pass_context
def bt_validate(ctx: click.Context, tree_path: str):
    engine = _engine(ctx)
    tree = BehaviorTree.from_doc(_read_json(tree_path))
    issues = engine.validate_bt(tree)
    if issues:
        human = "\n".join(f"{issue.kind} at {issue.path}: {issue.detail}" for issue in issues)
    else:
        human = "valid"
    _emit(ctx, validation_payload(issues), human)
    if issues:
        sys.exit(1)


@bt.command("simulate")
@click.argument("tree_path", type=click.Path(exists=True))
@click.option("--script", required=True, help="Comma-separated tokens (question ids or 'variant').")
@click.pass_context
def bt_simulate(ctx: click.Context, tree_path: str, script: str):
    engine = _engine(ctx)
    tree = BehaviorTree.from_doc(_read_json(tree_path))
    tokens = [token.strip() for token in script.split(",") if token.strip()]
    trace = engine.simulate_bt(tree, tokens)
    _emit(ctx, trace_payload(trace), " -> ".join(trace) if trace else "(empty trace)")


@main.group()
def feedback():
    """Stakeholder feedback tools."""


@feedback.command("aggregate")
@click.argument("responses_path", type=click.Path(exists=True))
@click.pass_context
def feedback_aggregate(ctx: click.Context, responses_path: str):
    engine = _engine(ctx)
    docs = _read_json(responses_path)
    responses = [feedback_from_doc(doc, f"responses[{i}]") for i, doc in enumerate(docs)]
    outcome = engine.aggregate_feedback(responses)
    lines = [
        f"{dimension:12s} {mean:5.3f}"
        for dimension, mean in sorted(outcome.dimension_means.items())
    ]
    lines.append(f"respondents: {outcome.respondent_count}")
    _emit(ctx, outcome_payload(outcome), "\n".join(lines))


@main.command()
@click.argument("case_path", type=click.Path(exists=True))
@click.option("--consent/--no-consent", default=False)
@click.pass_context
def retain(ctx: click.Context, case_path: str, consent: bool):
    """Anonymise and retain a complete case (requires --consent)."""
    engine = _engine(ctx)
    case = engine.parse_case(_read_json(case_path))
    case_id = engine.retain(case, consent)
    _emit(
        ctx,
        {"case_id": case_id, "revision": engine.case_base.revision},
        f"retained as {case_id}",
    )


@main.group()
def casebase():
    """Case base administration."""


@casebase.command("stats")
@click.pass_context
def casebase_stats(ctx: click.Context):
    engine = _engine(ctx)
    strata: dict[str, int] = {}
    for case_id in engine.case_base.ids():
        dt = engine.case_base.get(case_id).description.dataset_type
        strata[dt] = strata.get(dt, 0) + 1
    payload = {
        "cases": len(engine.case_base),
        "revision": engine.case_base.revision,
        "strata": dict(sorted(strata.items())),
    }
    human = "\n".join(
        [f"cases: {payload['cases']}", f"revision: {payload['revision']}"]
        + [f"  {dt:12s} {count}" for dt, count in payload["strata"].items()]
    )
    _emit(ctx, payload, human)


@casebase.command("coverage")
@click.option("--threshold", type=float, default=0.7, show_default=True)
@click.pass_context
def casebase_coverage(ctx: click.Context, threshold: float):
    engine = _engine(ctx)
    report = engine.coverage(threshold)
    lines = [f"threshold: {threshold}"]
    for case_id, count in sorted(report.neighbour_counts.items()):
        marker = "  (isolated)" if count == 0 else ""
        lines.append(f"  {case_id:28s} {count}{marker}")
    _emit(ctx, coverage_payload(report), "\n".join(lines))


def run_main() -> int:
    """Entry point wrapper turning engine errors into exit code 1."""
    try:
        main(standalone_mode=False)
    except IseeError as exc:
        sys.stderr.write(f"error [{exc.code}]: {exc.message}\n")
        for detail in exc.details:
            sys.stderr.write(f"  - {detail}\n")
        return 1
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 2
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 1
    except SystemExit as exc:
        return int(exc.code or 0)
    return 0


if __name__ == "__main__":
    sys.exit(run_main())
