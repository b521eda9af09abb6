"""HTTP facade exposing the full retrieve/reuse/revise/retain workflow.

All payloads are the same JSON documents used on disk and by the CLI, so
every client shares one schema. Authentication is a static bearer token
from config; only the health endpoint is open. Engine errors map to 4xx
responses with a stable machine-readable code - malformed input never
produces a 500.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field

from fastapi import Depends, FastAPI, HTTPException, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .bt import BehaviorTree, QuestionSubtree, node_from_doc
from .cases import explainer_to_doc
from .config import Config
from .engine import Engine
from .errors import IseeError, SchemaViolation
from .payloads import (
    case_payload,
    coverage_payload,
    dumps_canonical,
    error_payload,
    explainer_ranking_payload,
    outcome_payload,
    plan_payload,
    retrieval_payload,
    subtree_ranking_payload,
    trace_payload,
    validation_payload,
)
from .retention import feedback_from_doc

# Engine errors that indicate a missing resource rather than a bad request.
NOT_FOUND_CODES = {"EmptyCaseBase", "NotFound"}
CONFLICT_CODES = {"DuplicateId"}


@dataclass
class ApiSession:
    """Per-request workspace: authenticated principal plus a case-base
    snapshot, so one request never sees a half-applied retention."""

    principal: str
    engine: Engine
    session_id: str = field(default_factory=lambda: uuid.uuid4().hex[:8])


def _json(payload: dict, status_code: int = 200) -> Response:
    return Response(
        content=dumps_canonical(payload),
        status_code=status_code,
        media_type="application/json",
    )


def _error_response(exc: IseeError) -> Response:
    if exc.code in NOT_FOUND_CODES:
        status = 404
    elif exc.code in CONFLICT_CODES:
        status = 409
    else:
        status = 400
    return _json(error_payload(exc.code, exc.message, exc.details), status)


class QueryRequest(BaseModel):
    description: dict
    k: int = 3


class AdaptRequest(BaseModel):
    query: dict
    case_ids: list[str]
    intent: str


class ExplainerSubstitutionRequest(BaseModel):
    target_id: str
    description: dict


class SubtreeSubstitutionRequest(BaseModel):
    subtree: dict
    k: int = 5


class TreeRequest(BaseModel):
    tree: dict


class SimulateRequest(BaseModel):
    tree: dict
    script: list[str]


class FeedbackRequest(BaseModel):
    case_id: str
    responses: list[dict]


class RetainRequest(BaseModel):
    case: dict
    consent: bool


def parse_subtree(doc: dict) -> QuestionSubtree:
    if not isinstance(doc, dict) or "tree" not in doc or "question" not in doc:
        raise SchemaViolation("subtree payload needs 'question' and 'tree' fields")
    return QuestionSubtree(
        question=doc["question"],
        tree=node_from_doc(doc["tree"], "subtree.tree"),
        origin_case=doc.get("origin_case"),
    )


def create_app(config: Config | None = None, engine: Engine | None = None) -> FastAPI:
    config = config or Config()
    engine = engine or Engine(config)
    app = FastAPI(title="isee", version="0.1.0", docs_url=None, redoc_url=None)
    app.state.engine = engine
    app.state.config = config

    app.add_middleware(
        CORSMiddleware,
        allow_origins=[config.cors_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(IseeError)
    async def handle_engine_error(request: Request, exc: IseeError):
        return _error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def handle_body_error(request: Request, exc: RequestValidationError):
        details = [
            f"{'.'.join(str(part) for part in err['loc'])}: {err['msg']}"
            for err in exc.errors()
        ]
        return _json(error_payload("SchemaViolation", "invalid request body", details), 400)

    def session(request: Request) -> ApiSession:
        header = request.headers.get("authorization", "")
        if header != f"Bearer {config.token}":
            raise HTTPException(status_code=401, detail="missing or invalid bearer token")
        return ApiSession(principal="token-client", engine=engine)

    @app.get("/health")
    def health():
        return _json({"status": "ok", "cases": len(engine.case_base)})

    @app.get("/taxonomy")
    def taxonomy(api: ApiSession = Depends(session)):
        trees = []
        for name in sorted(engine.taxonomies.trees):
            tree = engine.taxonomies.trees[name]
            trees.append(
                {
                    "name": tree.name,
                    "root": tree.root,
                    "edges": sorted([parent, child] for child, parent in tree.parent_of.items()),
                    "labels": dict(sorted(tree.labels.items())),
                }
            )
        return _json({"trees": trees})

    @app.get("/explainers")
    def explainers(api: ApiSession = Depends(session)):
        return _json(
            {"explainers": [explainer_to_doc(engine.library[eid]) for eid in sorted(engine.library)]}
        )

    @app.post("/query")
    def query(body: QueryRequest, api: ApiSession = Depends(session)):
        if body.k < 1:
            raise SchemaViolation("k must be >= 1")
        case = engine.parse_query(body.description)
        return _json(retrieval_payload(engine.retrieve(case, body.k)))

    @app.post("/adapt")
    def adapt(body: AdaptRequest, api: ApiSession = Depends(session)):
        if not body.case_ids:
            raise SchemaViolation("case_ids must be non-empty")
        case = engine.parse_query(body.query)
        snapshot = engine.case_base.snapshot()
        missing = [cid for cid in body.case_ids if cid not in snapshot]
        if missing:
            return _json(
                error_payload("NotFound", f"unknown case ids: {missing}", missing), 404
            )
        topk = engine.rescore(case, body.case_ids)
        return _json(plan_payload(engine.adapt(case, topk, body.intent)))

    @app.post("/substitutions/explainer")
    def substitute_explainer(
        body: ExplainerSubstitutionRequest, api: ApiSession = Depends(session)
    ):
        case = engine.parse_query(body.description)
        ranking = engine.rank_explainer_substitutes(body.target_id, case)
        return _json(explainer_ranking_payload(ranking))

    @app.post("/substitutions/subtree")
    def substitute_subtree(body: SubtreeSubstitutionRequest, api: ApiSession = Depends(session)):
        if body.k < 1:
            raise SchemaViolation("k must be >= 1")
        target = parse_subtree(body.subtree)
        return _json(subtree_ranking_payload(engine.rank_subtree_substitutes(target, body.k)))

    @app.post("/bt/validate")
    def bt_validate(body: TreeRequest, api: ApiSession = Depends(session)):
        tree = BehaviorTree.from_doc(body.tree)
        return _json(validation_payload(engine.validate_bt(tree)))

    @app.post("/bt/simulate")
    def bt_simulate(body: SimulateRequest, api: ApiSession = Depends(session)):
        tree = BehaviorTree.from_doc(body.tree)
        return _json(trace_payload(engine.simulate_bt(tree, body.script)))

    @app.post("/feedback")
    def feedback(body: FeedbackRequest, api: ApiSession = Depends(session)):
        responses = [
            feedback_from_doc(doc, f"responses[{i}]") for i, doc in enumerate(body.responses)
        ]
        outcome = engine.aggregate_feedback(responses)
        return _json(outcome_payload(outcome, case_id=body.case_id))

    @app.post("/cases/retain")
    def retain(body: RetainRequest, api: ApiSession = Depends(session)):
        case = engine.parse_case(body.case)
        case_id = engine.retain(case, body.consent)
        return _json({"case_id": case_id, "revision": engine.case_base.revision}, 201)

    @app.get("/cases/{case_id}")
    def get_case(case_id: str, api: ApiSession = Depends(session)):
        case = engine.case_base.get(case_id)
        if case is None:
            return _json(error_payload("NotFound", f"no case {case_id!r}"), 404)
        return _json(case_payload(case))

    @app.get("/casebase/coverage")
    def coverage(threshold: float = 0.7, api: ApiSession = Depends(session)):
        if not (0.0 <= threshold <= 1.0):
            raise SchemaViolation("threshold must be within [0, 1]")
        return _json(coverage_payload(engine.coverage(threshold)))

    return app


def run(config: Config | None = None) -> None:
    import uvicorn

    config = config or Config()
    uvicorn.run(create_app(config), host=config.host, port=config.port)
