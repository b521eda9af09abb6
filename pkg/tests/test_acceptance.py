"""Acceptance suite: one test per release criterion, each with a hard
runtime budget and an independent oracle where the criterion calls for one.
"""

from __future__ import annotations

import random
import time
from contextlib import contextmanager

import pytest
from fastapi.testclient import TestClient

from isee.adaptation import adapt, stable_match
from isee.bt import covered_questions, simulate, to_graph
from isee.cases import Case
from isee.config import Config
from isee.errors import EmptyCaseBase
from isee.retention import CaseBase, anonymize
from isee.retrieval import EM, QI, WP, default_schema, global_similarity, retrieve
from isee.revision import make_node_similarity, tree_edit_distance
from isee.service import create_app

from .conftest import ACCEPTANCE_RESULTS, make_description_doc, question
from .generators import (
    QUESTIONS,
    random_bt_node,
    random_case_base,
    random_query_case,
    random_taxonomy,
)
from .oracles import max_assignment_size, oracle_ged, oracle_lca, oracle_rank
from .test_adaptation import build_case, stability_violations, INTENT
from .test_revision import graph_of


@contextmanager
def criterion(number: int, description: str, budget_seconds: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        ACCEPTANCE_RESULTS.append(
            (number, description, time.perf_counter() - start, "FAIL")
        )
        raise
    elapsed = time.perf_counter() - start
    status = "PASS" if elapsed < budget_seconds else "FAIL (over budget)"
    ACCEPTANCE_RESULTS.append((number, description, elapsed, status))
    assert elapsed < budget_seconds, (
        f"criterion {number} exceeded its {budget_seconds}s budget: {elapsed:.2f}s"
    )


def test_criterion_1_retrieval_oracle_equivalence(taxonomies):
    with criterion(1, "retrieval equals brute-force ranking on 200 random bases", 60.0):
        rng = random.Random(20_240_001)
        features = [
            (WP, lambda d: d.ai_task),
            (WP, lambda d: d.ai_method),
            (QI, lambda d: d.technical_facilities),
            (QI, lambda d: d.all_user_questions()),
            (EM, lambda d: d.model_framework),
            (EM, lambda d: d.model_access),
            (EM, lambda d: d.has_training_data),
        ]
        for round_index in range(200):
            size = rng.randint(1, 100)
            cases = random_case_base(rng, size, ["GradCAM"])
            query = random_query_case(rng)
            k = rng.randint(1, 10)
            expected = oracle_rank(
                query.description,
                {cid: case.description for cid, case in cases.items()},
                k,
                taxonomies.resolve,
                features,
            )
            if not expected:
                with pytest.raises(EmptyCaseBase):
                    retrieve(query, cases, k, taxonomies)
                continue
            result = retrieve(query, cases, k, taxonomies)
            assert [entry.case_id for entry in result.ranked] == [
                cid for cid, _ in expected
            ], f"ranking diverged on round {round_index}"
            for entry, (_, score) in zip(result.ranked, expected):
                assert entry.score == pytest.approx(score)


def test_criterion_2_failure_driven_adaptation_reconstruction(taxonomies):
    with criterion(2, "three-neighbour adaptation covers why/what/how with provenance", 1.0):
        query = build_case("q", ["Why", "What", "How"], None)
        nn1 = build_case("nn1", ["How"], ["How"])
        nn2 = build_case("nn2", ["Why"], ["Why"], model_framework="pytorch")
        nn3 = build_case(
            "nn3", ["What"], ["What"], model_framework="pytorch", model_access="file"
        )
        cases = {c.id: c for c in (nn1, nn2, nn3)}
        topk = retrieve(query, cases, 3, taxonomies)
        assert topk.case_ids == ["nn1", "nn2", "nn3"]
        plan = adapt(query, topk, cases, INTENT, taxonomies)
        assert plan.residual_unmet == frozenset()
        provenance = {match.question: match.origin_case for match in plan.matches}
        assert provenance == {question("Why"): "nn2", question("What"): "nn3"}
        assert covered_questions(plan.adapted) == {
            question("Why"), question("What"), question("How"),
        }


def test_criterion_3_strategy_simulation_reconstruction(engine):
    with criterion(3, "fixture strategy emits the three-step explainer trace", 1.0):
        fixture = engine.case_base.get("c-radiograph-fracture")
        tree = fixture.solution["Intent/Transparency"]
        trace = simulate(tree, [question("Why"), "variant", question("What")])
        assert trace == ["GradCAM", "NearestNeighbours", "IntegratedGradients"]


def test_criterion_4_taxonomy_similarity_properties():
    with criterion(4, "similarity properties and lca oracle on 100 random taxonomies", 10.0):
        rng = random.Random(20_240_004)
        for _ in range(100):
            tree = random_taxonomy(rng, rng.randint(1, 50))
            concepts = sorted(tree.concepts)
            for concept in concepts:
                assert tree.wu_palmer(concept, concept) == 1.0
            if len(concepts) <= 14:
                pairs = [(a, b) for a in concepts for b in concepts]
            else:
                pairs = [
                    (rng.choice(concepts), rng.choice(concepts)) for _ in range(200)
                ]
            for a, b in pairs:
                forward = tree.wu_palmer(a, b)
                assert 0.0 < forward <= 1.0
                assert forward == pytest.approx(tree.wu_palmer(b, a))
                assert tree.lca(a, b) == oracle_lca(tree, a, b)


def test_criterion_5_stable_matching_soundness(taxonomies):
    with criterion(5, "no blocking pairs in 500 random adaptations; optimal coverage", 30.0):
        rng = random.Random(20_240_005)
        names = ["Why", "WhyNot", "What", "WhatIf", "How", "HowTo"]

        for _ in range(500):
            query_names = rng.sample(names, rng.randint(1, 6))
            cases = {"nn1": build_case("nn1", query_names[:1], rng.sample(names, rng.randint(0, 2)))}
            for index in range(rng.randint(1, 5)):
                cases[f"nn{index + 2}"] = build_case(
                    f"nn{index + 2}", query_names[:1], rng.sample(names, rng.randint(0, 3)),
                    model_framework=rng.choice(["pytorch", "sklearn"]),
                )
            query = build_case("q", query_names, None)
            topk = retrieve(query, cases, len(cases), taxonomies)
            plan = adapt(query, topk, cases, INTENT, taxonomies)
            if plan.preferences is None:
                continue
            unmet = sorted(plan.unmet)
            pool_size = max(
                (c + 1 for ranking in plan.preferences.question_rankings.values() for c in ranking),
                default=0,
            )
            candidates = [None] * pool_size
            matching = stable_match(unmet, candidates, plan.preferences)
            assert {m.question for m in plan.matches} == set(matching.pairs)
            assert stability_violations(unmet, candidates, plan.preferences, matching.pairs) == []

        # coverage optimality against the exhaustive assignment oracle
        small_names = names[:5]
        for _ in range(120):
            query_names = rng.sample(small_names, rng.randint(1, 5))
            query = build_case("q", query_names, None)
            cases = {"nn1": build_case("nn1", query_names[:1], [])}
            union_cover: set[str] = set()
            for index in range(rng.randint(1, 4)):
                covers = rng.sample(small_names, rng.randint(0, 3))
                union_cover |= {question(name) for name in covers}
                cases[f"nn{index + 2}"] = build_case(
                    f"nn{index + 2}", query_names[:1], covers, model_framework="pytorch"
                )
            topk = retrieve(query, cases, len(cases), taxonomies)
            plan = adapt(query, topk, cases, INTENT, taxonomies)
            optimum = None
            if plan.preferences is not None and plan.unmet:
                table = plan.preferences
                pool = max(
                    (c + 1 for ranking in table.question_rankings.values() for c in ranking),
                    default=0,
                )
                optimum = max_assignment_size(
                    sorted(plan.unmet), range(pool), table.compatible
                )
                # a stable matching never exceeds the assignment optimum
                assert len(plan.matches) <= optimum
            if {question(name) for name in query_names} <= union_cover:
                # full neighbourhood coverage: the oracle confirms a complete
                # assignment exists and the plan leaves nothing unmet
                if optimum is not None:
                    assert optimum == len(plan.unmet)
                assert plan.residual_unmet == frozenset()


def test_criterion_6_edit_distance_correctness(taxonomies, library):
    with criterion(6, "exact edit distance matches exhaustive enumeration", 60.0):
        rng = random.Random(20_240_006)
        node_sim = make_node_similarity(taxonomies, library)
        ids = sorted(library)[:6]
        for _ in range(100):
            t1 = random_bt_node(rng, rng.randint(1, 6), QUESTIONS, ids)
            t2 = random_bt_node(rng, rng.randint(1, 6), QUESTIONS, ids)
            g1, g2 = to_graph(t1), to_graph(t2)
            nodes1, parents1 = graph_of(t1)
            nodes2, parents2 = graph_of(t2)
            exact = tree_edit_distance(g1, g2, node_sim)
            assert exact >= 0.0
            assert exact == pytest.approx(
                oracle_ged(nodes1, parents1, nodes2, parents2, node_sim)
            )
            assert exact == pytest.approx(tree_edit_distance(g2, g1, node_sim))
            assert tree_edit_distance(g1, g1, node_sim) == pytest.approx(0.0)


def test_criterion_7_retention_durability_and_neutrality(tmp_path, taxonomies, engine):
    with criterion(7, "retained case survives restart; anonymisation score-neutral", 20.0):
        # durability: retain, reopen the directory, retrieve the new case
        from .test_retention import complete_case

        directory = tmp_path / "cb"
        base = CaseBase(path=directory)
        case = complete_case()
        case_id = base.retain(case, consent=True)
        reopened = CaseBase.open(directory)
        assert case_id in reopened
        result = retrieve(
            Case(id="q", description=case.description), reopened.snapshot(), 1, taxonomies
        )
        assert result.top().case_id == case_id
        assert result.top().score == pytest.approx(1.0)

        # neutrality: anonymisation never changes a retrieval score
        rng = random.Random(20_240_007)
        schema = default_schema()
        solution = case.solution
        outcome = case.outcome
        for index in range(100):
            description = random_query_case(rng).description
            complete = Case(
                id=f"c-{index}", description=description, solution=solution, outcome=outcome
            )
            redacted = anonymize(complete)
            probe = random_query_case(rng, description.dataset_type).description
            assert global_similarity(probe, description, schema, taxonomies) == pytest.approx(
                global_similarity(probe, redacted.description, schema, taxonomies)
            )


def test_criterion_8_end_to_end_service_workflow(data_dir):
    with criterion(8, "full workflow over the HTTP API alone", 5.0):
        config = Config(data_dir=data_dir, token="acceptance-token")
        app = create_app(config)
        auth = {"Authorization": "Bearer acceptance-token"}
        with TestClient(app) as client:
            description = make_description_doc(
                technical_facilities=[
                    "TechnicalFacility/WebDashboard", "TechnicalFacility/RestApi",
                ],
                personas=[{
                    "name": "Clinician",
                    "intents": [{
                        "label": "Intent/Transparency",
                        "user_questions": [
                            question("Why"), question("What"), question("How"),
                        ],
                    }],
                }],
            )

            # retrieve
            retrieved = client.post(
                "/query", json={"description": description, "k": 3}, headers=auth
            )
            assert retrieved.status_code == 200
            ranked = retrieved.json()["ranked"]
            assert len(ranked) == 3
            case_ids = [entry["case_id"] for entry in ranked]

            # reuse (adapt)
            adapted = client.post(
                "/adapt",
                json={"query": description, "case_ids": case_ids,
                      "intent": "Intent/Transparency"},
                headers=auth,
            )
            assert adapted.status_code == 200
            plan = adapted.json()
            assert plan["residual_unmet"] == []
            adapted_tree = plan["adapted"]

            # revise (explainer substitution on a selected node)
            substitution = client.post(
                "/substitutions/explainer",
                json={"target_id": "IntegratedGradients", "description": description},
                headers=auth,
            )
            assert substitution.status_code == 200
            assert substitution.json()["ranked"]

            # validate the revised tree before saving
            validation = client.post(
                "/bt/validate", json={"tree": adapted_tree}, headers=auth
            )
            assert validation.json()["valid"] is True

            # stakeholder feedback -> outcome
            responses = [
                {"respondent": "s1",
                 "item_scores": {"L1": 4, "L2": 3, "U1": 4, "F1": 3, "E1": 3}},
                {"respondent": "s2",
                 "item_scores": {"L1": 3, "L2": 3, "U1": 3, "F1": 4, "E1": 2}},
            ]
            feedback = client.post(
                "/feedback", json={"case_id": "draft", "responses": responses}, headers=auth
            )
            assert feedback.status_code == 200
            outcome = feedback.json()

            # retain with consent
            case_doc = {
                "description": description,
                "solution": {"Intent/Transparency": adapted_tree},
                "outcome": {
                    "dimension_means": outcome["dimension_means"],
                    "respondent_count": outcome["respondent_count"],
                },
            }
            retained = client.post(
                "/cases/retain", json={"case": case_doc, "consent": True}, headers=auth
            )
            assert retained.status_code == 201
            new_id = retained.json()["case_id"]

            # the retained case is now the best match for its own description
            again = client.post(
                "/query", json={"description": description, "k": 1}, headers=auth
            )
            assert again.status_code == 200
            top = again.json()["ranked"][0]
            assert top["case_id"] == new_id
            assert top["score"] == pytest.approx(1.0)

            # and it is served back anonymised
            fetched = client.get(f"/cases/{new_id}", headers=auth)
            assert fetched.status_code == 200
            assert fetched.json()["anonymised"] is True
