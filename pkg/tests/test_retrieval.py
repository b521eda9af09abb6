from __future__ import annotations

import random

import pytest

from isee.cases import Case, case_from_doc
from isee.errors import EmptyCaseBase, MetricTypeMismatch
from isee.retrieval import (
    EM,
    QI,
    WP,
    SchemaFeature,
    default_schema,
    feature_scores,
    global_similarity,
    local_similarity,
    retrieve,
)

from .conftest import make_description_doc, question
from .generators import random_case_base, random_query_case
from .oracles import oracle_rank


def desc(**overrides):
    return case_from_doc({"description": make_description_doc(**overrides)}).description


class TestLocalSimilarity:
    def test_qi_intersection_over_query_size(self, taxonomies):
        feature = SchemaFeature("user_questions", QI, lambda d: d.all_user_questions())
        score = local_similarity(
            feature,
            {question("Why"), question("What"), question("How")},
            {question("Why"), question("How")},
            taxonomies,
        )
        assert score == pytest.approx(2 / 3)

    def test_qi_empty_query_is_vacuous(self, taxonomies):
        feature = SchemaFeature("facilities", QI, lambda d: d.technical_facilities)
        assert local_similarity(feature, set(), {question("Why")}, taxonomies) == 1.0

    def test_em_string_match(self, taxonomies):
        feature = SchemaFeature("model_access", EM, lambda d: d.model_access)
        assert local_similarity(feature, "predict-api", "predict-api", taxonomies) == 1.0
        assert local_similarity(feature, "predict-api", "file", taxonomies) == 0.0

    def test_wp_uses_taxonomy(self, taxonomies):
        feature = SchemaFeature("ai_task", WP, lambda d: d.ai_task, tree="AITask")
        score = local_similarity(
            feature, "AITask/ImageClassification", "AITask/BinaryClassification", taxonomies
        )
        assert score == pytest.approx(2 / 3)

    def test_type_mismatch_raises(self, taxonomies):
        feature = SchemaFeature("ai_task", WP, lambda d: d.ai_task)
        with pytest.raises(MetricTypeMismatch):
            local_similarity(feature, {"a-set"}, "AITask/Clustering", taxonomies)
        qi_feature = SchemaFeature("facilities", QI, lambda d: d.technical_facilities)
        with pytest.raises(MetricTypeMismatch):
            local_similarity(qi_feature, "not-a-set", "neither", taxonomies)


class TestGlobalSimilarity:
    def test_identity_scores_one(self, taxonomies):
        d = desc()
        assert global_similarity(d, d, default_schema(), taxonomies) == pytest.approx(1.0)

    def test_five_feature_hand_example(self, taxonomies):
        # schema of five features; the two descriptions differ only in user
        # questions with an overlap of one half
        schema = [
            SchemaFeature("ai_task", WP, lambda d: d.ai_task),
            SchemaFeature("ai_method", WP, lambda d: d.ai_method),
            SchemaFeature("user_questions", QI, lambda d: d.all_user_questions()),
            SchemaFeature("model_framework", EM, lambda d: d.model_framework),
            SchemaFeature("model_access", EM, lambda d: d.model_access),
        ]
        left = desc()  # asks Why and What
        right = desc(
            personas=[{
                "name": "Clinician",
                "intents": [{
                    "label": "Intent/Transparency",
                    "user_questions": [question("Why"), question("How")],
                }],
            }]
        )
        score = global_similarity(left, right, schema, taxonomies)
        assert score == pytest.approx((4 + 0.5) / 5)

    def test_qi_features_are_intentionally_asymmetric(self, taxonomies):
        left = desc()
        right = desc(
            personas=[{
                "name": "Clinician",
                "intents": [{
                    "label": "Intent/Transparency",
                    "user_questions": [question("Why")],
                }],
            }]
        )
        schema = default_schema()
        forward = feature_scores(left, right, schema, taxonomies)
        backward = feature_scores(right, left, schema, taxonomies)
        assert forward["user_questions"] == pytest.approx(0.5)
        assert backward["user_questions"] == pytest.approx(1.0)
        for feature in schema:
            if feature.metric != QI:
                assert forward[feature.name] == pytest.approx(backward[feature.name])

    def test_scores_stay_in_unit_interval(self, taxonomies):
        rng = random.Random(31)
        schema = default_schema()
        for _ in range(40):
            a = random_query_case(rng).description
            b = random_query_case(rng).description
            for value in feature_scores(a, b, schema, taxonomies).values():
                assert 0.0 <= value <= 1.0

    def test_weights_default_to_uniform(self, taxonomies):
        a, b = desc(), desc(model_framework="pytorch")
        schema = default_schema()
        unweighted = global_similarity(a, b, schema, taxonomies)
        weighted = global_similarity(
            a, b, schema, taxonomies, weights={f.name: 1.0 for f in schema}
        )
        assert unweighted == pytest.approx(weighted)


class TestRetrieve:
    def test_dataset_type_filter_is_hard(self, taxonomies):
        rng = random.Random(11)
        cases = {}
        for i in range(3):
            case = random_query_case(rng, dataset_type="image")
            cases[f"img-{i}"] = Case(id=f"img-{i}", description=case.description)
        for i in range(2):
            case = random_query_case(rng, dataset_type="text")
            cases[f"txt-{i}"] = Case(id=f"txt-{i}", description=case.description)
        query = random_query_case(rng, dataset_type="image")
        result = retrieve(query, cases, 3, taxonomies)
        assert len(result.ranked) == 3
        assert all(entry.case_id.startswith("img-") for entry in result.ranked)

    def test_k_one_returns_single_top(self, taxonomies):
        rng = random.Random(12)
        cases = {
            f"c-{i}": Case(id=f"c-{i}", description=random_query_case(rng, "tabular").description)
            for i in range(6)
        }
        query = random_query_case(rng, "tabular")
        top1 = retrieve(query, cases, 1, taxonomies)
        top5 = retrieve(query, cases, 5, taxonomies)
        assert len(top1.ranked) == 1
        assert top1.top().case_id == top5.top().case_id
        assert top1.top().score == max(entry.score for entry in top5.ranked)

    def test_empty_candidate_set_raises(self, taxonomies):
        rng = random.Random(13)
        cases = {
            "c-0": Case(id="c-0", description=random_query_case(rng, "text").description)
        }
        query = random_query_case(rng, "image")
        with pytest.raises(EmptyCaseBase):
            retrieve(query, cases, 3, taxonomies)

    def test_fewer_candidates_than_k(self, taxonomies):
        rng = random.Random(14)
        cases = {
            f"c-{i}": Case(id=f"c-{i}", description=random_query_case(rng, "image").description)
            for i in range(2)
        }
        query = random_query_case(rng, "image")
        assert len(retrieve(query, cases, 10, taxonomies).ranked) == 2

    def test_identity_query_ranks_first_with_full_score(self, taxonomies):
        rng = random.Random(15)
        cases = {
            f"c-{i}": Case(id=f"c-{i}", description=random_query_case(rng, "image").description)
            for i in range(5)
        }
        target = cases["c-3"]
        query = Case(id="q", description=target.description)
        result = retrieve(query, cases, 1, taxonomies)
        assert result.top().case_id == "c-3"
        assert result.top().score == pytest.approx(1.0)

    def test_matches_bruteforce_oracle_on_random_bases(self, taxonomies):
        rng = random.Random(16)
        features = [
            (WP, lambda d: d.ai_task),
            (WP, lambda d: d.ai_method),
            (QI, lambda d: d.technical_facilities),
            (QI, lambda d: d.all_user_questions()),
            (EM, lambda d: d.model_framework),
            (EM, lambda d: d.model_access),
            (EM, lambda d: d.has_training_data),
        ]
        for _ in range(20):
            size = rng.randint(1, 50)
            cases = random_case_base(rng, size, ["GradCAM"])
            query = random_query_case(rng)
            k = rng.randint(1, 8)
            expected = oracle_rank(
                query.description,
                {cid: c.description for cid, c in cases.items()},
                k,
                taxonomies.resolve,
                features,
            )
            if not expected:
                with pytest.raises(EmptyCaseBase):
                    retrieve(query, cases, k, taxonomies)
                continue
            result = retrieve(query, cases, k, taxonomies)
            assert [entry.case_id for entry in result.ranked] == [cid for cid, _ in expected]
            for entry, (_, score) in zip(result.ranked, expected):
                assert entry.score == pytest.approx(score)

    def test_tie_break_is_ascending_id(self, taxonomies):
        rng = random.Random(17)
        description = random_query_case(rng, "image").description
        cases = {
            cid: Case(id=cid, description=description) for cid in ["c-b", "c-a", "c-c"]
        }
        query = Case(id="q", description=description)
        result = retrieve(query, cases, 3, taxonomies)
        assert result.case_ids == ["c-a", "c-b", "c-c"]
