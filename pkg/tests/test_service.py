"""Tests for the HTTP service endpoints."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from causal_advisor.graphs import MixedGraph
from causal_advisor.scm import LinearScm, NodeEquation
from causal_advisor.service import SessionState, create_app
from causal_advisor.stats import Dataset, NormalizationRecord

LABELS = ("node13", "node16", "node34", "node39")
TABLE3 = {"node13": 0.06, "node16": -2.57, "node34": -0.365, "node39": -1.29}


def student_scm() -> LinearScm:
    graph = MixedGraph(LABELS, directed=[(0, 1), (2, 1), (0, 3), (1, 3), (2, 3)])
    return LinearScm(
        graph=graph,
        equations=(
            NodeEquation((), (), 0.0, 1.0),
            NodeEquation((0, 2), (0.6, 0.4), 0.0, 0.48),
            NodeEquation((), (), 0.0, 1.0),
            NodeEquation((0, 1, 2), (0.486, 0.19, 0.187), 0.0, 0.553503),
        ),
    )


def demo_state() -> SessionState:
    rows = np.array(
        [
            [0.0, 0.0, 0.0, 0.2],
            [0.5, 1.0, -0.2, 0.9],
            [TABLE3["node13"], TABLE3["node16"], TABLE3["node34"], TABLE3["node39"]],
        ]
    )
    record = NormalizationRecord(
        column_names=LABELS,
        means=(60.0, 60.0, 60.0, 59.01),
        stds=(12.0, 12.0, 12.0, 10.0),
    )
    return SessionState(
        scm=student_scm(),
        dataset=Dataset(LABELS, rows),
        normalization=record,
        outcome=3,
        actionable=(0, 1, 2),
        threshold_z=-0.901,
    )


@pytest.fixture()
def client() -> TestClient:
    return TestClient(create_app(demo_state()))


class TestGets:
    def test_graph(self, client):
        body = client.get("/api/graph").json()
        assert body["nodes"] == list(LABELS)
        assert len(body["directed"]) == 5
        assert body["undirected"] == []

    def test_model_round_trips(self, client):
        from causal_advisor.dataio import scm_from_dict

        body = client.get("/api/model").json()
        loaded = scm_from_dict(body)
        assert loaded.equations == student_scm().equations

    def test_config(self, client):
        body = client.get("/api/config").json()
        assert body["outcome"] == "node39"
        assert body["actionable"] == ["node13", "node16", "node34"]
        assert body["threshold_z"] == -0.901
        assert body["threshold_raw"] == pytest.approx(50.0)
        assert body["observation_count"] == 3

    def test_observations(self, client):
        rows = client.get("/api/observations").json()
        assert [r["id"] for r in rows] == [0, 1, 2]
        at_risk = rows[2]
        assert at_risk["passes"] is False
        assert at_risk["outcome"] == pytest.approx(-1.29)
        assert at_risk["outcome_raw"] == pytest.approx(59.01 - 12.9)
        assert rows[0]["passes"] is True
        assert at_risk["raw_values"]["node13"] == pytest.approx(60.0 + 12 * 0.06)

    def test_observations_empty_dataset(self):
        state = SessionState(
            scm=student_scm(),
            dataset=None,
            normalization=None,
            outcome=3,
            actionable=(0, 1, 2),
        )
        client = TestClient(create_app(state))
        assert client.get("/api/observations").json() == []

    def test_uninitialized_service_returns_503(self):
        client = TestClient(create_app())
        for path in ("/api/graph", "/api/model", "/api/config", "/api/observations"):
            assert client.get(path).status_code == 503
        assert (
            client.post("/api/counterfactual", json={"observation_id": 0}).status_code
            == 503
        )


class TestCounterfactual:
    def test_empty_interventions_echo_observation(self, client):
        body = client.post(
            "/api/counterfactual", json={"observation_id": 2, "interventions": {}}
        ).json()
        assert body["outcome"] == pytest.approx(-1.29)
        assert body["passes"] is False
        assert body["counterfactual_values"]["node16"] == pytest.approx(-2.57)

    def test_worked_example_passes(self, client):
        body = client.post(
            "/api/counterfactual",
            json={
                "observation_id": 2,
                "interventions": {
                    "node13": 0.861,
                    "node16": -2.57,
                    "node34": -0.365,
                },
            },
        ).json()
        assert body["outcome"] == pytest.approx(-0.900714, abs=1e-6)
        assert body["passes"] is True
        assert body["outcome_raw"] == pytest.approx(59.01 - 9.00714, abs=1e-4)
        assert body["abducted_noise"]["node39"] == pytest.approx(-0.762605, abs=1e-6)

    def test_values_request_supported(self, client):
        body = client.post(
            "/api/counterfactual",
            json={"values": TABLE3, "interventions": {"node13": 0.861,
                                                      "node16": -2.57,
                                                      "node34": -0.365}},
        ).json()
        assert body["outcome"] == pytest.approx(-0.900714, abs=1e-6)

    def test_unknown_node_400(self, client):
        resp = client.post(
            "/api/counterfactual",
            json={"observation_id": 0, "interventions": {"zz": 1.0}},
        )
        assert resp.status_code == 400
        assert "zz" in resp.json()["detail"]

    def test_non_finite_value_400(self, client):
        resp = client.post(
            "/api/counterfactual",
            content=json.dumps(
                {"observation_id": 0, "interventions": {"node13": float("nan")}}
            ),
            headers={"content-type": "application/json"},
        )
        assert resp.status_code in (400, 422)

    def test_unknown_observation_404(self, client):
        resp = client.post(
            "/api/counterfactual", json={"observation_id": 99, "interventions": {}}
        )
        assert resp.status_code == 404

    def test_neither_id_nor_values_400(self, client):
        assert client.post("/api/counterfactual", json={}).status_code == 400

    def test_both_id_and_values_400(self, client):
        resp = client.post(
            "/api/counterfactual",
            json={"observation_id": 0, "values": TABLE3},
        )
        assert resp.status_code == 400

    def test_partial_values_400(self, client):
        resp = client.post(
            "/api/counterfactual",
            json={"values": {"node13": 0.0}, "interventions": {}},
        )
        assert resp.status_code == 400


class TestRecommend:
    def test_projection_on_at_risk_row(self, client):
        body = client.post("/api/recommend", json={"observation_id": 2}).json()
        dx = body["intervention"]
        assert dx["node13"] - 0.06 == pytest.approx(0.615, abs=1e-3)
        assert dx["node16"] + 2.57 == pytest.approx(0.240, abs=6e-4)
        assert dx["node34"] + 0.365 == pytest.approx(0.237, abs=1e-3)
        assert body["predicted_outcome"] == pytest.approx(-0.901, abs=1e-6)
        assert body["passes"] is True
        gap, norm_c = 0.389, math.sqrt(0.486**2 + 0.19**2 + 0.187**2)
        assert body["norm_of_change"] == pytest.approx(gap / norm_c, abs=1e-9)

    def test_replay_through_counterfactual_passes(self, client):
        rec = client.post("/api/recommend", json={"observation_id": 2}).json()
        replay = client.post(
            "/api/counterfactual",
            json={"observation_id": 2, "interventions": rec["intervention"]},
        ).json()
        assert replay["passes"] is True

    def test_already_passing_row_empty(self, client):
        body = client.post("/api/recommend", json={"observation_id": 0}).json()
        assert body["empty"] is True
        assert body["intervention"] == {}
        assert body["norm_of_change"] == 0.0
        assert body["passes"] is True

    def test_empty_actionable_400(self, client):
        resp = client.post(
            "/api/recommend", json={"observation_id": 2, "actionable": []}
        )
        assert resp.status_code == 400

    def test_unknown_actionable_400(self, client):
        resp = client.post(
            "/api/recommend", json={"observation_id": 2, "actionable": ["zz"]}
        )
        assert resp.status_code == 400

    def test_no_path_actionable_422(self):
        graph = MixedGraph(("a", "iso", "y"), directed=[(0, 2)])
        scm = LinearScm(
            graph=graph,
            equations=(
                NodeEquation((), (), 0.0, 1.0),
                NodeEquation((), (), 0.0, 1.0),
                NodeEquation((0,), (0.8,), 0.0, 1.0),
            ),
        )
        state = SessionState(
            scm=scm, dataset=None, normalization=None, outcome=2,
            actionable=(0, 1), threshold_z=0.5,
        )
        client = TestClient(create_app(state))
        resp = client.post(
            "/api/recommend",
            json={"values": {"a": 0.0, "iso": 0.0, "y": -1.0},
                  "actionable": ["iso"]},
        )
        assert resp.status_code == 422
        assert "detail" in resp.json()

    def test_single_mode(self, client):
        body = client.post(
            "/api/recommend",
            json={"observation_id": 2, "mode": "single"},
        ).json()
        assert list(body["intervention"]) == ["node13"]
        assert body["predicted_outcome"] == pytest.approx(-0.901, abs=1e-9)

    def test_bad_mode_400(self, client):
        resp = client.post(
            "/api/recommend", json={"observation_id": 2, "mode": "best"}
        )
        assert resp.status_code == 400


class TestPurity:
    def test_identical_requests_identical_bodies(self, client):
        payload = {"observation_id": 2, "interventions": {"node13": 0.5}}
        first = client.post("/api/counterfactual", json=payload)
        second = client.post("/api/counterfactual", json=payload)
        assert first.content == second.content
        assert client.get("/api/observations").content == client.get(
            "/api/observations"
        ).content
