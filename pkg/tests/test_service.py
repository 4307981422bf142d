"""
HTTP solver service and its client - Test Suite.

 Group 1 - Health and discovery endpoints
 Group 2 - Solve endpoint: gains, channel matrix, input validation
 Group 3 - Selection endpoint
 Group 4 - Client against the service and against a dead server, remote selection from the CLI
"""

import json

import pytest
import requests
from fastapi.testclient import TestClient

from app import SwiptSolverAPIApp
from harness.cli import EXIT_OK, main
from util import api_client
from util.api_client import APIClientFactory, SolverServiceClient

SMALL_PARAMS = {"n_tx": 2, "n_rx": 2}
QOS = {"r_min": 1.0, "e_min": 0.05, "p_max": 5.0}
CHANNEL = {"real": [[1.0, 0.2], [0.1, 0.8]], "imag": [[0.0, 0.3], [-0.2, 0.0]]}


@pytest.fixture
def client():
    return TestClient(SwiptSolverAPIApp().app)


def _solve(client, **body):
    return client.post("/solve/invoke", json={"input": body})


# ── Group 1 ──────────────────────────────────────────────────────────────────

def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "healthy"}


def test_solvers(client):
    body = client.get("/solvers").json()
    assert body["algorithms"] == ["dm_cvx", "jeapa", "moo_lc"]
    assert body["selection_strategies"] == ["fixed_full", "exhaustive", "frobenius"]


# ── Group 2 ──────────────────────────────────────────────────────────────────

def test_solve_from_gains(client):
    response = _solve(client, gains=[3.0, 1.2], params=SMALL_PARAMS, qos=QOS, algorithm="moo_lc",
                      include_trace=True)
    assert response.status_code == 200
    output = response.json()["output"]
    assert output["algorithm"] == "moo_lc"
    assert output["feasible"] is True
    assert set(output["rounded"]["assign"]) <= {0.0, 1.0}
    assert [row["phase"] for row in output["trace"]][-1] == "refinement"


def test_solve_from_channel(client):
    response = _solve(client, channel=CHANNEL, qos=QOS, algorithm="jeapa")
    assert response.status_code == 200
    output = response.json()["output"]
    assert output["ee"] > 0
    assert "trace" not in output


def test_gains_and_channel_are_exclusive(client):
    assert _solve(client, gains=[1.0], channel=CHANNEL).status_code == 422
    assert _solve(client).status_code == 422


def test_unknown_fields_rejected(client):
    assert _solve(client, gains=[1.0], colour="blue").status_code == 422


def test_unknown_algorithm_rejected(client):
    assert _solve(client, gains=[1.0], algorithm="genetic").status_code == 422


def test_infeasible_instance_is_client_error(client):
    response = _solve(client, gains=[0.5, 0.1], params=SMALL_PARAMS,
                      qos={"r_min": 60.0, "e_min": 0.0, "p_max": 1.0}, algorithm="jeapa")
    assert response.status_code == 422
    assert "infeasible" in response.json()["detail"]


def test_ragged_imaginary_part_rejected(client):
    channel = {"real": [[1.0, 0.0]], "imag": [[0.0]]}
    assert _solve(client, channel=channel, qos=QOS).status_code == 422


# ── Group 3 ──────────────────────────────────────────────────────────────────

def test_exhaustive_selection(client):
    response = client.post("/select/invoke", json={"input": {
        "channel": CHANNEL, "qos": QOS, "strategy": "exhaustive", "algorithm": "moo_lc"}})
    assert response.status_code == 200
    output = response.json()["output"]
    assert output["evaluations"] == 3
    assert output["best_n"] == len(output["best_set"])
    assert [row["n"] for row in output["per_n"]] == [1, 2]


def test_selection_cap(client):
    response = client.post("/select/invoke", json={"input": {
        "channel": CHANNEL, "qos": QOS, "strategy": "exhaustive", "max_exhaustive_antennas": 1}})
    assert response.status_code == 422


# ── Group 4 ──────────────────────────────────────────────────────────────────

def test_client_round_trip(client, monkeypatch):
    def post(url, json, timeout):
        return client.post(url.replace("http://service", ""), json=json)

    def get(url, timeout):
        return client.get(url.replace("http://service", ""))

    monkeypatch.setattr(api_client.requests, "post", post)
    monkeypatch.setattr(api_client.requests, "get", get)
    service = APIClientFactory.create_client("solver", "http://service/")
    assert isinstance(service, SolverServiceClient)
    assert service.check_server_status()
    assert service.list_solvers()["algorithms"] == ["dm_cvx", "jeapa", "moo_lc"]
    output = service.solve({"gains": [3.0, 1.2], "params": SMALL_PARAMS, "qos": QOS, "algorithm": "moo_lc"})
    assert output["algorithm"] == "moo_lc"


def test_client_with_dead_server(monkeypatch):
    def refuse(*args, **kwargs):
        raise requests.exceptions.ConnectionError("refused")

    monkeypatch.setattr(api_client.requests, "post", refuse)
    monkeypatch.setattr(api_client.requests, "get", refuse)
    service = SolverServiceClient("http://nowhere")
    assert not service.check_server_status()
    assert service.solve({"gains": [1.0]}) is None
    assert service.list_solvers()["selection_strategies"] == ["fixed_full", "exhaustive", "frobenius"]


def test_unknown_client_type():
    with pytest.raises(ValueError):
        APIClientFactory.create_client("chat")


def test_cli_select_through_service(client, monkeypatch, tmp_path, capsys):
    def post(url, json, timeout):
        return client.post(url.replace("http://service", ""), json=json)

    def get(url, timeout):
        return client.get(url.replace("http://service", ""))

    monkeypatch.setattr(api_client.requests, "post", post)
    monkeypatch.setattr(api_client.requests, "get", get)
    monkeypatch.setenv("SWIPT_SERVICE_URL", "http://service")
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"params": SMALL_PARAMS, "qos": QOS, "trials": 1,
                                  "algorithms": ["moo_lc"], "selection": "fixed_full"}))
    assert main(["select", "--config", str(config), "--remote", "--strategy", "exhaustive",
                 "--algo", "moo_lc"]) == EXIT_OK
    output = json.loads(capsys.readouterr().out)
    assert output["strategy"] == "exhaustive"
    assert output["inner_solver"] == "moo_lc"
    assert [row["n"] for row in output["per_n"]] == [1, 2]
