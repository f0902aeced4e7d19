"""HTTP service tests (in-process, via the starlette test client)."""

import pytest
from fastapi.testclient import TestClient

from impatience.service import create_app


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok"
    assert "version" in body


# ---------------------------------------------------------------------------
# analysis endpoints
# ---------------------------------------------------------------------------

def test_analyze_hyperbolic(client):
    resp = client.post(
        "/analyze",
        json={"spec": {"family": "proportional_hyperbolic", "params": {"h": 0.1}}},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["summary"]["verdict"] == "StrictlyDI"
    assert "analyze.csv" in body["files"]


def test_analyze_with_grid_and_svg(client):
    resp = client.post(
        "/analyze",
        json={
            "spec": {"family": "exponential", "params": {"rate": 0.03}},
            "grid": {"t_min": 0.1, "t_max": 40.0, "count": 250, "kind": "log"},
            "svg": True,
        },
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["summary"]["verdict"] == "ConstantImpatience"
    assert "analyze.svg" in body["files"]
    assert body["files"]["analyze.svg"].startswith("<svg")


def test_compare_endpoint(client):
    resp = client.post(
        "/compare",
        json={
            "first": {"family": "generalized_hyperbolic", "params": {"alpha": 0.5, "h": 0.2}},
            "second": {"family": "generalized_hyperbolic", "params": {"alpha": 0.5, "h": 0.05}},
        },
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["summary"]["index_comparison"]["relation"] == "StrictlyMoreDI"


def test_mix_endpoint(client):
    resp = client.post(
        "/mix",
        json={
            "mixture": {
                "components": [
                    {"spec": {"family": "exponential", "params": {"rate": 0.02}}, "weight": 0.5},
                    {"spec": {"family": "exponential", "params": {"rate": 0.05}}, "weight": 0.5},
                ],
                "interpretation": "GroupAverage",
            }
        },
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["summary"]["theorem"]["holds"] is True
    assert "mix.csv" in body["files"]


def test_ce_endpoint(client):
    resp = client.post(
        "/ce",
        json={
            "bundle": {
                "entries": [
                    {"h": 0.01, "p": 1 / 3},
                    {"h": 0.02, "p": 1 / 3},
                    {"h": 0.03, "p": 1 / 3},
                ]
            }
        },
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["summary"]["monotone"] is True
    assert abs(body["summary"]["limit"] - 9.0 / 550.0) < 1e-15


def test_svg_endpoint_roundtrip(client):
    fig = client.get("/figure/1").json()
    resp = client.post(
        "/svg", json={"csv": fig["files"]["figure1.csv"], "title": "indices"}
    )
    assert resp.status_code == 200
    assert resp.json()["svg"].startswith("<svg")


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def test_figure_endpoints(client):
    for n in (1, 2, 3):
        resp = client.get(f"/figure/{n}")
        assert resp.status_code == 200
        assert f"figure{n}.csv" in resp.json()["files"]


def test_figure_svg_flag(client):
    resp = client.get("/figure/2", params={"svg": "true"})
    assert resp.status_code == 200
    assert "figure2.svg" in resp.json()["files"]


def test_unknown_figure_is_parse_error(client):
    resp = client.get("/figure/7")
    assert resp.status_code == 400
    assert resp.json()["kind"] == "parse"


def test_household_endpoint(client):
    resp = client.get("/household")
    assert resp.status_code == 200
    body = resp.json()
    assert body["summary"]["period0"] == {"earlier": 20.0, "later": 19.5}
    assert body["summary"]["flip_at"] == 1


def test_household_horizon_param(client):
    resp = client.get("/household", params={"horizon": 5})
    assert resp.status_code == 200
    assert resp.json()["summary"]["horizon"] == 5


# ---------------------------------------------------------------------------
# error contract
# ---------------------------------------------------------------------------

def test_unknown_family_is_parse_400(client):
    resp = client.post("/analyze", json={"spec": {"family": "quasi_geometric", "params": {"beta": 0.9}}})
    assert resp.status_code == 400
    assert resp.json()["kind"] == "parse"


def test_bad_parameter_is_domain_422(client):
    resp = client.post(
        "/analyze", json={"spec": {"family": "proportional_hyperbolic", "params": {"h": -0.1}}}
    )
    assert resp.status_code == 422
    assert resp.json()["kind"] == "domain"


def test_extra_envelope_field_is_parse_400(client):
    resp = client.post(
        "/analyze",
        json={"spec": {"family": "exponential", "params": {"rate": 0.01}}, "bogus": 1},
    )
    assert resp.status_code == 400
    assert resp.json()["kind"] == "parse"


def test_log_grid_with_zero_min_is_domain_422(client):
    resp = client.post(
        "/analyze",
        json={
            "spec": {"family": "exponential", "params": {"rate": 0.01}},
            "grid": {"t_min": 0.0, "t_max": 10.0, "count": 50, "kind": "log"},
        },
    )
    assert resp.status_code == 422
    assert resp.json()["kind"] == "domain"


def test_empty_csv_svg_is_parse_400(client):
    resp = client.post("/svg", json={"csv": ""})
    assert resp.status_code == 400
    assert resp.json()["kind"] == "parse"


def test_malformed_bundle_is_parse_400(client):
    resp = client.post("/ce", json={"bundle": {"rates": [0.01]}})
    assert resp.status_code == 400
    assert resp.json()["kind"] == "parse"
