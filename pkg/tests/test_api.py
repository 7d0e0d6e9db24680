"""HTTP surface tests with fastapi's TestClient."""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from app.main import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


# ── Health ────────────────────────────────────────────────────────────


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"ok": True}


# ── /v1/codes/params ──────────────────────────────────────────────────


def test_params(client):
    resp = client.post("/v1/codes/params", json={"p": 3, "ell": 5})
    assert resp.status_code == 200
    body = resp.json()
    assert (body["e"], body["q"], body["exp_N"]) == (4, 81, 8)


def test_params_equal_primes(client):
    resp = client.post("/v1/codes/params", json={"p": 3, "ell": 3})
    assert resp.status_code == 400
    assert resp.json()["detail"] == "equal_primes"


def test_params_schema_validation(client):
    resp = client.post("/v1/codes/params", json={"p": 0, "ell": 3})
    assert resp.status_code == 422


def test_params_overflow(client):
    # 3^20 > 2^31
    resp = client.post("/v1/codes/params", json={"p": 3, "ell": 5, "k": 2})
    assert resp.status_code == 413
    assert resp.json()["detail"] == "field_size_overflow"


def test_params_large_k_overflow(client):
    resp = client.post("/v1/codes/params", json={"p": 5, "ell": 3, "k": 1_000_000})
    assert resp.status_code == 413
    assert resp.json()["detail"] == "field_size_overflow"


# ── /v1/codes/spectrum, predict, verify ──────────────────────────────


def test_spectrum(client):
    resp = client.post("/v1/codes/spectrum", json={"p": 5, "ell": 3, "du": 0, "method": "closed"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["source"] == "closed"
    assert body["dist"] == [[0, 1], [95, 96], [100, 524], [120, 4]]


def test_predict_dprime(client):
    resp = client.post("/v1/codes/predict", json={"p": 5, "ell": 3, "dprime": "alpha-kasami", "i": 2})
    assert resp.status_code == 200
    body = resp.json()
    assert body["table"] == "EllNot1_P1mod4_OppSign"
    assert body["n"] == 104
    assert body["d"] == 72


def test_verify(client):
    resp = client.post("/v1/codes/verify", json={"p": 5, "ell": 3, "dprime": "kasami", "i": 2})
    assert resp.status_code == 200
    body = resp.json()
    assert body["equal"] is True
    assert body["observed"]["dist"] == body["predicted"]["dist"]


def test_code_needs_exactly_one_set(client):
    resp = client.post("/v1/codes/spectrum", json={"p": 5, "ell": 3, "du": 0, "dprime": "square"})
    assert resp.status_code == 400
    assert resp.json()["detail"] == "invalid_parameters"


def test_unknown_method(client):
    resp = client.post("/v1/codes/spectrum", json={"p": 5, "ell": 3, "du": 0, "method": "fast"})
    assert resp.status_code == 400


# ── /v1/codes/bent ────────────────────────────────────────────────────


def test_bent(client):
    resp = client.post("/v1/codes/bent", json={"p": 5, "ell": 3, "dprime": "alpha-kasami", "i": 2})
    assert resp.status_code == 200
    body = resp.json()
    assert body["epsilon"] == 1
    assert body["level_counts"] == {"0": 9, "1": 4, "2": 4, "3": 4, "4": 4}


def test_bent_needs_family(client):
    resp = client.post("/v1/codes/bent", json={"p": 5, "ell": 3})
    assert resp.status_code == 400


def test_bent_not_bent_is_conflict(client):
    resp = client.post("/v1/codes/bent", json={"p": 3, "ell": 5, "dprime": "coulter", "i": 0})
    assert resp.status_code == 409
    assert resp.json()["detail"] == "not_bent"
