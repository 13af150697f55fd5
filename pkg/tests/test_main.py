import math

import pytest
from fastapi.testclient import TestClient

from main import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as client:
        yield client


def test_health(client) -> None:
    response = client.get("/health")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "ready"
    assert body["services"]["families"] == 8
    assert "X-Process-Time" in response.headers


def test_families(client) -> None:
    body = client.get("/families").json()
    assert body["success"]
    assert [row["family"] for row in body["rows"]] == list(range(1, 9))


def test_expect(client) -> None:
    response = client.post("/expect", json={"family": 1, "z": 1.0})
    assert response.status_code == 200
    body = response.json()
    assert math.isclose(body["closed"]["J0"], -0.5, abs_tol=1e-9)
    assert body["lab_direction"] == pytest.approx([0.0, 0.0, 1.0])


def test_expect_with_direct_oracle(client) -> None:
    body = client.post("/expect", json={"family": 2, "z": "0.5+0.2i", "zl": "0.3-0.1i", "zm": 0.2,
                                        "direct": True}).json()
    assert math.isclose(body["closed"]["Jsq"], body["direct"]["Jsq"], rel_tol=1e-8)


def test_expect_outside_domain(client) -> None:
    response = client.post("/expect", json={"family": 3, "z": 1.5})
    assert response.status_code == 400
    assert response.json()["status"] == "error"


def test_mcs(client) -> None:
    body = client.post("/mcs", json={"family": 5, "z": 0.5, "zl": "0.1i", "jmax": 1}).json()
    assert body["success"]
    assert body["two_j_max"] == 2
    assert body["tower"] == "integer"
    assert {amplitude["two_j"] for amplitude in body["amplitudes"]} == {0, 2}


def test_unknown_table(client) -> None:
    response = client.get("/tables/spectra")
    assert response.status_code == 404
    assert response.json()["status"] == "unknown_table"


def test_table(client) -> None:
    body = client.get("/tables/measures").json()
    assert body["success"]


def test_verify(client) -> None:
    body = client.post("/verify/algebra", json={"jmax": 1.5}).json()
    assert body["success"]
    assert body["suite"] == "algebra"


def test_unknown_suite(client) -> None:
    response = client.post("/verify/everything")
    assert response.status_code == 404
