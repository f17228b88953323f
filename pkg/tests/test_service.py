"""HTTP endpoints: request validation, error kinds, and result plumbing."""

import pytest
from fastapi.testclient import TestClient

from polymul.io import parse_poly
from polymul.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert body["cpus"] >= 1


class TestMultiply:
    def test_expressions(self, client):
        resp = client.post("/multiply", json={
            "a": {"expr": "(1+x)"}, "b": {"expr": "(1-x)"}})
        assert resp.status_code == 200
        body = resp.json()
        assert body["result_terms"] == 2
        assert parse_poly(body["result"]).n == 2
        assert body["time_ms"] > 0

    def test_dense_counts(self, client):
        resp = client.post("/multiply", json={
            "a": {"expr": "(1+x+y+z+t)^8"},
            "b": {"expr": "(1+x+y+z+t)^8+1"},
            "options": {"l": 16},
            "include_result": False,
        })
        body = resp.json()
        assert (body["a_terms"], body["b_terms"], body["result_terms"]) == (495, 495, 4845)
        assert body["result"] is None

    def test_file_text_input(self, client):
        text = "vars x y\n1 1 0\n1 0 1\n"
        resp = client.post("/multiply", json={
            "a": {"text": text}, "b": {"text": text}})
        assert resp.json()["result_terms"] == 3  # (x+y)^2

    def test_variable_inference_spans_both_expressions(self, client):
        resp = client.post("/multiply", json={
            "a": {"expr": "x+y"}, "b": {"expr": "z"}})
        assert resp.status_code == 200
        poly = parse_poly(resp.json()["result"])
        assert poly.layout.vars.names == ("x", "y", "z")

    def test_explicit_vars_override(self, client):
        resp = client.post("/multiply", json={
            "a": {"expr": "x"}, "b": {"expr": "y"}, "vars": ["y", "x"]})
        poly = parse_poly(resp.json()["result"])
        assert poly.layout.vars.names == ("y", "x")

    def test_mismatched_file_vars(self, client):
        resp = client.post("/multiply", json={
            "a": {"text": "vars x\n1 1\n"}, "b": {"text": "vars y\n1 1\n"}})
        assert resp.status_code == 400
        assert resp.json()["error"] == "parse"

    def test_syntax_error(self, client):
        resp = client.post("/multiply", json={
            "a": {"expr": "(1+x"}, "b": {"expr": "x"}})
        assert resp.status_code == 400
        body = resp.json()
        assert body["error"] == "parse" and "position" in body["message"]

    def test_overflow(self, client):
        resp = client.post("/multiply", json={
            "a": {"text": "vars x\n1 3000000000\n"},
            "b": {"text": "vars x\n1 3000000000\n"}})
        assert resp.status_code == 400
        assert resp.json()["error"] == "overflow"

    def test_rejects_both_inputs_set(self, client):
        resp = client.post("/multiply", json={
            "a": {"expr": "x", "text": "vars x\n1 1\n"}, "b": {"expr": "x"}})
        assert resp.status_code == 422  # pydantic validation

    def test_float_coefficients(self, client):
        resp = client.post("/multiply", json={
            "a": {"expr": "1+x"}, "b": {"expr": "1+x"},
            "options": {"coeff": "f64"}})
        poly = parse_poly(resp.json()["result"])
        assert poly.ctype is float
        assert poly.coeffs == [1.0, 2.0, 1.0]


class TestBench:
    def test_example_one_desk_scale(self, client):
        resp = client.post("/bench", json={
            "example": 1, "power": 8, "l": 16,
            "threads": [1, 2], "mergers": ["heap", "tree"], "repetitions": 1})
        body = resp.json()
        assert (body["f_terms"], body["g_terms"], body["result_terms"]) == (495, 495, 4845)
        assert body["verified"] is True
        assert len(body["rows"]) == 4
        assert {(r["merger"], r["threads"]) for r in body["rows"]} == {
            ("heap", 1), ("heap", 2), ("tree", 1), ("tree", 2)}

    def test_example_three_has_negative_terms(self, client):
        resp = client.post("/bench", json={"example": 3, "power": 2, "l": 4})
        assert resp.json()["verified"] is True

    def test_power_cap_without_full(self, client):
        resp = client.post("/bench", json={"example": 2, "power": 25})
        assert resp.status_code == 400
        assert "full" in resp.json()["message"]

    def test_large_products_skip_verification(self, client):
        resp = client.post("/bench", json={
            "example": 1, "power": 6, "l": 8, "verify_limit": 10})
        assert resp.json()["verified"] is None


class TestTune:
    def test_small_sweep(self, client):
        resp = client.post("/tune", json={
            "seed": 3, "sizes": [20, 30], "l_values": [2, 4, 8],
            "m_min": 3, "m_max": 4, "max_deg": 9, "warmups": 0})
        body = resp.json()
        assert body["n_products"] == 2
        assert body["recommended_l"] in (2, 4, 8)
        assert set(body["histogram"]) == {"2", "4", "8"}  # JSON object keys


class TestGenerate:
    def test_deterministic(self, client):
        req = {"seed": 9, "vars": 4, "terms": 50, "max_deg": 12}
        one = client.post("/generate", json=req).json()
        two = client.post("/generate", json=req).json()
        assert one == two
        assert one["terms"] == 50
        assert parse_poly(one["text"]).n == 50

    def test_named_vars(self, client):
        body = client.post("/generate", json={
            "seed": 1, "vars": ["p", "q"], "terms": 5, "max_deg": 6}).json()
        assert parse_poly(body["text"]).layout.vars.names == ("p", "q")

    def test_infeasible(self, client):
        resp = client.post("/generate", json={
            "seed": 1, "vars": 1, "terms": 10, "max_deg": 1})
        assert resp.status_code == 400

    def test_float_coefficients(self, client):
        body = client.post("/generate", json={
            "seed": 4, "vars": 3, "terms": 25, "max_deg": 8,
            "coeff": "f64"}).json()
        poly = parse_poly(body["text"])
        assert poly.ctype is float and poly.n == 25


class TestCluster:
    def test_single_node_matches_multiply(self, client):
        payload = {
            "a": {"expr": "(1+x+y+z+t)^5"},
            "b": {"expr": "(1+x+y+z+t)^5+1"},
            "options": {"l": 8},
        }
        multiply = client.post("/multiply", json=payload).json()
        cluster = client.post("/cluster", json={**payload, "nodes": 1}).json()
        assert cluster["result"] == multiply["result"]
        assert cluster["messages"] == 0

    def test_four_nodes(self, client):
        resp = client.post("/cluster", json={
            "a": {"expr": "(1+x+y+z+t)^5"},
            "b": {"expr": "(1+x+y+z+t)^5+1"},
            "nodes": 4,
            "options": {"l": 8},
            "include_result": False,
        })
        body = resp.json()
        assert body["messages"] == 1 + 3 * 3
        assert len(body["node_ops"]) == 4
        assert sum(body["node_ops"]) == 126 * 126
