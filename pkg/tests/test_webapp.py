"""Tests for the read-only HTTP service."""
import pytest
from fastapi.testclient import TestClient

from lcy_cones.webapp import allowed_origins, app

M3_QUERY = "p=1&p=1&p=1"


@pytest.fixture
def client():
    with TestClient(app) as c:
        yield c


class TestWebappStartup:
    """Test webapp initialization and startup."""

    def test_app_creation(self):
        assert app.title == "LCY Cones"

    def test_cors_middleware_configured(self):
        middleware_classes = [m.cls.__name__ for m in app.user_middleware]
        assert "CORSMiddleware" in middleware_classes
        assert "SecurityHeadersMiddleware" in middleware_classes

    def test_routers_mounted(self):
        routes = [route.path for route in app.routes]
        assert "/api/families/{n}" in routes
        assert "/api/verify/{n}" in routes
        assert "/api/reduce" in routes
        assert "/api/sigma" in routes

    def test_allowed_origins_from_env(self, monkeypatch):
        monkeypatch.setenv("ALLOWED_ORIGINS", "http://a.test, http://b.test,")
        assert allowed_origins() == ["http://a.test", "http://b.test"]

    def test_invalid_settings_abort_startup(self, monkeypatch):
        monkeypatch.setenv("LCY_CONES_RADIUS", "-1")
        with pytest.raises(RuntimeError, match="default_radius"):
            with TestClient(app):
                pass


class TestSecurityMiddleware:
    """Test security middleware headers."""

    def test_security_headers_applied(self, client):
        response = client.get("/api/health")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}
        assert response.headers["X-Content-Type-Options"] == "nosniff"
        assert response.headers["X-Frame-Options"] == "DENY"
        assert "frame-ancestors 'none'" in response.headers["Content-Security-Policy"]
        assert response.headers["Cache-Control"] == "no-store"

    def test_cors_preflight(self, client):
        response = client.options(
            "/api/reduce",
            headers={"Origin": "http://localhost:8001", "Access-Control-Request-Method": "POST"},
        )
        assert response.headers["access-control-allow-origin"] == "http://localhost:8001"

    def test_cors_unknown_origin(self, client):
        response = client.get("/api/health", headers={"Origin": "http://evil.test"})
        assert "access-control-allow-origin" not in response.headers


class TestFamilyEndpoints:
    """Test the model and cone endpoints."""

    def test_model(self, client):
        response = client.get(f"/api/families/3?{M3_QUERY}")
        assert response.status_code == 200
        data = response.json()
        assert data["n"] == "3"
        assert len(data["curves"]) == 7

    def test_unsupported_n(self, client):
        response = client.get("/api/families/7?p=1&p=1&p=1&p=1&p=1&p=1&p=1")
        assert response.status_code == 400
        assert "n=7" in response.json()["detail"]

    def test_invalid_depths(self, client):
        assert client.get("/api/families/1?p=2").status_code == 400

    def test_missing_depths(self, client):
        assert client.get("/api/families/3").status_code == 422

    def test_rank_guard(self, client, monkeypatch):
        monkeypatch.setenv("LCY_CONES_MAX_RANK", "3")
        response = client.get(f"/api/families/3?{M3_QUERY}")
        assert response.status_code == 400
        assert "limit" in response.json()["detail"]

    def test_curves(self, client):
        data = client.get(f"/api/families/3/curves?{M3_QUERY}").json()
        assert data["labels"] == ["D_1", "D_2", "D_3", "E_{1,1}", "E_{2,1}", "E_{3,1}", "F"]

    def test_nef(self, client):
        data = client.get(f"/api/families/3/nef?{M3_QUERY}").json()
        assert data["rays"][-1] == ["1", "0", "0", "0"]

    def test_nefe_prime(self, client):
        assert client.get(f"/api/families/3/nefe-prime?{M3_QUERY}").json()["rays"] == []

    def test_dual_basis(self, client):
        rows = client.get("/api/families/2/dual-basis?p=1&p=1").json()
        assert "Flagged" in {r["status"] for r in rows}
        assert "Fail" not in {r["status"] for r in rows}


class TestVerifyEndpoints:
    """Test suite and certificate endpoints."""

    def test_verify(self, client):
        data = client.get(f"/api/verify/3?{M3_QUERY}").json()
        assert data["failed"] is False
        assert data["model_id"] == "n=3 p=(1,1,1)"

    def test_mds(self, client):
        data = client.get(f"/api/mds/3?{M3_QUERY}").json()
        assert data["picard"]["holds"] is True
        assert data["nef"]["holds"] is True


class TestCoxeterEndpoints:
    """Test reduction and sigma(y) over HTTP."""

    def test_reduce(self, client):
        response = client.post("/api/reduce", json={"n": 3, "p": [1, 1, 1], "x": [0, -1, 0, 0]})
        assert response.status_code == 200
        assert response.json() == {"input": ["0", "-1", "0", "0"], "word": ["F"], "output": ["-1", "0", "1", "1"], "iterations": "1"}

    def test_reduce_max_iter(self, client):
        """An unfinished reduction is a 422."""
        body = {"n": 3, "p": [2, 2, 2], "x": [0, -1, 0, 0, 0, 0, 0], "max_iter": 1}
        assert client.post("/api/reduce", json=body).status_code == 422

    def test_reduce_wrong_length(self, client):
        response = client.post("/api/reduce", json={"n": 3, "p": [1, 1, 1], "x": [0, 1]})
        assert response.status_code == 400
        assert "4 coordinates" in response.json()["detail"]

    def test_reduce_n_out_of_range(self, client):
        assert client.post("/api/reduce", json={"n": 7, "p": [1] * 7, "x": [0]}).status_code == 422

    def test_sigma_violated(self, client):
        data = client.post("/api/sigma", json={"n": 3, "p": [1, 1, 1], "x": [0, -1, 0, 0], "radius": 2}).json()
        assert data["status"] == "Violated"
        assert data["witness"] == ["F"]
        assert data["images_checked"] == "1"

    def test_sigma_verified(self, client):
        body = {"n": 3, "p": [1, 1, 1], "x": [4, -1, -1, -1]}
        data = client.post("/api/sigma", json=body).json()
        assert data["status"] == "VerifiedToRadius"
        assert data["radius"] == "3"

    def test_sigma_y_not_ample(self, client):
        body = {"n": 3, "p": [1, 1, 1], "x": [1, 0, 0, 0], "y": [1, 0, 0, 0], "radius": 1}
        response = client.post("/api/sigma", json=body)
        assert response.status_code == 422
        assert "ample" in response.json()["detail"]

    def test_sigma_negative_radius(self, client):
        body = {"n": 3, "p": [1, 1, 1], "x": [1, 0, 0, 0], "radius": -1}
        assert client.post("/api/sigma", json=body).status_code == 422

    def test_sigma_extra_generator(self, client):
        s_f = [[2, 1, 1, 1], [-1, 0, -1, -1], [-1, -1, 0, -1], [-1, -1, -1, 0]]
        body = {"n": 3, "p": [1, 1, 1], "x": [4, -1, -1, -1], "radius": 2, "generators": [{"label": "s", "matrix": s_f}]}
        response = client.post("/api/sigma", json=body)
        assert response.status_code == 200
        assert response.json()["status"] == "VerifiedToRadius"

    def test_sigma_rejects_non_isometry(self, client):
        doubled = [[2 if i == j else 0 for j in range(4)] for i in range(4)]
        body = {"n": 3, "p": [1, 1, 1], "x": [4, -1, -1, -1], "generators": [{"label": "d", "matrix": doubled}]}
        response = client.post("/api/sigma", json=body)
        assert response.status_code == 422
        assert "not admissible" in response.json()["detail"]

    def test_sigma_repeated_generator_labels(self, client):
        identity = [[1 if i == j else 0 for j in range(4)] for i in range(4)]
        gens = [{"label": "g", "matrix": identity}, {"label": "g", "matrix": identity}]
        body = {"n": 3, "p": [1, 1, 1], "x": [4, -1, -1, -1], "generators": gens}
        assert client.post("/api/sigma", json=body).status_code == 400


class TestMemberEndpoint:
    """Test membership certificates over HTTP."""

    def test_member(self, client):
        data = client.get(f"/api/families/3/member?{M3_QUERY}&x=0&x=1&x=0&x=0").json()
        assert data["member"] is True
        assert data["x"] == ["0", "1", "0", "0"]
        assert len(data["coefficients"]) == len(data["labels"]) == 7

    def test_outside_nef(self, client):
        data = client.get(f"/api/families/3/member?{M3_QUERY}&x=0&x=1&x=0&x=0&cone=nef").json()
        assert data["member"] is False
        assert len(data["separating_functional"]) == 4

    def test_wrong_length(self, client):
        assert client.get(f"/api/families/3/member?{M3_QUERY}&x=1").status_code == 400

    def test_unknown_cone(self, client):
        assert client.get(f"/api/families/3/member?{M3_QUERY}&x=1&x=0&x=0&x=0&cone=mori").status_code == 422
