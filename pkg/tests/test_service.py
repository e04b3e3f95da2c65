import base64

import pytest
from fastapi.testclient import TestClient

from sketchinvert.checkpoint import save_sbir_checkpoint, save_style_checkpoint
from sketchinvert.data import merge_unpaired, save_split
from sketchinvert.data.images import image_to_png_bytes
from sketchinvert.service import ServiceConfig, create_app, load_snapshot


@pytest.fixture(scope="module")
def service_setup(tmp_path_factory, briefly_trained_models, toy_splits):
    style, sbir = briefly_trained_models
    tmp = tmp_path_factory.mktemp("service")
    save_split(merge_unpaired(*toy_splits), tmp / "data")
    save_style_checkpoint(tmp / "style.pt", style)
    save_sbir_checkpoint(tmp / "sbir.pt", sbir)
    cfg = ServiceConfig(
        style_checkpoint=str(tmp / "style.pt"),
        sbir_checkpoint=str(tmp / "sbir.pt"),
        gallery_dir=str(tmp / "data"),
        photo_size=32,
        max_request_bytes=200_000,
    )
    return cfg


@pytest.fixture(scope="module")
def client(service_setup):
    app = create_app(service_setup, load_snapshot(service_setup))
    return TestClient(app)


@pytest.fixture(scope="module")
def sketch_b64(toy_sketch_split):
    png = image_to_png_bytes(toy_sketch_split.sketches[0].image)
    return base64.b64encode(png).decode("ascii")


def test_healthz(client):
    body = client.get("/healthz").json()
    assert body == {"status": "ok", "model_loaded": True}


def test_stylize_round_trip(client, sketch_b64):
    r = client.post("/stylize", json={"image": sketch_b64})
    assert r.status_code == 200
    contour = base64.b64decode(r.json()["contour"])
    from sketchinvert.data.images import png_bytes_to_array

    arr = png_bytes_to_array(contour)
    assert arr.shape == (32, 32, 1)


def test_stylize_accepts_rgb_input(client, toy_sketch_split):
    import numpy as np

    rgb = np.repeat(toy_sketch_split.sketches[0].image, 3, axis=2)
    png = image_to_png_bytes(rgb)
    r = client.post("/stylize", json={"image": base64.b64encode(png).decode()})
    assert r.status_code == 200


def test_stylize_rejects_bad_base64(client):
    assert client.post("/stylize", json={"image": "!!!not-b64"}).status_code == 400


def test_stylize_rejects_non_png(client):
    payload = base64.b64encode(b"plain text").decode()
    assert client.post("/stylize", json={"image": payload}).status_code == 400


def test_oversize_payload_413(client):
    blob = base64.b64encode(b"\x00" * 300_000).decode()
    assert client.post("/stylize", json={"image": blob}).status_code == 413


def test_retrieve_ordered_results(client, sketch_b64):
    r = client.post("/retrieve", json={"image": sketch_b64, "k": 5})
    assert r.status_code == 200
    results = r.json()["results"]
    assert len(results) == 5
    dists = [item["distance"] for item in results]
    assert dists == sorted(dists)
    for item in results:
        assert set(item) == {"id", "distance", "thumbnail_url"}
        assert item["thumbnail_url"].endswith("/thumbnail")


def test_retrieve_is_byte_deterministic(client, sketch_b64):
    a = client.post("/retrieve", json={"image": sketch_b64, "k": 7})
    b = client.post("/retrieve", json={"image": sketch_b64, "k": 7})
    assert a.content == b.content


def test_retrieve_invalid_k(client, sketch_b64):
    assert client.post("/retrieve", json={"image": sketch_b64, "k": 0}).status_code == 400
    assert client.post("/retrieve", json={"image": sketch_b64, "k": 10_000}).status_code == 400


def test_gallery_pagination(client):
    first = client.get("/gallery", params={"page": 0, "page_size": 8}).json()
    assert [i["id"] for i in first["items"]] == [f"toy{i:03d}" for i in range(8)]
    assert first["total"] == 20
    full = client.get("/gallery", params={"page": 0, "page_size": 20}).json()
    assert len(full["items"]) == 20
    assert client.get("/gallery", params={"page": 3, "page_size": 8}).status_code == 400
    assert client.get("/gallery", params={"page": -1}).status_code == 400
    assert client.get("/gallery", params={"page_size": 0}).status_code == 400


def test_thumbnail_served(client):
    r = client.get("/gallery/toy000/thumbnail")
    assert r.status_code == 200
    assert r.headers["content-type"] == "image/png"
    assert client.get("/gallery/zzz/thumbnail").status_code == 404


def test_unloaded_service_returns_503(service_setup, sketch_b64):
    app = create_app(service_setup, None)
    local = TestClient(app)
    assert local.post("/stylize", json={"image": sketch_b64}).status_code == 503
    assert local.post("/retrieve", json={"image": sketch_b64, "k": 1}).status_code == 503
    assert local.get("/gallery").status_code == 503
    assert local.get("/healthz").json()["model_loaded"] is False
    # admin reload brings it up
    assert local.post("/admin/reload").status_code == 200
    assert local.post("/stylize", json={"image": sketch_b64}).status_code == 200


def test_env_overrides(monkeypatch):
    cfg = ServiceConfig(style_checkpoint="a", sbir_checkpoint="b", gallery_dir="c")
    monkeypatch.setenv("SKETCHINVERT_HOST", "0.0.0.0")
    monkeypatch.setenv("SKETCHINVERT_STYLE_CKPT", "/elsewhere/style.pt")
    out = cfg.with_env_overrides()
    assert out.host == "0.0.0.0"
    assert out.style_checkpoint == "/elsewhere/style.pt"
    assert out.sbir_checkpoint == "b"
