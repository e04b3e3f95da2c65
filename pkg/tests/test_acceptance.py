"""Acceptance suite: one test per primary criterion.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion
PASS lines. The two training criteria dominate the runtime (style: ~10 min,
retrieval overfit: ~2 min on a 2-core CPU).
"""

import base64
import copy
import math
from contextlib import contextmanager

import numpy as np
import pytest
import torch
from torch import nn
from torch.nn import functional as F

from sketchinvert.data import make_toy_dataset, merge_unpaired, save_split
from sketchinvert.data.images import image_to_png_bytes, png_bytes_to_array
from sketchinvert.errors import BatchTooSmallError
from sketchinvert.fgsbir import (
    GalleryIndex,
    SbirModel,
    gradcam,
    retrieve,
    toy_sbir_config,
    toy_sbir_train_config,
    train_sbir,
)
from sketchinvert.fgsbir.losses import (
    decorrelation_loss,
    quadruplet_triplet_loss,
    triplet_margin_loss,
)
from sketchinvert.fgsbir.retrieval import rank_gallery
from sketchinvert.evaluation import acc_at_k, evaluate_synthetic
from sketchinvert.styletransfer import (
    StyleTrainConfig,
    build_style_model,
    toy_style_config,
    train_style,
)
from sketchinvert.styletransfer.losses import (
    attribute_loss,
    discriminator_adversarial_loss,
    embedding_consistency_loss,
    generator_adversarial_loss,
    reconstruction_loss,
)
from sketchinvert.styletransfer.networks import (
    AttributeHead,
    DomainDecoder,
    EmbeddingProjector,
    PatchDiscriminator,
)
from sketchinvert.torchutil import batch_from_images, to_image


@contextmanager
def criterion(name):
    try:
        yield
    except Exception:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    print(f"ACCEPTANCE {name}: PASS")


# =====================================================================
# Criterion 1: loss zero-cases
# =====================================================================

class _IdentityStub:
    def encode(self, x):
        return (x,)

    def embed(self, taps):
        return taps[-1]

    def decode_contour(self, h, taps):
        return h

    def decode_sketch(self, h, taps):
        return h

    def reconstruct(self, x, domain):
        return x


class _ConstDisc:
    def __init__(self, value):
        self.value = value

    def __call__(self, x):
        return torch.full((x.shape[0], 1, 2, 2), self.value, dtype=x.dtype)


def test_criterion_loss_zero_cases():
    with criterion("loss zero-cases"):
        tol = 1e-6
        s = torch.rand(3, 1, 8, 8)
        c = torch.rand(3, 1, 8, 8)

        stub = _IdentityStub()
        assert abs(embedding_consistency_loss(stub, s, c).item()) <= tol
        assert abs(reconstruction_loss(stub, s, c).item()) <= tol

        attrs = (torch.rand(3, 33) > 0.5).float()
        perfect_head = lambda h: attrs
        assert abs(attribute_loss(perfect_head, torch.zeros(3, 4, 2, 2), attrs).item()) <= tol

        adv_stub = _IdentityStub()
        adv_stub.contour_discriminator = _ConstDisc(1.0)
        adv_stub.sketch_discriminator = _ConstDisc(1.0)
        assert abs(generator_adversarial_loss(adv_stub, s, c).item()) <= tol

        # linear critic with unit weight norm: real -> 1, fake -> 0, |grad| = 1
        class UnitDisc(nn.Module):
            def __init__(self, n):
                super().__init__()
                self.register_buffer("w", torch.ones(n, dtype=torch.float64) / math.sqrt(n))

            def forward(self, x):
                return x.flatten(1) @ self.w[:, None]

        n = 16
        disc = UnitDisc(n)
        real = (disc.w / (disc.w**2).sum()).reshape(1, 1, 4, 4).expand(3, 1, 4, 4).clone()
        fake = torch.zeros(3, 1, 4, 4, dtype=torch.float64)
        assert abs(discriminator_adversarial_loss(disc, real, fake, lambda_gp=10.0).item()) <= tol

        # equal positive/negative distances force the margin value
        q = torch.tensor([[1.0, 0.0]])
        pos = torch.tensor([[0.0, 1.0]])
        neg = torch.tensor([[0.0, -1.0]])
        assert abs(triplet_margin_loss(q, pos, neg, margin=0.1).item() - 0.1) <= tol


# =====================================================================
# Criterion 2: finite-difference gradient checks (<=64-param networks)
# =====================================================================

class _PyramidEncoder(nn.Module):
    """Parameter-free three-tap encoder used only for gradient checks."""

    tap_channels = (1, 1, 1)
    total_stride = 4

    def forward(self, x):
        return (x, F.avg_pool2d(x, 2), F.avg_pool2d(x, 4))


class _FdStyleModel(nn.Module):
    def __init__(self):
        super().__init__()
        taps = (1, 1, 1)
        self.encoder = _PyramidEncoder()
        self.projector = EmbeddingProjector(taps, 1)
        self.sketch_decoder = DomainDecoder(taps, 1, 1)
        self.contour_decoder = DomainDecoder(taps, 1, 1)
        self.sketch_discriminator = PatchDiscriminator(1, base=1, n_layers=1)
        self.contour_discriminator = PatchDiscriminator(1, base=1, n_layers=1)
        self.attribute_head = AttributeHead(1, 4)

    def encode(self, x):
        return self.encoder(x)

    def embed(self, taps):
        return self.projector(taps)

    def decode_sketch(self, h, taps):
        return self.sketch_decoder(h, taps)

    def decode_contour(self, h, taps):
        return self.contour_decoder(h, taps)

    def reconstruct(self, x, domain):
        taps = self.encode(x)
        h = self.embed(taps)
        return self.decode_sketch(h, taps) if domain == "sketch" else self.decode_contour(h, taps)


def _fd_check(loss_fn, params, eps=1e-5, tol=1e-3):
    params = [p for p in params if p.requires_grad]
    assert params
    loss = loss_fn()
    grads = torch.autograd.grad(loss, params, allow_unused=True)
    analytic = torch.cat(
        [
            (g if g is not None else torch.zeros_like(p)).reshape(-1)
            for g, p in zip(grads, params)
        ]
    )
    fd = []
    for p in params:
        for i in range(p.numel()):
            with torch.no_grad():
                orig = p.view(-1)[i].item()
                p.view(-1)[i] = orig + eps
            lp = loss_fn().item()
            with torch.no_grad():
                p.view(-1)[i] = orig - eps
            lm = loss_fn().item()
            with torch.no_grad():
                p.view(-1)[i] = orig
            fd.append((lp - lm) / (2.0 * eps))
    fd = torch.tensor(fd, dtype=analytic.dtype)
    denom = max(analytic.norm().item(), fd.norm().item(), 1e-12)
    rel = (analytic - fd).norm().item() / denom
    assert rel < tol, f"finite-difference mismatch: rel err {rel:.2e}"


@pytest.fixture(scope="module")
def fd_setup():
    torch.manual_seed(100)
    model = _FdStyleModel().double()
    model.eval()
    for module in (
        model.projector,
        model.sketch_decoder,
        model.contour_decoder,
        model.sketch_discriminator,
        model.contour_discriminator,
        model.attribute_head,
    ):
        n = sum(p.numel() for p in module.parameters())
        assert n <= 64, f"{type(module).__name__} has {n} params"
    g = torch.Generator().manual_seed(7)
    s = torch.rand(2, 1, 8, 8, generator=g, dtype=torch.float64) * 2 - 1
    c = torch.rand(2, 1, 8, 8, generator=g, dtype=torch.float64) * 2 - 1
    return model, s, c


def test_criterion_gradient_checks_translation(fd_setup):
    model, s, c = fd_setup
    gen_params = (
        list(model.projector.parameters())
        + list(model.sketch_decoder.parameters())
        + list(model.contour_decoder.parameters())
    )
    with criterion("gradient check: embedding consistency"):
        _fd_check(lambda: embedding_consistency_loss(model, s, c), gen_params)
    with criterion("gradient check: self-reconstruction"):
        _fd_check(lambda: reconstruction_loss(model, s, c), gen_params)
    with criterion("gradient check: attribute prediction"):
        attrs = (torch.rand(2, 4, generator=torch.Generator().manual_seed(3)) > 0.5).double()

        def cls_loss():
            taps = model.encode(s)
            return attribute_loss(model.attribute_head, model.embed(taps), attrs)

        _fd_check(cls_loss, list(model.attribute_head.parameters()) + list(model.projector.parameters()))
    with criterion("gradient check: adversarial generator"):
        _fd_check(lambda: generator_adversarial_loss(model, s, c), gen_params)
    with criterion("gradient check: adversarial critic with penalty"):
        u = torch.rand(2, 1, 1, 1, generator=torch.Generator().manual_seed(9), dtype=torch.float64)
        fake = torch.rand(2, 1, 8, 8, generator=torch.Generator().manual_seed(11), dtype=torch.float64) * 2 - 1

        def d_loss():
            return discriminator_adversarial_loss(
                model.sketch_discriminator, s, fake, lambda_gp=10.0, u=u
            )

        _fd_check(d_loss, list(model.sketch_discriminator.parameters()))


@pytest.fixture(scope="module")
def fd_sbir():
    from sketchinvert.fgsbir import SbirModelConfig

    torch.manual_seed(200)
    model = SbirModel(
        SbirModelConfig(
            backbone="toy", feature_dim=2, input_size=8, toy_channels=(1,), pretrained=False
        )
    ).double()
    model.eval()
    n = sum(p.numel() for p in model.parameters())
    assert n <= 64, f"toy retrieval backbone has {n} params"
    g = torch.Generator().manual_seed(5)
    s = torch.rand(3, 3, 8, 8, generator=g, dtype=torch.float64) * 2 - 1
    sc = torch.rand(3, 3, 8, 8, generator=g, dtype=torch.float64) * 2 - 1
    pos = torch.rand(3, 3, 8, 8, generator=g, dtype=torch.float64) * 2 - 1
    neg = torch.rand(3, 3, 8, 8, generator=g, dtype=torch.float64) * 2 - 1
    return model, s, sc, pos, neg


def test_criterion_gradient_checks_retrieval(fd_sbir):
    model, s, sc, pos, neg = fd_sbir
    params = list(model.parameters())

    # hinge must be strictly active or inactive so the loss is smooth locally
    with torch.no_grad():
        q = model.features(s) + model.features(sc)
        gap = 0.1 + ((q - model.features(pos)) ** 2).sum(1) - ((q - model.features(neg)) ** 2).sum(1)
        assert (gap.abs() > 1e-3).all(), "degenerate hinge for the gradient check"

    with criterion("gradient check: decorrelation"):
        _fd_check(lambda: decorrelation_loss(model.features(s), model.features(sc)), params)
    with criterion("gradient check: fused triplet"):
        _fd_check(lambda: quadruplet_triplet_loss(model, s, sc, pos, neg, margin=0.1), params)
    with criterion("gradient check: retrieval objective"):
        _fd_check(
            lambda: quadruplet_triplet_loss(model, s, sc, pos, neg, margin=0.1)
            + decorrelation_loss(model.features(s), model.features(sc)),
            params,
        )


# =====================================================================
# Criterion 3: decorrelation invariance + hand example
# =====================================================================

def test_criterion_decorrelation():
    with criterion("decorrelation invariance"):
        loss = decorrelation_loss(np.array([[1.0], [-1.0]]), np.array([[-1.0], [1.0]]))
        assert abs(loss.item() - 4.0) <= 1e-6

        rng = np.random.default_rng(0)
        f_s = rng.normal(size=(8, 6))
        f_c = rng.normal(size=(8, 6))
        base = decorrelation_loss(f_s, f_c).item()
        for _ in range(100):
            a_s = rng.uniform(0.1, 5.0, 6)
            b_s = rng.normal(size=6)
            a_c = rng.uniform(0.1, 5.0, 6)
            b_c = rng.normal(size=6)
            loss = decorrelation_loss(f_s * a_s + b_s, f_c * a_c + b_c).item()
            assert abs(loss - base) <= 1e-6 * max(1.0, abs(base))

        with pytest.raises(BatchTooSmallError):
            decorrelation_loss(np.ones((1, 2)), np.ones((1, 2)))


# =====================================================================
# Criterion 4: dynamic threshold worked example + randomized properties
# =====================================================================

def test_criterion_dynamic_threshold():
    from sketchinvert.contour import ThresholdConfig, dynamic_threshold
    from sketchinvert.contour.threshold import cut_value, retained_fraction

    with criterion("dynamic threshold"):
        cfg = ThresholdConfig()
        e = np.zeros((4, 4))
        e.flat[:8] = [0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2]
        frac = retained_fraction(0.5, cfg)
        assert math.isclose(frac, 0.07534, abs_tol=5e-6)
        assert math.floor(8 * frac) == 0
        assert cut_value(e, cfg) == 0.9
        kept = e[dynamic_threshold(e, cfg)[:, :, 0] == -1.0]
        assert kept.tolist() == [0.9]

        rng = np.random.default_rng(1234)
        for _ in range(1000):
            n_vals = int(rng.integers(4, 40))
            values = rng.uniform(0.01, 1.0, n_vals)
            small, large = 8, int(rng.integers(9, 24))
            counts = []
            for side in (large, small):  # increasing density r
                e = np.zeros((side, side))
                e.flat[:n_vals] = values
                counts.append(int((dynamic_threshold(e, cfg) == -1.0).sum()))
            assert counts[1] <= counts[0], "kept count must not grow with density"

            gamma = float(rng.uniform(0.05, 1.0))
            e = np.zeros((small, small))
            e.flat[:n_vals] = values
            a = dynamic_threshold(e, cfg)[:, :, 0] == -1.0
            b = dynamic_threshold(e * gamma, cfg)[:, :, 0] == -1.0
            assert np.array_equal(a, b), "kept set must be scale-invariant"


# =====================================================================
# Criterion 5: style-transfer toy training run
# =====================================================================

@pytest.fixture(scope="module")
def toy_data():
    return make_toy_dataset(seed=7, n_instances=20, size=32)


@pytest.fixture(scope="module")
def style_toy_run(toy_data):
    sketch_split, contour_split = toy_data
    data = merge_unpaired(sketch_split, contour_split)
    model = build_style_model(toy_style_config(32), init_seed=1)
    untrained = copy.deepcopy(model)
    untrained.eval()
    cfg = StyleTrainConfig(batch_size=8, iterations=2000)
    model, rows = train_style(model, data, cfg, rng_seed=3)
    return untrained, model, rows


def test_criterion_style_toy_run(style_toy_run, toy_data):
    with criterion("style-transfer toy run"):
        untrained, trained, rows = style_toy_run
        assert len(rows) == 2000  # completed without divergence
        for row in rows:
            assert all(np.isfinite(v) and v >= 0 for k, v in row.items() if k != "iteration")

        embed = [r["loss_embed"] for r in rows]
        first, last = np.mean(embed[:50]), np.mean(embed[-50:])
        assert last <= 0.5 * first, f"embed loss {first:.3f} -> {last:.3f}"

        sketch_split, contour_split = toy_data
        s = batch_from_images([x.image for x in sketch_split.sketches])
        gt = batch_from_images([img for _, img in contour_split.contours])
        with torch.no_grad():
            base = (untrained.translate(s, "sketch_to_contour") - gt).abs().mean().item()
            ours = (trained.translate(s, "sketch_to_contour") - gt).abs().mean().item()
        assert ours <= 0.5 * base, f"L1 {base:.4f} -> {ours:.4f}"


# =====================================================================
# Criterion 6: retrieval overfit + decorrelation ablation
# =====================================================================

@pytest.fixture(scope="module")
def sbir_overfit_run(style_toy_run, toy_data):
    _, style_model, _ = style_toy_run
    sketch_split, _ = toy_data

    def run(decorr_gradient):
        torch.manual_seed(0)
        model = SbirModel(toy_sbir_config(32))
        cfg = toy_sbir_train_config(iterations=1500)
        if not decorr_gradient:
            cfg = type(cfg)(**{**cfg.__dict__, "decorr_gradient": False})
        return train_sbir(model, sketch_split, style_model, cfg, rng_seed=5)

    return run(True), run(False), style_model, sketch_split


def test_criterion_sbir_overfit(sbir_overfit_run):
    with criterion("retrieval overfit + ablation"):
        (model, rows), (model_ablated, rows_ablated), style_model, split = sbir_overfit_run
        index = GalleryIndex.from_photos(list(split.photos), model)
        hits = sum(
            retrieve(s.image, index, model, style_model, query_id=s.instance_id).ranking[0][0]
            == s.instance_id
            for s in split.sketches
        )
        acc = hits / len(split.sketches)
        assert acc >= 0.95, f"training acc@1 {acc:.2f}"

        final = np.mean([r["loss_decorr"] for r in rows[-50:]])
        final_ablated = np.mean([r["loss_decorr"] for r in rows_ablated[-50:]])
        assert final < final_ablated, f"decorr {final:.1f} !< ablated {final_ablated:.1f}"


# =====================================================================
# Criterion 7: retrieval metric properties
# =====================================================================

def test_criterion_retrieval_metric(sbir_overfit_run, toy_data):
    with criterion("retrieval metric"):
        (model, _), _, style_model, split = sbir_overfit_run

        report = evaluate_synthetic(style_model, model, split)
        assert report.acc_at_1 <= report.acc_at_5 <= report.acc_at_10 <= 1.0

        # manual composition must agree exactly
        from sketchinvert.data.images import resize_image

        index = GalleryIndex.from_photos(list(split.photos), model)
        manual = []
        for s in split.sketches:
            img = resize_image(s.image, 32, 32)
            with torch.no_grad():
                synth = style_model.translate(batch_from_images([img]), "sketch_to_contour")
            manual.append(retrieve(to_image(synth[0]), index, model, style_model, query_id=s.instance_id))
        assert report.acc_at_1 == acc_at_k(manual, 1)
        assert report.acc_at_5 == acc_at_k(manual, 5)
        assert report.acc_at_10 == acc_at_k(manual, 10)

        # synthesised contours must beat chance on the toy gallery
        assert report.acc_at_1 > 1.0 / len(split.photos)

        # chance baseline: random unit features hit rank 1 at rate 1/n
        rng = np.random.default_rng(0)
        n, d, trials = 20, 8, 1000
        hits = 0
        for _ in range(trials):
            feats = rng.normal(size=(n, d))
            feats /= np.linalg.norm(feats, axis=1, keepdims=True)
            gallery = GalleryIndex([f"p{i}" for i in range(n)], feats)
            q = rng.normal(size=d)
            hits += rank_gallery(q / np.linalg.norm(q), gallery).ranking[0][0] == "p0"
        p = 1.0 / n
        sigma = math.sqrt(p * (1 - p) / trials)
        assert abs(hits / trials - p) < 4 * sigma + 1e-9


# =====================================================================
# Criterion 8: Grad-CAM
# =====================================================================

class _QuadrantModel(nn.Module):
    def __init__(self, size=16):
        super().__init__()
        self.size = size

    def features_with_conv_map(self, x):
        half = self.size // 2
        masks = torch.zeros(4, self.size, self.size)
        masks[0, :half, :half] = 1.0
        masks[1, :half, half:] = 1.0
        masks[2, half:, :half] = 1.0
        masks[3, half:, half:] = 1.0
        lum = x.mean(dim=1, keepdim=True) + 1.0
        conv_map = lum * masks[None]
        return conv_map, conv_map.mean(dim=(2, 3))


def test_criterion_gradcam(sbir_overfit_run, toy_data):
    with criterion("grad-cam"):
        (model, _), _, style_model, split = sbir_overfit_run
        img = split.sketches[0].image
        cam = gradcam(model, img, "sketch", dims=[0, 1])
        assert cam.shape == img.shape[:2]
        assert cam.min() >= 0.0
        photo = split.photos[0][1]
        cam_p = gradcam(model, photo, "photo", dims=[3])
        assert cam_p.shape == photo.shape[:2] and cam_p.min() >= 0.0

        # constructed linear model localises its known active region, 50/50 trials
        quad = _QuadrantModel(size=16)
        rng = np.random.default_rng(11)
        hits = 0
        for _ in range(50):
            quadrant = int(rng.integers(0, 4))
            image = np.full((16, 16, 1), -1.0, dtype=np.float32)
            r0 = 0 if quadrant in (0, 1) else 8
            c0 = 0 if quadrant in (0, 2) else 8
            r = r0 + int(rng.integers(1, 6))
            c = c0 + int(rng.integers(1, 6))
            image[r : r + 2, c : c + 2, 0] = 1.0
            heat = gradcam(quad, image, "sketch", dims=[quadrant])
            rr, cc = np.unravel_index(np.argmax(heat), heat.shape)
            hits += ((rr < 8) == (quadrant in (0, 1))) and ((cc < 8) == (quadrant in (0, 2)))
        assert hits == 50


# =====================================================================
# Criterion 9: service round-trip on toy-trained checkpoints
# =====================================================================

def test_criterion_service_round_trip(tmp_path, style_toy_run, sbir_overfit_run, toy_data):
    from fastapi.testclient import TestClient

    from sketchinvert.checkpoint import save_sbir_checkpoint, save_style_checkpoint
    from sketchinvert.service import ServiceConfig, create_app, load_snapshot

    with criterion("service round-trip"):
        _, style_model, _ = style_toy_run
        (sbir_model, _), _, _, sketch_split = sbir_overfit_run
        sketch_split_full, contour_split = toy_data
        save_split(merge_unpaired(sketch_split_full, contour_split), tmp_path / "data")
        save_style_checkpoint(tmp_path / "style.pt", style_model)
        save_sbir_checkpoint(tmp_path / "sbir.pt", sbir_model)

        cfg = ServiceConfig(
            style_checkpoint=str(tmp_path / "style.pt"),
            sbir_checkpoint=str(tmp_path / "sbir.pt"),
            gallery_dir=str(tmp_path / "data"),
            photo_size=32,
        )
        client = TestClient(create_app(cfg, load_snapshot(cfg)))

        png = image_to_png_bytes(sketch_split_full.sketches[0].image)
        b64 = base64.b64encode(png).decode("ascii")

        r1 = client.post("/stylize", json={"image": b64})
        r2 = client.post("/stylize", json={"image": b64})
        assert r1.status_code == 200
        assert r1.content == r2.content
        contour = png_bytes_to_array(base64.b64decode(r1.json()["contour"]))
        assert contour.shape == (32, 32, 1)

        q1 = client.post("/retrieve", json={"image": b64, "k": 10})
        q2 = client.post("/retrieve", json={"image": b64, "k": 10})
        assert q1.status_code == 200
        assert q1.content == q2.content
        results = q1.json()["results"]
        assert len(results) == 10
        dists = [item["distance"] for item in results]
        assert dists == sorted(dists)
        for item in results:
            assert set(item) == {"id", "distance", "thumbnail_url"}
            assert isinstance(item["id"], str)
            assert round(item["distance"], 6) == item["distance"]

        assert client.get("/healthz").json() == {"status": "ok", "model_loaded": True}
