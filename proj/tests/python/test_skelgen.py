import numpy as np
import pytest

import skelgen


def random_coords(frames, seed):
    rng = np.random.default_rng(seed)
    return rng.uniform(-0.1, 1.1, size=(frames, skelgen.MOTION_DIM))


def test_local_representation_round_trip():
    coords = random_coords(50, 0)
    back = skelgen.from_local(skelgen.to_local(coords))
    assert np.max(np.abs(back - coords)) < 1e-9


def test_smoothing_leaves_mouth_untouched():
    coords = random_coords(20, 1)
    out = skelgen.smooth(coords, 5)
    mouth = skelgen.mouth_indices()
    assert mouth == list(range(71, 91))
    cols = [2 * k + c for k in mouth for c in (0, 1)]
    np.testing.assert_array_equal(out[:, cols], coords[:, cols])
    assert np.allclose(out[2:-2, 0], np.convolve(coords[:, 0], np.ones(5) / 5, mode="valid"))


def test_schedule_and_q_sample():
    sched = skelgen.make_schedule("cosine", 1000)
    ab = np.asarray(sched["alpha_bar"])
    assert np.all(np.diff(ab) < 0)
    assert ab[0] > 0.99 and ab[-1] < 0.01
    eps = np.random.default_rng(2).standard_normal((1000, 4))
    xt = skelgen.q_sample(np.zeros((1000, 4)), 999, eps)
    assert np.allclose(xt, np.sqrt(1 - ab[-1]) * eps)


def test_cfg_identities():
    rng = np.random.default_rng(3)
    u, c = rng.standard_normal((2, 5, 6))
    np.testing.assert_array_equal(skelgen.cfg_combine(u, c, 1.0), c)
    np.testing.assert_array_equal(skelgen.cfg_combine(u, c, 0.0), u)


def test_ssim_matches_scikit_image():
    metrics = pytest.importorskip("skimage.metrics")
    rng = np.random.default_rng(4)
    for _ in range(3):
        a = rng.uniform(size=(32, 40))
        b = np.clip(0.7 * a + 0.3 * rng.uniform(size=a.shape), 0, 1)
        ref = metrics.structural_similarity(
            a, b, gaussian_weights=True, sigma=1.5, use_sample_covariance=False, data_range=1.0
        )
        assert abs(skelgen.ssim(a, b) - ref) < 1e-4


def test_psnr_and_pjpe():
    assert skelgen.psnr_from_mse(0.01) == 20.0
    assert skelgen.psnr(np.zeros((4, 4)), np.zeros((4, 4))) == 100.0
    a = random_coords(3, 5)
    b = a.copy()
    b[:, 0::2] += 0.03
    b[:, 1::2] += 0.04
    per_joint, mean = skelgen.pjpe(a, b)
    assert per_joint.shape == (133,)
    assert mean == pytest.approx(0.05)


def test_shots_and_segments():
    red = np.zeros((8, 8, 3), np.uint8)
    red[..., 0] = 250
    blue = np.zeros((8, 8, 3), np.uint8)
    blue[..., 2] = 250
    hists = [skelgen.color_histogram(red)] * 50 + [skelgen.color_histogram(blue)] * 50
    assert skelgen.detect_shots(hists) == [50]
    assert skelgen.segment_clips([200], 700) == [(0, 200), (200, 575), (575, 700)]


def test_train_generate_export(tmp_path):
    corpus = skelgen.synthetic_corpus(clips=3, frames=16)
    coords = [c for _, c, _ in corpus]
    audio = [a for _, _, a in corpus]
    config = {
        "batch_size": 4,
        "total_steps": 20,
        "checkpoint_every": 10,
        "window_frames": 16,
        "window_stride": 16,
        "diffusion_steps": 20,
        "learning_rate": 1e-3,
        "model.d_model": 16,
        "model.n_layers": 1,
        "model.n_heads": 2,
        "model.time_embed_dim": 16,
        "threads": 1,
    }
    files, losses = skelgen.train(coords, audio, config, tmp_path / "ckpt")
    assert len(files) == 2
    assert len(losses) == 20 and all(np.isfinite(losses))

    ref = coords[0][:1]
    feats = np.random.default_rng(6).standard_normal((24, skelgen.AUDIO_DIM))
    g1 = skelgen.generate(files[-1], ref, feats, seed=7)
    g2 = skelgen.generate(files[-1], ref, feats, seed=7)
    assert g1.shape == (12, skelgen.MOTION_DIM)
    np.testing.assert_array_equal(g1, g2)
    with pytest.raises(ValueError):
        skelgen.generate(files[-1], ref, feats, frames=17)

    skelgen.export_pose(g1, path=tmp_path / "g.pose.txt")
    back, conf = skelgen.import_pose(tmp_path / "g.pose.txt")
    assert np.max(np.abs(back - g1)) < 1e-6
    assert np.all(conf == 1.0)

    img = skelgen.render_frame(g1[:1], size=64)
    assert img.shape == (64, 64, 3) and img.dtype == np.uint8
