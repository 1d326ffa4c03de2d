import numpy as np
import pytest

import supalign


def test_projector_matches_direct_solve():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((12, 5))
    eps = 0.3
    ref = x @ np.linalg.solve(x.T @ x + eps * np.eye(5), x.T)
    assert np.allclose(supalign.projector(x, eps), ref, atol=1e-10)


def test_det_h_matches_numpy():
    for t, gamma in [(5, 0.0), (5, 0.2), (7, 0.1), (10, 0.25)]:
        assert supalign.det_h(t, gamma) == pytest.approx(np.linalg.det(supalign.build_h(t, gamma)), abs=1e-10)


def test_fit_map_and_correlate():
    d = supalign.synth(seed=1)
    assert (d.num_subjects, d.num_timepoints, d.num_features) == (6, 80, 50)
    model = supalign.fit(d, supalign.Method.sha)
    assert model.w.shape == (4, 4)
    assert model.g.shape == (80, 4)
    assert np.allclose(model.w.T @ model.w, np.eye(4), atol=1e-8)
    z = supalign.map_dataset(model, d)
    assert np.allclose(z[2], model.map(d.data(2)))
    sha = supalign.correlations(z, d)
    none = supalign.correlations(supalign.map_dataset(supalign.fit(d, supalign.Method.none), d), d)
    assert sha["rho3"]["mean"] > none["rho3"]["mean"]
    assert sha["rho4"]["mean"] < 0


def test_loso_on_identical_subjects():
    d = supalign.synth(sigma=0.0, rotation="identity")
    r = supalign.loso(d, supalign.Method.none)
    assert r["accuracy_mean"] == 1.0
    assert len(r["fold_accuracy"]) == 6


def test_dataset_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    xs = [rng.standard_normal((6, 4)) for _ in range(2)]
    classes = [[0, 0, 1, 1, -1, 1]] * 2
    d = supalign.Dataset(xs, classes, ["a", "b"], ["p1", "p2"])
    d.save(tmp_path)
    back = supalign.load_dataset(tmp_path / "manifest.json")
    assert back.ids == ["p1", "p2"]
    assert back.classes(1) == classes[1]
    assert np.array_equal(back.data(0), xs[0])


def test_errors_carry_a_kind():
    d = supalign.synth()
    with pytest.raises(supalign.Error) as info:
        supalign.fit(d, supalign.Method.sha, k=9)
    assert info.value.kind == "invalid-argument"
    with pytest.raises(supalign.Error) as info:
        supalign.load_dataset("/nonexistent/manifest.json")
    assert info.value.kind == "io"
