import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vorpca import (FormatError, LabeledDataset, OcclusionSpec, ParameterError, ToyLineSpec,
                    clustering_accuracy, gen_lowrank_blobs, gen_toy_line, inject_occlusion,
                    kmeans, noise_free_residual, pca_fit, read_labels, read_matrix,
                    write_labels, write_matrix)
from vorpca._rng import gaussian, make_rng
from vorpca.datasets import canonical_toy_line


def test_rng_streams():
    a = make_rng(5).random(4)
    assert np.array_equal(a, make_rng(5).random(4))
    assert not np.array_equal(a, make_rng(6).random(4))
    assert not np.array_equal(make_rng(5, 0).random(4), make_rng(5, 1).random(4))
    assert isinstance(make_rng(0).bit_generator, np.random.Philox)


def test_box_muller_order_and_moments():
    u = make_rng(3).random(4)
    r = np.sqrt(-2 * np.log1p(-u[0::2]))
    expected = np.column_stack([r * np.cos(2 * np.pi * u[1::2]),
                                r * np.sin(2 * np.pi * u[1::2])]).ravel()
    np.testing.assert_allclose(gaussian(make_rng(3), (2, 2)).ravel(), expected, rtol=1e-15)
    assert gaussian(make_rng(3), 3).shape == (3,)
    z = gaussian(make_rng(9), 200000)
    assert abs(z.mean()) < 0.01 and abs(z.std() - 1) < 0.01


def test_canonical_toy_line():
    spec = canonical_toy_line()
    assert (spec.n_inliers, spec.n_outliers) == (8, 2)
    assert spec.outlier_offsets == [[4.0, -5.0], [-4.0, 5.0]]
    ds = gen_toy_line()
    assert ds.data.shape == (2, 10) and ds.c == 2
    assert ds.labels.tolist() == [0] * 8 + [1] * 2
    assert np.array_equal(ds.data, gen_toy_line().data)
    assert ToyLineSpec.from_dict(spec.to_dict()) == spec


def test_toy_line_noiseless_lies_on_line():
    spec = ToyLineSpec(n_outliers=0, outlier_offsets=[], inlier_noise_sigma=0.0,
                       direction=(0.6, 0.8))
    X = gen_toy_line(spec).data
    assert np.linalg.norm(X - pca_fit(X, 1).product()) < 1e-12
    with pytest.raises(ParameterError):
        gen_toy_line(ToyLineSpec(direction=(1.0, 1.0)))
    with pytest.raises(ParameterError):
        gen_toy_line(ToyLineSpec(n_outliers=1))


def test_blobs_properties():
    ds, X0 = gen_lowrank_blobs(30, 50, 4, 3, 0.0, seed=2)
    assert np.linalg.matrix_rank(ds.data) <= 4
    assert np.array_equal(ds.data, X0)
    assert np.bincount(ds.labels).tolist() == [17, 17, 16]
    ds2, _ = gen_lowrank_blobs(30, 50, 4, 3, 0.0, seed=2)
    assert np.array_equal(ds.data, ds2.data)
    noisy, X0n = gen_lowrank_blobs(30, 50, 4, 3, 0.5, seed=2)
    assert np.array_equal(X0n, X0) and not np.array_equal(noisy.data, X0)
    for args in [(30, 50, 30, 3, 0.1), (30, 50, 4, 0, 0.1), (30, 50, 4, 3, -1.0)]:
        with pytest.raises(ParameterError):
            gen_lowrank_blobs(*args, seed=0)


def test_blobs_separable_cluster_perfectly():
    ds, _ = gen_lowrank_blobs(20, 60, 3, 3, 0.0, seed=1, separation=10.0, spread=0.1)
    res = kmeans(ds.data, 3, restarts=10)
    assert clustering_accuracy(res.assignments, ds.labels) == 1.0


def test_labeled_dataset_validation():
    with pytest.raises(ParameterError):
        LabeledDataset(np.zeros((2, 3)), [0, 1], 2)
    with pytest.raises(ParameterError):
        LabeledDataset(np.zeros((2, 3)), [0, 1, 2], 2)
    with pytest.raises(ParameterError):
        LabeledDataset(np.zeros((2, 3)), [0, 0, 0], 2)


def test_occlusion_full_cover():
    spec = OcclusionSpec(3, 4, block_rows=3, block_cols=4, fraction=1.0, fill_value=-2.5)
    Xc, mask = inject_occlusion(np.ones((12, 5)), spec)
    assert mask.all() and np.all(Xc == -2.5)


def test_occlusion_ten_percent(rng):
    X = rng.standard_normal((20, 100))
    spec = OcclusionSpec(4, 5, block_rows=2, block_cols=2, fill_value=9.0, seed=1)
    Xc, mask = inject_occlusion(X, spec)
    assert mask.sum() == 10
    changed = Xc != X
    assert not changed[:, ~mask].any()
    assert changed.sum(axis=0)[mask].max() <= 4
    # only block entries change, all set to the fill value
    assert np.all(Xc[changed] == 9.0)
    diff = np.sqrt(np.sum((Xc[changed] - X[changed]) ** 2))
    assert noise_free_residual(Xc, X) == pytest.approx(diff)
    Xc2, mask2 = inject_occlusion(X, spec)
    assert np.array_equal(Xc, Xc2) and np.array_equal(mask, mask2)


def test_occlusion_block_shape():
    spec = OcclusionSpec(6, 7, fraction=1.0, fill_value=1.0, seed=5)
    Xc, _ = inject_occlusion(np.zeros((42, 3)), spec)
    for j in range(3):
        img = Xc[:, j].reshape(6, 7)
        rows, cols = np.nonzero(img)
        assert (np.ptp(rows) + 1, np.ptp(cols) + 1, rows.size) == (4, 5, 20)


def test_occlusion_errors():
    with pytest.raises(ParameterError):
        inject_occlusion(np.zeros((10, 3)), OcclusionSpec(3, 4))
    with pytest.raises(ParameterError):
        inject_occlusion(np.zeros((12, 3)), OcclusionSpec(3, 4, block_rows=5))
    with pytest.raises(ParameterError):
        inject_occlusion(np.zeros((12, 3)), OcclusionSpec(3, 4, 2, 2, fraction=0.0))


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 5)),
              elements=st.floats(allow_nan=False, allow_infinity=False)))
def test_matrix_round_trip_bit_exact(tmp_path_factory, M):
    path = tmp_path_factory.mktemp("io") / "m.csv"
    write_matrix(M, path)
    back = read_matrix(path)
    assert back.shape == M.shape
    assert np.array_equal(back.view(np.int64), M.view(np.int64))


def test_matrix_format(tmp_path, rng):
    M = rng.standard_normal((7, 3))
    write_matrix(M, tmp_path / "m.csv")
    lines = (tmp_path / "m.csv").read_text().splitlines()
    assert lines[0] == "# vor-matrix p=7 n=3" and len(lines) == 8
    assert np.array_equal(read_matrix(tmp_path / "m.csv"), M)
    (tmp_path / "s.csv").write_text("p=2,n=2\n1,2\n3,4\n")
    S = read_matrix(tmp_path / "s.csv")
    np.testing.assert_array_equal(S[:, 0], [1, 3])
    np.testing.assert_array_equal(S[:, 1], [2, 4])


@pytest.mark.parametrize("text, line", [
    ("# vor-matrix p=2 n=2\n1,nan\n3,4\n", 2),
    ("# vor-matrix p=2 n=2\n1,inf\n3,4\n", 2),
    ("# vor-matrix p=2 n=2\n1,2\n3\n", 3),
    ("# vor-matrix p=2 n=2\n1,2\n3,4\n5,6\n", 4),
    ("# vor-matrix p=2 n=2\n1,2\n3,x\n", 3),
    ("# matrix 2 2\n1,2\n3,4\n", 1),
    ("", 1),
])
def test_matrix_format_errors(tmp_path, text, line):
    (tmp_path / "bad.csv").write_text(text)
    with pytest.raises(FormatError) as err:
        read_matrix(tmp_path / "bad.csv")
    assert err.value.line == line
    assert f":{line}:" in str(err.value)


def test_missing_file(tmp_path):
    with pytest.raises(FormatError):
        read_matrix(tmp_path / "nope.csv")


def test_labels_round_trip_and_errors(tmp_path):
    write_labels([0, 2, 1, 2], tmp_path / "y.csv")
    assert (tmp_path / "y.csv").read_text().splitlines()[0] == "# vor-labels n=4 c=3"
    y, c = read_labels(tmp_path / "y.csv")
    assert y.tolist() == [0, 2, 1, 2] and c == 3
    (tmp_path / "b.csv").write_text("# vor-labels n=2 c=2\n0\n5\n")
    with pytest.raises(FormatError):
        read_labels(tmp_path / "b.csv")
    (tmp_path / "b.csv").write_text("# vor-labels n=3 c=2\n0\n1\n")
    with pytest.raises(FormatError):
        read_labels(tmp_path / "b.csv")


def test_write_matrix_rejects_non_finite(tmp_path):
    with pytest.raises(ValueError):
        write_matrix(np.array([[np.nan]]), tmp_path / "m.csv")
    assert not (tmp_path / "m.csv").exists()
    assert not list(tmp_path.iterdir())
