import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.linear_model import Ridge

from sparsevsa.binding import hadamard_bind, lcc_bind
from sparsevsa.classify import (
    FeatureKeys,
    LevelEncoder,
    MinMaxScaler,
    PipelineConfig,
    _one_hot,
    _path_predictions,
    _ridge_path,
    bundled_datasets,
    clip_values,
    cross_validate,
    dequantize,
    encode_sample,
    encode_samples,
    fold_indices,
    grid_search,
    ingest_dataset,
    level_overlap,
    load_bundled,
    predict,
    quantize,
    ridge_train,
)
from sparsevsa.core import BlockCodeVector


def naive_block_shift(N, K, v):
    # walk the increments: step t shifts block t mod K by one
    Lb = N // K
    hot = np.zeros(K, dtype=int)
    for t in range(v):
        hot[t % K] += 1
    return BlockCodeVector(K, Lb, hot).to_array()


# ------------------------------------------------------------ level codes


def test_block_shift_matches_incremental_construction():
    enc = LevelEncoder(128, 16)
    assert enc.levels == 113
    for v in (0, 1, 15, 16, 17, 64, 112):
        assert np.array_equal(enc.encode(v), naive_block_shift(128, 16, v))


def test_block_shift_overlap_profile():
    enc = LevelEncoder(128, 16)
    assert level_overlap(enc, 0, 0) == 16
    assert level_overlap(enc, 0, 64) == 0
    # linear decrease over one full sweep of the blocks
    assert [level_overlap(enc, 0, v) for v in range(17)] == list(range(16, -1, -1))


@settings(max_examples=60)
@given(st.sampled_from([(32, 4), (64, 8), (60, 6)]), st.data())
def test_block_shift_overlap_formula(shape, data):
    N, K = shape
    enc = LevelEncoder(N, K)
    u = data.draw(st.integers(0, enc.levels - 1))
    v = data.draw(st.integers(0, enc.levels - 1))
    assert level_overlap(enc, u, v) == max(0, K - abs(u - v))
    assert enc.encode(u).sum() == K


@settings(max_examples=60)
@given(st.integers(1, 40), st.data())
def test_thermometric_overlap(N, data):
    enc = LevelEncoder(N, scheme="thermometric")
    u = data.draw(st.integers(0, N))
    v = data.draw(st.integers(0, N))
    assert level_overlap(enc, u, v) == N - 2 * abs(u - v)


def test_level_encoder_validation():
    with pytest.raises(ValueError):
        LevelEncoder(100, 7)
    with pytest.raises(ValueError):
        LevelEncoder(64, 8, "gray")
    enc = LevelEncoder(64, 8)
    with pytest.raises(ValueError):
        enc.encode(enc.levels)
    with pytest.raises(ValueError):
        enc.encode(1.5)
    with pytest.raises(ValueError):
        LevelEncoder(8, scheme="thermometric").hot(1)


# --------------------------------------------------------- sample coding


def test_sparse_sample_encoding_matches_lcc_oracle():
    cfg = PipelineConfig(N=96, K=8, scheme="sparse", seed=3)
    enc = cfg.encoder
    keys = FeatureKeys.random(4, cfg)
    levels = np.array([0, 5, 40, enc.levels - 1])
    ref = sum(lcc_bind(BlockCodeVector(8, 12, enc.hot(lv)), BlockCodeVector(8, 12, keys.values[f])).to_array()
              for f, lv in enumerate(levels))
    assert np.array_equal(encode_sample(levels, keys, enc), ref)
    assert np.array_equal(encode_sample(levels, keys, enc, kappa=1), np.minimum(ref, 1))


def test_dense_sample_encoding_matches_hadamard_oracle():
    cfg = PipelineConfig(N=40, scheme="dense", seed=1)
    enc = cfg.encoder
    keys = FeatureKeys.random(3, cfg)
    levels = np.array([0, 17, 40])
    ref = sum(hadamard_bind(enc.encode(lv).astype(int), keys.values[f].astype(int))
              for f, lv in enumerate(levels))
    assert np.array_equal(encode_sample(levels, keys, enc), ref)
    assert np.abs(encode_sample(levels, keys, enc, kappa=1)).max() <= 1


def test_encode_samples_checks_shapes():
    cfg = PipelineConfig(N=64, K=8)
    keys = FeatureKeys.random(3, cfg)
    with pytest.raises(ValueError):
        encode_samples(np.zeros((2, 4), int), keys, cfg.encoder)
    with pytest.raises(ValueError):
        encode_samples(np.zeros((2, 3), int), keys, LevelEncoder(64, scheme="thermometric"))


def test_keys_deterministic():
    cfg = PipelineConfig(N=64, K=8, seed=9)
    assert np.array_equal(FeatureKeys.random(5, cfg).values, FeatureKeys.random(5, cfg).values)


def test_pipeline_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(scheme="other")
    with pytest.raises(ValueError):
        PipelineConfig(N=100, K=7)
    with pytest.raises(ValueError):
        PipelineConfig(kappa=0)
    with pytest.raises(ValueError):
        PipelineConfig(folds=1)


@given(st.lists(st.integers(-100, 100), min_size=1, max_size=20), st.integers(1, 15))
def test_clip_values(xs, kappa):
    out = clip_values(np.array(xs), kappa)
    assert np.all(np.abs(out) <= kappa)


# ------------------------------------------------------------------ ridge


@pytest.mark.parametrize("n,N", [(60, 20), (20, 60)])
def test_ridge_matches_sklearn(n, N):
    rng = np.random.default_rng(0)
    H = rng.standard_normal((n, N))
    y = rng.integers(0, 3, n)
    model = ridge_train(H, y, 0.7)
    ref = Ridge(alpha=0.7, fit_intercept=False).fit(H, _one_hot(y, np.unique(y)))
    assert np.allclose(model.W_out, ref.coef_, atol=1e-8)
    assert np.array_equal(predict(model, H), np.unique(y)[np.argmax(ref.predict(H), 1)])


def test_ridge_path_matches_direct_solve():
    rng = np.random.default_rng(1)
    for n, N in ((50, 30), (30, 50)):
        Htr, Hte = rng.standard_normal((n, N)), rng.standard_normal((10, N))
        y = rng.integers(0, 4, n)
        path = _ridge_path(Htr, _one_hot(y, np.arange(4)), Hte)
        for lam in (0.01, 1.0, 30.0):
            direct = predict(ridge_train(Htr, y, lam, np.arange(4)), Hte)
            assert np.array_equal(_path_predictions(path, lam), direct)


def test_ridge_singular_raises():
    H = np.ones((4, 3))
    with pytest.raises(np.linalg.LinAlgError):
        ridge_train(H, np.array([0, 1, 0, 1]), 0.0)


def test_ridge_one_hot_input_and_scalar_predict():
    H = np.eye(3)
    model = ridge_train(H, np.eye(3), 1e-6)
    assert predict(model, H[1]) == 1


# ---------------------------------------------------------------- datasets


def test_bundled_datasets_present():
    names = set(bundled_datasets())
    assert {"iris", "wine", "breast_cancer", "digits500", "anes96"} <= names
    ds = load_bundled("iris")
    assert ds.X.shape == (150, 4)
    assert len(ds.classes) == 3
    with pytest.raises(KeyError):
        load_bundled("nope")


def test_ingest_errors(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("")
    with pytest.raises(ValueError):
        ingest_dataset(p)
    p.write_text("a,label\n1,x\n2,x\n")
    with pytest.raises(ValueError, match="single-class"):
        ingest_dataset(p)
    p.write_text("a,label\n1,x\nfoo,y\n")
    with pytest.raises(ValueError, match="non-numeric"):
        ingest_dataset(p)
    p.write_text("a,cls\n1,x\n2,y\n")
    with pytest.raises(ValueError, match="label"):
        ingest_dataset(p)
    ds = ingest_dataset(p, label="cls")
    assert ds.feature_names == ("a",) and ds.name == "d"


def test_minmax_scaler_fit_on_train_only():
    s = MinMaxScaler.fit(np.array([[0.0, 5.0], [10.0, 5.0]]))
    out = s.transform(np.array([[5.0, 5.0], [20.0, 7.0], [-3.0, 1.0]]))
    assert np.allclose(out, [[0.5, 0], [1.0, 0], [0.0, 0]])


@given(st.lists(st.floats(0, 1), min_size=1, max_size=30), st.integers(2, 500))
def test_quantize_roundtrip_error(us, levels):
    U = np.array(us)
    L = quantize(U, levels)
    assert L.min() >= 0 and L.max() <= levels - 1
    assert np.all(np.abs(dequantize(L, levels) - U) <= 0.5 / (levels - 1) + 1e-12)


def test_quantize_rejects_unnormalized():
    with pytest.raises(ValueError):
        quantize(np.array([1.5]), 4)


def test_fold_indices_stratified_and_checked():
    y = np.repeat([0, 1, 2], [10, 20, 30])
    folds = fold_indices(y, 5, seed=0)
    assert sorted(np.concatenate([te for _, te in folds]).tolist()) == list(range(60))
    for _, te in folds:
        assert np.bincount(y[te]).tolist() == [2, 4, 6]
    with pytest.raises(ValueError):
        fold_indices(np.array([0, 0, 0, 1]), 2, 0)


# -------------------------------------------------------- model selection


def test_cross_validate_iris_both_schemes():
    ds = load_bundled("iris")
    sparse = cross_validate(ds, PipelineConfig(N=256, K=16, kappa=3, lam=1.0, scheme="sparse"))
    dense = cross_validate(ds, PipelineConfig(N=300, kappa=3, lam=1.0, scheme="dense"))
    assert sparse.mean > 0.85 and dense.mean > 0.85
    assert len(sparse.fold_accuracies) == 4


def test_grid_search_consistent_with_cross_validate():
    ds = load_bundled("iris")
    grid = {"K": (16,), "ratio": (1 / 16, 1 / 8), "kappa": (1, 3), "lam": (0.1, 1.0, 10.0)}
    res = grid_search(ds, "sparse", grid, folds=4, seed=0)
    assert len(res.table) == 2 * 2 * 3
    assert res.best_mean == max(r["mean"] for r in res.table)
    again = cross_validate(ds, res.best)
    assert again.mean == pytest.approx(res.best_mean, abs=1e-12)


def test_grid_search_tie_break_prefers_small_n_then_lambda():
    ds = load_bundled("iris")
    grid = {"N": (50, 100), "kappa": (15,), "lam": (1e-3, 1e-3 * 1.0001)}
    res = grid_search(ds, "dense", grid, folds=3, seed=1)
    top = [r for r in res.table if round(r["mean"], 12) == round(res.best_mean, 12)]
    assert res.best.N == min(r["N"] for r in top)
    assert res.best.lam == min(r["lam"] for r in top if r["N"] == res.best.N)
