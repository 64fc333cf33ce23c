"""
Classification with distributed feature encodings and a ridge readout.

Each feature value is quantized to a level code, bound to a per-feature key
and the bound pairs are superposed and clipped. Two pipelines:

``dense``   thermometric bipolar level codes, bipolar keys, Hadamard binding
``sparse``  block-shift level codes, block-code keys, LCC binding
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import scipy.linalg as sla
from sklearn.model_selection import StratifiedKFold

from .core import child_seeds, make_rng

SCHEMES = ("sparse", "dense")

# default search grids
KAPPA_GRID = (1, 3, 7, 15)
LAMBDA_GRID = tuple(2.0**p for p in range(-10, 6))
DENSE_N_GRID = tuple(range(50, 1501, 50))
SPARSE_K_GRID = (16, 32, 64, 128)
SPARSE_RATIO_GRID = (2**-5, 2**-4, 2**-3, 2**-2)


# ------------------------------------------------------------ level codes


@dataclass(frozen=True)
class LevelEncoder:
    """Similarity-preserving codes for quantized scalars.

    ``block-shift``: K blocks of size N/K; level 0 has every hot index at 0
    and each increment shifts one block's hot index by one, block 0 first.
    ``thermometric``: bipolar, level v has its first v components at +1.
    """

    N: int
    K: int | None = None
    scheme: str = "block-shift"

    def __post_init__(self):
        if self.scheme == "block-shift":
            if self.K is None or self.K < 1 or self.N % self.K:
                raise ValueError(f"K={self.K} must divide N={self.N}")
        elif self.scheme != "thermometric":
            raise ValueError(f"unknown level scheme {self.scheme!r}")

    @property
    def levels(self) -> int:
        if self.scheme == "block-shift":
            return self.N - self.K + 1
        return self.N + 1

    @property
    def block_size(self) -> int:
        return self.N // self.K

    def _check(self, level):
        v = np.asarray(level)
        if not np.issubdtype(v.dtype, np.integer):
            if not np.all(v == np.round(v)):
                raise ValueError("levels must be integers")
            v = v.astype(np.int64)
        if v.size and (v.min() < 0 or v.max() >= self.levels):
            raise ValueError(f"level out of range [0, {self.levels})")
        return v

    def hot(self, level) -> np.ndarray:
        """Hot offsets, shape (..., K), of block-shift codes."""
        if self.scheme != "block-shift":
            raise ValueError("hot offsets exist only for block-shift codes")
        v = self._check(level)
        b = np.arange(self.K)
        return (v[..., None] + self.K - 1 - b) // self.K

    def encode(self, level) -> np.ndarray:
        """Dense code(s) of shape (..., N)."""
        v = self._check(level)
        if self.scheme == "thermometric":
            return np.where(np.arange(self.N) < v[..., None], 1, -1).astype(np.int8)
        h = self.hot(v)
        out = np.zeros(v.shape + (self.K, self.block_size), dtype=np.int8)
        np.put_along_axis(out, h[..., None], 1, axis=-1)
        return out.reshape(v.shape + (self.N,))


def encode_level(level, encoder: LevelEncoder) -> np.ndarray:
    return encoder.encode(level)


def level_overlap(encoder: LevelEncoder, u: int, v: int) -> int:
    a, b = encoder.encode(u).astype(np.int64), encoder.encode(v).astype(np.int64)
    return int(a @ b)


# ---------------------------------------------------------- sample coding


@dataclass(frozen=True)
class PipelineConfig:
    N: int = 512
    K: int | None = 32
    kappa: float = 3
    lam: float = 1.0
    scheme: str = "sparse"
    folds: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.scheme == "sparse" and (self.K is None or self.K < 1 or self.N % self.K):
            raise ValueError(f"K={self.K} must divide N={self.N}")
        if self.kappa < 1:
            raise ValueError("kappa must be >= 1")
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if self.folds < 2:
            raise ValueError("need at least 2 folds")

    @property
    def encoder(self) -> LevelEncoder:
        if self.scheme == "sparse":
            return LevelEncoder(self.N, self.K, "block-shift")
        return LevelEncoder(self.N, None, "thermometric")


@dataclass(frozen=True, eq=False)
class FeatureKeys:
    """Per-feature keys: bipolar rows (dense) or block-code hot offsets (sparse)."""

    scheme: str
    values: np.ndarray          # (d, N) int8 or (d, K) int

    @classmethod
    def random(cls, n_features: int, config: PipelineConfig) -> "FeatureKeys":
        rng = make_rng(child_seeds(config.seed, 2)[1])
        if config.scheme == "dense":
            vals = rng.choice(np.array([-1, 1], dtype=np.int8), size=(n_features, config.N))
        else:
            vals = rng.integers(0, config.N // config.K, size=(n_features, config.K))
        return cls(config.scheme, vals)


def clip_values(acc, kappa: float) -> np.ndarray:
    return np.clip(acc, -kappa, kappa)


def encode_samples(levels, keys: FeatureKeys, encoder: LevelEncoder,
                   kappa: float | None = None) -> np.ndarray:
    """Hidden vectors for a batch of quantized samples, shape (n, N).

    ``kappa=None`` returns the raw (integer) accumulator.
    """
    X = np.atleast_2d(encoder._check(levels))
    n, d = X.shape
    if keys.values.shape[0] != d:
        raise ValueError(f"{d} features but {keys.values.shape[0]} keys")
    N = encoder.N
    if encoder.scheme == "thermometric":
        if keys.scheme != "dense":
            raise ValueError("thermometric codes pair with dense keys")
        acc = np.zeros((n, N), dtype=np.int64)
        grid = np.arange(N)
        for f in range(d):
            therm = np.where(grid < X[:, f, None], 1, -1).astype(np.int64)
            acc += therm * keys.values[f]
    else:
        if keys.scheme != "sparse":
            raise ValueError("block-shift codes pair with block-code keys")
        K, Lb = encoder.K, encoder.block_size
        # LCC of two block-codes adds hot offsets per block
        hot = (encoder.hot(X) + keys.values[None]) % Lb            # n, d, K
        flat = hot + (np.arange(K) * Lb)[None, None]
        rows = np.repeat(np.arange(n), d * K)
        acc = np.zeros((n, N), dtype=np.int64)
        np.add.at(acc, (rows, flat.reshape(-1)), 1)
    return acc if kappa is None else clip_values(acc, kappa)


def encode_sample(features, keys: FeatureKeys, encoder: LevelEncoder,
                  kappa: float | None = None) -> np.ndarray:
    return encode_samples(np.asarray(features)[None], keys, encoder, kappa)[0]


# ------------------------------------------------------------------ ridge


@dataclass(frozen=True, eq=False)
class RidgeModel:
    W_out: np.ndarray       # classes x N
    lam: float
    classes: np.ndarray


def _one_hot(y, classes):
    return (np.asarray(y)[:, None] == np.asarray(classes)[None]).astype(float)


def ridge_train(H, y, lam: float, classes=None) -> RidgeModel:
    """W_out = Y^T H (H^T H + lam I)^-1 via a symmetric solve.

    Uses the n x n dual system when there are fewer samples than
    dimensions. ``y`` is a label vector or a one-hot matrix.
    """
    H = np.asarray(H, dtype=float)
    y = np.asarray(y)
    if y.ndim == 2:
        Y = y.astype(float)
        classes = np.arange(Y.shape[1]) if classes is None else np.asarray(classes)
    else:
        classes = np.unique(y) if classes is None else np.asarray(classes)
        Y = _one_hot(y, classes)
    if H.shape[0] != Y.shape[0]:
        raise ValueError("H and labels differ in row count")
    n, N = H.shape
    try:
        if N <= n:
            G = H.T @ H + lam * np.eye(N)
            W = sla.solve(G, H.T @ Y, assume_a="pos").T
        else:
            G = H @ H.T + lam * np.eye(n)
            W = (H.T @ sla.solve(G, Y, assume_a="pos")).T
    except (sla.LinAlgError, ValueError) as exc:
        raise np.linalg.LinAlgError(f"ridge system is singular (lam={lam})") from exc
    if not np.all(np.isfinite(W)):
        raise np.linalg.LinAlgError(f"ridge system is singular (lam={lam})")
    return RidgeModel(W, float(lam), classes)


def predict_scores(model: RidgeModel, hidden) -> np.ndarray:
    return np.atleast_2d(np.asarray(hidden, dtype=float)) @ model.W_out.T


def predict(model: RidgeModel, hidden):
    """Class label(s) of the highest readout score (lowest index on ties)."""
    h = np.asarray(hidden)
    idx = np.argmax(predict_scores(model, h), axis=1)
    labels = model.classes[idx]
    return labels[0] if h.ndim == 1 else labels


def _ridge_path(H_tr, Y, H_te):
    """Factor test scores as P diag(1/(s + lam)) Q for fast lambda sweeps."""
    n, N = H_tr.shape
    if N <= n:
        s, V = np.linalg.eigh(H_tr.T @ H_tr)
        P = H_te @ V
        Q = V.T @ (H_tr.T @ Y)
    else:
        s, U = np.linalg.eigh(H_tr @ H_tr.T)
        P = (H_te @ H_tr.T) @ U
        Q = U.T @ Y
    return P, np.clip(s, 0.0, None), Q


def _path_predictions(path, lam):
    P, s, Q = path
    return np.argmax((P / (s + lam)) @ Q, axis=1)


# ---------------------------------------------------------------- datasets


@dataclass(frozen=True, eq=False)
class Dataset:
    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]
    label_name: str = "label"
    name: str = ""

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def classes(self) -> np.ndarray:
        return np.unique(self.y)


def ingest_dataset(path, label: str = "label", name: str | None = None) -> Dataset:
    """Read a CSV with a header row, numeric features and a label column."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if any(c.strip() for c in r)]
    if len(rows) < 2:
        raise ValueError(f"{path}: empty dataset")
    header = [h.strip() for h in rows[0]]
    if label not in header:
        raise ValueError(f"{path}: no label column {label!r}")
    li = header.index(label)
    feats = [h for i, h in enumerate(header) if i != li]
    X, y = [], []
    for lineno, r in enumerate(rows[1:], start=2):
        if len(r) != len(header):
            raise ValueError(f"{path}:{lineno}: expected {len(header)} cells")
        y.append(r[li].strip())
        try:
            X.append([float(c) for i, c in enumerate(r) if i != li])
        except ValueError:
            raise ValueError(f"{path}:{lineno}: non-numeric feature cell") from None
    X = np.asarray(X, dtype=float)
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{path}: non-finite feature value")
    y = np.asarray(y)
    if np.unique(y).size < 2:
        raise ValueError(f"{path}: single-class dataset")
    return Dataset(X, y, tuple(feats), label, name or path.stem)


def bundled_datasets() -> dict[str, Path]:
    root = resources.files("sparsevsa").joinpath("data/datasets")
    return {Path(str(p)).stem: Path(str(p)) for p in sorted(root.iterdir(), key=str)
            if str(p).endswith(".csv")}


def load_bundled(name: str) -> Dataset:
    paths = bundled_datasets()
    if name not in paths:
        raise KeyError(f"no bundled dataset {name!r}; have {sorted(paths)}")
    return ingest_dataset(paths[name], name=name)


@dataclass(frozen=True)
class MinMaxScaler:
    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def fit(cls, X) -> "MinMaxScaler":
        X = np.asarray(X, dtype=float)
        return cls(X.min(axis=0), X.max(axis=0))

    def transform(self, X) -> np.ndarray:
        span = self.hi - self.lo
        safe = np.where(span > 0, span, 1.0)
        u = (np.asarray(X, dtype=float) - self.lo) / safe
        # constant features map to 0; unseen values are clamped
        return np.where(span > 0, np.clip(u, 0.0, 1.0), 0.0)


def quantize(U, levels: int) -> np.ndarray:
    """Round values in [0, 1] to integer levels 0..levels-1."""
    U = np.asarray(U, dtype=float)
    if np.any((U < 0) | (U > 1)):
        raise ValueError("values must be normalized to [0, 1]")
    return np.rint(U * (levels - 1)).astype(np.int64)


def dequantize(L, levels: int) -> np.ndarray:
    return np.asarray(L, dtype=float) / (levels - 1)


# ------------------------------------------------------- model selection


@dataclass
class CVReport:
    mean: float
    std: float
    fold_accuracies: list[float]
    config: PipelineConfig | None = None


def fold_indices(y, folds: int, seed) -> list[tuple[np.ndarray, np.ndarray]]:
    y = np.asarray(y)
    _, counts = np.unique(y, return_counts=True)
    if counts.min() < folds:
        raise ValueError(f"a class has fewer samples ({counts.min()}) than folds ({folds})")
    rs = int(make_rng(child_seeds(seed, 1)[0]).integers(2**31 - 1))
    skf = StratifiedKFold(n_splits=folds, shuffle=True, random_state=rs)
    return list(skf.split(np.zeros(len(y)), y))


def _fold_hidden(ds: Dataset, tr, te, config: PipelineConfig, keys: FeatureKeys):
    enc = config.encoder
    scaler = MinMaxScaler.fit(ds.X[tr])
    Ltr = quantize(scaler.transform(ds.X[tr]), enc.levels)
    Lte = quantize(scaler.transform(ds.X[te]), enc.levels)
    return encode_samples(Ltr, keys, enc), encode_samples(Lte, keys, enc)


def cross_validate(ds: Dataset, config: PipelineConfig) -> CVReport:
    """Stratified k-fold accuracy of one pipeline configuration."""
    keys = FeatureKeys.random(ds.n_features, config)
    classes = ds.classes
    accs = []
    for tr, te in fold_indices(ds.y, config.folds, config.seed):
        Htr, Hte = _fold_hidden(ds, tr, te, config, keys)
        model = ridge_train(clip_values(Htr, config.kappa), ds.y[tr], config.lam, classes)
        accs.append(float(np.mean(predict(model, clip_values(Hte, config.kappa)) == ds.y[te])))
    return CVReport(float(np.mean(accs)), float(np.std(accs)), accs, config)


@dataclass
class GridResult:
    best: PipelineConfig
    best_mean: float
    best_std: float
    table: list[dict] = field(default_factory=list)


def default_grid(scheme: str) -> dict:
    if scheme == "dense":
        return {"N": DENSE_N_GRID, "kappa": KAPPA_GRID, "lam": LAMBDA_GRID}
    return {"K": SPARSE_K_GRID, "ratio": SPARSE_RATIO_GRID,
            "kappa": KAPPA_GRID, "lam": LAMBDA_GRID}


def _shapes(scheme, grid):
    if scheme == "dense":
        return [(int(N), None) for N in grid["N"]]
    shapes = set()
    for K, r in itertools.product(grid["K"], grid["ratio"]):
        N = int(round(K / r))
        shapes.add((N, int(K)))
    return sorted(shapes)


def grid_search(ds: Dataset, scheme: str = "sparse", grid: dict | None = None,
                folds: int = 4, seed=0) -> GridResult:
    """Exhaustive search by mean CV accuracy.

    Ties go to smaller N, then smaller lam, then smaller K and kappa. The
    lam sweep reuses one eigendecomposition per fold.
    """
    grid = default_grid(scheme) if grid is None else {**default_grid(scheme), **grid}
    splits = fold_indices(ds.y, folds, seed)
    classes = ds.classes
    yidx = np.searchsorted(classes, ds.y)
    table = []
    for N, K in _shapes(scheme, grid):
        base = PipelineConfig(N=N, K=K, scheme=scheme, folds=folds, seed=seed)
        keys = FeatureKeys.random(ds.n_features, base)
        hidden = [_fold_hidden(ds, tr, te, base, keys) for tr, te in splits]
        for kappa in grid["kappa"]:
            acc = np.zeros((len(grid["lam"]), folds))
            for f, ((tr, te), (Htr, Hte)) in enumerate(zip(splits, hidden)):
                path = _ridge_path(clip_values(Htr, kappa).astype(float),
                                   _one_hot(ds.y[tr], classes),
                                   clip_values(Hte, kappa).astype(float))
                for li, lam in enumerate(grid["lam"]):
                    acc[li, f] = np.mean(_path_predictions(path, lam) == yidx[te])
            for li, lam in enumerate(grid["lam"]):
                table.append({"N": N, "K": K, "kappa": kappa, "lam": float(lam),
                              "mean": float(acc[li].mean()), "std": float(acc[li].std())})
    best = min(table, key=lambda r: (-round(r["mean"], 12), r["N"], r["lam"],
                                     r["K"] or 0, r["kappa"]))
    cfg = PipelineConfig(N=best["N"], K=best["K"], kappa=best["kappa"], lam=best["lam"],
                         scheme=scheme, folds=folds, seed=seed)
    return GridResult(cfg, best["mean"], best["std"], table)
