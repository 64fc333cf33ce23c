"""
Vector types, codebooks, similarity, superposition and cleanup memory.

Three code families are supported:

* dense codes: bipolar (+1/-1) or unit-magnitude complex phasors,
* general K-sparse codes with binary, phasor or real nonzeros,
* sparse block-codes: N components split into K blocks of size N/K with
  exactly one hot component per block.

All indices are 0-based. Every generator is a pure function of its
parameters and seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

DENSE_KINDS = ("bipolar", "phasor", "real")
SPARSE_KINDS = ("binary", "phasor", "real")
BLOCK_KINDS = ("binary", "phasor")

_PHASE_TOL = 1e-9


# --------------------------------------------------------------------- RNG


def make_rng(seed) -> np.random.Generator:
    """Return a generator for an int seed, a SeedSequence or a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def child_seeds(seed, n: int) -> list[np.random.SeedSequence]:
    """Split ``seed`` into ``n`` independent child seed sequences.

    Child ``i`` depends only on (seed, i), so trials evaluated in any order
    or in parallel draw identical numbers.
    """
    if isinstance(seed, np.random.SeedSequence):
        parent = seed
    else:
        parent = np.random.SeedSequence(seed)
    # spawn() mutates the parent; derive children from spawn_key instead
    return [
        np.random.SeedSequence(parent.entropy, spawn_key=parent.spawn_key + (i,))
        for i in range(n)
    ]


def random_phases(rng: np.random.Generator, shape) -> np.ndarray:
    return np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=shape))


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


# ------------------------------------------------------------------- types


@dataclass(frozen=True, eq=False)
class DenseVector:
    """Length-N dense code.

    ``kind`` is ``"bipolar"`` (components in {-1, +1}), ``"phasor"``
    (unit-magnitude complex) or ``"real"`` for generic dense results such as
    clipped or protected sums.
    """

    values: np.ndarray
    kind: str = "bipolar"

    def __post_init__(self):
        if self.kind not in DENSE_KINDS:
            raise ValueError(f"unknown dense kind {self.kind!r}")
        v = np.asarray(self.values)
        if v.ndim != 1 or v.size < 1:
            raise ValueError("dense vector needs a 1-d array of length >= 1")
        if self.kind == "bipolar":
            if np.iscomplexobj(v) or not np.all(np.abs(v) == 1):
                raise ValueError("bipolar components must be -1 or +1")
            v = v.astype(np.int8)
        elif self.kind == "phasor":
            v = v.astype(np.complex128)
            if not np.allclose(np.abs(v), 1.0, atol=_PHASE_TOL, rtol=0):
                raise ValueError("phasor components must have unit magnitude")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def __len__(self) -> int:
        return self.dim

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, DenseVector):
            return NotImplemented
        return self.kind == other.kind and np.array_equal(self.values, other.values)

    def __neg__(self):
        return DenseVector(-self.values, self.kind)

    def __repr__(self):
        return f"DenseVector(N={self.dim}, kind={self.kind!r})"


@dataclass(frozen=True, eq=False)
class SparseVector:
    """Length-``dim`` vector stored by its support.

    Indices are kept sorted and unique. ``binary`` values are all 1,
    ``phasor`` values have unit magnitude.
    """

    dim: int
    indices: np.ndarray
    values: np.ndarray | None = None
    kind: str = "binary"

    def __post_init__(self):
        if self.kind not in SPARSE_KINDS:
            raise ValueError(f"unknown sparse kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        idx = np.asarray(self.indices, dtype=np.int64).ravel()
        if self.values is None:
            if self.kind != "binary":
                raise ValueError("values required for non-binary sparse vectors")
            vals = np.ones(idx.size)
        else:
            vals = np.asarray(self.values).ravel()
        if vals.shape != idx.shape:
            raise ValueError("indices and values differ in length")
        if idx.size and (idx.min() < 0 or idx.max() >= self.dim):
            raise ValueError("support index out of range")
        order = np.argsort(idx, kind="stable")
        idx, vals = idx[order], vals[order]
        if np.any(np.diff(idx) == 0):
            raise ValueError("duplicate support indices")
        if self.kind == "binary":
            if not np.all(vals == 1):
                raise ValueError("binary sparse values must equal 1")
            vals = vals.real.astype(np.float64)
        elif self.kind == "phasor":
            vals = vals.astype(np.complex128)
            if not np.allclose(np.abs(vals), 1.0, atol=_PHASE_TOL, rtol=0):
                raise ValueError("phasor values must have unit magnitude")
        object.__setattr__(self, "indices", _readonly(idx))
        object.__setattr__(self, "values", _readonly(vals))

    @property
    def l0(self) -> int:
        return int(self.indices.size)

    def to_array(self) -> np.ndarray:
        dtype = np.complex128 if np.iscomplexobj(self.values) else np.float64
        out = np.zeros(self.dim, dtype=dtype)
        out[self.indices] = self.values
        return out

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.to_array(), dtype=dtype)

    def __len__(self) -> int:
        return self.dim

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.kind == other.kind
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    @classmethod
    def from_array(cls, arr, kind: str | None = None) -> "SparseVector":
        arr = np.asarray(arr)
        idx = np.flatnonzero(arr)
        vals = arr[idx]
        if kind is None:
            if np.iscomplexobj(arr):
                kind = "phasor" if np.allclose(np.abs(vals), 1) else "real"
            else:
                kind = "binary" if np.all(vals == 1) else "real"
        return cls(arr.shape[0], idx, vals, kind)

    def __repr__(self):
        return f"SparseVector(dim={self.dim}, L0={self.l0}, kind={self.kind!r})"


@dataclass(frozen=True, eq=False)
class BlockCodeVector:
    """Sparse block-code: ``n_blocks`` blocks of ``block_size`` components,
    one hot component per block.

    ``hot[b]`` is the hot offset inside block ``b``; ``phases`` is ``None``
    for binary codes and holds one unit phasor per block otherwise.
    """

    n_blocks: int
    block_size: int
    hot: np.ndarray
    phases: np.ndarray | None = None

    def __post_init__(self):
        if self.n_blocks < 1 or self.block_size < 1:
            raise ValueError("n_blocks and block_size must be >= 1")
        hot = np.asarray(self.hot, dtype=np.int64).ravel()
        if hot.size != self.n_blocks:
            raise ValueError("need exactly one hot index per block")
        if hot.min() < 0 or hot.max() >= self.block_size:
            raise ValueError("hot index outside its block")
        object.__setattr__(self, "hot", _readonly(hot))
        if self.phases is not None:
            ph = np.asarray(self.phases, dtype=np.complex128).ravel()
            if ph.size != self.n_blocks:
                raise ValueError("need one phase per block")
            if not np.allclose(np.abs(ph), 1.0, atol=_PHASE_TOL, rtol=0):
                raise ValueError("block phases must have unit magnitude")
            object.__setattr__(self, "phases", _readonly(ph))

    @property
    def dim(self) -> int:
        return self.n_blocks * self.block_size

    @property
    def kind(self) -> str:
        return "binary" if self.phases is None else "phasor"

    @property
    def positions(self) -> np.ndarray:
        """Absolute indices of the hot components."""
        return np.arange(self.n_blocks) * self.block_size + self.hot

    def to_array(self) -> np.ndarray:
        return block_codes_to_dense(self.hot, self.block_size, self.phases)

    def to_sparse(self) -> SparseVector:
        vals = None if self.phases is None else self.phases
        return SparseVector(self.dim, self.positions, vals, self.kind)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.to_array(), dtype=dtype)

    def __len__(self) -> int:
        return self.dim

    def __eq__(self, other):
        if not isinstance(other, BlockCodeVector):
            return NotImplemented
        if (self.n_blocks, self.block_size) != (other.n_blocks, other.block_size):
            return False
        if not np.array_equal(self.hot, other.hot):
            return False
        if self.phases is None or other.phases is None:
            return self.phases is None and other.phases is None
        return np.array_equal(self.phases, other.phases)

    @classmethod
    def identity(cls, n_blocks: int, block_size: int, kind: str = "binary"):
        """Neutral element of block-wise circular convolution."""
        phases = np.ones(n_blocks, dtype=complex) if kind == "phasor" else None
        return cls(n_blocks, block_size, np.zeros(n_blocks, dtype=np.int64), phases)

    @classmethod
    def from_array(cls, arr, n_blocks: int) -> "BlockCodeVector":
        """Inverse of :meth:`to_array`; the array must be an exact block-code."""
        arr = np.asarray(arr)
        if arr.ndim != 1 or arr.size % n_blocks:
            raise ValueError("array length is not a multiple of n_blocks")
        blocks = arr.reshape(n_blocks, -1)
        nz = blocks != 0
        if not np.all(nz.sum(axis=1) == 1):
            raise ValueError("array is not a block-code (one nonzero per block)")
        hot = np.argmax(nz, axis=1)
        vals = blocks[np.arange(n_blocks), hot]
        if np.iscomplexobj(arr):
            return cls(n_blocks, blocks.shape[1], hot, vals)
        if not np.all(vals == 1):
            raise ValueError("binary block-code must hold ones")
        return cls(n_blocks, blocks.shape[1], hot)

    def __repr__(self):
        return (
            f"BlockCodeVector(N={self.dim}, K={self.n_blocks}, kind={self.kind!r})"
        )


@dataclass(frozen=True, eq=False)
class Accumulator:
    """Exact component-wise sum of code vectors, before any normalization."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 1:
            raise ValueError("accumulator must be 1-d")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def __len__(self) -> int:
        return self.dim

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, Accumulator):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __add__(self, other):
        return Accumulator(self.values + np.asarray(other))

    def __repr__(self):
        return f"Accumulator(N={self.dim}, dtype={self.values.dtype})"


def as_array(v) -> np.ndarray:
    """View any vector type (or plain array) as an ndarray."""
    if isinstance(v, (SparseVector, BlockCodeVector)):
        return v.to_array()
    if isinstance(v, (DenseVector, Accumulator)):
        return v.values
    return np.asarray(v)


# -------------------------------------------------------------- generators


def gen_dense(N: int, kind: str = "bipolar", seed=None) -> DenseVector:
    if N < 1:
        raise ValueError("N must be >= 1")
    rng = make_rng(seed)
    if kind == "bipolar":
        return DenseVector(rng.choice(np.array([-1, 1], dtype=np.int8), size=N), kind)
    if kind == "phasor":
        return DenseVector(random_phases(rng, N), kind)
    raise ValueError(f"cannot generate dense kind {kind!r}")


def gen_sparse(M: int, K: int, kind: str = "binary", seed=None) -> SparseVector:
    """Exactly K-sparse vector with support uniform over K-subsets of [0, M)."""
    if K < 0 or K > M:
        raise ValueError(f"need 0 <= K <= M, got K={K}, M={M}")
    rng = make_rng(seed)
    idx = rng.choice(M, size=K, replace=False)
    if kind == "binary":
        return SparseVector(M, idx, None, kind)
    if kind == "phasor":
        return SparseVector(M, idx, random_phases(rng, K), kind)
    if kind == "real":
        return SparseVector(M, idx, rng.standard_normal(K), kind)
    raise ValueError(f"unknown sparse kind {kind!r}")


def gen_block_code(N: int, K: int, kind: str = "binary", seed=None) -> BlockCodeVector:
    if K < 1 or N % K:
        raise ValueError(f"K={K} must divide N={N}")
    rng = make_rng(seed)
    block_size = N // K
    hot = rng.integers(0, block_size, size=K)
    phases = random_phases(rng, K) if kind == "phasor" else None
    if kind not in BLOCK_KINDS:
        raise ValueError(f"unknown block-code kind {kind!r}")
    return BlockCodeVector(K, block_size, hot, phases)


def block_codes_to_dense(hot, block_size: int, phases=None) -> np.ndarray:
    """Expand hot offsets of shape (..., K) into dense arrays of shape (..., K*Lb)."""
    hot = np.asarray(hot)
    K = hot.shape[-1]
    dtype = np.float64 if phases is None else np.complex128
    out = np.zeros(hot.shape[:-1] + (K, block_size), dtype=dtype)
    vals = 1.0 if phases is None else np.asarray(phases)
    np.put_along_axis(out, hot[..., None], np.broadcast_to(vals, hot.shape)[..., None], axis=-1)
    return out.reshape(hot.shape[:-1] + (K * block_size,))


def random_block_hot(rng: np.random.Generator, shape, block_size: int) -> np.ndarray:
    return rng.integers(0, block_size, size=shape)


# --------------------------------------------------------------- codebooks


@dataclass(frozen=True, eq=False)
class Codebook:
    """N x M matrix of atomic code vectors (one per column).

    Regenerating from ``(seed, N, M, kind, n_blocks)`` is bit-identical;
    column ``i`` depends only on ``(seed, i)``.
    """

    columns: np.ndarray
    kind: str
    seed: int | None = None
    n_blocks: int | None = None

    def __post_init__(self):
        cols = np.asarray(self.columns)
        if cols.ndim != 2:
            raise ValueError("codebook columns must form a 2-d array")
        object.__setattr__(self, "columns", _readonly(cols))

    @property
    def n_rows(self) -> int:
        return self.columns.shape[0]

    @property
    def n_cols(self) -> int:
        return self.columns.shape[1]

    @property
    def shape(self):
        return self.columns.shape

    def __len__(self) -> int:
        return self.n_cols

    def __getitem__(self, i) -> np.ndarray:
        return self.columns[:, i]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.columns, dtype=dtype)

    def block_code(self, i: int) -> BlockCodeVector:
        if self.n_blocks is None:
            raise ValueError("not a block-code codebook")
        return BlockCodeVector.from_array(self.columns[:, i], self.n_blocks)

    @classmethod
    def random(cls, N: int, M: int, kind: str = "bipolar", seed=0,
               n_blocks: int | None = None) -> "Codebook":
        """Seeded random codebook.

        ``kind`` is one of ``bipolar``/``phasor`` (dense columns),
        ``block-binary``/``block-phasor`` (block-codes with ``n_blocks``
        blocks) or ``sparse-binary``/``sparse-phasor`` (``n_blocks`` is then
        the number of nonzeros).
        """
        if M < 1:
            raise ValueError("codebook needs at least one column")
        seeds = child_seeds(seed, M)
        if kind in ("bipolar", "phasor"):
            cols = [gen_dense(N, kind, s).values for s in seeds]
        elif kind in ("block-binary", "block-phasor"):
            if n_blocks is None:
                raise ValueError("block-code codebooks need n_blocks")
            sub = kind.split("-")[1]
            cols = [gen_block_code(N, n_blocks, sub, s).to_array() for s in seeds]
        elif kind in ("sparse-binary", "sparse-phasor"):
            if n_blocks is None:
                raise ValueError("sparse codebooks need the sparsity in n_blocks")
            sub = kind.split("-")[1]
            cols = [gen_sparse(N, n_blocks, sub, s).to_array() for s in seeds]
        else:
            raise ValueError(f"unknown codebook kind {kind!r}")
        return cls(np.stack(cols, axis=1), kind, seed, n_blocks)

    # JSON form: regeneration parameters when a seed is known, explicit
    # values otherwise.
    def to_json(self, explicit: bool = False) -> str:
        doc = {"type": "codebook", "kind": self.kind, "N": self.n_rows,
               "M": self.n_cols, "K": self.n_blocks}
        if self.seed is not None and not explicit:
            doc["seed"] = self.seed
        else:
            doc["values"] = _encode_values(self.columns.T)
            doc["complex"] = bool(np.iscomplexobj(self.columns))
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "Codebook":
        doc = json.loads(text)
        if doc.get("type") != "codebook":
            raise ValueError("not a codebook document")
        if "values" in doc:
            cols = _decode_values(doc["values"], doc.get("complex", False)).T
            return cls(cols, doc["kind"], doc.get("seed"), doc.get("K"))
        return cls.random(doc["N"], doc["M"], doc["kind"], doc["seed"], doc.get("K"))


def _encode_values(arr):
    arr = np.asarray(arr)
    if np.iscomplexobj(arr):
        return np.stack([arr.real, arr.imag], axis=-1).tolist()
    return arr.tolist()


def _decode_values(obj, is_complex: bool) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    if is_complex:
        return arr[..., 0] + 1j * arr[..., 1]
    return arr


def vector_to_json(v) -> str:
    """Serialize a DenseVector, SparseVector or BlockCodeVector."""
    if isinstance(v, DenseVector):
        doc = {"type": "dense", "kind": v.kind, "N": v.dim,
               "values": _encode_values(v.values)}
        doc["complex"] = bool(np.iscomplexobj(v.values))
    elif isinstance(v, SparseVector):
        doc = {"type": "sparse", "kind": v.kind, "N": v.dim,
               "indices": v.indices.tolist(), "values": _encode_values(v.values),
               "complex": bool(np.iscomplexobj(v.values))}
    elif isinstance(v, BlockCodeVector):
        doc = {"type": "block", "kind": v.kind, "N": v.dim, "K": v.n_blocks,
               "hot": v.hot.tolist()}
        if v.phases is not None:
            doc["phases"] = _encode_values(v.phases)
    else:
        raise TypeError(f"cannot serialize {type(v).__name__}")
    return json.dumps(doc)


def vector_from_json(text: str):
    doc = json.loads(text)
    kind = doc["type"]
    if kind == "dense":
        return DenseVector(_decode_values(doc["values"], doc.get("complex")), doc["kind"])
    if kind == "sparse":
        vals = _decode_values(doc["values"], doc.get("complex")).reshape(-1)
        return SparseVector(doc["N"], doc["indices"], vals, doc["kind"])
    if kind == "block":
        phases = None
        if "phases" in doc:
            phases = _decode_values(doc["phases"], True)
        return BlockCodeVector(doc["K"], doc["N"] // doc["K"], doc["hot"], phases)
    raise ValueError(f"unknown vector type {kind!r}")


# ---------------------------------------------------- similarity & sums


def similarity(u, v, normalized: bool = True) -> float:
    """Real part of the inner product <u, conj(v)>.

    With ``normalized`` the product is divided by both norms (cosine). The
    unnormalized form of two binary sparse codes is their overlap count.
    Zero vectors have similarity 0.
    """
    a, b = as_array(u), as_array(v)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch {a.shape} vs {b.shape}")
    # small integer dtypes (int8 bipolar) would overflow in the product
    if a.dtype.kind in "biu":
        a = a.astype(np.int64)
    if b.dtype.kind in "biu":
        b = b.astype(np.int64)
    dot = np.vdot(b, a).real
    if not normalized:
        return float(dot)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(dot / (na * nb))


def cosine_rows(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Row-wise normalized similarity of two equally shaped batches."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.dtype.kind in "biu":
        A = A.astype(np.float64)
    if B.dtype.kind in "biu":
        B = B.astype(np.float64)
    dot = np.sum(A * np.conj(B), axis=-1).real
    norm = np.linalg.norm(A, axis=-1) * np.linalg.norm(B, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(norm > 0, dot / np.where(norm > 0, norm, 1.0), 0.0)
    return out


def superpose(vectors: Sequence) -> Accumulator:
    """Exact component-wise sum.

    Integer-valued inputs (binary, bipolar) accumulate in int64, complex
    inputs in complex128.
    """
    vectors = list(vectors)
    if not vectors:
        raise ValueError("cannot superpose an empty list")
    arrays = [as_array(v) for v in vectors]
    n = arrays[0].shape
    if any(a.shape != n for a in arrays):
        raise ValueError("vectors differ in length")
    if any(np.iscomplexobj(a) for a in arrays):
        dtype = np.complex128
    elif all(np.all(a == np.round(a)) for a in arrays):
        dtype = np.int64
    else:
        dtype = np.float64
    total = np.zeros(n, dtype=dtype)
    for a in arrays:
        total += a.astype(dtype) if dtype != np.int64 else np.round(a).astype(np.int64)
    return Accumulator(total)


def normalize_topk(acc, K: int) -> SparseVector:
    """Keep the K largest-magnitude components (ties go to the lower index)."""
    x = as_array(acc)
    if not 0 <= K <= x.shape[0]:
        raise ValueError("K out of range")
    order = np.argsort(-np.abs(x), kind="stable")[:K]
    if np.iscomplexobj(x):
        mags = np.abs(x[order])
        vals = np.where(mags > 0, x[order] / np.where(mags > 0, mags, 1), 1.0)
        return SparseVector(x.shape[0], order, vals, "phasor")
    return SparseVector(x.shape[0], order, None, "binary")


def normalize_blockwise(acc, K: int) -> BlockCodeVector:
    """Per-block argmax of magnitude; complex accumulators keep the phase."""
    x = as_array(acc)
    if K < 1 or x.shape[0] % K:
        raise ValueError(f"K={K} must divide N={x.shape[0]}")
    blocks = x.reshape(K, -1)
    hot = np.argmax(np.abs(blocks), axis=1)
    if np.iscomplexobj(x):
        vals = blocks[np.arange(K), hot]
        mags = np.abs(vals)
        phases = np.where(mags > 0, vals / np.where(mags > 0, mags, 1), 1.0)
        return BlockCodeVector(K, blocks.shape[1], hot, phases)
    return BlockCodeVector(K, blocks.shape[1], hot)


def sign(acc) -> DenseVector:
    """Map components to +1/-1 by sign of the real part; zero maps to +1."""
    x = np.real(as_array(acc))
    return DenseVector(np.where(x < 0, -1, 1).astype(np.int8), "bipolar")


def cleanup(query, codebook) -> tuple[int, float]:
    """Nearest codebook column by normalized similarity.

    Returns ``(index, score)``; ties resolve to the lowest index.
    """
    C = np.asarray(codebook)
    if C.ndim != 2 or C.shape[1] == 0:
        raise ValueError("empty codebook")
    q = as_array(query)
    if q.shape[0] != C.shape[0]:
        raise ValueError("query length differs from codebook rows")
    scores = codebook_scores(q, C)
    idx = int(np.argmax(scores))
    return idx, float(scores[idx])


def codebook_scores(q, C, normalized: bool = True) -> np.ndarray:
    """Similarity of ``q`` against every column of ``C``."""
    q = as_array(q)
    C = np.asarray(C)
    if q.dtype.kind in "biu":
        q = q.astype(np.float64)
    dots = (np.conj(C).T @ q).real
    if not normalized:
        return dots
    norms = np.linalg.norm(C, axis=0) * np.linalg.norm(q)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(norms > 0, dots / np.where(norms > 0, norms, 1.0), 0.0)


# ----------------------------------------------------------------- entropy


def block_code_entropy(N: int, K: int) -> float:
    """Bits of a K-block code of length N: K * log2(N / K)."""
    if K < 1 or N % K:
        raise ValueError(f"K={K} must divide N={N}")
    return K * math.log2(N // K)


def sparse_code_entropy(N: int, K: int) -> float:
    """Bits of an unconstrained K-sparse binary code: log2 C(N, K)."""
    return math.log2(math.comb(N, K))
