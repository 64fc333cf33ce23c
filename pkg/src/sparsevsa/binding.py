"""
Variable-binding operators and their inverses.

* Hadamard product (dense bipolar / phasor codes)
* circular convolution and correlation (FFT and direct paths)
* local circular convolution (LCC) for block-codes, exact index arithmetic
  for clean codes and a per-block FFT path for accumulators
* sparsity-preserving tensor projection (SPTP) over a sparse binary
  sampling tensor, with binary and phasor nonlinearities
* protected sums (key binding and permutation powers) and clipping

Array inputs may carry leading batch axes; typed vector inputs return typed
results.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import brentq
from scipy.special import betainc

from .core import (
    Accumulator,
    BlockCodeVector,
    DenseVector,
    SparseVector,
    as_array,
    make_rng,
)

# ---------------------------------------------------------------- Hadamard


def hadamard_bind(x, y):
    """Component-wise product.

    bipolar x bipolar stays bipolar and phasor x phasor stays phasor. Plain
    arrays broadcast.
    """
    a, b = as_array(x), as_array(y)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"length mismatch {a.shape[-1]} vs {b.shape[-1]}")
    out = a * b
    if isinstance(x, DenseVector) and isinstance(y, DenseVector):
        kind = x.kind if x.kind == y.kind else "real"
        return DenseVector(out, kind)
    return out


def hadamard_unbind(c, key):
    """Inverse of :func:`hadamard_bind` for bipolar or phasor keys."""
    k = as_array(key)
    out = as_array(c) * np.conj(k)
    if isinstance(c, DenseVector) and isinstance(key, DenseVector):
        kind = c.kind if c.kind == key.kind else "real"
        return DenseVector(out, kind)
    return out


# ------------------------------------------------------- circular convolution


def _fft_real_out(a, b, spectrum):
    out = np.fft.ifft(spectrum, axis=-1)
    if not (np.iscomplexobj(a) or np.iscomplexobj(b)):
        return out.real
    return out


def circular_convolve(x, y, method: str = "fft") -> np.ndarray:
    """(x * y)_k = sum_i x_{(k - i) mod N} y_i, along the last axis."""
    a, b = as_array(x), as_array(y)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"length mismatch {a.shape[-1]} vs {b.shape[-1]}")
    if method == "direct":
        return _direct_convolve(a, b)
    if method != "fft":
        raise ValueError(f"unknown method {method!r}")
    spectrum = np.fft.fft(a, axis=-1) * np.fft.fft(b, axis=-1)
    return _fft_real_out(a, b, spectrum)


def circular_correlate(key, c, method: str = "fft") -> np.ndarray:
    """(key # c)_k = sum_i conj(key_i) c_{(i + k) mod N}.

    Adjoint of convolution with ``key``; approximately undoes
    ``circular_convolve(x, key)``.
    """
    a, b = as_array(key), as_array(c)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"length mismatch {a.shape[-1]} vs {b.shape[-1]}")
    if method == "direct":
        N = a.shape[-1]
        idx = (np.arange(N)[None, :] + np.arange(N)[:, None]) % N  # [k, i]
        return np.einsum("...i,...ki->...k", np.conj(a), b[..., idx])
    spectrum = np.conj(np.fft.fft(a, axis=-1)) * np.fft.fft(b, axis=-1)
    return _fft_real_out(a, b, spectrum)


def _direct_convolve(a, b):
    N = a.shape[-1]
    idx = (np.arange(N)[:, None] - np.arange(N)[None, :]) % N  # [k, i]
    return np.einsum("...ki,...i->...k", a[..., idx], b)


# --------------------------------------------------- local circular convolution


def _check_blocks(a: BlockCodeVector, b: BlockCodeVector):
    if (a.n_blocks, a.block_size) != (b.n_blocks, b.block_size):
        raise ValueError("block-codes differ in shape")


def lcc_bind(a, b, n_blocks: int | None = None):
    """Local circular convolution (block-wise circular convolution).

    Two :class:`BlockCodeVector` inputs bind by adding hot offsets modulo
    the block size and multiplying phases, so the result is again an exact
    block-code. Any other input (arrays, accumulators) is convolved block
    by block through the FFT; ``n_blocks`` is then required unless one
    operand is a BlockCodeVector.
    """
    if isinstance(a, BlockCodeVector) and isinstance(b, BlockCodeVector):
        _check_blocks(a, b)
        hot = (a.hot + b.hot) % a.block_size
        phases = None
        if a.phases is not None or b.phases is not None:
            pa = np.ones(a.n_blocks) if a.phases is None else a.phases
            pb = np.ones(b.n_blocks) if b.phases is None else b.phases
            phases = pa * pb
        return BlockCodeVector(a.n_blocks, a.block_size, hot, phases)
    K = _infer_blocks(a, b, n_blocks)
    out = lcc_dense(as_array(a), as_array(b), K)
    if isinstance(a, (Accumulator, BlockCodeVector)) or isinstance(b, (Accumulator, BlockCodeVector)):
        return Accumulator(out)
    return out


def _infer_blocks(a, b, n_blocks):
    for v in (a, b):
        if isinstance(v, BlockCodeVector):
            if n_blocks is not None and n_blocks != v.n_blocks:
                raise ValueError("n_blocks disagrees with block-code operand")
            return v.n_blocks
    if n_blocks is None:
        raise ValueError("n_blocks is required for non block-code operands")
    return n_blocks


def lcc_dense(x: np.ndarray, y: np.ndarray, n_blocks: int) -> np.ndarray:
    """Block-wise circular convolution of arrays of shape (..., N)."""
    x, y = np.asarray(x), np.asarray(y)
    N = x.shape[-1]
    if y.shape[-1] != N:
        raise ValueError("length mismatch")
    if N % n_blocks:
        raise ValueError(f"n_blocks={n_blocks} does not divide N={N}")
    xb = x.reshape(x.shape[:-1] + (n_blocks, N // n_blocks))
    yb = y.reshape(y.shape[:-1] + (n_blocks, N // n_blocks))
    spectrum = np.fft.fft(xb, axis=-1) * np.fft.fft(yb, axis=-1)
    out = np.fft.ifft(spectrum, axis=-1)
    if not (np.iscomplexobj(x) or np.iscomplexobj(y)):
        out = out.real
    return out.reshape(np.broadcast_shapes(x.shape, y.shape))


def lcc_inverse_dense(x: np.ndarray, n_blocks: int) -> np.ndarray:
    """Per-block inverse F^-1(conj(F(x_block))), i.e. conj(x[(-k) mod Lb])."""
    x = np.asarray(x)
    N = x.shape[-1]
    if N % n_blocks:
        raise ValueError(f"n_blocks={n_blocks} does not divide N={N}")
    Lb = N // n_blocks
    xb = x.reshape(x.shape[:-1] + (n_blocks, Lb))
    rev = (-np.arange(Lb)) % Lb
    return np.conj(xb[..., rev]).reshape(x.shape)


def lcc_inverse(a, n_blocks: int | None = None):
    """Inverse under LCC: hot offset (Lb - i) mod Lb, conjugated phase."""
    if isinstance(a, BlockCodeVector):
        hot = (-a.hot) % a.block_size
        phases = None if a.phases is None else np.conj(a.phases)
        return BlockCodeVector(a.n_blocks, a.block_size, hot, phases)
    if n_blocks is None:
        raise ValueError("n_blocks is required for array input")
    out = lcc_inverse_dense(as_array(a), n_blocks)
    return Accumulator(out) if isinstance(a, Accumulator) else out


def lcc_unbind(c, a, n_blocks: int | None = None):
    """Recover ``b`` from ``c = lcc_bind(a, b)``."""
    if isinstance(a, BlockCodeVector):
        return lcc_bind(c, lcc_inverse(a), n_blocks)
    K = _infer_blocks(c, a, n_blocks)
    return lcc_bind(c, lcc_inverse(a, K), K)


def lcc_bind_hot(hot_a, hot_b, block_size: int) -> np.ndarray:
    """Index form of LCC for batches of hot-offset arrays."""
    return (np.asarray(hot_a) + np.asarray(hot_b)) % block_size


# ---------------------------------------------------------- sampling tensor

TENSOR_MODES = ("random", "structured", "block")


@dataclass(frozen=True, eq=False)
class SamplingTensor:
    """Sparse binary third-order tensor W[l, i, j].

    Stored as coordinate lists sorted by output ``l``: output ``l`` sums the
    coincidences ``a[i] * b[j]`` over its pairs.
    """

    dim: int
    out: np.ndarray
    first: np.ndarray
    second: np.ndarray
    mode: str = "random"
    symmetric: bool = False
    alpha: float = 0
    seed: int | None = None
    _gather: sp.csr_matrix = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        out = np.asarray(self.out, dtype=np.int64)
        i = np.asarray(self.first, dtype=np.int64)
        j = np.asarray(self.second, dtype=np.int64)
        if not (out.shape == i.shape == j.shape):
            raise ValueError("coordinate arrays differ in length")
        order = np.lexsort((j, i, out))
        out, i, j = out[order], i[order], j[order]
        N = self.dim
        if out.size and (min(out.min(), i.min(), j.min()) < 0 or max(out.max(), i.max(), j.max()) >= N):
            raise ValueError("tensor index out of range")
        key = (out * N + i) * N + j
        if np.any(np.diff(key) == 0):
            raise ValueError("duplicate tensor entries")
        for name, arr in (("out", out), ("first", i), ("second", j)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        gather = sp.csr_matrix(
            (np.ones(out.size), (np.arange(out.size), out)), shape=(out.size, N)
        )
        object.__setattr__(self, "_gather", gather)

    @property
    def nnz(self) -> int:
        return int(self.out.size)

    @property
    def fan_in(self) -> np.ndarray:
        """Number of pairs feeding each output."""
        return np.bincount(self.out, minlength=self.dim)

    def entry_keys(self) -> np.ndarray:
        N = self.dim
        return (self.out * N + self.first) * N + self.second

    def contains(self, l, i, j) -> np.ndarray:
        N = self.dim
        keys = self.entry_keys()
        q = (np.asarray(l) * N + np.asarray(i)) * N + np.asarray(j)
        pos = np.searchsorted(keys, q)
        pos = np.minimum(pos, keys.size - 1)
        return keys[pos] == q

    def is_symmetric(self) -> bool:
        """True when every entry (l; i, j) is matched by (i; j, l)."""
        return bool(np.all(self.contains(self.first, self.second, self.out)))

    def dendrites(self, a, b) -> np.ndarray:
        """d_l = sum_ij W[l, i, j] a_i b_j for arrays of shape (..., N)."""
        a, b = np.asarray(a), np.asarray(b)
        lead = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
        A = np.broadcast_to(a, lead + a.shape[-1:]).reshape(-1, a.shape[-1])
        B = np.broadcast_to(b, lead + b.shape[-1:]).reshape(-1, b.shape[-1])
        dtype = np.result_type(A, B, np.float64)
        out = np.empty((A.shape[0], self.dim), dtype=dtype)
        # bound the (rows x nnz) product to about 16M entries
        step = max(1, (1 << 24) // max(self.nnz, 1))
        for s in range(0, A.shape[0], step):
            prod = A[s:s + step, self.first] * B[s:s + step, self.second]
            out[s:s + step] = (self._gather.T @ prod.T).T
        return out.reshape(lead + (self.dim,))

    def to_dense(self) -> np.ndarray:
        if self.dim > 128:
            raise ValueError("dense view only for N <= 128")
        W = np.zeros((self.dim,) * 3, dtype=np.int8)
        W[self.out, self.first, self.second] = 1
        return W

    def to_json(self, explicit: bool = False) -> str:
        doc = {"type": "sampling_tensor", "N": self.dim, "mode": self.mode,
               "alpha": self.alpha, "symmetric": self.symmetric, "seed": self.seed}
        if explicit or self.seed is None:
            doc["entries"] = np.stack([self.out, self.first, self.second], 1).tolist()
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "SamplingTensor":
        doc = json.loads(text)
        if doc.get("type") != "sampling_tensor":
            raise ValueError("not a sampling tensor document")
        if "entries" in doc:
            e = np.asarray(doc["entries"], dtype=np.int64).reshape(-1, 3)
            return cls(doc["N"], e[:, 0], e[:, 1], e[:, 2], doc["mode"],
                       doc["symmetric"], doc["alpha"], doc["seed"])
        return build_sampling_tensor(doc["N"], doc["alpha"], doc["mode"],
                                     doc["symmetric"], doc["seed"])


def build_sampling_tensor(N: int, alpha: int, mode: str = "random",
                          symmetric: bool = False, seed=0,
                          n_blocks: int | None = None) -> SamplingTensor:
    """Sample ``alpha`` coincidence pairs per output.

    ``random``: pairs drawn uniformly without repetition. A non-integer
    ``alpha`` gives each output floor(alpha) or ceil(alpha) pairs, the
    larger with probability equal to the fractional part, so the mean
    fan-in equals ``alpha``.
    ``structured``: ``alpha`` consecutive entries of the anti-diagonal
    ``i + j = l (mod N)`` starting at a seeded random offset; ``alpha = N``
    gives exactly the circular-convolution tensor.
    ``block``: the LCC tensor for ``n_blocks`` blocks (fan-in N / n_blocks;
    ``alpha`` is ignored).

    ``symmetric`` closes every entry under (l; i, j) -> (i; j, l) ->
    (j; l, i) so that W[i, j, l] = W[l, i, j]. Fan-in then ends within a
    couple of entries of ``alpha``.
    """
    if mode not in TENSOR_MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if N < 1:
        raise ValueError("N must be >= 1")
    if mode == "block":
        return _block_tensor(N, n_blocks, seed)
    if not 1 <= alpha <= N * N:
        raise ValueError(f"alpha={alpha} outside [1, N^2]")
    if mode == "structured" and alpha > N:
        raise ValueError("structured sampling allows at most N pairs per output")
    fractional = float(alpha) != int(alpha)
    if fractional and (symmetric or mode != "random"):
        raise ValueError("non-integer alpha needs random, asymmetric sampling")
    rng = make_rng(seed)
    seed_tag = seed if isinstance(seed, (int, np.integer)) else None
    if symmetric:
        out, i, j = _symmetric_entries(N, int(alpha), mode, rng)
    elif mode == "random":
        lo = int(math.floor(alpha))
        fanins = np.full(N, lo, dtype=np.int64)
        if fractional:
            fanins += rng.random(N) < alpha - lo
        out, i, j = _random_entries(N, fanins, rng)
    else:
        offsets = rng.integers(0, N, size=N)
        t = np.arange(alpha)
        out = np.repeat(np.arange(N), alpha)
        i = ((offsets[:, None] + t[None, :]) % N).ravel()
        j = (out - i) % N
    alpha = float(alpha) if fractional else int(alpha)
    return SamplingTensor(N, out, i, j, mode, symmetric, alpha, seed_tag)


def _random_entries(N, fanins, rng):
    width = int(fanins.max())
    flat = rng.integers(0, N * N, size=(N, width))
    # -1 pads rows below the widest fan-in
    flat[np.arange(width)[None, :] >= fanins[:, None]] = -1
    # redraw rows that contain a repeated pair
    while True:
        s = np.sort(flat, axis=1)
        bad = np.flatnonzero(np.any((s[:, 1:] == s[:, :-1]) & (s[:, 1:] >= 0), axis=1))
        if bad.size == 0:
            break
        for r in bad:
            flat[r, : fanins[r]] = rng.choice(N * N, size=fanins[r], replace=False)
    out = np.repeat(np.arange(N), width).reshape(N, width)
    keep = flat >= 0
    out, flat = out[keep], flat[keep]
    return out, flat // N, flat % N


def _symmetric_entries(N, alpha, mode, rng):
    entries: set[tuple[int, int, int]] = set()
    counts = np.zeros(N, dtype=np.int64)
    offsets = rng.integers(0, N, size=N)
    cursor = np.zeros(N, dtype=np.int64)

    def add_orbit(l, i, j):
        for e in ((l, i, j), (i, j, l), (j, l, i)):
            if e not in entries:
                entries.add(e)
                counts[e[0]] += 1

    def candidate(l, open_mask):
        if mode == "random":
            pool = np.flatnonzero(open_mask)
            if pool.size < 2:
                pool = np.arange(N)
            for _ in range(64):
                i, j = (int(v) for v in rng.choice(pool, size=2))
                if (l, i, j) not in entries:
                    return i, j
            while True:
                i, j = (int(v) for v in rng.integers(0, N, size=2))
                if (l, i, j) not in entries:
                    return i, j
        # structured: walk the anti-diagonal, preferring pairs whose mirrored
        # outputs still need fan-in
        fallback = None
        while cursor[l] < N:
            i = int((offsets[l] + cursor[l]) % N)
            j = int((l - i) % N)
            cursor[l] += 1
            if (l, i, j) in entries:
                continue
            if open_mask[i] and open_mask[j]:
                return i, j
            if fallback is None:
                fallback = (i, j)
        if fallback is not None:
            return fallback
        while True:
            i, j = (int(v) for v in rng.integers(0, N, size=2))
            if (l, i, j) not in entries:
                return i, j

    while True:
        open_mask = counts < alpha
        todo = np.flatnonzero(open_mask)
        if todo.size == 0:
            break
        for l in rng.permutation(todo):
            l = int(l)
            if counts[l] >= alpha:
                continue
            add_orbit(l, *candidate(l, counts < alpha))
    arr = np.array(sorted(entries), dtype=np.int64).reshape(-1, 3)
    return arr[:, 0], arr[:, 1], arr[:, 2]


def _block_tensor(N, n_blocks, seed):
    if n_blocks is None or N % n_blocks:
        raise ValueError("block mode needs n_blocks dividing N")
    Lb = N // n_blocks
    l = np.arange(N)
    blk, pos = l // Lb, l % Lb
    t = np.arange(Lb)
    out = np.repeat(l, Lb)
    i = (blk[:, None] * Lb + t[None, :]).ravel()
    j = (blk[:, None] * Lb + (pos[:, None] - t[None, :]) % Lb).ravel()
    return SamplingTensor(N, out, i, j, "block", False, Lb,
                          seed if isinstance(seed, (int, np.integer)) else None)


# -------------------------------------------------------------------- SPTP


def _as_dense_input(v, N):
    arr = as_array(v)
    if arr.shape[-1] != N:
        raise ValueError(f"vector length {arr.shape[-1]} does not match tensor N={N}")
    return arr


def sptp_bind(a, b, W: SamplingTensor, theta: int = 1):
    """Binary SPTP: output_l = 1 iff sum_ij W[l,i,j] a_i b_j >= theta."""
    if theta < 1:
        raise ValueError("binary SPTP needs theta >= 1")
    x = _as_dense_input(a, W.dim)
    y = _as_dense_input(b, W.dim)
    d = W.dendrites(x, y)
    out = (d >= theta - 1e-9).astype(np.float64)
    if isinstance(a, SparseVector) or isinstance(b, SparseVector):
        return SparseVector(W.dim, np.flatnonzero(out), None, "binary")
    return out


def phasor_threshold(z, theta: float) -> np.ndarray:
    """f(z) = z / |z| where |z| >= theta, else 0."""
    z = np.asarray(z)
    mag = np.abs(z)
    keep = mag >= theta - 1e-12
    return np.where(keep, z / np.where(keep & (mag > 0), mag, 1.0), 0.0)


def sptp_bind_phasor(a, b, W: SamplingTensor, theta: float = 1.0):
    """Phasor SPTP: z_l = sum W[l,i,j] a_i b_j, kept as z/|z| when |z| >= theta."""
    x = _as_dense_input(a, W.dim).astype(np.complex128)
    y = _as_dense_input(b, W.dim).astype(np.complex128)
    out = phasor_threshold(W.dendrites(x, y), theta)
    if isinstance(a, SparseVector) or isinstance(b, SparseVector):
        idx = np.flatnonzero(out)
        return SparseVector(W.dim, idx, out[idx], "phasor")
    return out


def sptp_unbind(c, b, W: SamplingTensor, theta=1, kind: str | None = None):
    """Approximate inverse of SPTP given the bound vector ``c`` and factor ``b``.

    output_i = H(sum_{j,l} W[i, j, l] b_j c_l - theta); the phasor form uses
    conj(b) and the phasor threshold. This is the same tensor contraction as
    binding ``b`` with ``c``, which is why a symmetric tensor helps.
    """
    y = _as_dense_input(b, W.dim)
    z = _as_dense_input(c, W.dim)
    if kind is None:
        kind = "phasor" if (np.iscomplexobj(y) or np.iscomplexobj(z)) else "binary"
    if kind == "phasor":
        out = phasor_threshold(W.dendrites(np.conj(y).astype(complex), z.astype(complex)), theta)
    else:
        out = (W.dendrites(y, z) >= theta - 1e-9).astype(np.float64)
    if isinstance(c, SparseVector) or isinstance(b, SparseVector):
        idx = np.flatnonzero(out)
        vals = out[idx] if kind == "phasor" else None
        return SparseVector(W.dim, idx, vals, "phasor" if kind == "phasor" else "binary")
    return out


# ------------------------------------------------------------------ fan-in


def prob_below_threshold(alpha: float, N: int, K: int, theta: int) -> float:
    """P(d < theta) for d ~ Binomial(alpha, K^2/N^2), continuous in alpha.

    Uses the regularized incomplete beta identity
    P(d <= theta - 1) = I_{1-p}(alpha - theta + 1, theta).
    """
    p = (K / N) ** 2
    if alpha <= theta - 1:
        return 1.0
    return float(betainc(alpha - theta + 1, theta, 1.0 - p))


def min_fanin(N: int, K: int, theta: int = 1) -> tuple[float, int]:
    """Smallest fan-in for which P(d_l < theta) <= 1 - K/N.

    Returns ``(alpha_real, alpha_int)`` with ``alpha_int = ceil(alpha_real)``.
    For ``theta = 1`` the closed form ln(1 - K/N) / ln(1 - K^2/N^2) is used.
    """
    if not 0 < K < N:
        raise ValueError(f"need 0 < K < N, got K={K}, N={N}")
    if theta < 1:
        raise ValueError("theta must be >= 1")
    target = 1.0 - K / N
    if theta == 1:
        alpha = math.log1p(-K / N) / math.log1p(-(K / N) ** 2)
    else:
        f = lambda a: prob_below_threshold(a, N, K, theta) - target  # noqa: E731
        lo = theta - 1 + 1e-9
        hi = max(2.0 * theta, 2.0 * N / K)
        while f(hi) > 0:
            hi *= 2.0
        alpha = brentq(f, lo, hi, xtol=1e-12, rtol=1e-12)
    return alpha, int(math.ceil(alpha - 1e-12))


# ---------------------------------------------------------- protected sums


@dataclass(frozen=True, eq=False)
class Permutation:
    """Permutation of [0, N) acting as (P x)_i = x[mapping[i]]."""

    mapping: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.mapping, dtype=np.int64)
        if m.ndim != 1 or not np.array_equal(np.sort(m), np.arange(m.size)):
            raise ValueError("mapping is not a permutation")
        m.setflags(write=False)
        object.__setattr__(self, "mapping", m)

    @classmethod
    def random(cls, N: int, seed=0) -> "Permutation":
        return cls(make_rng(seed).permutation(N))

    @classmethod
    def identity(cls, N: int) -> "Permutation":
        return cls(np.arange(N))

    @property
    def dim(self) -> int:
        return self.mapping.size

    def power_index(self, k: int) -> np.ndarray:
        """Index array of P^k (negative k gives inverse powers)."""
        if k in self._cache:
            return self._cache[k]
        if k == 0:
            idx = np.arange(self.dim)
        elif k > 0:
            idx = self.power_index(k - 1)[self.mapping]
        else:
            idx = np.argsort(self.power_index(-k))
        self._cache[k] = idx
        return idx

    def apply(self, x, k: int = 1) -> np.ndarray:
        return as_array(x)[..., self.power_index(k)]


def protected_sum(vectors, keys) -> DenseVector:
    """sum_j keys_j (.) x_j."""
    vectors = [as_array(v) for v in vectors]
    keys = [as_array(k) for k in keys]
    if not vectors:
        raise ValueError("need at least one vector")
    if len(keys) < len(vectors):
        raise ValueError(f"{len(vectors)} vectors but only {len(keys)} keys")
    N = vectors[0].shape[0]
    if any(v.shape[0] != N for v in vectors) or any(k.shape[0] != N for k in keys):
        raise ValueError("lengths differ")
    terms = [k * v for k, v in zip(keys, vectors)]
    return DenseVector(_exact_sum(terms), "real")


def permute_protect(vectors, P: Permutation) -> DenseVector:
    """sum_j P^j x_j with j counted from 0."""
    vectors = [as_array(v) for v in vectors]
    if not vectors:
        raise ValueError("need at least one vector")
    if any(v.shape[0] != P.dim for v in vectors):
        raise ValueError("vector length differs from permutation size")
    terms = [P.apply(v, j) for j, v in enumerate(vectors)]
    return DenseVector(_exact_sum(terms), "real")


def _exact_sum(terms):
    if any(np.iscomplexobj(t) for t in terms):
        return np.sum(np.stack(terms), axis=0)
    stacked = np.stack(terms)
    if np.all(stacked == np.round(stacked)):
        return stacked.astype(np.int64).sum(axis=0)
    return stacked.sum(axis=0)


def clip(acc, kappa: float):
    """Clamp components to [-kappa, kappa]."""
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    x = as_array(acc)
    out = np.clip(x, -kappa, kappa)
    if isinstance(acc, (DenseVector, Accumulator)):
        return DenseVector(out, "real")
    return out
