"""
Compressed-sensing machinery.

Compression of sparse vectors through a random dictionary, classical VSA
readout, L1-regularized sparse inference, the box-dot dictionary built from
pairwise Hadamard products of two codebooks, and empirical RIP / spark
probes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import SparseVector, as_array, child_seeds, make_rng, random_phases

# ------------------------------------------------------------ dictionaries


def random_dictionary(N: int, M: int, seed=0, kind: str = "bipolar",
                      scaled: bool = False) -> np.ndarray:
    """N x M sampling matrix with iid bipolar or phasor entries.

    ``scaled`` divides by sqrt(N) so every column has unit norm.
    """
    rng = make_rng(seed)
    if kind == "bipolar":
        X = rng.choice(np.array([-1.0, 1.0]), size=(N, M))
    elif kind == "phasor":
        X = random_phases(rng, (N, M))
    elif kind == "gaussian":
        X = rng.standard_normal((N, M))
    else:
        raise ValueError(f"unknown dictionary kind {kind!r}")
    return X / np.sqrt(N) if scaled else X


def compress(Xi, a) -> np.ndarray:
    """x = Xi a, evaluated over the support of ``a`` only."""
    Xi = np.asarray(Xi)
    if isinstance(a, SparseVector):
        if a.dim != Xi.shape[1]:
            raise ValueError("dictionary columns differ from vector dimension")
        return Xi[:, a.indices] @ a.values
    a = np.asarray(a)
    if a.shape[-1] != Xi.shape[1]:
        raise ValueError("dictionary columns differ from vector dimension")
    if a.ndim == 1:
        support = np.flatnonzero(a)
        return Xi[:, support] @ a[support]
    return a @ Xi.T


def vsa_readout(Phi, x) -> np.ndarray:
    """a_i ~ Phi_i^H x / N."""
    Phi = np.asarray(Phi)
    x = as_array(x)
    if x.shape[-1] != Phi.shape[0]:
        raise ValueError("vector length differs from dictionary rows")
    out = x @ np.conj(Phi) / Phi.shape[0]
    if not (np.iscomplexobj(Phi) or np.iscomplexobj(x)):
        return out
    return out.real


# ------------------------------------------------------------------ lasso


@dataclass(frozen=True)
class LassoConfig:
    lam: float = 1e-2
    max_iterations: int = 5000
    tol: float = 1e-8
    nonnegative: bool = False
    power_iterations: int = 50

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class LassoResult:
    coef: np.ndarray
    iterations: int
    converged: bool
    objective: list[float] = field(default_factory=list)
    lipschitz: float = 0.0

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.coef)


def lipschitz_constant(A: np.ndarray, iterations: int = 50, seed=0) -> float:
    """Largest squared singular value of ``A`` by power iteration."""
    rng = make_rng(seed)
    v = rng.standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    s = 0.0
    for _ in range(iterations):
        w = A.T @ (A @ v)
        s = np.linalg.norm(w)
        if s == 0:
            return 0.0
        v = w / s
    # the Rayleigh quotient approaches from below; pad slightly for a safe step
    return float(s) * 1.01


def soft_threshold(v, t, nonnegative=False):
    if nonnegative:
        return np.maximum(v - t, 0.0)
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def lasso_objective(A, x, coef, lam) -> float:
    r = x - A @ coef
    return 0.5 * float(r @ r) + lam * float(np.abs(coef).sum())


def lasso_solve(Xi, x, config: LassoConfig | None = None, x0=None) -> LassoResult:
    """Minimize 0.5 ||x - Xi a||^2 + lam ||a||_1.

    Monotone accelerated proximal gradient (MFISTA): a momentum step is
    taken only when it does not raise the objective, so the recorded
    objective never increases. Stops when the relative objective decrease
    of an accepted step falls below ``config.tol`` or after
    ``config.max_iterations``; non-convergence is reported, not raised.
    """
    cfg = config or LassoConfig()
    A = np.asarray(Xi, dtype=float)
    x = np.asarray(x, dtype=float)
    if A.shape[0] != x.shape[0]:
        raise ValueError("dictionary rows differ from measurement length")
    L = lipschitz_constant(A, cfg.power_iterations)
    if L == 0:
        return LassoResult(np.zeros(A.shape[1]), 0, True, [0.5 * float(x @ x)], 0.0)
    step = 1.0 / L
    coef = np.zeros(A.shape[1]) if x0 is None else np.asarray(x0, dtype=float).copy()
    y = coef.copy()
    t = 1.0
    f_prev = lasso_objective(A, x, coef, cfg.lam)
    history = [f_prev]
    converged = False
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        grad = A.T @ (A @ y - x)
        z = soft_threshold(y - step * grad, step * cfg.lam, cfg.nonnegative)
        f_z = lasso_objective(A, x, z, cfg.lam)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        if f_z <= f_prev:
            new = z
            f_new = f_z
        else:
            new = coef
            f_new = f_prev
        y = new + (t / t_next) * (z - new) + ((t - 1.0) / t_next) * (new - coef)
        accepted = f_z <= f_prev
        decrease = f_prev - f_new
        coef, t = new, t_next
        history.append(f_new)
        if accepted and decrease <= cfg.tol * max(abs(f_new), 1e-300):
            converged = True
            f_prev = f_new
            break
        f_prev = f_new
    return LassoResult(coef, it, converged, history, L)


def debias(Xi, x, coef, tol: float = 0.0) -> np.ndarray:
    """Least-squares refit of ``x`` on the support of ``coef``."""
    A = np.asarray(Xi, dtype=float)
    support = np.flatnonzero(np.abs(coef) > tol)
    out = np.zeros(A.shape[1])
    if support.size:
        sol, *_ = np.linalg.lstsq(A[:, support], x, rcond=None)
        out[support] = sol
    return out


def support_f1(true_support, found_support) -> float:
    t, f = set(np.asarray(true_support).tolist()), set(np.asarray(found_support).tolist())
    if not t and not f:
        return 1.0
    tp = len(t & f)
    if tp == 0:
        return 0.0
    prec, rec = tp / len(f), tp / len(t)
    return 2 * prec * rec / (prec + rec)


LAMBDA_GRID = tuple(np.logspace(-4, 0, 13))


def select_lambda(N: int, M: int, K: int, seed=0, instances: int = 5,
                  grid=LAMBDA_GRID, nonnegative: bool = True,
                  support_tol: float = 1e-3, max_iterations: int = 5000) -> tuple[float, list]:
    """Pick lambda by mean support-recovery F1 on synthetic held-out instances.

    Instances use unscaled bipolar dictionaries and binary K-sparse vectors.
    Ties go to the larger lambda: it converges fastest and its shrinkage
    bias is what a final least-squares refit removes.
    """
    rows = []
    seeds = child_seeds(seed, instances)
    problems = []
    for s in seeds:
        rng = make_rng(s)
        Xi = random_dictionary(N, M, rng)
        a = np.zeros(M)
        a[rng.choice(M, size=K, replace=False)] = 1.0
        problems.append((Xi, a, Xi @ a))
    for lam in grid:
        f1s, errs = [], []
        for Xi, a, x in problems:
            res = lasso_solve(Xi, x, LassoConfig(lam=lam, nonnegative=nonnegative,
                                                 max_iterations=max_iterations))
            found = np.flatnonzero(np.abs(res.coef) > support_tol)
            f1s.append(support_f1(np.flatnonzero(a), found))
            errs.append(np.sqrt(np.mean((res.coef - a) ** 2)))
        rows.append((float(lam), float(np.mean(f1s)), float(np.mean(errs))))
    best = max(rows, key=lambda r: (round(r[1], 12), r[0]))
    return best[0], rows


# ---------------------------------------------------------------- box-dot


@dataclass(frozen=True, eq=False)
class BoxDot:
    """Dictionary of pairwise Hadamard products of the columns of two codebooks.

    ``order="tensor"``: column ``l * M2 + k`` is Phi_l (.) Psi_k, matching the
    row-major ravel of an outer product ``a b^T``.
    ``order="concat"``: column ``j * M1 + i`` is Phi_i (.) Psi_j, matching the
    concatenation ``(a^1, ..., a^L)`` of a protected sum keyed by Psi_j.
    """

    phi: np.ndarray
    psi: np.ndarray
    order: str = "tensor"

    def __post_init__(self):
        phi, psi = np.asarray(self.phi), np.asarray(self.psi)
        if phi.shape[0] != psi.shape[0]:
            raise ValueError("codebooks differ in row count")
        if self.order not in ("tensor", "concat"):
            raise ValueError(f"unknown order {self.order!r}")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "psi", psi)

    @property
    def shape(self) -> tuple[int, int]:
        return self.phi.shape[0], self.phi.shape[1] * self.psi.shape[1]

    def pair(self, col: int) -> tuple[int, int]:
        """(phi index, psi index) of a flat column index."""
        M1, M2 = self.phi.shape[1], self.psi.shape[1]
        if self.order == "tensor":
            return col // M2, col % M2
        return col % M1, col // M1

    def column(self, col: int) -> np.ndarray:
        l, k = self.pair(col)
        return self.phi[:, l] * self.psi[:, k]

    def matrix(self) -> np.ndarray:
        N = self.phi.shape[0]
        if self.order == "tensor":
            return (self.phi[:, :, None] * self.psi[:, None, :]).reshape(N, -1)
        return (self.psi[:, :, None] * self.phi[:, None, :]).reshape(N, -1)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix(), dtype=dtype)

    def matvec(self, v) -> np.ndarray:
        """Apply to flat vector(s) of length M1*M2 without forming the matrix."""
        v = np.asarray(v)
        M1, M2 = self.phi.shape[1], self.psi.shape[1]
        if self.order == "tensor":
            T = v.reshape(v.shape[:-1] + (M1, M2))
            inner = T @ self.psi.T  # (..., M1, N)
            return np.einsum("...ln,nl->...n", inner, self.phi)
        T = v.reshape(v.shape[:-1] + (M2, M1))
        inner = T @ self.phi.T  # (..., M2, N)
        return np.einsum("...kn,nk->...n", inner, self.psi)


def boxdot(phi, psi, order: str = "tensor") -> BoxDot:
    return BoxDot(np.asarray(phi), np.asarray(psi), order)


# ------------------------------------------------------------- RIP probes

Sampler = Callable[[np.random.Generator, int], np.ndarray]


def _values(rng, shape, values: str):
    if values == "binary":
        return np.ones(shape)
    if values == "gaussian":
        return rng.standard_normal(shape)
    if values == "chi2":
        return rng.chisquare(1.0, size=shape)
    raise ValueError(f"unknown value distribution {values!r}")


def _sparse_rows(rng, n, M, K, values):
    out = np.zeros((n, M))
    idx = np.argsort(rng.random((n, M)), axis=1)[:, :K]
    np.put_along_axis(out, idx, _values(rng, (n, K), values), axis=1)
    return out


def iid_sparse_sampler(M: int, s: int, values: str = "binary") -> Sampler:
    """s-sparse vectors with uniformly random support."""
    def draw(rng, n):
        return _sparse_rows(rng, n, M, s, values)
    draw.sparsity = s
    return draw


def outer_product_sampler(M1: int, M2: int, K: int, values: str = "binary") -> Sampler:
    """vec(a b^T) for independent K-sparse a (length M1) and b (length M2)."""
    def draw(rng, n):
        a = _sparse_rows(rng, n, M1, K, values)
        b = _sparse_rows(rng, n, M2, K, values)
        return (a[:, :, None] * b[:, None, :]).reshape(n, -1)
    draw.sparsity = K * K
    return draw


def outer_difference_sampler(M1: int, M2: int, K: int, values: str = "binary") -> Sampler:
    """vec(a b^T - c d^T): differences of two outer products."""
    single = outer_product_sampler(M1, M2, K, values)

    def draw(rng, n):
        return single(rng, n) - single(rng, n)
    draw.sparsity = 2 * K * K
    return draw


def concatenation_sampler(M: int, L: int, K: int, values: str = "binary") -> Sampler:
    """(a^1, ..., a^L): L independent K-sparse blocks of length M."""
    def draw(rng, n):
        return np.concatenate([_sparse_rows(rng, n, M, K, values) for _ in range(L)], axis=1)
    draw.sparsity = K * L
    return draw


@dataclass(frozen=True)
class RipEstimate:
    delta: float
    s: int
    trials: int


_RIP_CHUNK = 500


def rip_ratios(Xi, sampler: Sampler, trials: int, seed=0) -> np.ndarray:
    """||Xi a||^2 / ||a||^2 for ``trials`` test vectors.

    Vectors are drawn in fixed-size chunks from one stream, so a run with
    more trials extends a shorter one.
    """
    rng = make_rng(seed)
    A = Xi.matrix() if isinstance(Xi, BoxDot) else np.asarray(Xi)
    out = []
    done = 0
    while done < trials:
        V = sampler(rng, _RIP_CHUNK)[: trials - done]
        if V.shape[1] != A.shape[1]:
            raise ValueError("test vectors do not match dictionary columns")
        num = np.sum(np.abs(V @ A.T) ** 2, axis=1)
        den = np.sum(np.abs(V) ** 2, axis=1)
        keep = den > 0
        out.append(num[keep] / den[keep])
        done += V.shape[0]
    return np.concatenate(out)


def estimate_rip(Xi, s: int | None = None, trials: int = 1000, seed=0,
                 sampler: Sampler | None = None) -> RipEstimate:
    """Largest observed |‖Xi a‖² / ‖a‖² - 1| over sampled s-sparse vectors.

    Columns are expected to have unit norm. Without ``sampler`` the test
    vectors are binary with uniformly random s-subsets as support.
    """
    A = Xi.matrix() if isinstance(Xi, BoxDot) else np.asarray(Xi)
    if sampler is None:
        if s is None:
            raise ValueError("need s or a sampler")
        if s > A.shape[1]:
            raise ValueError(f"s={s} exceeds {A.shape[1]} columns")
        sampler = iid_sparse_sampler(A.shape[1], s)
    s = getattr(sampler, "sparsity", s)
    ratios = rip_ratios(A, sampler, trials, seed)
    delta = float(np.max(np.abs(ratios - 1.0))) if ratios.size else 0.0
    return RipEstimate(delta, int(s), int(trials))


def estimate_rip_ensemble(make_dictionary: Callable[[np.random.SeedSequence], np.ndarray],
                          sampler: Sampler, n_dictionaries: int = 10,
                          trials: int = 10000, seed=0) -> RipEstimate:
    """Worst RIP constant over independently regenerated dictionaries."""
    worst = 0.0
    for ss in child_seeds(seed, n_dictionaries):
        d_seed, v_seed = child_seeds(ss, 2)
        est = estimate_rip(make_dictionary(d_seed), trials=trials, seed=v_seed,
                           sampler=sampler)
        worst = max(worst, est.delta)
    return RipEstimate(worst, int(getattr(sampler, "sparsity", 0)), trials)


# ------------------------------------------------------------ spark probes


def omp(A: np.ndarray, y: np.ndarray, n_atoms: int, exclude=()) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal matching pursuit; returns (support, coefficients)."""
    support: list[int] = []
    r = y.copy()
    banned = set(int(e) for e in exclude)
    coef = np.zeros(0)
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = 1.0
    for _ in range(n_atoms):
        scores = np.abs(A.T @ r) / norms
        for c in list(banned) + support:
            scores[c] = -1.0
        support.append(int(np.argmax(scores)))
        coef, *_ = np.linalg.lstsq(A[:, support], y, rcond=None)
        r = y - A[:, support] @ coef
        if np.linalg.norm(r) <= 1e-14 * max(np.linalg.norm(y), 1.0):
            break
    return np.array(support, dtype=np.int64), coef


def min_singular(A: np.ndarray) -> float:
    return float(np.linalg.svd(A, compute_uv=False)[-1])


@dataclass
class SparkReport:
    """Outcome of a spark-witness search.

    ``sigma_phi``: smallest normalized singular value over the candidate
    (2K+1)-column subsets of Phi. ``sigma_boxdot``: the same for the
    box-dot columns built from the best subset and one cardinal key.
    ``max_column_l0``: largest per-column L0 over differences of K-sparse
    outer products (never above 2K).
    """

    sigma_phi: float
    sigma_boxdot: float
    support: np.ndarray
    key_index: int
    max_column_l0: int
    K: int

    @property
    def null_found(self) -> bool:
        return self.sigma_boxdot < 1e-8

    @property
    def column_bound_holds(self) -> bool:
        return self.max_column_l0 <= 2 * self.K


def spark_witness(Phi, K: int, trials: int = 100, seed=0, Psi=None) -> SparkReport:
    """Search for near-null (2K+1)-sparse combinations of columns.

    Each column of ``Phi`` is approximated by OMP with 2K atoms from the
    remaining columns; the subset with the smallest normalized singular
    value is carried over to box-dot columns (subset x one key), which
    share its null vector. Random (2K+1)-subsets are probed as well. The
    outer-product structure check draws ``trials`` pairs of K-sparse outer
    products and records the largest per-column support of their
    difference.
    """
    Phi = np.asarray(Phi, dtype=float)
    N, M = Phi.shape
    s = 2 * K + 1
    if s > M:
        raise ValueError("need at least 2K+1 columns")
    rng = make_rng(seed)
    if Psi is None:
        Psi = random_dictionary(N, max(2, K), rng)
    Psi = np.asarray(Psi, dtype=float)
    unit = Phi / np.maximum(np.linalg.norm(Phi, axis=0), 1e-300)

    best_sigma, best_support = np.inf, None
    candidates = []
    for col in range(M):
        sup, _ = omp(unit, unit[:, col], 2 * K, exclude=[col])
        candidates.append(np.sort(np.append(sup, col)))
    for _ in range(trials):
        candidates.append(np.sort(rng.choice(M, size=s, replace=False)))
    for cand in candidates:
        if cand.size != s or np.unique(cand).size != s:
            continue
        sig = min_singular(unit[:, cand])
        if sig < best_sigma:
            best_sigma, best_support = sig, cand

    key = int(rng.integers(Psi.shape[1]))
    cols = Phi[:, best_support] * Psi[:, [key]]
    cols = cols / np.maximum(np.linalg.norm(cols, axis=0), 1e-300)
    sigma_box = min_singular(cols)

    M2 = Psi.shape[1]
    worst = 0
    draw = outer_difference_sampler(M, M2, K)
    for _ in range(max(1, trials // 100)):
        D = draw(rng, 100).reshape(-1, M, M2)
        worst = max(worst, int((D != 0).sum(axis=1).max()))
    return SparkReport(float(best_sigma), float(sigma_box), best_support, key, worst, K)


def plant_null_vector(Phi, K: int, seed=0) -> tuple[np.ndarray, np.ndarray]:
    """Copy of ``Phi`` whose last column is a combination of 2K others.

    Returns ``(Phi_planted, null_vector)`` with a (2K+1)-sparse null vector.
    """
    rng = make_rng(seed)
    Phi = np.array(Phi, dtype=float)
    M = Phi.shape[1]
    others = rng.choice(M - 1, size=2 * K, replace=False)
    w = rng.standard_normal(2 * K)
    Phi[:, -1] = Phi[:, others] @ w
    null = np.zeros(M)
    null[others] = w
    null[-1] = -1.0
    return Phi, null
