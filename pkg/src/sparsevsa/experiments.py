"""
Experiment drivers behind the CLI subcommands.

Every driver returns a list of long-format rows with the columns of
:data:`CSV_COLUMNS`; mode strings carry any extra parameters as
``key=value`` pairs separated by ``;``.
"""

from __future__ import annotations

import math
import numpy as np

from .binding import (
    build_sampling_tensor,
    lcc_dense,
    lcc_inverse_dense,
    min_fanin,
    prob_below_threshold,
    sptp_bind,
    sptp_bind_phasor,
    sptp_unbind,
)
from .classify import bundled_datasets, grid_search, load_bundled
from .core import block_codes_to_dense, child_seeds, make_rng, random_phases
from .cs import (
    LassoConfig,
    boxdot,
    concatenation_sampler,
    estimate_rip_ensemble,
    iid_sparse_sampler,
    lasso_solve,
    outer_difference_sampler,
    outer_product_sampler,
    random_dictionary,
    select_lambda,
    vsa_readout,
)
from .reasoning import countries_path, load_knowledge, run_capacity_experiment

CSV_COLUMNS = ("experiment", "N", "M", "K", "mode", "trial_count", "metric", "value", "seed")


def row(experiment, N, M, K, mode, trials, metric, value, seed) -> dict:
    return {"experiment": experiment, "N": N, "M": M, "K": K, "mode": mode,
            "trial_count": trials, "metric": metric, "value": value, "seed": seed}


def select(rows, **match) -> list[dict]:
    return [r for r in rows if all(r[k] == v for k, v in match.items())]


def value_of(rows, **match) -> float:
    hits = select(rows, **match)
    if len(hits) != 1:
        raise KeyError(f"{len(hits)} rows match {match}")
    return hits[0]["value"]


def cosine(u, v) -> np.ndarray:
    """Row-wise real cosine similarity (0 when either side is empty)."""
    num = np.sum(u * np.conj(v), axis=-1).real
    den = np.linalg.norm(u, axis=-1) * np.linalg.norm(v, axis=-1)
    return np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)


def random_sparse_batch(rng, shape, N, K, phasor=True) -> np.ndarray:
    """Batch of K-sparse vectors with uniform supports, shape (*shape, N)."""
    shape = tuple(shape)
    idx = np.argsort(rng.random(shape + (N,)), axis=-1)[..., :K]
    vals = random_phases(rng, shape + (K,)) if phasor else np.ones(shape + (K,))
    out = np.zeros(shape + (N,), dtype=complex if phasor else float)
    np.put_along_axis(out, idx, vals, axis=-1)
    return out


def random_block_batch(rng, shape, N, K, phasor=True) -> np.ndarray:
    shape = tuple(shape)
    hot = rng.integers(0, N // K, size=shape + (K,))
    phases = random_phases(rng, shape + (K,)) if phasor else None
    return block_codes_to_dense(hot, N // K, phases)


# ------------------------------------------------------------- readout


def readout_experiment(Ns=(256, 192, 128, 96, 64, 48, 32, 24, 16), M: int = 1000,
                       K: int = 6, trials: int = 20, seed=0, lam: float | None = None,
                       support_tol: float = 1e-3) -> list[dict]:
    """VSA readout vs lasso recovery of binary K-sparse vectors over N.

    ``lam`` defaults to the F1-selected value at the largest N.
    """
    rows = []
    lam_seed, trial_seed = child_seeds(seed, 2)
    if lam is None:
        lam, _ = select_lambda(max(Ns), M, K, seed=lam_seed, instances=3)
    for N, n_seed in zip(Ns, child_seeds(trial_seed, len(Ns))):
        hit, l_err, r_err, xtalk = [], [], [], []
        for ss in child_seeds(n_seed, trials):
            rng = make_rng(ss)
            Xi = random_dictionary(N, M, rng)
            a = np.zeros(M)
            support = rng.choice(M, size=K, replace=False)
            a[support] = 1.0
            x = Xi @ a
            res = lasso_solve(Xi, x, LassoConfig(lam=lam, nonnegative=True))
            found = np.flatnonzero(np.abs(res.coef) > support_tol)
            hit.append(set(found.tolist()) == set(support.tolist()))
            l_err.append(math.sqrt(np.mean((res.coef - a) ** 2)))
            ahat = vsa_readout(Xi, x)
            r_err.append(math.sqrt(np.mean((ahat - a) ** 2)))
            off = np.ones(M, dtype=bool)
            off[support] = False
            xtalk.append(float(np.std(ahat[off])))
        mode = f"lam={lam:.6g}"
        for metric, val in (("lasso_support_rate", np.mean(hit)),
                            ("lasso_rmse", np.mean(l_err)),
                            ("readout_rmse", np.mean(r_err)),
                            ("readout_crosstalk_std", np.mean(xtalk)),
                            ("crosstalk_theory", math.sqrt(K / N))):
            rows.append(row("readout", N, M, K, mode, trials, metric, float(val), seed))
    return rows


# ----------------------------------------------------------------- RIP


RIP_MODES = ("atomic", "tensor", "tensor_difference", "tensor_random",
             "protected", "protected_random")


def rip_experiment(Ns=(96, 128, 192, 256, 384, 512, 768), M: int = 32, K: int = 4,
                   L: int = 4, n_dictionaries: int = 5, trials: int = 2000,
                   values: str = "binary", seed=0, modes=RIP_MODES) -> list[dict]:
    """Worst empirical RIP constants of atomic, tensor-shaped and protected-sum codes.

    atomic             K-sparse vectors through Phi (N x M)
    tensor             vec(a b^T) through the box-dot of Phi and Psi (N x M^2)
    tensor_difference  differences of two such outer products
    tensor_random      vec(a b^T) through an iid N x M^2 dictionary
    protected          L concatenated K-sparse blocks through Phi box-dot L keys
    protected_random   the same vectors through an iid N x (M L) dictionary
    """
    samplers = {
        "atomic": iid_sparse_sampler(M, K, values),
        "tensor": outer_product_sampler(M, M, K, values),
        "tensor_difference": outer_difference_sampler(M, M, K, values),
        "tensor_random": outer_product_sampler(M, M, K, values),
        "protected": concatenation_sampler(M, L, K, values),
        "protected_random": concatenation_sampler(M, L, K, values),
    }

    def maker(mode, N):
        def make(ss):
            rng = make_rng(ss)
            if mode == "atomic":
                return random_dictionary(N, M, rng, scaled=True)
            if mode in ("tensor", "tensor_difference"):
                phi, psi = random_dictionary(N, M, rng), random_dictionary(N, M, rng)
                return boxdot(phi, psi, "tensor").matrix() / math.sqrt(N)
            if mode == "tensor_random":
                return random_dictionary(N, M * M, rng, scaled=True)
            if mode == "protected":
                phi, psi = random_dictionary(N, M, rng), random_dictionary(N, L, rng)
                return boxdot(phi, psi, "concat").matrix() / math.sqrt(N)
            return random_dictionary(N, M * L, rng, scaled=True)
        return make

    rows = []
    # every mode at one N draws from the same dictionary and test-vector
    # seed streams (common random numbers)
    for N, ss in zip(Ns, child_seeds(seed, len(Ns))):
        for mode in modes:
            est = estimate_rip_ensemble(maker(mode, N), samplers[mode],
                                        n_dictionaries, trials, ss)
            tag = f"{mode};values={values};L={L};dicts={n_dictionaries}"
            rows.append(row("rip", N, M, K, tag, trials, "delta", est.delta, seed))
    return rows


# ---------------------------------------------------------- bind bench


BIND_METHODS = ("hadamard", "convolution", "sptp", "lcc")


def _sptp_alpha(N, K):
    # K = N leaves every input active; one coincidence per output suffices
    return 1 if K >= N else min_fanin(N, K, 1)[1]


def bindbench_experiment(N: int = 1024, Ks=(8, 16, 32, 64, 128, 256, 512, 1024),
                         superpositions=(0, 1, 2, 4, 8, 16), trials: int = 200,
                         seed=0) -> list[dict]:
    """Unbinding correlation of phasor codes under four binding operators.

    The bound pair of interest is superposed with ``s`` further bound pairs,
    unbound with its known factor and compared (cosine) to the other factor.
    Hadamard, convolution and SPTP act on K-sparse vectors with uniform
    support, LCC on K-block codes.
    """
    rows = []
    S = max(superpositions)
    for K, ss in zip(Ks, child_seeds(seed, len(Ks))):
        rng = make_rng(ss)
        A = random_sparse_batch(rng, (trials, S + 1), N, K)
        B = random_sparse_batch(rng, (trials, S + 1), N, K)
        Ab = random_block_batch(rng, (trials, S + 1), N, K)
        Bb = random_block_batch(rng, (trials, S + 1), N, K)
        alpha = _sptp_alpha(N, K)
        W = build_sampling_tensor(N, alpha, "random", symmetric=True,
                                  seed=int(rng.integers(2**31)))
        bound = {
            "hadamard": A * B,
            "convolution": np.fft.ifft(np.fft.fft(A) * np.fft.fft(B)),
            "sptp": sptp_bind_phasor(A, B, W, 1.0),
            "lcc": lcc_dense(Ab, Bb, K),
        }
        for method in BIND_METHODS:
            cum = np.cumsum(bound[method], axis=1)
            for s in superpositions:
                c = cum[:, s]
                if method == "hadamard":
                    u, truth = c * np.conj(A[:, 0]), B[:, 0]
                elif method == "convolution":
                    u = np.fft.ifft(np.conj(np.fft.fft(A[:, 0])) * np.fft.fft(c))
                    truth = B[:, 0]
                elif method == "sptp":
                    # with a symmetric tensor, b and c recover a
                    u, truth = sptp_unbind(c, B[:, 0], W, 1.0, kind="phasor"), A[:, 0]
                else:
                    u = lcc_dense(c, lcc_inverse_dense(Ab[:, 0], K), K)
                    truth = Bb[:, 0]
                corr = cosine(u, truth)
                mode = f"{method};superposition={s};alpha={alpha if method == 'sptp' else ''}"
                rows.append(row("bindbench", N, None, K, mode, trials, "correlation_mean",
                                float(corr.mean()), seed))
                rows.append(row("bindbench", N, None, K, mode, trials, "correlation_sem",
                                float(corr.std(ddof=1) / math.sqrt(trials)), seed))
    return rows


def bindbench_table(rows) -> dict:
    """{(K, method, superposition): mean correlation}."""
    out = {}
    for r in select(rows, experiment="bindbench", metric="correlation_mean"):
        parts = dict(p.split("=") for p in r["mode"].split(";")[1:])
        out[(r["K"], r["mode"].split(";")[0], int(parts["superposition"]))] = r["value"]
    return out


# ------------------------------------------------------------ sparsity


def sparsity_experiment(Ks=(20, 50, 100, 200), ratio: float = 0.1, trials: int = 500,
                        seed=0, symmetric: bool = False) -> list[dict]:
    """Output L0 of SPTP (alpha = min fan-in, theta = 1) and of LCC."""
    rows = []
    for K, ss in zip(Ks, child_seeds(seed, len(Ks))):
        N = int(round(K / ratio))
        alpha = min_fanin(N, K, 1)[1]
        rng = make_rng(ss)
        W = build_sampling_tensor(N, alpha, "random", symmetric=symmetric,
                                  seed=int(rng.integers(2**31)))
        A = random_sparse_batch(rng, (trials,), N, K, phasor=False)
        B = random_sparse_batch(rng, (trials,), N, K, phasor=False)
        l0 = sptp_bind(A, B, W, 1).sum(axis=1)
        d = W.dendrites(A, B)
        mode = f"sptp;alpha={alpha};symmetric={symmetric}"
        for metric, val in (("l0_mean", l0.mean()), ("l0_std", l0.std(ddof=1)),
                            ("l0_over_k_cv", l0.std(ddof=1) / l0.mean()),
                            ("p_dendrite_active", np.mean(d >= 1)),
                            ("p_dendrite_theory", K / N)):
            rows.append(row("sparsity", N, None, K, mode, trials, metric, float(val), seed))
        Lb = N // K if N % K == 0 else None
        if Lb:
            hot = rng.integers(0, Lb, size=(2, trials, K))
            out = block_codes_to_dense((hot[0] + hot[1]) % Lb, Lb)
            l0_lcc = np.count_nonzero(out, axis=1)
            rows.append(row("sparsity", N, None, K, "lcc", trials, "l0_mean",
                            float(l0_lcc.mean()), seed))
            rows.append(row("sparsity", N, None, K, "lcc", trials, "l0_std",
                            float(l0_lcc.std()), seed))
    return rows


# --------------------------------------------------------------- fan-in


def fanin_experiment(N: int = 1000, ratios=(0.02, 0.05, 0.1, 0.2, 0.3, 0.5),
                     thetas=(1, 2, 3), mc_trials: int = 200, seed=0) -> list[dict]:
    """Analytic minimal fan-in per threshold with a Monte Carlo density check."""
    rows = []
    cells = [(r, t) for r in ratios for t in thetas]
    for (ratio, theta), ss in zip(cells, child_seeds(seed, len(cells))):
        K = int(round(ratio * N))
        a_real, a_int = min_fanin(N, K, theta)
        mode = f"theta={theta}"
        rows.append(row("fanin", N, None, K, mode, 0, "alpha_exact", a_real, seed))
        rows.append(row("fanin", N, None, K, mode, 0, "alpha_int", a_int, seed))
        if theta == 1:
            rows.append(row("fanin", N, None, K, mode, 0, "alpha_approx", N / K, seed))
        if mc_trials:
            rng = make_rng(ss)
            W = build_sampling_tensor(N, a_int, "random", seed=int(rng.integers(2**31)))
            A = random_sparse_batch(rng, (mc_trials,), N, K, phasor=False)
            B = random_sparse_batch(rng, (mc_trials,), N, K, phasor=False)
            density = float(np.mean(W.dendrites(A, B) >= theta))
            rows.append(row("fanin", N, None, K, mode, mc_trials, "density_mc", density, seed))
            rows.append(row("fanin", N, None, K, mode, 0, "density_theory",
                            1.0 - prob_below_threshold(a_int, N, K, theta), seed))
            # the real-valued fan-in, realized as a mean over outputs
            W = build_sampling_tensor(N, a_real, "random", seed=int(rng.integers(2**31)))
            density = float(np.mean(W.dendrites(A, B) >= theta))
            rows.append(row("fanin", N, None, K, mode, mc_trials, "density_mc_exact_alpha",
                            density, seed))
    return rows


# ------------------------------------------------------------- symmetry


def symmetry_experiment(N: int = 1000, K: int = 50, trials: int = 500, seed=0,
                        alpha: int | None = None) -> list[dict]:
    """SPTP unbinding correlation with symmetric vs asymmetric tensors."""
    alpha = min_fanin(N, K, 1)[1] if alpha is None else alpha
    rows = []
    rng = make_rng(seed)
    A = random_sparse_batch(rng, (trials,), N, K, phasor=False)
    B = random_sparse_batch(rng, (trials,), N, K, phasor=False)
    for sym, ss in zip((True, False), child_seeds(seed, 2)):
        W = build_sampling_tensor(N, alpha, "random", symmetric=sym, seed=ss)
        C = sptp_bind(A, B, W, 1)
        corr = cosine(sptp_unbind(C, B, W, 1, kind="binary"), A)
        mode = f"symmetric={sym};alpha={alpha};fan_in_mean={W.fan_in.mean():.3f}"
        rows.append(row("symmetry", N, None, K, mode, trials, "correlation_mean",
                        float(corr.mean()), seed))
        rows.append(row("symmetry", N, None, K, mode, trials, "correlation_sem",
                        float(corr.std(ddof=1) / math.sqrt(trials)), seed))
    return rows


# ------------------------------------------------------------- reasoning


def capacity_rows(Ns=(256, 512, 1024, 2048), Rs=(2, 4, 8), M_r: int = 16,
                  trials: int = 2000, seed=0, kind: str = "binary") -> list[dict]:
    rows = []
    for cell in run_capacity_experiment(Ns, Rs, M_r, trials, seed, kind=kind):
        mode = f"R={cell['R']};kind={kind}"
        for metric in ("empirical", "predicted"):
            rows.append(row("capacity", cell["N"], M_r, cell["K"], mode, trials,
                            metric, cell[metric], seed))
    return rows


def countries_rows(N: int = 2048, seeds: int = 100, seed=0, probe: str = "dollar",
                   source: str = "ustates", target: str = "mexico",
                   expected: str = "peso", path=None) -> list[dict]:
    """Success rate of one analogy query over independently seeded codebooks."""
    path = countries_path() if path is None else path
    hits = 0
    for s in child_seeds(seed, seeds):
        kb = load_knowledge(path, N=N, seed=s)
        hits += kb.analogy(probe, source, target)[0][0] == expected
    mode = f"{probe}:{source}::?:{target}->{expected}"
    return [row("countries", N, None, N // 16, mode, seeds, "success_rate", hits / seeds, seed)]


# -------------------------------------------------------- classification


def classify_experiment(datasets=None, folds: int = 4, seed=0,
                        sparse_grid: dict | None = None,
                        dense_grid: dict | None = None) -> list[dict]:
    """Grid-searched CV accuracy of the sparse and dense pipelines."""
    names = sorted(bundled_datasets()) if datasets is None else list(datasets)
    rows = []
    for name in names:
        ds = load_bundled(name) if isinstance(name, str) else name
        label = ds.name
        for scheme, grid in (("sparse", sparse_grid), ("dense", dense_grid)):
            g = grid_search(ds, scheme, grid, folds=folds, seed=seed)
            b = g.best
            mode = f"{label};{scheme};kappa={b.kappa};lam={b.lam:.6g}"
            rows.append(row("classify", b.N, ds.n_features, b.K, mode, folds,
                            "cv_accuracy", g.best_mean, seed))
            rows.append(row("classify", b.N, ds.n_features, b.K, mode, folds,
                            "cv_std", g.best_std, seed))
    return rows


def classify_summary(rows) -> dict[str, dict[str, float]]:
    out: dict[str, dict[str, float]] = {}
    for r in select(rows, experiment="classify", metric="cv_accuracy"):
        name, scheme = r["mode"].split(";")[:2]
        out.setdefault(name, {})[scheme] = r["value"]
    return out
