"""Acceptance gate: ten criteria at their full tolerances and runtime limits.

Each test prints one PASS/FAIL line (also collected in the pytest terminal
summary). Run only these with ``pytest -m acceptance``.
"""

import math
import time

import numpy as np
import pytest

from sparsevsa import experiments as ex
from sparsevsa.binding import (
    circular_convolve,
    hadamard_bind,
    hadamard_unbind,
    lcc_bind,
    lcc_dense,
    lcc_inverse,
    lcc_unbind,
)
from sparsevsa.classify import load_bundled
from sparsevsa.core import (
    BlockCodeVector,
    block_code_entropy,
    child_seeds,
    make_rng,
    similarity,
)

pytestmark = pytest.mark.acceptance


# ----------------------------------------------------------------------- 1


def test_c01_lcc_lossless(report):
    t0 = time.time()
    N, pairs = 1024, 10_000
    mismatches, worst_corr = 0, 1.0
    for K, ss in zip((8, 16, 64), child_seeds(101, 3)):
        for kind, ks in zip(("binary", "phasor"), child_seeds(ss, 2)):
            rng = make_rng(ks)
            hot = rng.integers(0, N // K, size=(pairs, 2, K))
            ph = np.exp(2j * np.pi * rng.random((pairs, 2, K))) if kind == "phasor" else None
            for t in range(pairs):
                a = BlockCodeVector(K, N // K, hot[t, 0], None if ph is None else ph[t, 0])
                b = BlockCodeVector(K, N // K, hot[t, 1], None if ph is None else ph[t, 1])
                back = lcc_unbind(lcc_bind(a, b), a)
                same = np.array_equal(back.hot, b.hot)
                if kind == "phasor":
                    same = same and np.allclose(back.phases, b.phases, atol=1e-9, rtol=0)
                mismatches += not same
                if t < 200:
                    worst_corr = min(worst_corr, similarity(back, b))
    dt = time.time() - t0
    ok = mismatches == 0 and worst_corr == pytest.approx(1.0, abs=1e-12) and dt < 30
    report(1, "LCC losslessness", ok,
           f"mismatches={mismatches} over 6x{pairs} pairs, min corr={worst_corr:.12f}", dt)
    assert ok


# ----------------------------------------------------------------------- 2


def test_c02_sparsity_preservation(report):
    t0 = time.time()
    Ks = (20, 50, 100, 200)
    rows = ex.sparsity_experiment(Ks, ratio=0.1, trials=500, seed=0)
    dt = time.time() - t0
    lcc_exact = all(ex.value_of(rows, K=K, mode="lcc", metric="l0_mean") == K
                    and ex.value_of(rows, K=K, mode="lcc", metric="l0_std") == 0 for K in Ks)
    ratios, cvs = [], []
    for K in Ks:
        sp = [r for r in ex.select(rows, K=K) if r["mode"].startswith("sptp")]
        ratios.append(ex.value_of(sp, metric="l0_mean") / K)
        cvs.append(ex.value_of(sp, metric="l0_over_k_cv"))
    in_band = all(0.9 <= q <= 1.1 for q in ratios)
    violations = sum(b >= a for a, b in zip(cvs, cvs[1:]))
    ok = lcc_exact and in_band and violations <= 1 and dt < 120
    report(2, "sparsity preservation", ok,
           f"SPTP L0/K={[round(q, 3) for q in ratios]} CV={[round(c, 3) for c in cvs]} "
           f"violations={violations} LCC exact={lcc_exact}", dt)
    assert ok


# ----------------------------------------------------------------------- 3


def test_c03_binding_ordering(report):
    t0 = time.time()
    N = 1024
    Ks = (8, 16, 32, 64, 128, 256, 512, 1024)
    S = (0, 1, 2, 4, 8, 16)
    rows = ex.bindbench_experiment(N, Ks, S, trials=200, seed=0)
    dt = time.time() - t0
    tab = ex.bindbench_table(rows)
    fails = []
    for K in Ks:
        for s in S:
            lcc, sptp = tab[(K, "lcc", s)], tab[(K, "sptp", s)]
            conv, had = tab[(K, "convolution", s)], tab[(K, "hadamard", s)]
            others = max(lcc, sptp, conv)
            if lcc < sptp or lcc < conv:
                fails.append(f"LCC<other K={K} s={s}")
            if K / N < 0.5 and had >= others:
                fails.append(f"Hadamard best below dense limit K={K} s={s}")
            if K / N <= 0.05 and had > min(lcc, sptp, conv):
                fails.append(f"Hadamard not worst K={K} s={s}")
            if K == N and had < others - 0.02:
                fails.append(f"Hadamard below best in dense limit s={s}")
        if tab[(K, "lcc", 0)] < 1 - 1e-9:
            fails.append(f"LCC not exact at K={K}")
    ok = not fails and dt < 300
    detail = "all orderings hold" if not fails else "; ".join(fails[:6])
    report(3, "binding comparison ordering", ok,
           f"{detail}; K=64 s=16: lcc={tab[(64, 'lcc', 16)]:.3f} "
           f"conv={tab[(64, 'convolution', 16)]:.3f} sptp={tab[(64, 'sptp', 16)]:.3f} "
           f"had={tab[(64, 'hadamard', 16)]:.3f}", dt)
    assert ok


# ----------------------------------------------------------------------- 4


def test_c04_cs_readout(report):
    t0 = time.time()
    Ns = (256, 192, 128, 96, 64, 48, 32, 24, 16)
    M, K = 1000, 6
    rows = ex.readout_experiment(Ns, M, K, trials=20, seed=0)
    dt = time.time() - t0

    def series(metric):
        return [ex.value_of(rows, N=N, metric=metric) for N in Ns]

    support, l_rmse, r_rmse = series("lasso_support_rate"), series("lasso_rmse"), series("readout_rmse")
    xtalk = ex.value_of(rows, N=256, metric="readout_crosstalk_std")
    ratio = xtalk / math.sqrt(K / 256)
    top_ok = support[0] == 1.0 and l_rmse[0] < 1e-3 and 1 / 1.5 <= ratio <= 1.5
    lasso_steps = [b / a for a, b in zip(l_rmse, l_rmse[1:])]
    readout_steps = [b / a for a, b in zip(r_rmse, r_rmse[1:])]
    sharp = support[-1] == 0.0 and max(lasso_steps) >= 5
    smooth = all(1.0 <= q <= 1.5 for q in readout_steps)
    ok = top_ok and sharp and smooth and dt < 120
    report(4, "CS readout", ok,
           f"N=256 support={support[0]} rmse={l_rmse[0]:.2e} crosstalk/theory={ratio:.3f}; "
           f"support sweep={support}; max lasso step x{max(lasso_steps):.1f}; "
           f"readout steps in [{min(readout_steps):.2f}, {max(readout_steps):.2f}]", dt)
    assert ok


# ----------------------------------------------------------------------- 5


def test_c05_rip_equivalences(report):
    t0 = time.time()
    Ns = (96, 128, 192, 256, 384, 512, 768)
    rows = ex.rip_experiment(Ns, M=32, K=4, L=4, n_dictionaries=5, trials=2000, seed=0)
    dt = time.time() - t0

    def delta(N, mode):
        return ex.value_of([r for r in rows if r["mode"].split(";")[0] == mode], N=N)

    a = delta(Ns[0], "tensor") >= delta(Ns[0], "atomic")
    b = any(delta(N, "tensor") < 1.0 for N in Ns)
    gaps = [delta(N, "protected") - delta(N, "protected_random") for N in Ns]
    c = all(abs(g) <= 0.1 for g in gaps)
    ok = a and b and c and dt < 600
    report(5, "RIP equivalences", ok,
           f"(a)={a} tensor={delta(Ns[0], 'tensor'):.3f} atomic={delta(Ns[0], 'atomic'):.3f} "
           f"(b)={b} (c)={c} protected gaps={[round(g, 3) for g in gaps]}", dt)
    assert ok


# ----------------------------------------------------------------------- 6


def _bisect_min_fanin(N, K):
    # exact Binomial CDF at zero successes, P(d = 0) = (1 - p)^alpha, bisected
    p, target = (K / N) ** 2, 1 - K / N
    lo, hi = 0.0, 1.0
    while (1 - p) ** hi > target:
        hi *= 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (1 - p) ** mid > target:
            lo = mid
        else:
            hi = mid
    return hi


def test_c06_fanin_math(report):
    t0 = time.time()
    N, ratios, thetas = 1000, (0.02, 0.05, 0.1, 0.2, 0.3, 0.5), (1, 2, 3)
    rows = ex.fanin_experiment(N, ratios, thetas, mc_trials=200, seed=0)
    dt = time.time() - t0
    rel, dens, ordered = [], [], True
    for ratio in ratios:
        K = int(round(ratio * N))
        exact = ex.value_of(rows, K=K, mode="theta=1", metric="alpha_exact")
        rel.append(abs(exact / _bisect_min_fanin(N, K) - 1))
        for theta in thetas:
            dens.append(abs(ex.value_of(rows, K=K, mode=f"theta={theta}",
                                        metric="density_mc_exact_alpha") - K / N))
        alphas = [ex.value_of(rows, K=K, mode=f"theta={t}", metric="alpha_exact") for t in thetas]
        ordered &= all(x < y for x, y in zip(alphas, alphas[1:]))
    ok = max(rel) <= 0.005 and max(dens) <= 0.01 and ordered and dt < 60
    report(6, "fan-in math", ok,
           f"max rel. error vs bisection={max(rel):.2e}; max |P(d>=theta) - K/N|={max(dens):.4f}; "
           f"theta ordering={ordered}", dt)
    assert ok


# ----------------------------------------------------------------------- 7


def test_c07_symmetry_benefit(report):
    t0 = time.time()
    rows = ex.symmetry_experiment(N=1000, K=50, trials=500, seed=0)
    dt = time.time() - t0

    def val(sym, metric):
        return ex.value_of([r for r in rows if r["mode"].startswith(f"symmetric={sym}")],
                           metric=metric)

    margin = val(True, "correlation_mean") - val(False, "correlation_mean")
    sigma = math.hypot(val(True, "correlation_sem"), val(False, "correlation_sem"))
    ok = margin > 3 * sigma and dt < 120
    report(7, "symmetry benefit", ok,
           f"symmetric={val(True, 'correlation_mean'):.3f} asymmetric={val(False, 'correlation_mean'):.3f} "
           f"margin={margin:.3f} ({margin / sigma:.0f} sigma)", dt)
    assert ok


# ----------------------------------------------------------------------- 8


def test_c08_reasoning_capacity(report):
    t0 = time.time()
    rows = ex.capacity_rows((256, 512, 1024, 2048), (2, 4, 8), 16, 2000, seed=0)
    rate = ex.countries_rows(2048, 100, seed=0)[0]["value"]
    dt = time.time() - t0
    gaps = []
    for r in ex.select(rows, metric="empirical"):
        pred = ex.value_of(rows, N=r["N"], mode=r["mode"], metric="predicted")
        gaps.append(abs(r["value"] - pred))
    ok = max(gaps) <= 0.05 and rate >= 0.99 and dt < 300
    report(8, "reasoning capacity", ok,
           f"max |empirical - predicted|={max(gaps):.3f} over {len(gaps)} cells; "
           f"dollar of mexico -> peso in {rate:.2f} of 100 seeds", dt)
    assert ok


# ----------------------------------------------------------------------- 9


def test_c09_classification_parity(report):
    t0 = time.time()
    names = ("anes96", "breast_cancer", "digits500", "iris", "wine")
    rows = ex.classify_experiment(names, folds=4, seed=0)
    dt = time.time() - t0
    summary = ex.classify_summary(rows)
    parts, ok = [], dt < 600
    for name in names:
        ds = load_bundled(name)
        majority = np.max(np.unique(ds.y, return_counts=True)[1]) / ds.n_samples
        sp, de = summary[name]["sparse"], summary[name]["dense"]
        good = abs(sp - de) <= 0.05 and sp > majority and de > majority
        ok &= good
        parts.append(f"{name} {sp:.3f}/{de:.3f}{'' if good else ' (gap)'}")
    report(9, "classification parity", ok, "sparse/dense: " + ", ".join(parts), dt)
    assert ok


# ---------------------------------------------------------------------- 10


def test_c10_algebraic_properties(report):
    t0 = time.time()
    rng = make_rng(10)
    fails = []
    N, K = 256, 16
    Lb = N // K
    for _ in range(200):
        # Hadamard on bipolar codes
        x, y, z = rng.choice([-1, 1], size=(3, N))
        if not np.array_equal(hadamard_bind(hadamard_bind(x, y), y), x):
            fails.append("hadamard self-inverse")
        if not np.array_equal(hadamard_bind(x, y), hadamard_bind(y, x)):
            fails.append("hadamard commutative")
        if not np.array_equal(hadamard_bind(hadamard_bind(x, y), z), hadamard_bind(x, hadamard_bind(y, z))):
            fails.append("hadamard associative")
        if not np.array_equal(hadamard_bind(x, np.ones(N, int)), x):
            fails.append("hadamard identity")
        if not np.array_equal(hadamard_bind(x + y, z), hadamard_bind(x, z) + hadamard_bind(y, z)):
            fails.append("hadamard distributive")
        p, q = np.exp(2j * np.pi * rng.random((2, N)))
        if not np.allclose(hadamard_unbind(hadamard_bind(p, q), q), p, atol=1e-9):
            fails.append("hadamard phasor inverse")
        # LCC on block codes
        ha, hb, hc = rng.integers(0, Lb, size=(3, K))
        pa, pb, pc = np.exp(2j * np.pi * rng.random((3, K)))
        a, b, c = (BlockCodeVector(K, Lb, h, ph) for h, ph in ((ha, pa), (hb, pb), (hc, pc)))
        ident = BlockCodeVector(K, Lb, np.zeros(K, int))
        ab = lcc_bind(a, b)
        if not (np.array_equal(ab.hot, lcc_bind(b, a).hot) and np.allclose(ab.phases, lcc_bind(b, a).phases)):
            fails.append("lcc commutative")
        l1, r1 = lcc_bind(ab, c), lcc_bind(a, lcc_bind(b, c))
        if not (np.array_equal(l1.hot, r1.hot) and np.allclose(l1.phases, r1.phases)):
            fails.append("lcc associative")
        ai = lcc_bind(a, ident)
        if not (np.array_equal(ai.hot, a.hot) and np.allclose(ai.phases, a.phases)):
            fails.append("lcc identity")
        inv = lcc_bind(a, lcc_inverse(a))
        if not (np.array_equal(inv.hot, ident.hot) and np.allclose(inv.phases, 1, atol=1e-9)):
            fails.append("lcc inverse")
        back = lcc_unbind(ab, a)
        if not (np.array_equal(back.hot, b.hot) and np.allclose(back.phases, b.phases, atol=1e-9)):
            fails.append("lcc unbind")
        lhs = lcc_dense(a.to_array() + c.to_array(), b.to_array(), K)
        rhs = lcc_bind(a, b).to_array() + lcc_bind(c, b).to_array()
        if np.max(np.abs(lhs - rhs)) >= 1e-9:
            fails.append("lcc distributive")
    # FFT against the direct O(N^2) sum on 100 random pairs, N = 64
    for _ in range(100):
        u, v = rng.standard_normal((2, 64))
        if np.max(np.abs(circular_convolve(u, v) - circular_convolve(u, v, "direct"))) >= 1e-9:
            fails.append("fft vs direct")
        if not np.allclose(circular_convolve(u, np.eye(64)[0]), u, atol=1e-9):
            fails.append("convolution identity")
    for n, k in ((128, 16), (1024, 64), (2048, 128), (64, 64)):
        if block_code_entropy(n, k) != pytest.approx(k * math.log2(n / k), abs=1e-12):
            fails.append(f"entropy {n},{k}")
    dt = time.time() - t0
    ok = not fails and dt < 30
    report(10, "algebraic property suite", ok,
           "all laws hold over 200 random triples" if not fails else "; ".join(sorted(set(fails))), dt)
    assert ok
