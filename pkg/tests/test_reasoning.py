import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsevsa.binding import lcc_unbind
from sparsevsa.core import Accumulator, child_seeds, cleanup
from sparsevsa.reasoning import (
    RoleSchema,
    capacity_trial_hits,
    countries_path,
    encode_record,
    load_knowledge,
    make_transform,
    predict_accuracy,
    query,
    run_capacity_experiment,
)


def small_schema(N=256, K=16, kind="binary", seed=0):
    return RoleSchema(("a", "b", "c"), {"a": ("a0", "a1", "a2"), "b": ("b0", "b1"),
                                        "c": ("c0", "c1", "c2", "c3")}, N, K, kind, seed)


# ---------------------------------------------------------------- schema


def test_schema_validation():
    with pytest.raises(ValueError):
        RoleSchema((), {}, 64, 8)
    with pytest.raises(ValueError):
        RoleSchema(("a", "a"), {"a": ("x",)}, 64, 8)
    with pytest.raises(ValueError):
        RoleSchema(("a",), {"a": ()}, 64, 8)
    with pytest.raises(ValueError):
        RoleSchema(("a",), {"a": ("x",)}, 64, 7)
    with pytest.raises(KeyError):
        small_schema().filler("a", "zzz")


def test_schema_deterministic():
    s1, s2 = small_schema(seed=4), small_schema(seed=4)
    assert s1.filler("c", "c2") == s2.filler("c", "c2")
    assert s1.key("b") == s2.key("b")


def test_record_unbinding_recovers_each_filler():
    s = small_schema(N=1024, K=64)
    rec = encode_record(s, {"a": "a2", "b": "b0", "c": "c1"})
    for role, name in rec.assignment.items():
        got = lcc_unbind(rec.acc, s.key(role))
        idx, _ = cleanup(got, s.codebooks[role].columns)
        assert s.fillers[role][idx] == name


def test_encode_record_errors():
    s = small_schema()
    with pytest.raises(ValueError):
        encode_record(s, {"a": "a0", "b": "b0"})
    with pytest.raises(ValueError):
        encode_record(s, {"a": "a0", "b": "b0", "c": "c0", "d": "x"})


def test_binary_record_is_integer():
    rec = encode_record(small_schema(), {"a": "a0", "b": "b1", "c": "c3"})
    assert isinstance(rec.acc, Accumulator)
    assert rec.acc.values.dtype.kind == "i"
    assert rec.acc.values.sum() == 3 * 16


def test_single_role_transform_is_exact():
    # one role: the transform is exactly target (x) inverse(source)
    s = RoleSchema(("r",), {"r": tuple(f"f{i}" for i in range(8))}, 128, 8, "binary", 1)
    ri, rj = encode_record(s, {"r": "f2"}), encode_record(s, {"r": "f5"})
    ranked = query(make_transform(ri, rj, s.K), s.filler("r", "f2"),
                   s.codebooks["r"].columns, s.K, s.fillers["r"])
    assert ranked[0] == ("f5", pytest.approx(8.0))


def test_query_ties_resolve_to_lowest_index():
    s = RoleSchema(("r",), {"r": ("x", "y")}, 16, 4, "binary", 0)
    rec = encode_record(s, {"r": "x"})
    t = make_transform(rec, rec, 4)
    dup = np.stack([s.filler("r", "x").to_array()] * 2, axis=1)
    assert [i for i, _ in query(t, s.filler("r", "x"), dup, 4)] == [0, 1]
    with pytest.raises(ValueError):
        query(t, s.filler("r", "x"), np.zeros((16, 0)), 4)


# -------------------------------------------------------------- capacity


def gaussian_oracle(N, R, M, samples=400_000, seed=0):
    # independent Monte Carlo of the crosstalk model: signal s plus unit noise
    rng = np.random.default_rng(seed)
    s = np.sqrt(N) / R
    hit = rng.standard_normal(samples) + s
    rivals = rng.standard_normal((samples, M - 1)).max(axis=1) if M > 1 else -np.inf
    return float(np.mean(hit > rivals))


@pytest.mark.parametrize("N,R,M", [(256, 8, 16), (512, 4, 16), (100, 10, 5), (64, 8, 2)])
def test_prediction_matches_gaussian_oracle(N, R, M):
    assert predict_accuracy(N, R, M) == pytest.approx(gaussian_oracle(N, R, M), abs=0.005)


def test_prediction_limits():
    assert predict_accuracy(256, 4, 1) == 1.0
    assert predict_accuracy(1e6, 1, 16) == pytest.approx(1.0)
    # no signal: chance level
    assert predict_accuracy(1, 1, 10, snr2=0.0) == pytest.approx(0.1, abs=1e-6)
    with pytest.raises(ValueError):
        predict_accuracy(0, 1, 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(16, 4096), st.integers(1, 16), st.integers(2, 64))
def test_prediction_monotone(N, R, M):
    p = predict_accuracy(N, R, M)
    assert 1.0 / M <= p <= 1.0
    assert predict_accuracy(2 * N, R, M) >= p - 1e-9
    assert predict_accuracy(N, R + 1, M) <= p + 1e-9
    assert predict_accuracy(N, R, M + 1) <= p + 1e-9


def slow_capacity(N, R, M, trials, seed):
    # loop oracle over the public record API; fresh schema per trial
    hits = 0
    for ss in child_seeds(seed, trials):
        rng = np.random.default_rng(ss)
        roles = tuple(f"r{i}" for i in range(R))
        s = RoleSchema(roles, {r: tuple(range(M)) for r in roles}, N, N // 16, "binary",
                       int(rng.integers(2**31)))
        src = {r: int(rng.integers(M)) for r in roles}
        dst = {r: (src[r] + int(rng.integers(1, M))) % M for r in roles}
        role = roles[int(rng.integers(R))]
        t = make_transform(encode_record(s, src), encode_record(s, dst), s.K)
        best = query(t, s.filler(role, src[role]), s.codebooks[role].columns, s.K)[0][0]
        hits += best == dst[role]
    return hits / trials


def test_vectorized_capacity_agrees_with_loop_oracle():
    fast = capacity_trial_hits(256, 6, 16, 3000, seed=1).mean()
    slow = slow_capacity(256, 6, 16, 600, seed=2)
    # binomial sd of the difference is about 0.022
    assert abs(fast - slow) < 0.07


def test_capacity_trials_deterministic_and_trivial():
    a = capacity_trial_hits(256, 4, 8, 300, seed=3)
    b = capacity_trial_hits(256, 4, 8, 300, seed=3)
    assert np.array_equal(a, b)
    assert capacity_trial_hits(256, 4, 1, 10).all()
    with pytest.raises(ValueError):
        capacity_trial_hits(100, 2, 4, 10, K=7)


def test_capacity_experiment_rows():
    rows = run_capacity_experiment(Ns=(512,), Rs=(2, 8), trials=400, seed=0)
    assert [r["R"] for r in rows] == [2, 8]
    for r in rows:
        assert abs(r["empirical"] - r["predicted"]) < 0.08
        assert r["K"] == 32


# --------------------------------------------------------- knowledge base


def test_countries_dollar_of_mexico():
    kb = load_knowledge(countries_path(), N=2048, seed=0)
    assert kb.analogy("dollar", "ustates", "mexico")[0][0] == "peso"
    assert kb.analogy("washington", "ustates", "france")[0][0] == "paris"
    assert kb.analogy("dollar", "ustates", "mexico", restrict_role=True)[0][0] == "peso"


def test_load_knowledge_sources():
    doc = json.loads(countries_path().read_text())
    a = load_knowledge(doc, N=256, seed=1)
    b = load_knowledge(json.dumps(doc), N=256, seed=1)
    assert np.array_equal(a.records["japan"].acc.values, b.records["japan"].acc.values)
    assert "yen" in a.schema.fillers["currency"]


def test_load_knowledge_extra_fillers_and_errors():
    doc = {"roles": ["x"], "records": {"one": {"x": "p"}}, "fillers": {"x": ["q"]}}
    kb = load_knowledge(doc, N=64, K=8)
    assert kb.schema.fillers["x"] == ("q", "p")
    with pytest.raises(ValueError):
        load_knowledge({"roles": ["x"], "records": {}})
    with pytest.raises(ValueError):
        load_knowledge({"roles": ["x", "y"], "records": {"one": {"x": "p"}}})
