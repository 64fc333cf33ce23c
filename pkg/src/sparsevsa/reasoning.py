"""
Key-value records over block-codes and analogical queries.

A record binds each role key to its filler with LCC and superposes the
pairs. A transform between two records is the first record's per-block
inverse bound to the second; binding a filler of one record to the
transform yields (noisily) the filler holding the same role in the other.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import integrate, stats

from .binding import lcc_bind, lcc_dense, lcc_inverse_dense
from .core import Accumulator, Codebook, child_seeds, make_rng, random_phases

SCHEMA_KINDS = ("binary", "phasor")


@dataclass(frozen=True, eq=False)
class RoleSchema:
    """Role keys and per-role filler codebooks sharing one block-code shape."""

    roles: tuple[str, ...]
    fillers: dict[str, tuple[str, ...]]
    N: int
    K: int
    kind: str = "binary"
    seed: int = 0
    keys: Codebook = field(init=False, repr=False)
    codebooks: dict[str, Codebook] = field(init=False, repr=False)

    def __post_init__(self):
        roles = tuple(self.roles)
        if not roles:
            raise ValueError("schema needs at least one role")
        if len(set(roles)) != len(roles):
            raise ValueError("role names must be unique")
        if self.kind not in SCHEMA_KINDS:
            raise ValueError(f"unknown schema kind {self.kind!r}")
        if self.K < 1 or self.N % self.K:
            raise ValueError(f"K={self.K} must divide N={self.N}")
        fillers = {}
        for r in roles:
            names = tuple(self.fillers.get(r, ()))
            if not names:
                raise ValueError(f"role {r!r} has no fillers")
            if len(set(names)) != len(names):
                raise ValueError(f"filler names of role {r!r} are not unique")
            fillers[r] = names
        object.__setattr__(self, "roles", roles)
        object.__setattr__(self, "fillers", fillers)
        ck = f"block-{self.kind}"
        seeds = child_seeds(self.seed, len(roles) + 1)
        object.__setattr__(self, "keys", Codebook.random(self.N, len(roles), ck, seeds[0], self.K))
        books = {r: Codebook.random(self.N, len(fillers[r]), ck, seeds[i + 1], self.K)
                 for i, r in enumerate(roles)}
        object.__setattr__(self, "codebooks", books)

    @property
    def R(self) -> int:
        return len(self.roles)

    @property
    def block_size(self) -> int:
        return self.N // self.K

    def key(self, role: str):
        return self.keys.block_code(self.roles.index(role))

    def filler(self, role: str, name: str):
        try:
            i = self.fillers[role].index(name)
        except (KeyError, ValueError):
            raise KeyError(f"unknown filler {name!r} for role {role!r}") from None
        return self.codebooks[role].block_code(i)

    def find_filler(self, name: str) -> str:
        """Role holding a filler name (first match in role order)."""
        for r in self.roles:
            if name in self.fillers[r]:
                return r
        raise KeyError(f"unknown filler {name!r}")

    def all_fillers(self) -> tuple[list[tuple[str, str]], np.ndarray]:
        """(role, name) labels and the stacked N x sum(M_r) filler matrix."""
        labels = [(r, n) for r in self.roles for n in self.fillers[r]]
        mat = np.concatenate([self.codebooks[r].columns for r in self.roles], axis=1)
        return labels, mat


@dataclass(frozen=True, eq=False)
class RecordVector:
    acc: Accumulator
    assignment: dict[str, str]
    name: str | None = None


@dataclass(frozen=True, eq=False)
class TransformVector:
    acc: Accumulator
    source: str | None = None
    target: str | None = None


def encode_record(schema: RoleSchema, assignment: dict, name: str | None = None) -> RecordVector:
    """Superpose role-key / filler bindings; the sum is kept unnormalized."""
    missing = [r for r in schema.roles if r not in assignment]
    if missing:
        raise ValueError(f"assignment misses roles {missing}")
    extra = [r for r in assignment if r not in schema.roles]
    if extra:
        raise ValueError(f"assignment has unknown roles {extra}")
    total = None
    for r in schema.roles:
        pair = lcc_bind(schema.key(r), schema.filler(r, assignment[r])).to_array()
        total = pair if total is None else total + pair
    if schema.kind == "binary":
        total = np.rint(total).astype(np.int64)
    return RecordVector(Accumulator(total), dict(assignment), name)


def make_transform(rec_i: RecordVector, rec_j: RecordVector, n_blocks: int) -> TransformVector:
    """t_ij = rec_j bound to the block-wise inverse of rec_i."""
    a, b = rec_i.acc.values, rec_j.acc.values
    if a.shape != b.shape:
        raise ValueError("records differ in length")
    t = lcc_dense(b, lcc_inverse_dense(a, n_blocks), n_blocks)
    return TransformVector(Accumulator(t), rec_i.name, rec_j.name)


def _rank(scores: np.ndarray) -> np.ndarray:
    # round away FFT noise so exact ties resolve to the lowest index
    return np.argsort(-np.round(scores, 9), kind="stable")


def query(transform: TransformVector, probe, codebook, n_blocks: int,
          labels=None) -> list[tuple]:
    """Bind ``probe`` to the transform and rank codebook columns.

    Scores are unnormalized inner products (block overlap for binary
    codes). Returns ``(index or label, score)`` in descending order.
    """
    C = np.asarray(codebook)
    if C.ndim != 2 or C.shape[1] == 0:
        raise ValueError("empty codebook")
    p = probe.to_array() if hasattr(probe, "to_array") else np.asarray(probe)
    q = lcc_dense(transform.acc.values, p, n_blocks)
    scores = (np.conj(C).T @ q).real
    order = _rank(scores)
    names = labels if labels is not None else range(C.shape[1])
    names = list(names)
    return [(names[i], float(scores[i])) for i in order]


# ------------------------------------------------------------ capacity


def predict_accuracy(N: float, R: float, M_r: int, snr2: float | None = None) -> float:
    """Top-1 hit probability of a cleanup among ``M_r`` candidates.

    Crosstalk is modelled as unit Gaussian noise with signal-to-noise
    ratio s^2 = N / R^2; P = int phi(u) Phi(u + s)^(M_r - 1) du.
    """
    if N <= 0 or R <= 0 or M_r < 1:
        raise ValueError("N, R and M_r must be positive")
    if M_r == 1:
        return 1.0
    s = math.sqrt(N / R**2 if snr2 is None else snr2)

    def integrand(u):
        return math.exp(stats.norm.logpdf(u) + (M_r - 1) * stats.norm.logcdf(u + s))

    lo, hi = -s - 12.0, 12.0
    val, _ = integrate.quad(integrand, lo, hi, points=[-s], limit=200)
    return float(min(1.0, max(val, 1.0 / M_r)))


def _capacity_chunk(rng, T, N, K, R, M, kind):
    """Vectorized trials: T pairs of records with R roles and M fillers per role."""
    Lb = N // K
    hot = lambda *shape: rng.integers(0, Lb, size=shape + (K,))
    keys = hot(T, R)
    books = hot(T, R, M)
    ph_keys = random_phases(rng, (T, R, K)) if kind == "phasor" else None
    ph_books = random_phases(rng, (T, R, M, K)) if kind == "phasor" else None
    # source and target records take distinct fillers in every role
    src = rng.integers(0, M, size=(T, R))
    dst = (src + rng.integers(1, M, size=(T, R))) % M
    role = rng.integers(0, R, size=T)

    def dense(h, ph):
        out = np.zeros(h.shape[:-1] + (K, Lb), dtype=complex if ph is not None else float)
        vals = 1.0 if ph is None else ph
        np.put_along_axis(out, h[..., None], np.broadcast_to(vals, h.shape)[..., None], axis=-1)
        return out.reshape(h.shape[:-1] + (N,))

    def pick(arr, idx):
        return np.take_along_axis(arr, idx[:, :, None, None], axis=2)[:, :, 0]

    def record(idx):
        h = (keys + pick(books, idx)) % Lb
        ph = None if kind == "binary" else ph_keys * pick(ph_books, idx)
        return dense(h, ph).sum(axis=1)

    rec_i, rec_j = record(src), record(dst)
    t = lcc_dense(rec_j, lcc_inverse_dense(rec_i, K), K)
    rows = np.arange(T)
    probe_hot = books[rows, role, src[rows, role]]
    probe_ph = None if kind == "binary" else ph_books[rows, role, src[rows, role]]
    q = lcc_dense(t, dense(probe_hot, probe_ph), K).reshape(T, K, Lb)
    cand = books[rows, role]                                  # T, M, K
    gathered = np.take_along_axis(q[:, None], cand[..., None], axis=-1)[..., 0]
    if kind == "phasor":
        gathered = gathered * np.conj(ph_books[rows, role])
    scores = np.round(gathered.real.sum(axis=-1), 9)
    answer = np.argmax(scores, axis=1)
    return answer == dst[rows, role]


def capacity_trial_hits(N: int, R: int, M_r: int, trials: int, seed=0,
                        K: int | None = None, kind: str = "binary",
                        chunk: int = 250) -> np.ndarray:
    """Per-trial success flags of the analogy query (fresh codebooks per trial)."""
    K = N // 16 if K is None else K
    if N % K:
        raise ValueError(f"K={K} must divide N={N}")
    if M_r < 2:
        return np.ones(trials, dtype=bool)
    n_chunks = -(-trials // chunk)
    hits = []
    for c, ss in enumerate(child_seeds(seed, n_chunks)):
        T = min(chunk, trials - c * chunk)
        hits.append(_capacity_chunk(make_rng(ss), T, N, K, R, M_r, kind))
    return np.concatenate(hits)


def run_capacity_experiment(Ns=(256, 512, 1024, 2048), Rs=(2, 4, 8), M_r: int = 16,
                            trials: int = 2000, seed=0, k_ratio: int = 16,
                            kind: str = "binary") -> list[dict]:
    """Empirical vs predicted top-1 accuracy over an (N, R) grid."""
    rows = []
    cells = [(N, R) for N in Ns for R in Rs]
    for (N, R), ss in zip(cells, child_seeds(seed, len(cells))):
        K = N // k_ratio
        hits = capacity_trial_hits(N, R, M_r, trials, ss, K=K, kind=kind)
        rows.append({"N": N, "R": R, "M_r": M_r, "K": K, "trials": trials,
                     "empirical": float(hits.mean()),
                     "predicted": predict_accuracy(N, R, M_r)})
    return rows


# ------------------------------------------------------- knowledge files


@dataclass(frozen=True, eq=False)
class KnowledgeBase:
    schema: RoleSchema
    records: dict[str, RecordVector]

    def transform(self, source: str, target: str) -> TransformVector:
        return make_transform(self.records[source], self.records[target], self.schema.K)

    def analogy(self, probe: str, source: str, target: str, role: str | None = None,
                restrict_role: bool = False) -> list[tuple]:
        """Answer "what is the <probe> of <target>", where probe belongs to source.

        Candidates are all fillers of all roles unless ``restrict_role``.
        """
        s = self.schema
        role = s.find_filler(probe) if role is None else role
        t = self.transform(source, target)
        if restrict_role:
            labels = list(s.fillers[role])
            C = s.codebooks[role].columns
        else:
            pairs, C = s.all_fillers()
            labels = [n for _, n in pairs]
        return query(t, s.filler(role, probe), C, s.K, labels)


def load_knowledge(source, N: int = 2048, K: int | None = None, seed=0,
                   kind: str = "binary") -> KnowledgeBase:
    """Build a knowledge base from a JSON document.

    Format: ``{"roles": [...], "records": {name: {role: filler}}}`` with an
    optional ``"fillers": {role: [...]}`` adding fillers no record uses.
    ``source`` may be a path, a JSON string or an already parsed dict.
    """
    if isinstance(source, dict):
        doc = source
    else:
        text = str(source)
        if text.lstrip().startswith("{"):
            doc = json.loads(text)
        else:
            doc = json.loads(Path(text).read_text())
    roles = list(doc.get("roles", []))
    records = doc.get("records", {})
    if not roles or not records:
        raise ValueError("knowledge file needs roles and records")
    fillers = {r: list(doc.get("fillers", {}).get(r, [])) for r in roles}
    for name, rec in records.items():
        for r in roles:
            if r not in rec:
                raise ValueError(f"record {name!r} misses role {r!r}")
            if rec[r] not in fillers[r]:
                fillers[r].append(rec[r])
    K = N // 16 if K is None else K
    schema = RoleSchema(tuple(roles), {r: tuple(v) for r, v in fillers.items()}, N, K, kind, seed)
    recs = {name: encode_record(schema, rec, name) for name, rec in records.items()}
    return KnowledgeBase(schema, recs)


def countries_path() -> Path:
    return Path(str(resources.files("sparsevsa").joinpath("data/countries.json")))
