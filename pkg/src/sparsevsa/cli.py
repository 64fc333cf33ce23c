"""
``vsa`` command line: one subcommand per experiment family.

Each run writes ``<name>.csv`` (long format, see ``CSV_COLUMNS``), a
``<name>.manifest.json`` sufficient to re-run it, and optionally
``<name>.svg``. Settings come from flags, then a flat ``key = value``
config file, then built-in defaults.

Exit codes: 0 success, 2 configuration error (nothing written),
3 numerical failure (nothing written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import experiments as ex
from .plotting import render

OUT_ENV = "VSA_OUT_DIR"
DEFAULT_OUT = "vsa-out"


class ConfigError(Exception):
    pass


class NumericalError(Exception):
    pass


# ------------------------------------------------------------ value parsing


def _ints(s):
    return tuple(int(v) for v in _split(s))


def _floats(s):
    return tuple(float(v) for v in _split(s))


def _split(s):
    if isinstance(s, (list, tuple)):
        return list(s)
    parts = [p for p in str(s).replace(";", ",").split(",") if p.strip()]
    if not parts:
        raise ValueError("empty list")
    return [p.strip() for p in parts]


def _strs(s):
    return tuple(_split(s))


def _bool(s):
    if isinstance(s, bool):
        return s
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _opt_float(s):
    if s is None or str(s).strip().lower() in ("", "auto", "none"):
        return None
    return float(s)


def _opt_int(s):
    if s is None or str(s).strip().lower() in ("", "auto", "none"):
        return None
    return int(s)


# name -> (parser, default, help)
PARAMS = {
    "readout": {
        "Ns": (_ints, (256, 192, 128, 96, 64, 48, 32, 24, 16), "dense dimensions swept"),
        "M": (int, 1000, "sparse dimension"),
        "K": (int, 6, "nonzeros per sparse vector"),
        "trials": (int, 20, "instances per N"),
        "lam": (_opt_float, None, "lasso penalty (auto: F1-selected)"),
    },
    "rip": {
        "Ns": (_ints, (96, 128, 192, 256, 384, 512, 768), "dense dimensions swept"),
        "M": (int, 32, "codebook columns"),
        "K": (int, 4, "nonzeros per factor"),
        "L": (int, 4, "protected-sum length"),
        "dictionaries": (int, 5, "dictionaries per ensemble"),
        "trials": (int, 2000, "test vectors per dictionary"),
        "values": (str, "binary", "nonzero values: binary, gaussian or chi2"),
    },
    "bindbench": {
        "N": (int, 1024, "dimension"),
        "Ks": (_ints, (8, 16, 32, 64, 128, 256, 512, 1024), "active components"),
        "superpositions": (_ints, (0, 1, 2, 4, 8, 16), "extra bound pairs"),
        "trials": (int, 200, "trials per cell"),
    },
    "sparsity": {
        "Ks": (_ints, (20, 50, 100, 200), "active components"),
        "ratio": (float, 0.1, "K/N"),
        "trials": (int, 500, "trials per K"),
        "symmetric": (_bool, False, "symmetric sampling tensor"),
    },
    "fanin": {
        "N": (int, 1000, "dimension"),
        "ratios": (_floats, (0.02, 0.05, 0.1, 0.2, 0.3, 0.5), "K/N values"),
        "thetas": (_ints, (1, 2, 3), "thresholds"),
        "mc_trials": (int, 200, "Monte Carlo pairs per cell (0 to skip)"),
    },
    "symmetry": {
        "N": (int, 1000, "dimension"),
        "K": (int, 50, "active components"),
        "trials": (int, 500, "trials"),
        "alpha": (_opt_int, None, "fan-in (auto: minimal fan-in)"),
    },
    "reason": {
        "Ns": (_ints, (256, 512, 1024, 2048), "dimensions of the capacity grid"),
        "Rs": (_ints, (2, 4, 8), "roles per record"),
        "M_r": (int, 16, "fillers per role"),
        "trials": (int, 2000, "trials per cell"),
        "kind": (str, "binary", "block-code kind: binary or phasor"),
        "countries_N": (int, 2048, "dimension of the countries demo"),
        "countries_seeds": (int, 100, "codebook seeds for the countries demo"),
        "knowledge": (str, "", "knowledge JSON (default: bundled countries)"),
        "probe": (str, "dollar", "query filler"),
        "source": (str, "ustates", "record holding the probe"),
        "target": (str, "mexico", "record asked about"),
        "expected": (str, "peso", "expected answer (demo success rate)"),
        "N": (int, 2048, "dimension for a single query"),
        "K": (_opt_int, None, "blocks for a single query (auto: N/16)"),
        "top": (int, 5, "answers listed by a query"),
    },
    "classify": {
        "datasets": (_strs, ("anes96", "breast_cancer", "digits500", "iris", "wine"),
                     "bundled dataset names or CSV paths"),
        "dataset": (str, "iris", "dataset for train/eval"),
        "label": (str, "label", "label column of CSV datasets"),
        "scheme": (str, "sparse", "sparse or dense"),
        "N": (int, 512, "dimension"),
        "K": (_opt_int, 32, "blocks (sparse scheme)"),
        "kappa": (float, 3.0, "clipping threshold"),
        "lam": (float, 1.0, "ridge regularizer"),
        "folds": (int, 4, "cross-validation folds"),
        "model": (str, "", "model JSON for eval (default: cross-validate)"),
    },
}

ACTIONS = {"reason": ("capacity", "query"), "classify": ("grid", "train", "eval")}


def parse_config_file(path) -> dict[str, str]:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    out = {}
    for lineno, raw in enumerate(p.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k] = v
    return out


def resolve(command: str, flags: dict, file_values: dict) -> dict:
    """Merge flags > config file > defaults and parse every value."""
    params = PARAMS[command]
    generic = {"seed", "threads", "svg", "action", "out"}
    unknown = [k for k in file_values if k not in params and k not in generic]
    if unknown:
        raise ConfigError(f"unknown {command} settings: {', '.join(sorted(unknown))}")
    cfg = {}
    for name, (parse, default, _) in params.items():
        raw = flags.get(name)
        if raw is None:
            raw = file_values.get(name)
        if raw is None:
            cfg[name] = default
            continue
        try:
            cfg[name] = parse(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {name}: {raw!r} ({exc})") from None
    return cfg


# -------------------------------------------------------------- execution


@dataclass
class RunResult:
    rows: list
    svg: str | None = None
    extra: dict | None = None       # name -> text of additional files
    stdout: str = ""


def _check_rows(rows):
    for r in rows:
        v = r["value"]
        if isinstance(v, float) and not math.isfinite(v):
            raise NumericalError(f"non-finite {r['metric']} in {r['experiment']}")


def _series(rows, metric, key, x="N"):
    out = {}
    for r in ex.select(rows, metric=metric):
        label = key(r)
        xs, ys = out.setdefault(label, ([], []))
        xs.append(r[x])
        ys.append(r["value"])
    return out


def run_readout(cfg, seed):
    rows = ex.readout_experiment(cfg["Ns"], cfg["M"], cfg["K"], cfg["trials"], seed, cfg["lam"])
    series = {}
    for metric in ("lasso_rmse", "readout_rmse"):
        series.update(_series(rows, metric, lambda r, m=metric: m))
    svg = render(series, "Readout vs lasso recovery", "N", "coefficient RMSE", logx=True)
    return RunResult(rows, svg)


def run_rip(cfg, seed):
    rows = ex.rip_experiment(cfg["Ns"], cfg["M"], cfg["K"], cfg["L"], cfg["dictionaries"],
                             cfg["trials"], cfg["values"], seed)
    series = _series(rows, "delta", lambda r: r["mode"].split(";")[0])
    svg = render(series, "Worst empirical RIP constant", "N", "delta", logx=True)
    return RunResult(rows, svg)


def run_bindbench(cfg, seed):
    rows = ex.bindbench_experiment(cfg["N"], cfg["Ks"], cfg["superpositions"], cfg["trials"], seed)
    s0 = min(cfg["superpositions"])
    series = {}
    for r in ex.select(rows, metric="correlation_mean"):
        method, sup = r["mode"].split(";")[:2]
        if sup == f"superposition={s0}":
            xs, ys = series.setdefault(method, ([], []))
            xs.append(r["K"] / r["N"])
            ys.append(r["value"])
    svg = render(series, f"Unbinding correlation, superposition {s0}", "K/N",
                 "correlation", logx=True)
    return RunResult(rows, svg)


def run_sparsity(cfg, seed):
    rows = ex.sparsity_experiment(cfg["Ks"], cfg["ratio"], cfg["trials"], seed, cfg["symmetric"])
    series = {}
    for r in ex.select(rows, metric="l0_mean"):
        label = r["mode"].split(";")[0]
        xs, ys = series.setdefault(label, ([], []))
        xs.append(r["K"])
        ys.append(r["value"] / r["K"])
    svg = render(series, "Output sparsity after binding", "K", "mean L0 / K", logx=True)
    return RunResult(rows, svg)


def run_fanin(cfg, seed):
    rows = ex.fanin_experiment(cfg["N"], cfg["ratios"], cfg["thetas"], cfg["mc_trials"], seed)
    series = {}
    for r in ex.select(rows, metric="alpha_exact"):
        xs, ys = series.setdefault(r["mode"], ([], []))
        xs.append(r["K"] / r["N"])
        ys.append(r["value"])
    svg = render(series, "Minimal fan-in", "K/N", "alpha", logx=True)
    return RunResult(rows, svg)


def run_symmetry(cfg, seed):
    rows = ex.symmetry_experiment(cfg["N"], cfg["K"], cfg["trials"], seed, cfg["alpha"])
    return RunResult(rows, None)


def _knowledge(cfg):
    return cfg["knowledge"] or None


def run_reason(cfg, seed, action):
    from .reasoning import countries_path, load_knowledge

    if action == "query":
        path = _knowledge(cfg) or countries_path()
        kb = load_knowledge(path, N=cfg["N"], K=cfg["K"], seed=seed, kind=cfg["kind"])
        try:
            answers = kb.analogy(cfg["probe"], cfg["source"], cfg["target"])
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
        top = answers[: cfg["top"]]
        rows = [ex.row("query", cfg["N"], None, kb.schema.K,
                       f"{cfg['probe']}:{cfg['source']}::?:{cfg['target']};rank={i + 1};answer={name}",
                       1, "score", float(score), seed) for i, (name, score) in enumerate(top)]
        text = "\n".join(f"{i + 1}. {name}  {score:.1f}" for i, (name, score) in enumerate(top))
        return RunResult(rows, None, stdout=text + "\n")
    rows = ex.capacity_rows(cfg["Ns"], cfg["Rs"], cfg["M_r"], cfg["trials"], seed, cfg["kind"])
    series = {}
    for r in rows:
        label = f"{r['mode'].split(';')[0]} {r['metric']}"
        xs, ys = series.setdefault(label, ([], []))
        xs.append(r["N"])
        ys.append(r["value"])
    rows += ex.countries_rows(cfg["countries_N"], cfg["countries_seeds"], seed, cfg["probe"],
                              cfg["source"], cfg["target"], cfg["expected"], _knowledge(cfg))
    svg = render(series, "Analogy accuracy: empirical and predicted", "N", "top-1 accuracy",
                 logx=True)
    return RunResult(rows, svg)


def _dataset(name, label):
    from .classify import bundled_datasets, ingest_dataset, load_bundled

    if name in bundled_datasets():
        return load_bundled(name)
    p = Path(name)
    if not p.is_file():
        raise ConfigError(f"no bundled dataset or CSV file named {name!r}")
    try:
        return ingest_dataset(p, label)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _pipeline(cfg, seed):
    from .classify import PipelineConfig

    try:
        return PipelineConfig(N=cfg["N"], K=cfg["K"] if cfg["scheme"] == "sparse" else None,
                              kappa=cfg["kappa"], lam=cfg["lam"], scheme=cfg["scheme"],
                              folds=cfg["folds"], seed=seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def run_classify(cfg, seed, action):
    from . import classify as cl

    if action == "grid":
        sets = [_dataset(n, cfg["label"]) for n in cfg["datasets"]]
        rows = ex.classify_experiment(sets, cfg["folds"], seed)
        summary = ex.classify_summary(rows)
        names = sorted(summary)
        xs = [summary[n].get("dense", float("nan")) for n in names]
        ys = [summary[n].get("sparse", float("nan")) for n in names]
        svg = render({"datasets": (xs, ys)}, "Cross-validation accuracy", "dense pipeline",
                     "sparse pipeline", scatter=True, diagonal=True)
        text = "".join(f"{n}: sparse {summary[n]['sparse']:.4f}  dense {summary[n]['dense']:.4f}\n"
                       for n in names)
        return RunResult(rows, svg, stdout=text)
    ds = _dataset(cfg["dataset"], cfg["label"])
    pc = _pipeline(cfg, seed)
    if action == "train":
        model = train_full(ds, pc)
        hidden = model["_hidden"]
        acc = float(np.mean(cl.predict(model["_ridge"], hidden) == ds.y))
        rows = [ex.row("classify_train", pc.N, ds.n_features, pc.K,
                       f"{ds.name};{pc.scheme};kappa={pc.kappa};lam={pc.lam:g}", 1,
                       "train_accuracy", acc, seed)]
        doc = {k: v for k, v in model.items() if not k.startswith("_")}
        return RunResult(rows, None, extra={"model.json": json.dumps(doc, indent=1)})
    if cfg["model"]:
        acc = evaluate_model(cfg["model"], ds)
        rows = [ex.row("classify_eval", None, ds.n_features, None, f"{ds.name};model", 1,
                       "accuracy", acc, seed)]
        return RunResult(rows, None)
    try:
        rep = cl.cross_validate(ds, pc)
    except np.linalg.LinAlgError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    mode = f"{ds.name};{pc.scheme};kappa={pc.kappa};lam={pc.lam:g}"
    rows = [ex.row("classify_eval", pc.N, ds.n_features, pc.K, mode, pc.folds,
                   "cv_accuracy", rep.mean, seed),
            ex.row("classify_eval", pc.N, ds.n_features, pc.K, mode, pc.folds,
                   "cv_std", rep.std, seed)]
    return RunResult(rows, None)


def train_full(ds, pc) -> dict:
    """Fit scaler, keys and readout on a whole dataset; JSON-ready fields."""
    from . import classify as cl

    keys = cl.FeatureKeys.random(ds.n_features, pc)
    scaler = cl.MinMaxScaler.fit(ds.X)
    enc = pc.encoder
    H = cl.encode_samples(cl.quantize(scaler.transform(ds.X), enc.levels), keys, enc, pc.kappa)
    model = cl.ridge_train(H, ds.y, pc.lam)
    return {"config": pc.__dict__, "n_features": ds.n_features,
            "lo": scaler.lo.tolist(), "hi": scaler.hi.tolist(),
            "classes": model.classes.tolist(), "W_out": model.W_out.tolist(),
            "_ridge": model, "_hidden": H}


def evaluate_model(path, ds) -> float:
    from . import classify as cl

    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"model file not found: {path}")
    doc = json.loads(p.read_text())
    pc = cl.PipelineConfig(**doc["config"])
    if doc["n_features"] != ds.n_features:
        raise ConfigError("model and dataset differ in feature count")
    keys = cl.FeatureKeys.random(ds.n_features, pc)
    scaler = cl.MinMaxScaler(np.asarray(doc["lo"]), np.asarray(doc["hi"]))
    enc = pc.encoder
    H = cl.encode_samples(cl.quantize(scaler.transform(ds.X), enc.levels), keys, enc, pc.kappa)
    model = cl.RidgeModel(np.asarray(doc["W_out"]), pc.lam, np.asarray(doc["classes"]))
    return float(np.mean(cl.predict(model, H).astype(str) == ds.y.astype(str)))


RUNNERS = {
    "readout": run_readout, "rip": run_rip, "bindbench": run_bindbench,
    "sparsity": run_sparsity, "fanin": run_fanin, "symmetry": run_symmetry,
    "reason": run_reason, "classify": run_classify,
}


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=ex.CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r[k] is None else r[k]) for k in ex.CSV_COLUMNS})
    return buf.getvalue()


def execute(command: str, cfg: dict, seed: int, action: str | None, out_dir: Path,
            svg: bool = True, threads: int | None = None, argv=None) -> list[Path]:
    """Run one experiment and write its files; returns the written paths."""
    started = time.time()
    runner = RUNNERS[command]
    try:
        with _thread_limit(threads):
            result = runner(cfg, seed, action) if command in ACTIONS else runner(cfg, seed)
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        raise NumericalError(str(exc)) from exc
    except ValueError as exc:
        # library parameter checks raise ValueError
        raise ConfigError(str(exc)) from None
    _check_rows(result.rows)
    name = command if action is None else f"{command}-{action}"
    files = {f"{name}.csv": rows_to_csv(result.rows)}
    if svg and result.svg:
        prov = f"{name}; seed={seed}; config={json.dumps(cfg, default=list, sort_keys=True)}; data={name}.csv"
        files[f"{name}.svg"] = result.svg.replace(
            '<?xml version="1.0" encoding="UTF-8"?>',
            '<?xml version="1.0" encoding="UTF-8"?>\n<!-- ' + prov.replace("--", "- -") + " -->", 1)
    for fname, text in (result.extra or {}).items():
        files[f"{name}.{fname}"] = text
    manifest = {
        "experiment": command, "action": action, "config": _jsonable(cfg), "seed": seed,
        "svg": svg, "threads": threads, "version": __version__,
        "started": started, "finished": time.time(), "argv": list(argv or []),
        "outputs": sorted(files) + [f"{name}.manifest.json"],
    }
    files[f"{name}.manifest.json"] = json.dumps(manifest, indent=1) + "\n"
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for fname, text in files.items():
        p = out_dir / fname
        p.write_text(text)
        written.append(p)
    if result.stdout:
        sys.stdout.write(result.stdout)
    return written


def _jsonable(cfg):
    return {k: list(v) if isinstance(v, tuple) else v for k, v in cfg.items()}


class _thread_limit:
    def __init__(self, n):
        self.n = n
        self._ctx = None

    def __enter__(self):
        if self.n:
            from threadpoolctl import threadpool_limits
            self._ctx = threadpool_limits(limits=self.n)
            self._ctx.__enter__()
        return self

    def __exit__(self, *exc):
        if self._ctx is not None:
            self._ctx.__exit__(*exc)
        return False


# ------------------------------------------------------------ argparse


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vsa", description=__doc__.split("\n\n")[0].strip())
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for command, params in PARAMS.items():
        sp = sub.add_parser(command, help=f"run the {command} experiment")
        if command in ACTIONS:
            sp.add_argument("action", nargs="?", choices=ACTIONS[command],
                            default=ACTIONS[command][0])
        _common(sp)
        for name, (_, default, help_) in params.items():
            shown = ",".join(map(str, default)) if isinstance(default, tuple) else default
            sp.add_argument(f"--{name.replace('_', '-')}", dest=f"p_{name}", default=None,
                            metavar="V", help=f"{help_} (default {shown})")
    rp = sub.add_parser("rerun", help="re-run an experiment from its manifest")
    rp.add_argument("manifest")
    rp.add_argument("--out", default=None, help="output directory (default: <manifest dir>/rerun)")
    return p


def _common(sp):
    sp.add_argument("--config", default=None, help="flat key = value settings file")
    sp.add_argument("--seed", default=None, help="root seed (unsigned 64-bit, default 0)")
    sp.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    sp.add_argument("--threads", default=None, help="cap on BLAS worker threads")
    sp.add_argument("--no-svg", dest="svg", action="store_false", help="skip the SVG chart")


def _parse_seed(raw) -> int:
    try:
        s = int(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"seed must be an integer, got {raw!r}") from None
    if not 0 <= s < 2**64:
        raise ConfigError("seed must fit in an unsigned 64-bit integer")
    return s


def _out_dir(raw) -> Path:
    return Path(raw or os.environ.get(OUT_ENV) or DEFAULT_OUT)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        if args.command == "rerun":
            return _rerun(args)
        file_values = parse_config_file(args.config) if args.config else {}
        flags = {k[2:]: v for k, v in vars(args).items() if k.startswith("p_") and v is not None}
        cfg = resolve(args.command, flags, file_values)
        seed = _parse_seed(args.seed if args.seed is not None else file_values.get("seed", 0))
        threads_raw = args.threads if args.threads is not None else file_values.get("threads")
        threads = None
        if threads_raw is not None:
            try:
                threads = int(threads_raw)
            except ValueError:
                raise ConfigError(f"threads must be an integer, got {threads_raw!r}") from None
            if threads < 1:
                raise ConfigError("threads must be >= 1")
        action = getattr(args, "action", None)
        out = _out_dir(args.out or file_values.get("out"))
        written = execute(args.command, cfg, seed, action, out, args.svg, threads, argv)
    except ConfigError as exc:
        print(f"vsa: config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"vsa: numerical failure: {exc}", file=sys.stderr)
        return 3
    for p in written:
        print(p)
    return 0


def _rerun(args) -> int:
    p = Path(args.manifest)
    if not p.is_file():
        raise ConfigError(f"manifest not found: {p}")
    try:
        m = json.loads(p.read_text())
        command, action = m["experiment"], m.get("action")
        cfg = resolve(command, {}, {k: v for k, v in m["config"].items()})
        seed = int(m["seed"])
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"unreadable manifest {p}: {exc}") from None
    out = Path(args.out) if args.out else p.parent / "rerun"
    for w in execute(command, cfg, seed, action, out, m.get("svg", True), m.get("threads"),
                     ["rerun", str(p)]):
        print(w)
    return 0


if __name__ == "__main__":
    sys.exit(main())
