"""Command-line driver: print kernel rows, check kernel properties, run
experiment grids, and summarize their CSV output.

Values on the command line and in output files are 1-based.
"""

import argparse
import configparser
import csv
import io
import json
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from . import __version__
from . import dominance, kernels
from .chain import run_chain
from .models import make_model
from .prob_core import ProbabilityError, normalize
from .scans import SCAN_NAMES, ScanOrder, fixed_order, parse_scan, scan_name
from .stats import asymptotic_variance, mcse

CSV_FIELDS = ["experiment_id", "model", "method", "scan", "replicate", "seed", "function",
              "thinned", "K", "n", "asym_var", "gamma0", "M", "self_freq",
              "max_ge_half_freq", "mean_estimate", "mcse", "wall_time_s"]

GROUPS = {
    1: ("GS", "MHGS", "UNAM", "DNAM", "UDNAM", "ZDNAM"),
    2: ("ST", "DST", "UST", "UDST", "HST", "OHST"),
    3: ("UNAM", "ZDNAM", "ST", "UDST", "FSS", "ZFSS"),
}

ALL_SCANS = tuple(SCAN_NAMES[s] for s in ScanOrder)
MODEL_SCANS = {
    "potts": ALL_SCANS,
    "mixture": ("Random", "ShuffledSequential", "RandomOrder", "RandomOrderX4"),
    "beliefnet": ("Random", "Sequential", "ShuffledSequential", "RandomOrder", "RandomOrderX4"),
}

DEFAULTS = {
    "model": "potts", "R": "8", "C": "8", "m": "4", "b": "0.85",
    "mix_m": "9", "obs_order_seed": "0", "param_seed": "1", "summed_input": "exp",
    "groups": "1", "methods": "", "scans": "", "K": "2000", "replicates": "4",
    "base_seed": "1", "workers": "1", "experiment_id": "", "record_timing": "false",
}

PRESETS = {
    "potts8-quick": {"model": "potts", "R": "8", "C": "8", "b": "0.85", "groups": "1",
                     "K": "10000", "replicates": "4"},
    "potts8": {"model": "potts", "R": "8", "C": "8", "b": "0.85", "groups": "1,2,3",
               "K": "200000", "replicates": "4"},
    "potts5-quick": {"model": "potts", "R": "5", "C": "5", "b": "-0.4", "groups": "1",
                     "K": "20000", "replicates": "4"},
    "potts5": {"model": "potts", "R": "5", "C": "5", "b": "-0.4", "groups": "1,2,3",
               "K": "1000000", "replicates": "4"},
    "mixture-quick": {"model": "mixture", "groups": "1", "K": "20000", "replicates": "4"},
    "mixture": {"model": "mixture", "groups": "1,2,3", "K": "200000", "replicates": "4"},
    "beliefnet-quick": {"model": "beliefnet", "groups": "1", "K": "20000", "replicates": "4"},
    "beliefnet": {"model": "beliefnet", "groups": "1,2,3", "K": "1000000", "replicates": "4"},
}


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


# ----------------------------------------------------------------- config


def read_config_file(path) -> dict:
    """Read ``key = value`` lines (``#`` comments, no section header needed)."""
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        with open(path) as fh:
            cp.read_string("[run]\n" + fh.read())
    except (OSError, configparser.Error) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    return dict(cp["run"])


def _ints(s, what):
    try:
        return [int(t) for t in str(s).replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"bad {what}: {s!r}") from None


def resolve_config(preset=None, path=None, overrides=None) -> dict:
    """Merge defaults < preset < config file < command-line overrides and validate."""
    raw = dict(DEFAULTS)
    if preset:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}")
        raw.update(PRESETS[preset])
    if path:
        unknown = set(read_config_file(path)) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        raw.update(read_config_file(path))
    raw.update({k: str(v) for k, v in (overrides or {}).items() if v is not None})

    cfg = {"model": raw["model"].strip().lower()}
    if cfg["model"] not in MODEL_SCANS:
        raise ConfigError(f"unknown model {raw['model']!r}")
    try:
        if cfg["model"] == "potts":
            cfg["model_args"] = {"R": int(raw["R"]), "C": int(raw["C"]), "m": int(raw["m"]),
                                 "b": float(raw["b"])}
        elif cfg["model"] == "mixture":
            cfg["model_args"] = {"m": int(raw["mix_m"]), "obs_order_seed": int(raw["obs_order_seed"])}
        else:
            cfg["model_args"] = {"param_seed": int(raw["param_seed"]),
                                 "summed_input": raw["summed_input"].strip().lower()}
            if cfg["model_args"]["summed_input"] not in ("exp", "linear"):
                raise ConfigError("summed_input must be 'exp' or 'linear'")
        cfg["K"] = int(raw["K"])
        cfg["replicates"] = int(raw["replicates"])
        cfg["base_seed"] = int(raw["base_seed"])
        cfg["workers"] = int(raw["workers"])
    except ValueError as e:
        raise ConfigError(f"bad numeric setting: {e}") from None
    if cfg["K"] < 1000:
        raise ConfigError("K must be at least 1000 (asymptotic variance needs 1000 scans)")
    if cfg["replicates"] < 1 or cfg["workers"] < 1:
        raise ConfigError("replicates and workers must be at least 1")

    if raw["methods"].strip():
        try:
            methods = [kernels.parse_method(t).name for t in raw["methods"].replace(",", " ").split()]
        except ValueError as e:
            raise ConfigError(str(e)) from None
        cfg["cells"] = [(0, m) for m in methods]
    else:
        groups = _ints(raw["groups"], "groups")
        if not groups or any(g not in GROUPS for g in groups):
            raise ConfigError(f"groups must be drawn from 1, 2, 3: {raw['groups']!r}")
        cfg["cells"] = [(g, m) for g in groups for m in GROUPS[g]]

    if raw["scans"].strip():
        try:
            scans = [scan_name(t) for t in raw["scans"].replace(",", " ").split()]
        except ValueError as e:
            raise ConfigError(str(e)) from None
    else:
        scans = list(MODEL_SCANS[cfg["model"]])
    bad = [s for s in scans if s not in MODEL_SCANS[cfg["model"]]]
    if bad:
        raise ConfigError(f"scan order(s) {bad} not available for the {cfg['model']} model")
    cfg["scans"] = scans
    cfg["record_timing"] = raw["record_timing"].strip().lower() in ("1", "true", "yes", "on")
    cfg["experiment_id"] = raw["experiment_id"].strip() or (
        f"{preset or cfg['model']}-seed{cfg['base_seed']}")
    cfg["preset"] = preset
    return cfg


# ------------------------------------------------------------ experiments


def derive_seed(base_seed: int, *keys: int) -> int:
    return int(np.random.SeedSequence([base_seed, *keys]).generate_state(1, np.uint64)[0] >> 1)


def _run_cell(task):
    model_name, model_args, method, scan, K, seed, shuffle_seed = task
    model = make_model(model_name, **model_args)
    res = run_chain(model, method, scan, K, seed, shuffle_seed=shuffle_seed)
    out = []
    for j, fname in enumerate(model.function_names):
        for thinned in (0, 1):
            trace = res.thinned[:, j] if thinned else res.unthinned[:, j]
            est = asymptotic_variance(trace, model.n if thinned else 1)
            out.append({
                "function": fname, "thinned": thinned, "K": K, "n": model.n,
                "asym_var": est.asym_var, "gamma0": est.gamma0, "M": est.M,
                "self_freq": res.self_freq, "max_ge_half_freq": res.max_ge_half_freq,
                "mean_estimate": est.mean, "mcse": mcse(est),
            })
    return out, res.wall_time


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def run_experiment(cfg: dict, out_csv, manifest_path=None, log=None) -> int:
    """Run the (method, scan, replicate) grid; returns the number of CSV rows."""
    shuffle_seed = derive_seed(cfg["base_seed"], 0)
    # build once in the parent so bad model settings fail before any run
    model = make_model(cfg["model"], **cfg["model_args"])
    for s in cfg["scans"]:
        fixed_order(s, model.n, model.lattice_shape, shuffle_seed)

    tasks, keys = [], []
    for g, meth in cfg["cells"]:
        for scan in cfg["scans"]:
            for rep in range(1, cfg["replicates"] + 1):
                seed = derive_seed(cfg["base_seed"], 1 + g, 1 + int(kernels.Method[meth]),
                                   1 + int(parse_scan(scan)), rep)
                tasks.append((cfg["model"], cfg["model_args"], meth, scan, cfg["K"], seed,
                              shuffle_seed))
                keys.append((g, meth, scan, rep, seed))

    t0 = time.perf_counter()
    if cfg["workers"] > 1:
        with ProcessPoolExecutor(cfg["workers"]) as ex:
            results = list(ex.map(_run_cell, tasks))
    else:
        results = []
        for i, t in enumerate(tasks):
            results.append(_run_cell(t))
            if log:
                log(f"[{i + 1}/{len(tasks)}] {t[2]} {t[3]} done")
    total = time.perf_counter() - t0

    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    runs = []
    nrows = 0
    for (g, meth, scan, rep, seed), (rows, wall) in zip(keys, results):
        runs.append({"group": g, "method": meth, "scan": scan, "replicate": rep,
                     "seed": seed, "wall_time_s": wall})
        for r in rows:
            r = dict(r, experiment_id=cfg["experiment_id"], model=cfg["model"], method=meth,
                     scan=scan, replicate=rep, seed=seed,
                     wall_time_s=wall if cfg["record_timing"] else "NA")
            w.writerow({k: _fmt(r[k]) for k in CSV_FIELDS})
            nrows += 1
    with open(out_csv, "w", newline="") as fh:
        fh.write(buf.getvalue())

    if manifest_path:
        import numba
        manifest = {
            "experiment_id": cfg["experiment_id"],
            "config": {k: v for k, v in cfg.items() if k != "cells"},
            "cells": [{"group": g, "method": m} for g, m in cfg["cells"]],
            "shuffle_seed": shuffle_seed,
            "csv": str(out_csv),
            "rows": nrows,
            "runs": runs,
            "total_wall_time_s": total,
            "versions": {"antigibbs": __version__, "python": platform.python_version(),
                         "numpy": np.__version__, "numba": numba.__version__},
        }
        with open(manifest_path, "w") as fh:
            json.dump(manifest, fh, indent=2)
    return nrows


# -------------------------------------------------------------- summarize


def summarize(paths) -> list[dict]:
    """Aggregate asym_var over replicates per (experiment, function, scan, method, thinned)."""
    groups = {}
    order = []
    for p in paths:
        with open(p, newline="") as fh:
            rd = csv.DictReader(fh)
            if rd.fieldnames != CSV_FIELDS:
                raise ConfigError(f"{p}: unexpected CSV columns")
            for r in rd:
                key = (r["experiment_id"], r["model"], r["function"], r["scan"],
                       r["method"], r["thinned"])
                if key not in groups:
                    groups[key] = []
                    order.append(key)
                groups[key].append(r)
    out = []
    for key in order:
        rows = groups[key]
        av = np.array([float(r["asym_var"]) for r in rows])
        sf = np.array([float(r["self_freq"]) for r in rows])
        out.append({
            "experiment_id": key[0], "model": key[1], "function": key[2], "scan": key[3],
            "method": key[4], "thinned": key[5], "replicates": len(rows),
            "mean_asym_var": float(av.mean()), "min_asym_var": float(av.min()),
            "max_asym_var": float(av.max()), "spread": float(av.max() - av.min()),
            "mean_self_freq": float(sf.mean()),
        })
    return out


# ------------------------------------------------------------ row / verify


def _parse_pi(tokens):
    try:
        vals = [float(Fraction(t)) for t in tokens]
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"bad probabilities: {tokens}") from None
    try:
        return normalize(vals)
    except ProbabilityError as e:
        raise ConfigError(str(e)) from None


def _methods(tokens):
    if not tokens or [t.lower() for t in tokens] == ["all"]:
        return list(kernels.METHOD_NAMES)
    try:
        return [kernels.parse_method(t).name for t in tokens]
    except ValueError as e:
        raise ConfigError(str(e)) from None


def _show(x, exact):
    if exact:
        return str(Fraction(float(x)).limit_denominator(100000))
    return f"{x:.10g}"


def cmd_row(a):
    pi = _parse_pi(a.pi)
    if not 1 <= a.k <= pi.size:
        raise ConfigError(f"k must be in 1..{pi.size}")
    for meth in _methods(a.method):
        row = kernels.kernel_row(meth, pi, a.k - 1)
        print(f"{meth:6s} " + " ".join(_show(v, a.exact) for v in row))
    return 0


def verify_method(meth, pi) -> dict:
    P = kernels.kernel_matrix(meth, pi)
    G = kernels.kernel_matrix("GS", pi)
    res = {
        "stochastic": bool(np.all(P >= -1e-9) and np.allclose(P.sum(1), 1, atol=1e-9)),
        "invariant": dominance.check_invariance(P, pi),
        "reversible": dominance.check_detailed_balance(P, pi),
        "self_prob": float(pi @ np.diag(P)),
        "min_self_prob": float(pi.max() * kernels.min_self_probability(pi)),
        "peskun_ge_gs": dominance.peskun_dominates(P, G),
    }
    res["minimal_self"] = abs(res["self_prob"] - res["min_self_prob"]) <= 1e-9
    res["eff_dominates_gs"] = (dominance.efficiency_dominates(P, G, pi)
                               if res["reversible"] else None)
    claims = ["stochastic", "invariant"]
    if meth in kernels.REVERSIBLE:
        claims.append("reversible")
    if meth in kernels.MINIMAL_SELF:
        claims.append("minimal_self")
    res["claims_hold"] = all(res[c] for c in claims)
    return res


def cmd_verify(a):
    pi = _parse_pi(a.pi)
    cols = ["stochastic", "invariant", "reversible", "minimal_self", "peskun_ge_gs",
            "eff_dominates_gs", "self_prob", "claims_hold"]
    print("method " + " ".join(cols))
    ok = True
    for meth in _methods(a.method):
        r = verify_method(meth, pi)
        ok &= r["claims_hold"]
        print(f"{meth:6s} " + " ".join(
            "-" if r[c] is None else (f"{r[c]:.6g}" if isinstance(r[c], float) else str(r[c]))
            for c in cols))
    return 0 if ok else 2


def cmd_run(a):
    overrides = {"K": a.K, "replicates": a.replicates, "base_seed": a.seed,
                 "workers": a.workers, "groups": a.groups, "methods": a.methods,
                 "scans": a.scans, "model": a.model, "experiment_id": a.experiment_id}
    if a.record_timing:
        overrides["record_timing"] = "true"
    cfg = resolve_config(a.preset, a.config, overrides)
    manifest = a.manifest or (a.out[:-4] if a.out.endswith(".csv") else a.out) + ".json"
    log = (lambda s: print(s, file=sys.stderr)) if a.verbose else None
    n = run_experiment(cfg, a.out, manifest, log)
    print(f"wrote {n} rows to {a.out} (manifest {manifest})")
    return 0


def cmd_summarize(a):
    table = summarize(a.csv)
    fh = open(a.out, "w", newline="") if a.out else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=list(table[0]) if table else ["experiment_id"],
                           lineterminator="\n")
        w.writeheader()
        for r in table:
            w.writerow({k: _fmt(v) for k, v in r.items()})
    finally:
        if a.out:
            fh.close()
    return 0


def build_parser():
    p = _Parser(prog="antigibbs", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    r = sub.add_parser("row", help="print transition row(s) out of value k")
    r.add_argument("--pi", nargs="+", required=True, help="probabilities or weights (fractions ok)")
    r.add_argument("--k", type=int, required=True, help="current value, 1-based")
    r.add_argument("--method", nargs="*", default=["all"], help="method names or 'all'")
    r.add_argument("--exact", action="store_true", help="print as fractions")
    r.set_defaults(func=cmd_row)

    v = sub.add_parser("verify", help="check invariance, reversibility, dominance for pi")
    v.add_argument("--pi", nargs="+", required=True)
    v.add_argument("--method", nargs="*", default=["all"])
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("run", help="run an experiment grid and write CSV + JSON manifest")
    e.add_argument("--preset", choices=sorted(PRESETS))
    e.add_argument("--config", help="key = value config file")
    e.add_argument("--model", choices=sorted(MODEL_SCANS))
    e.add_argument("--groups", help="comma list of method groups 1-3")
    e.add_argument("--methods", help="explicit method list (overrides groups)")
    e.add_argument("--scans", help="comma list of scan orders")
    e.add_argument("--K", type=int, help="scans per run")
    e.add_argument("--replicates", type=int)
    e.add_argument("--seed", type=int, help="base seed")
    e.add_argument("--workers", type=int)
    e.add_argument("--experiment-id")
    e.add_argument("--record-timing", action="store_true",
                   help="write wall times into the CSV (makes it run-dependent)")
    e.add_argument("--out", required=True, help="output CSV path")
    e.add_argument("--manifest", help="manifest path (default: CSV path with .json)")
    e.add_argument("-v", "--verbose", action="store_true")
    e.set_defaults(func=cmd_run)

    s = sub.add_parser("summarize", help="aggregate experiment CSVs over replicates")
    s.add_argument("csv", nargs="+")
    s.add_argument("--out")
    s.set_defaults(func=cmd_summarize)
    return p


def main(argv=None) -> int:
    try:
        a = build_parser().parse_args(argv)
        return a.func(a)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0
    except Exception as e:  # noqa: BLE001 - report any failure as a runtime error
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
