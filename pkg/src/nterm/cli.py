"""Command-line front end.

Commands: norm, profile, aspace, democracy, experiment. Global flags --seed,
--threads, --out-dir, --format. Every run emits a manifest (parameters, seed,
versions, input hashes, outputs, wall time); rerunning a manifest's command
reproduces byte-identical CSV output. Exit codes: 0 ok, 2 parse error,
3 feasibility/cap, 4 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__
from .democracy import democracy_profile, property_h_check
from .errors import FeasibilityError, NumericError, ParseError
from .experiments import (
    bernstein_verifier,
    cor72_schedule,
    cor73_schedule,
    embedding_verifier,
    jackson_verifier,
    nonlinearity_demo,
    prop71_witness,
    standard_test_set,
    stechkin_check,
)
from .greedy import aspace_norm, gamma_profile, sigma_profile
from .lorentz import lorentz_norm
from .sequences import Sequence
from .spaces import parse_space, space_norm
from .weights import parse_weight

EXPERIMENTS = (
    "jackson",
    "bernstein",
    "stechkin",
    "embedding",
    "democracy",
    "property-h",
    "prop71",
    "nonlinear",
)


def _parse_q(text):
    if text in ("inf", "infinity", "oo"):
        return math.inf
    try:
        return float(text)
    except ValueError as exc:
        raise ParseError(f"bad exponent {text!r}") from exc


def _parse_n_list(text):
    """N lists: "1,2,3", ranges "1..8", geometric ellipses "2,4,...,1024"."""
    text = text.strip()
    try:
        if ".." in text and "..." not in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        parts = [p.strip() for p in text.split(",")]
        if "..." in parts:
            i = parts.index("...")
            head = [int(p) for p in parts[:i]]
            last = int(parts[i + 1])
            if len(head) < 2:
                raise ValueError("ellipsis needs two leading terms")
            out = list(head)
            ratio = head[1] / head[0] if head[0] else 0.0
            diff = head[1] - head[0]
            geometric = ratio >= 2 and ratio == int(ratio)
            while out[-1] < last:
                nxt = out[-1] * ratio if geometric else out[-1] + diff
                out.append(int(round(nxt)))
            return [n for n in out if n <= last]
        return [int(p) for p in parts]
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad N list {text!r}: {exc}") from exc


def _atomic_write(path, data):
    d = os.path.dirname(path) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _csv_text(header, rows):
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(
            [repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row]
        )
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if hasattr(o, "__dict__"):
        return o.__dict__
    return str(o)


def _sanitize(obj):
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (float, np.floating)) and not math.isfinite(obj):
        return repr(float(obj))
    return obj


def _json_text(obj):
    return json.dumps(_sanitize(obj), indent=2, sort_keys=True, default=_json_default) + "\n"


class Run:
    """Collects parameters and outputs and writes the manifest."""

    def __init__(self, args, command):
        self.command = command
        self.args = args
        self.t0 = time.monotonic()
        self.params = {}
        self.input_hashes = {}
        self.outputs = []

    def hash_input(self, path):
        h = hashlib.sha256()
        with open(path, "rb") as fh:
            h.update(fh.read())
        self.input_hashes[path] = h.hexdigest()

    def manifest_hash(self):
        core = {"command": self.command, "params": self.params, "seed": self.args.seed}
        return hashlib.sha256(
            json.dumps(core, sort_keys=True, default=_json_default).encode()
        ).hexdigest()

    def emit(self, name, text):
        path = os.path.join(self.args.out_dir, name)
        _atomic_write(path, text)
        self.outputs.append(path)
        return path

    def finish(self):
        manifest = {
            "command": self.command,
            "params": self.params,
            "seed": self.args.seed,
            "threads": self.args.threads,
            "versions": {
                "python": sys.version.split()[0],
                "numpy": np.__version__,
                "nterm": __version__,
            },
            "input_hashes": self.input_hashes,
            "outputs": self.outputs,
            "manifest_hash": self.manifest_hash(),
            "wall_time_s": round(time.monotonic() - self.t0, 3),
        }
        if self.args.out_dir:
            self.emit(f"{self.command.replace(' ', '_')}_manifest.json", _json_text(manifest))
        return manifest


def _load_sequence(path, kind, run):
    run.hash_input(path)
    return Sequence.from_csv(path, kind)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_norm(args, run):
    if args.space == "lorentz-seq":
        w = parse_weight(args.rest[0])
        q = _parse_q(args.rest[1])
        seq = _load_sequence(args.rest[2], "integer", run)
        value = lorentz_norm(seq, w, q)
        run.params = {"weight": args.rest[0], "q": args.rest[1], "sequence": args.rest[2]}
    else:
        spec = parse_space(args.space)
        if len(args.rest) != 1:
            raise ParseError("norm needs: norm <space> <sequence.csv>")
        seq = _load_sequence(args.rest[0], spec.universe, run)
        value = space_norm(spec, seq)
        run.params = {"space": args.space, "sequence": args.rest[0]}
    value = float(value)
    summary = {"value": value, "manifest_hash": run.manifest_hash()}
    if args.format == "json":
        print(_json_text(summary), end="")
    else:
        print(repr(value))
    if args.out_dir:
        run.emit("norm_summary.json", _json_text(summary))
    return 0


def cmd_profile(args, run):
    spec = parse_space(args.space)
    seq = _load_sequence(args.sequence, spec.universe, run)
    run.params = {"space": args.space, "sequence": args.sequence,
                  "kind": args.kind, "n_max": args.n_max, "method": args.method}
    prof = (
        sigma_profile(seq, spec, method=args.method, threads=args.threads)
        if args.kind == "sigma"
        else gamma_profile(seq, spec)
    )
    rows = [(N, v, f) for N, v, f in prof.rows() if args.n_max is None or N <= args.n_max]
    text = _csv_text(["N", "value", "exact_flag"], rows)
    if args.format == "json":
        print(_json_text([{"N": N, "value": float(v), "exact_flag": f}
                          for N, v, f in rows]), end="")
    else:
        sys.stdout.write(text)
    if args.out_dir:
        run.emit("profile.csv", text)
    return 0


def cmd_aspace(args, run):
    spec = parse_space(args.space)
    seq = _load_sequence(args.sequence, spec.universe, run)
    run.params = {"space": args.space, "sequence": args.sequence, "alpha": args.alpha,
                  "q": args.q, "kind": args.kind, "form": args.form}
    value = float(aspace_norm(seq, args.alpha, _parse_q(args.q), spec,
                              error_kind=args.kind, form=args.form))
    if args.format == "json":
        print(_json_text({"value": value, "manifest_hash": run.manifest_hash()}),
              end="")
    else:
        print(repr(value))
    if args.out_dir:
        run.emit("aspace_summary.json",
                 _json_text({"value": value, "manifest_hash": run.manifest_hash()}))
    return 0


def cmd_democracy(args, run):
    spec = parse_space(args.space)
    n_list = _parse_n_list(args.N)
    run.params = {"space": args.space, "N": n_list, "strategy": args.strategy}
    prof = democracy_profile(spec, n_list, strategy=args.strategy)
    rows = [(r.N, r.h_ell, r.h_r, r.method, r.bound_direction) for r in prof.rows]
    text = _csv_text(["N", "h_ell", "h_r", "method", "bound_direction"], rows)
    if args.format == "json":
        print(_json_text([{"N": N, "h_ell": float(he), "h_r": float(hr),
                           "method": m, "bound_direction": b}
                          for N, he, hr, m, b in rows]), end="")
    else:
        sys.stdout.write(text)
    if args.out_dir:
        run.emit("democracy.csv", text)
        run.emit("democracy_summary.json", _json_text(
            {"checks": prof.checks, "rho": prof.rho,
             "manifest_hash": run.manifest_hash()}))
        from .indices import format_index

        for r in prof.rows:
            if r.method != "exhaustive":
                continue
            for side in ("min", "max"):
                ind_rows = [(format_index(i), 1.0) for i in r.attaining[side]]
                run.emit(f"attaining_N{r.N}_{side}.csv",
                         _csv_text(["index", "coefficient"], ind_rows))
    return 0


def _experiment_config(args):
    cfg = {}
    if args.config:
        with open(args.config) as fh:
            cfg.update(json.load(fh))
    for item in args.set or []:
        key, _, val = item.partition("=")
        cfg[key] = val
    for key in ("space", "weight", "alpha", "q", "p", "K", "N", "direction",
                "schedule", "support", "trials", "samples", "n", "strategy"):
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            cfg[key] = val
    return cfg


def cmd_experiment(args, run):
    name = args.name
    cfg = _experiment_config(args)
    run.params = dict(cfg, name=name)
    rng_seed = args.seed

    if name == "nonlinear":
        res = nonlinearity_demo(float(cfg["p"]), float(cfg["q"]),
                                float(cfg.get("alpha", 1.0)), int(cfg["K"]))
        points = res.pop("points_x"), res.pop("points_sum")
        text = _csv_text(["N", "gamma_x"], points[0])
        text2 = _csv_text(["N_J", "gamma_sum"], points[1])
        summary = dict(res, manifest_hash=run.manifest_hash())
        if args.out_dir:
            run.emit("nonlinear_x.csv", text)
            run.emit("nonlinear_sum.csv", text2)
            run.emit("nonlinear_summary.json", _json_text(summary))
        print(_json_text({k: summary[k] for k in
                          ("fit_x", "fit_sum", "expected_slope_x", "expected_slope_sum",
                           "counts_match_inequality")}))
        return 0

    if name == "democracy":
        spec = parse_space(cfg["space"])
        n_list = _parse_n_list(str(cfg["N"])) if "N" in cfg else [2**k for k in range(1, 11)]
        prof = democracy_profile(spec, n_list, strategy=cfg.get("strategy", "auto"))
        rows = [(r.N, r.h_ell, r.h_r, r.method, r.bound_direction) for r in prof.rows]
        text = _csv_text(["N", "h_ell", "h_r", "method", "bound_direction"], rows)
        sys.stdout.write(text)
        from .experiments import rate_fit

        summary = {"checks": prof.checks, "manifest_hash": run.manifest_hash()}
        if len(n_list) >= 4:
            summary["h_ell_fit"] = rate_fit(
                [(r.N, r.h_ell) for r in prof.rows], drop_first_decade=False)
            summary["h_r_fit"] = rate_fit(
                [(r.N, r.h_r) for r in prof.rows], drop_first_decade=False)
        if args.out_dir:
            run.emit("democracy.csv", text)
            run.emit("democracy_summary.json", _json_text(summary))
        return 0

    if name == "stechkin":
        res = stechkin_check(float(cfg.get("alpha", 0.5)), _parse_q(str(cfg.get("q", 1))),
                             trials=int(cfg.get("trials", 100)),
                             support_cap=int(cfg.get("support", 64)), seed=rng_seed)
        rows = res.pop("rows")
        res["manifest_hash"] = run.manifest_hash()
        print(_json_text(res))
        if args.out_dir:
            run.emit("stechkin_rows.csv",
                     _csv_text(["support", "ratio"],
                               [[r["support"], r["ratio"]] for r in rows]))
            run.emit("stechkin_summary.json", _json_text(res))
        return 0

    if name in ("jackson", "bernstein", "embedding"):
        spec = parse_space(cfg["space"])
        w = parse_weight(cfg.get("weight", "pow:0.5,0"))
        alpha = float(cfg.get("alpha", 0.5))
        q = _parse_q(str(cfg.get("q", "inf")))
        support = int(cfg.get("support", 64))
        if name == "bernstein":
            n_list = _parse_n_list(str(cfg.get("N", "1..32")))
            res = bernstein_verifier(spec, w, alpha, q, n_list, seed=rng_seed,
                                     trials=int(cfg.get("trials", 20)))
        else:
            seqs = standard_test_set(spec, support, rng_seed, critical=alpha + 0.5)
            if name == "jackson":
                res = jackson_verifier(spec, w, alpha, q, seqs)
            else:
                res = embedding_verifier(cfg.get("direction", "lorentz-into-G"),
                                         spec, w, alpha, q, seqs)
        rows = res.pop("rows")
        res["manifest_hash"] = run.manifest_hash()
        print(_json_text(res))
        if args.out_dir:
            header = sorted(rows[0]) if rows else []
            run.emit(f"{name}_rows.csv",
                     _csv_text(header, [[r[k] for k in header] for r in rows]))
            run.emit(f"{name}_summary.json", _json_text(res))
        return 0

    if name == "property-h":
        spec = parse_space(cfg["space"])
        res = property_h_check(spec, int(cfg.get("n", 8)),
                               samples=int(cfg.get("samples", 200)),
                               rng=np.random.default_rng(rng_seed))
        values = res.pop("values")
        res["manifest_hash"] = run.manifest_hash()
        print(_json_text(res))
        if args.out_dir:
            run.emit("property_h_values.csv",
                     _csv_text(["subset", "value"], list(enumerate(values))))
            run.emit("property_h_summary.json", _json_text(res))
        return 0

    if name == "prop71":
        spec = parse_space(cfg["space"])
        sched_text = str(cfg.get("schedule", "cor72:2,1"))
        kind, _, params = sched_text.partition(":")
        a, b = (int(x) for x in params.split(","))
        schedule = cor72_schedule(a, b) if kind == "cor72" else cor73_schedule(a, b)
        n_list = _parse_n_list(str(cfg.get("N", "2..12")))
        rows = prop71_witness(spec, float(cfg.get("alpha", 1.0)), math.inf,
                              schedule, n_list, seed=rng_seed)
        header = ["N", "p_N", "q_N", "family_left", "family_right",
                  "g_norm", "a_norm", "ratio"]
        text = _csv_text(header, [[r[k] for k in header] for r in rows])
        sys.stdout.write(text)
        if args.out_dir:
            run.emit("prop71.csv", text)
            run.emit("prop71_summary.json", _json_text(
                {"rows": rows, "manifest_hash": run.manifest_hash()}))
        return 0

    raise ParseError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")


def build_parser():
    ap = argparse.ArgumentParser(prog="nterm", description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out-dir", default="")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("norm", help="space or weighted-Lorentz norm of a sequence")
    p.add_argument("space")
    p.add_argument("rest", nargs="+")

    p = sub.add_parser("profile", help="sigma/gamma error profile as CSV")
    p.add_argument("space")
    p.add_argument("sequence")
    p.add_argument("kind", choices=("sigma", "gamma"))
    p.add_argument("n_max", type=int, nargs="?")
    p.add_argument("--method", choices=("auto", "exact", "greedy"), default="auto")

    p = sub.add_parser("aspace", help="approximation-space quasi-norm")
    p.add_argument("space")
    p.add_argument("sequence")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--kind", choices=("sigma", "gamma"), default="sigma")
    p.add_argument("--form", choices=("full", "dyadic"), default="full")

    p = sub.add_parser("democracy", help="democracy profile as CSV")
    p.add_argument("--space", required=True)
    p.add_argument("--N", required=True)
    p.add_argument("--strategy", choices=("auto", "exhaustive", "structured"),
                   default="auto")

    p = sub.add_parser("experiment", help="named experiment with config/flags")
    p.add_argument("name")
    p.add_argument("--config")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    for flag in ("space", "weight", "q", "direction", "schedule", "N"):
        p.add_argument(f"--{flag}")
    for flag in ("alpha", "p"):
        p.add_argument(f"--{flag}", type=float)
    for flag in ("K", "support", "trials", "samples", "n"):
        p.add_argument(f"--{flag}", type=int)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    run = Run(args, args.cmd if args.cmd != "experiment" else f"experiment {args.name}")
    try:
        if args.cmd == "norm":
            rc = cmd_norm(args, run)
        elif args.cmd == "profile":
            rc = cmd_profile(args, run)
        elif args.cmd == "aspace":
            rc = cmd_aspace(args, run)
        elif args.cmd == "democracy":
            rc = cmd_democracy(args, run)
        else:
            rc = cmd_experiment(args, run)
        run.finish()
        return rc
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, OSError, KeyError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except FeasibilityError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except (NumericError, FloatingPointError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
