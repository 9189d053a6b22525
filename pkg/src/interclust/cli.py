"""Command line entry point: ``interclust <subcommand> [options]``.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 data
validation error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .arrays import COUNT, TRIALS_AGREEMENTS, DataValidationError, InteractionArray, read_array_csv, write_array_csv
from .blockmodels import ProfiledObjective, log_lik
from .config import AnalysisConfig, ConfigError, read_config_file
from .datasets import load_karate, pair_counts, read_rollcall_csv, read_scdb, read_voteview
from .network import (
    classification_report,
    percentile_ranges,
    percentile_sweep,
    project,
    write_ranges_csv,
)
from .partitions import ChainParams, Partition
from .search import maximize
from .simulate import simulate_binomial, simulate_poisson
from .temporal import TemporalSeries, alpha_sensitivity, fit_sequence

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_DATA = 0, 2, 3, 4

CONFIG_FLAGS = {
    "k": int, "alpha": float, "alpha_tilde": float, "restarts": int, "total_global_steps": int,
    "local_moves_per_global": int, "seed": int, "threshold_kind": str, "cutoff": float,
    "percentiles": str, "percentile_method": str, "polish": str, "trace": str,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value configuration file")
    common.add_argument("--out", default="interclust_out", help="output directory")
    for key, typ in CONFIG_FLAGS.items():
        common.add_argument("--" + key.replace("_", "-"), dest=key, type=typ, default=None)

    p = _Parser(prog="interclust", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    for name in ("fit-poisson", "fit-binomial"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--input", help="array CSV")
        s.add_argument("--agreements", help="separate agreements CSV (trials in --input)")
        if name == "fit-poisson":
            s.add_argument("--karate", action="store_true", help="use the bundled karate counts")
        s.add_argument("--compare", help="partition CSV (entity,block) to score alongside the fit")

    s = sub.add_parser("fit-temporal", parents=[common])
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--series", help="manifest CSV with columns term,path")
    g.add_argument("--scdb", help="justice-centred Supreme Court Database CSV")
    s.add_argument("--terms", help="comma list or first-last range of terms (with --scdb)")
    s.add_argument("--alpha-sweep", help="comma list of alpha values for a sensitivity check")

    s = sub.add_parser("sweep-modularity", parents=[common])
    s.add_argument("--input", help="trials-agreements array CSV")
    s.add_argument("--reference", help="reference partition CSV (entity,block)")
    s.add_argument("--series", help="manifest CSV (term,path) for per-term ranges")
    s.add_argument("--references", help="entity x term cluster table (as written by fit-temporal)")
    s.add_argument("--range-percentiles", default="1-99", help="percentile grid for per-term ranges")

    s = sub.add_parser("project", parents=[common])
    s.add_argument("--input", help="array CSV")
    s.add_argument("--karate", action="store_true")

    s = sub.add_parser("simulate", parents=[common])
    s.add_argument("--model", choices=["poisson", "binomial"], required=True)
    s.add_argument("--partition", help='planted partition, e.g. "0,0,0,1,1,1"')
    s.add_argument("--sizes", help="block sizes, e.g. 15,15")
    s.add_argument("--rate-in", type=float, help="lambda_in or p_in")
    s.add_argument("--rate-out", type=float, help="lambda_out or p_out")
    s.add_argument("--trials", type=int, default=80, help="items per pair (binomial)")

    s = sub.add_parser("ingest", parents=[common])
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--rollcall", help="long-format CSV voter,item,vote")
    g.add_argument("--voteview", help="voteview-style votes CSV")
    s.add_argument("--members", help="voteview members CSV (names, parties)")
    s.add_argument("--congress", type=int)
    s.add_argument("--chamber", default="Senate")
    s.add_argument("--items", help="keep only these item ids (comma list or first-last)")
    return p


def _parse_range(text: str) -> list[str]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(str(x) for x in range(int(lo), int(hi) + 1))
        elif part:
            out.append(part)
    return out


def _resolve(args) -> AnalysisConfig:
    file_vals = read_config_file(args.config) if args.config else {}
    overrides = {k: getattr(args, k) for k in CONFIG_FLAGS}
    return AnalysisConfig.resolve(file_vals, overrides)


class _Run:
    def __init__(self, args, cfg: AnalysisConfig):
        self.args, self.cfg = args, cfg
        self.out = Path(args.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.header = [f"interclust {args.cmd}", f"config_hash={cfg.digest()}", f"seed={cfg.seed}"]

    def path(self, name: str) -> Path:
        return self.out / name

    def write_json(self, name: str, payload: dict) -> None:
        payload = {"command": self.args.cmd, "config_hash": self.cfg.digest(), "seed": self.cfg.seed,
                   "config": self.cfg.to_dict(), **payload}
        with open(self.path(name), "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=False, allow_nan=True)
            fh.write("\n")

    def write_text(self, name: str, text: str) -> None:
        with open(self.path(name), "w") as fh:
            for h in self.header:
                fh.write(f"# {h}\n")
            fh.write(text)


def _load_array(args, symmetric=True) -> InteractionArray:
    if getattr(args, "karate", False):
        return load_karate().array
    if not args.input:
        raise ConfigError("input: an array CSV is required")
    return read_array_csv(args.input, getattr(args, "agreements", None), symmetric)


def read_partition_csv(path, ids) -> Partition:
    with open(path, newline="") as fh:
        rows = list(csv.reader(ln for ln in fh if not ln.startswith("#")))
    if rows and rows[0][:2] == ["entity", "block"]:
        rows = rows[1:]
    table = {r[0].strip(): r[1].strip() for r in rows if r}
    missing = [e for e in ids if e not in table]
    if missing:
        raise DataValidationError(f"{path}: no block for entities {missing[:5]}")
    return Partition(table[e] for e in ids)


def _partition_rows(ids, b: Partition) -> str:
    return "entity,block\n" + "".join(f"{e},{l}\n" for e, l in zip(ids, b.labels))


def _params_dict(p) -> dict:
    if hasattr(p, "lambda_in"):
        return {"lambda_in": p.lambda_in, "lambda_out": p.lambda_out}
    return {"p_in": p.p_in, "p_out": p.p_out}


def _cmd_fit(run: _Run, family: str) -> None:
    a = _load_array(run.args)
    if a.kind != family:
        raise DataValidationError(f"{run.args.cmd} needs a {family} array, got {a.kind}")
    obj = ProfiledObjective(a)
    res = maximize(a, obj, run.cfg.search_config())
    b = res.best_partition
    params = obj.params(b)
    payload = {
        "entities": list(a.ids),
        "partition": b.to_text(),
        "blocks": [[a.ids[i] for i in blk] for blk in b.blocks()],
        "params": _params_dict(params),
        "log_likelihood": log_lik(a, b, params),
        "restart_scores": res.restart_scores,
    }
    if run.args.compare:
        ref = read_partition_csv(run.args.compare, a.ids)
        rp = obj.params(ref)
        payload["compare"] = {"partition": ref.to_text(), "params": _params_dict(rp),
                              "log_likelihood": log_lik(a, ref, rp),
                              "misclassified": classification_report(b, ref)[0]}
    run.write_json("fit.json", payload)
    lines = [f"log-likelihood: {payload['log_likelihood']:.2f}",
             "params: " + ", ".join(f"{k}={v:.3f}" for k, v in payload["params"].items())]
    for j, blk in enumerate(payload["blocks"]):
        lines.append(f"block {j}: " + " ".join(blk))
    run.write_text("fit.txt", "\n".join(lines) + "\n")
    run.write_text("partition.csv", _partition_rows(a.ids, b))
    if run.cfg.trace:
        res.write_trace(run.path("trace.csv"))


def read_series(manifest) -> TemporalSeries:
    base = Path(manifest).parent
    with open(manifest, newline="") as fh:
        rows = list(csv.DictReader(ln for ln in fh if not ln.startswith("#")))
    if not rows or {"term", "path"} - set(rows[0]):
        raise DataValidationError(f"{manifest}: expected columns term,path")
    return TemporalSeries([(r["term"], read_array_csv(base / r["path"])) for r in rows])


def _series_from_scdb(args) -> TemporalSeries:
    terms = _parse_range(args.terms) if args.terms else None
    rcs = read_scdb(args.scdb, terms=terms)
    if not rcs:
        raise DataValidationError(f"{args.scdb}: no terms selected")
    return TemporalSeries([(t, pair_counts(rc)) for t, rc in rcs.items()])


def _cmd_fit_temporal(run: _Run) -> None:
    args, cfg = run.args, run.cfg
    series = read_series(args.series) if args.series else _series_from_scdb(args)
    params = ChainParams(cfg.alpha, cfg.k)
    seq = fit_sequence(series, params, cfg.polish, cfg.search_config())
    run.write_text("clusters.csv", seq.to_csv())
    run.write_text("clusters.txt", seq.to_text())
    run.write_json("temporal.json", {"terms": [
        {"term": f.term, "roster": list(f.roster), "partition": f.partition.to_text(),
         "params": _params_dict(f.params), "score": f.score} for f in seq.fits]})
    if args.alpha_sweep:
        alphas = [float(x) for x in args.alpha_sweep.split(",")]
        fits = alpha_sensitivity(series, alphas, cfg.k, cfg.search_config(), cfg.polish)
        rows = ["alpha,term,partition,same_as_base"]
        for al, s in fits.items():
            for f0, f in zip(seq.fits, s.fits):
                rows.append(f"{al!r},{f.term},\"{f.partition.to_text()}\",{int(f.partition == f0.partition)}")
        run.write_text("alpha_sensitivity.csv", "\n".join(rows) + "\n")


def read_cluster_table(path) -> dict[str, dict[str, str]]:
    """term -> {entity: symbol} from a fit-temporal clusters.csv."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(ln for ln in fh if not ln.startswith("#")))
    header = rows[0]
    out = {t: {} for t in header[1:]}
    for r in rows[1:]:
        for t, cell in zip(header[1:], r[1:]):
            if cell:
                out[t][r[0]] = cell
    return out


def _cmd_sweep(run: _Run) -> None:
    args, cfg = run.args, run.cfg
    scfg = cfg.search_config()
    if args.input:
        a = _load_array(args)
        if not args.reference:
            raise ConfigError("reference: a reference partition CSV is required with --input")
        ref = read_partition_csv(args.reference, a.ids)
        rep = percentile_sweep(a, cfg.percentile_list(), ref, scfg, cfg.k, cfg.percentile_method)
        rep.to_csv(run.path("sweep.csv"), run.header)
    if args.series:
        if not args.references:
            raise ConfigError("references: a cluster table is required with --series")
        series = read_series(args.series)
        table = read_cluster_table(args.references)
        refs = {}
        for term, arr in series:
            if term not in table:
                raise DataValidationError(f"references: no column for term {term}")
            refs[term] = Partition(table[term][e] for e in arr.ids)
        grid = [float(x) for x in _parse_range(args.range_percentiles)]
        ranges = percentile_ranges(series, refs, grid, scfg, cfg.percentile_method)
        write_ranges_csv(ranges, run.path("ranges.csv"), run.header)
    if not args.input and not args.series:
        raise ConfigError("input: give --input and/or --series")


def _cmd_project(run: _Run) -> None:
    a = _load_array(run.args)
    net = project(a, run.cfg.threshold_kind or None, run.cfg.cutoff)
    lines = ["source,target"] + [f"{a.ids[i]},{a.ids[j]}" for i, j in net.edges()]
    run.write_text("edges.csv", "\n".join(lines) + "\n")


def _cmd_simulate(run: _Run) -> None:
    args, cfg = run.args, run.cfg
    if args.partition:
        b = Partition.from_text(args.partition)
    elif args.sizes:
        sizes = [int(x) for x in args.sizes.split(",")]
        b = Partition([j for j, s in enumerate(sizes) for _ in range(s)])
    else:
        raise ConfigError("partition: give --partition or --sizes")
    if args.rate_in is None or args.rate_out is None:
        raise ConfigError("rate_in/rate_out: both rates are required")
    rng = np.random.default_rng(cfg.seed)
    if args.model == "poisson":
        a = simulate_poisson(b, args.rate_in, args.rate_out, rng)
    else:
        a = simulate_binomial(b, args.trials, args.rate_in, args.rate_out, rng)
    write_array_csv(a, run.path("array.csv"), run.header)
    run.write_text("planted.csv", _partition_rows(a.ids, b))


def _cmd_ingest(run: _Run) -> None:
    args = run.args
    if args.rollcall:
        rc = read_rollcall_csv(args.rollcall)
        party = {}
    else:
        rc, party = read_voteview(args.voteview, args.members, args.congress, args.chamber)
    if args.items:
        keep = set(_parse_range(args.items))
        rc = rc.select_items(lambda it: str(it) in keep)
    a = pair_counts(rc)
    write_array_csv(a, run.path("array.csv"), run.header)
    if party:
        run.write_text("parties.csv", "entity,party\n" + "".join(f"{v},{party.get(v, '')}\n" for v in a.ids))


COMMANDS = {
    "fit-poisson": lambda r: _cmd_fit(r, COUNT),
    "fit-binomial": lambda r: _cmd_fit(r, TRIALS_AGREEMENTS),
    "fit-temporal": _cmd_fit_temporal,
    "sweep-modularity": _cmd_sweep,
    "project": _cmd_project,
    "simulate": _cmd_simulate,
    "ingest": _cmd_ingest,
}


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        cfg = _resolve(args)
        print(f"interclust {args.cmd}: seed={cfg.seed} config_hash={cfg.digest()} "
              + json.dumps(cfg.to_dict(), sort_keys=True), file=sys.stderr)
        COMMANDS[args.cmd](_Run(args, cfg))
    except ConfigError as exc:
        print(f"interclust: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataValidationError as exc:
        print(f"interclust: invalid data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"interclust: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
