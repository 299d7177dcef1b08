"""Command-line entry point: ``gtheory {gstudy,dstudy,ctt,simulate,bootstrap,describe}``.

Exit codes: 0 success, 1 analysis error, 2 I/O or usage error. Every report
embeds a run manifest; with ``--out`` omitted, output goes to stdout unless
``GTHEORY_OUT_DIR`` names a default directory.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .classical import (cross_wave_correlations, format_scale_table, scale_reliability,
                        scree_eigenvalues)
from .data import CodingConfig, describe, load_coding, read_csv, to_csv_text
from .dstudy import dstudy_grid, format_table, grid_csv, grid_rows
from .errors import GTheoryError
from .gstudy import EFFECTS, VarianceComponents, format_components, gstudy
from .published import CORRECTED
from .simulate import (BootstrapSpec, GeneratorSpec, bootstrap_csv,
                       bootstrap_scale_reliability, generate, recovery_experiment)

OUT_DIR_ENV = "GTHEORY_OUT_DIR"


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError(f"entries must be integers >= 1, got {text!r}")
    return vals


def _clean(obj):
    """JSON-safe copy: NaN/inf become null, numpy scalars become Python numbers."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def manifest(args, inputs: list[str], seed=None, extra: dict | None = None) -> dict:
    settings = {k: v for k, v in sorted(vars(args).items())
                if k not in ("func", "out") and v is not None}
    digest = hashlib.sha256()
    digest.update(json.dumps(_clean(settings), sort_keys=True).encode())
    for p in inputs:
        digest.update(Path(p).read_bytes())
    m = {"command": args.command, "inputs": inputs, "config_digest": digest.hexdigest(),
         "seed": seed, "settings": _clean(settings), "tool_version": __version__,
         "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")}
    if extra:
        m.update(extra)
    return m


def _comment_block(m: dict) -> str:
    return "".join(f"# {k}: {json.dumps(_clean(v), sort_keys=True)}\n" for k, v in m.items())


def render(fmt: str, m: dict, result, csv_text: str | None = None,
           table_text: str | None = None) -> str:
    if fmt == "json":
        return json.dumps({"manifest": _clean(m), "result": _clean(result)}, indent=2) + "\n"
    if fmt == "csv":
        if csv_text is None:
            raise UsageError("csv output is not available for this command")
        return _comment_block(m) + csv_text
    if table_text is None:
        raise UsageError("table output is not available for this command")
    return _comment_block(m) + table_text.rstrip("\n") + "\n"


def write_output(text: str, out: str | None, default_name: str) -> None:
    """Write atomically (temp file + rename) or to stdout."""
    if out is None and os.environ.get(OUT_DIR_ENV):
        out = str(Path(os.environ[OUT_DIR_ENV]) / default_name)
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _load(args):
    if not Path(args.input).is_file():
        raise InputError(f"input file not found: {args.input}")
    inputs = [args.input]
    coding = CodingConfig()
    if getattr(args, "coding", None):
        if not Path(args.coding).is_file():
            raise InputError(f"coding file not found: {args.coding}")
        try:
            coding = load_coding(args.coding)
        except GTheoryError as exc:
            raise InputError(str(exc)) from None
        inputs.append(args.coding)
    try:
        cubes, report = read_csv(args.input, coding)
    except GTheoryError as exc:
        raise InputError(str(exc)) from None
    wanted = args.group or sorted(report.groups)
    absent = [g for g in wanted if g not in report.groups]
    if absent:
        raise GTheoryError(f"group(s) not found in data: {', '.join(absent)}")
    return cubes, report, wanted, inputs


def _require_usable(cubes, report, wanted, need_gstudy=True):
    for g in wanted:
        if g not in cubes or (need_gstudy and not report.groups[g].usable):
            probs = "; ".join(report.groups[g].problems) or "unusable"
            raise GTheoryError(f"group {g!r} is unusable: {probs}")


def cmd_gstudy(args) -> str:
    cubes, report, wanted, inputs = _load(args)
    _require_usable(cubes, report, wanted)
    results = {g: gstudy(cubes[g]) for g in wanted}
    m = manifest(args, inputs, extra={"ingest": _clean(report.as_dict())})
    rows = []
    for g, vc in results.items():
        for e in EFFECTS:
            rows.append([g, e, repr(vc.raw[e]), repr(vc.estimate[e]), repr(vc.std_error[e]),
                         vc.n_p, vc.n_i, vc.n_o])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["group", "effect", "raw_estimate", "estimate", "std_error", "n_p", "n_i", "n_o"])
    w.writerows(rows)
    table = "\n\n".join(format_components(vc, title=f"G-study: {g}") for g, vc in results.items())
    return render(args.format, m, {g: vc.as_dict() for g, vc in results.items()},
                  buf.getvalue(), table)


def parse_components(text: str) -> tuple[VarianceComponents, list[str]]:
    """Components from a JSON file, a published set name, or ``p=..,i=..`` pairs."""
    key = text.strip().lower()
    if key in CORRECTED:
        return CORRECTED[key], []
    path = Path(text)
    if path.is_file():
        try:
            d = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InputError(f"{text}: not valid JSON ({exc})") from None
        if "result" in d:  # gstudy report: take its single group
            res = d["result"]
            if len(res) != 1:
                raise UsageError(f"{text} holds {len(res)} groups; extract one first")
            d = next(iter(res.values()))
        try:
            negative = sorted(e for e, c in d["components"].items()
                              if c.get("estimate") is not None and c["estimate"] < 0)
            vc = VarianceComponents.from_dict(d)
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise InputError(f"{text}: not a variance-components document ({exc})") from None
        if negative:
            raise GTheoryError(f"negative component estimate(s) {negative}: the reliability "
                               "projection assumes nonnegative variance components")
        return vc, [text]
    if "=" not in text:
        raise InputError(f"components: no such file or published set: {text}")
    vals = {}
    for part in text.split(","):
        if not part.strip():
            continue
        k, _, v = part.partition("=")
        try:
            vals[k.strip()] = float(v)
        except ValueError:
            raise UsageError(f"bad component value {part!r}") from None
    if set(vals) != set(EFFECTS):
        raise UsageError(f"inline components need exactly {','.join(EFFECTS)}")
    negative = sorted(e for e, v in vals.items() if v < 0)
    if negative:
        raise GTheoryError(f"negative component(s) {negative}: the reliability projection "
                           "assumes nonnegative variance components")
    return VarianceComponents.from_values(vals), []


def cmd_dstudy(args) -> str:
    vc, inputs = parse_components(args.components)
    cells = dstudy_grid(vc, args.occasions, args.items, paired=args.paired)
    m = manifest(args, inputs)
    result = {"components": vc.as_dict(), "cells": grid_rows(cells)}
    return render(args.format, m, result, grid_csv(cells), format_table(vc, cells))


def cmd_ctt(args) -> str:
    cubes, report, wanted, inputs = _load(args)
    _require_usable(cubes, report, wanted, need_gstudy=False)
    for g in wanted:
        if cubes[g].n_i < 2:
            raise GTheoryError(f"group {g!r} has {cubes[g].n_i} item(s); "
                               "internal consistency needs k >= 2 items")
    reports = [scale_reliability(cubes[g]) for g in wanted]
    result = {}
    for g, rep in zip(wanted, reports):
        cube = cubes[g]
        corr = {}
        if cube.n_p >= 3 and cube.n_o >= 2:
            corr = {str(i): cross_wave_correlations(cube.scores[:, b, :])
                    for b, i in enumerate(cube.items)}
        result[g] = {"scale_reliability": rep.as_dict(),
                     "cross_wave_correlations": corr,
                     "scree": {str(o): scree_eigenvalues(cube, o) for o in cube.occasions}}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    occ = sorted({o for r in reports for o in r.per_wave})
    w.writerow(["group"] + [f"rho_w{o}" for o in occ] + [f"se_w{o}" for o in occ] + ["mean"])
    for r in reports:
        w.writerow([r.group_label] + [repr(r.per_wave[o][0]) for o in occ]
                   + [repr(r.per_wave[o][1]) for o in occ] + [repr(r.average)])
    m = manifest(args, inputs, extra={"ingest": _clean(report.as_dict())})
    return render(args.format, m, result, buf.getvalue(), format_scale_table(reports))


def cmd_describe(args) -> str:
    cubes, report, wanted, inputs = _load(args)
    _require_usable(cubes, report, wanted, need_gstudy=False)
    result = {g: describe(cubes[g]).rows() for g in wanted}
    buf = io.StringIO()
    cols = ["group", "item", "occasion", "n", "mean", "sd", "ci95_half_width"]
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    lines = [f"{'group':<10}{'item':>6}{'occ':>6}{'n':>6}{'mean':>9}{'sd':>9}{'ci95':>9}"]
    for g, rows in result.items():
        for r in rows:
            w.writerow({"group": g, **{k: ("" if r[k] is None else r[k]) for k in cols[1:]}})
            sd = "--" if r["sd"] is None else f"{r['sd']:.3f}"
            ci = "--" if r["ci95_half_width"] is None else f"{r['ci95_half_width']:.3f}"
            lines.append(f"{g:<10}{r['item']:>6}{r['occasion']:>6}{r['n']:>6}"
                         f"{r['mean']:>9.3f}{sd:>9}{ci:>9}")
    m = manifest(args, inputs)
    return render(args.format, m, result, buf.getvalue(), "\n".join(lines))


def cmd_simulate(args) -> str:
    if args.components is None:
        truth = dict(CORRECTED["white"].estimate)
    else:
        vc, _ = parse_components(args.components)
        truth = vc.estimate
    spec = GeneratorSpec(args.n_persons, args.n_items, args.n_occasions, truth,
                         grand_mean=args.grand_mean, seed=args.seed,
                         discretize=args.discretize, group_label=args.group_label)
    m = manifest(args, [], seed=args.seed)
    if args.recovery:
        rep = recovery_experiment(spec, args.recovery)
        fmt = "json" if args.format == "csv" else args.format
        table = "\n".join(
            f"{e:<5} truth={c.truth:.3f} mean={c.mean_raw:.3f} bias={c.bias:+.4f} "
            f"se_ratio={c.se_ratio:.3f} coverage={c.coverage:.3f}"
            for e, c in rep.components.items())
        return render(fmt, m, rep.as_dict(), None, table)
    cube = generate(spec)
    return _comment_block(m) + to_csv_text([cube])


def cmd_bootstrap(args) -> str:
    cubes, report, wanted, inputs = _load(args)
    _require_usable(cubes, report, wanted, need_gstudy=False)
    if len(wanted) != 1:
        raise UsageError("bootstrap runs on one group; pass --group")
    cube = cubes[wanted[0]]
    occasion = args.occasion if args.occasion is not None else cube.occasions[0]
    spec = BootstrapSpec(args.k, args.replications, args.seed)
    summaries = bootstrap_scale_reliability(cube, occasion, spec)
    m = manifest(args, inputs, seed=args.seed)
    result = [{"k": s.k, "median": s.median, "q25": s.q25, "q75": s.q75,
               "undefined_count": s.undefined_count} for s in summaries]
    table = "\n".join([f"{'k':>4}{'median':>9}{'q25':>9}{'q75':>9}{'undef':>7}"] + [
        f"{s.k:>4}{s.median:>9.3f}{s.q25:>9.3f}{s.q75:>9.3f}{s.undefined_count:>7}"
        for s in summaries])
    return render(args.format, m, result, bootstrap_csv(summaries), table)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gtheory", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, data=True, fmt="table"):
        if data:
            p.add_argument("--input", required=True, help="long-format CSV")
            p.add_argument("--coding", help="key=value coding config")
            p.add_argument("--group", action="append", help="restrict to group (repeatable)")
        p.add_argument("--format", choices=("json", "csv", "table"), default=fmt)
        p.add_argument("--out", help="output path (default stdout)")

    p = sub.add_parser("gstudy", help="estimate variance components per group")
    common(p)
    p.set_defaults(func=cmd_gstudy)

    p = sub.add_parser("dstudy", help="project reliability over items x occasions")
    p.add_argument("--components", required=True,
                   help="JSON file, published set (white/asian/latino), or p=..,i=..,...")
    p.add_argument("--occasions", type=_int_list, required=True)
    p.add_argument("--items", type=_int_list, required=True)
    p.add_argument("--paired", action="store_true",
                   help="zip occasions and items instead of crossing them")
    common(p, data=False, fmt="csv")
    p.add_argument("--table", dest="format", action="store_const", const="table",
                   help="shorthand for --format table")
    p.set_defaults(func=cmd_dstudy)

    p = sub.add_parser("ctt", help="per-wave alpha, cross-wave correlations, scree")
    common(p)
    p.set_defaults(func=cmd_ctt)

    p = sub.add_parser("describe", help="item x occasion means with 95%% CIs")
    common(p)
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("simulate", help="write a synthetic cube (or a recovery report)")
    p.add_argument("--components", help="true components (default: published white set)")
    p.add_argument("--n-persons", type=int, default=172)
    p.add_argument("--n-items", type=int, default=8)
    p.add_argument("--n-occasions", type=int, default=5)
    p.add_argument("--grand-mean", type=float, default=4.0)
    p.add_argument("--group-label", default="sim")
    p.add_argument("--discretize", action="store_true", help="round and clamp to 1..7")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--recovery", type=int, metavar="REPS",
                   help="run a recovery experiment with REPS replications instead")
    common(p, data=False, fmt="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bootstrap", help="k-item composite correlation bootstrap")
    common(p, fmt="csv")
    p.add_argument("--occasion", type=int)
    p.add_argument("--k", type=_int_list, default=list(range(1, 26)))
    p.add_argument("--replications", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bootstrap)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("n_persons", "n_items", "n_occasions", "replications", "seed", "recovery"):
        v = getattr(args, name, None)
        if v is not None and v < (0 if name == "seed" else 1):
            parser.error(f"--{name.replace('_', '-')} out of range: {v}")
    try:
        text = args.func(args)
        suffix = {"json": "json", "csv": "csv", "table": "txt"}[args.format]
        write_output(text, args.out, f"{args.command}.{suffix}")
    except (UsageError,) as exc:
        print(f"gtheory {args.command}: usage error: {exc}", file=sys.stderr)
        return 2
    except (InputError, OSError) as exc:
        print(f"gtheory {args.command}: {exc}", file=sys.stderr)
        return 2
    except (GTheoryError, ValueError, ArithmeticError) as exc:
        print(f"gtheory {args.command}: analysis error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
