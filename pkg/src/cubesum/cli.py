"""Command-line entry point.

Settings resolve as flags > environment (SYLV_PRECISION, SYLV_CACHE) > JSON config
file > defaults.  Reports are JSON with a top-level schema version, the resolved
config and an operation tag; timings are left out unless asked for so that equal
inputs give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class Config:
    precision_digits: int = 50
    series_order_cap: int = 20_000
    scan_workers: int = 1
    oracle_max_p: int = 200
    cache_dir: str = ".cubesum-cache"
    output_format: str = "json"
    lvalue_zero_threshold: float = 1e-3

    def validate(self) -> None:
        for name in ("precision_digits", "series_order_cap", "scan_workers", "lvalue_zero_threshold"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.oracle_max_p < 0:
            raise ValueError("oracle_max_p must be non-negative")
        if self.output_format not in ("json", "csv", "text"):
            raise ValueError(f"unknown output format {self.output_format!r}")


ENV_VARS = {"SYLV_PRECISION": ("precision_digits", int), "SYLV_CACHE": ("cache_dir", str)}
FLAG_FIELDS = {
    "precision": "precision_digits",
    "order_cap": "series_order_cap",
    "workers": "scan_workers",
    "oracle_max": "oracle_max_p",
    "cache_dir": "cache_dir",
    "format": "output_format",
    "zero_threshold": "lvalue_zero_threshold",
}


def load_config(args: argparse.Namespace, environ=None) -> Config:
    environ = os.environ if environ is None else environ
    values = asdict(Config())
    types = {f.name: type(values[f.name]) for f in fields(Config)}
    path = getattr(args, "config", None)
    if path:
        with open(path) as fh:
            data = json.load(fh)
        unknown = set(data) - set(values)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        values.update({k: types[k](v) for k, v in data.items()})
    for var, (name, conv) in ENV_VARS.items():
        if environ.get(var):
            values[name] = conv(environ[var])
    for flag, name in FLAG_FIELDS.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[name] = v
    cfg = Config(**values)
    cfg.validate()
    return cfg


# --- output ---------------------------------------------------------------

def _flatten(d, prefix=""):
    if isinstance(d, dict):
        for k, v in d.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(d, list) and d and all(isinstance(v, dict) for v in d):
        for i, v in enumerate(d):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], d


def emit(report: dict, cfg: Config, out=None) -> None:
    out = out or sys.stdout
    if cfg.output_format == "json":
        out.write(json.dumps(report, indent=2, sort_keys=True, default=str) + "\n")
        return
    rows = list(_flatten(report))
    if cfg.output_format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerows(rows)
    else:
        for k, v in rows:
            out.write(f"{k}: {v}\n")


def envelope(op: str, cfg: Config, result: dict, ok: bool) -> dict:
    return {"schema": SCHEMA, "op": op, "config": asdict(cfg), "ok": ok, "result": result}


# --- subcommands ----------------------------------------------------------

def cmd_check(args, cfg):
    from .criterion import check_prime

    rep = check_prime(args.p, oracle_max=cfg.oracle_max_p)
    return "criterion.check", rep.to_dict(with_timings=getattr(args, 'timings', False)), True


def _read_checkpoint(path: Path) -> tuple[int | None, list[list[str]]]:
    """Rows up to the last checkpoint, and the checkpoint position."""
    if not path.exists():
        return None, []
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    last, keep = None, []
    for i, row in enumerate(rows):
        if row and row[0] == "#checkpoint":
            last, keep = int(row[1]), rows[: i + 1]
    return last, keep


def cmd_scan(args, cfg):
    from .criterion import Verdict, scan

    lo, hi = args.lo, args.hi
    if hi < lo:
        raise ValueError("empty range")
    rows: list[tuple] = []
    failures: list[dict] = []
    path = Path(args.out) if args.out else None
    header = ["p", "has_root", "nine_div", "verdict"]
    start = lo
    if path is not None:
        done, keep = _read_checkpoint(path)
        if done is not None:
            meta = keep[0] if keep else []
            if meta[:3] != ["#range", str(lo), str(hi)]:
                raise ValueError(f"{path} holds a scan of a different range")
            start = done + 1
            rows = [tuple(r) for r in keep if r and not r[0].startswith("#") and r[0] != "p"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            if done is None:
                w.writerow(["#range", lo, hi])
                w.writerow(header)
            else:
                w.writerows(keep)
    block = max(args.block, 1)
    a = start
    while a <= hi:
        b = min(a + block - 1, hi)
        part = scan(a, b, workers=cfg.scan_workers, oracle_max=cfg.oracle_max_p)
        failures.extend(part.failures)
        new = [(str(p), str(int(h)), str(int(n)), v) for p, h, n, v in part.rows]
        rows.extend(new)
        if path is not None:
            with open(path, "a", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerows(new)
                w.writerow(["#checkpoint", b])
        a = b + 1
    counts = {v.value: 0 for v in Verdict}
    for r in rows:
        counts[r[3]] += 1
    total = sum(counts.values())
    with_root = counts[Verdict.INCONCLUSIVE.value]
    result = {
        "range": [lo, hi],
        "counts": counts,
        "total": total,
        "density_with_root": with_root / total if total else 0.0,
        "failures": failures,
    }
    if cfg.output_format == "csv" and path is None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        result["rows_csv"] = buf.getvalue()
    return "criterion.scan", result, not failures


def cmd_qcheck(args, cfg):
    from . import qseries

    if args.identity != "sumkron" and (args.order or 0) > cfg.series_order_cap:
        raise ValueError(f"order {args.order} exceeds the cap {cfg.series_order_cap}")
    if args.identity == "theta":
        r = qseries.verify_theta_identity(args.order or 2000)
        return "qseries.theta", r.to_dict(), r.ok
    if args.identity == "modular-eq":
        r = qseries.verify_modular_equation(args.order or 500)
        return "qseries.modular_equation", r.to_dict(), r.ok
    res = qseries.verify_sumkron_range(5, args.order or 1000)
    bad = [asdict(x) for x in res if not x.ok]
    return "qseries.sumkron", {"primes": len(res), "bound": args.order or 1000, "failures": bad}, not bad


def cmd_cm_verify(args, cfg):
    from .analytic import cm_verify

    r = cm_verify(cfg.precision_digits)
    return "analytic.cm_verify", r.to_dict(), r.ok


def cmd_moduli(args, cfg):
    from .analytic import singular_moduli_norm_test

    r = singular_moduli_norm_test(args.p, dps=args.digits, workers=cfg.scan_workers)
    return "analytic.singular_moduli", r.to_dict(), r.divisible


def cmd_periods(args, cfg):
    from .analytic import verify_period_relation

    r = verify_period_relation(args.p, dps=min(cfg.precision_digits, 60))
    return "analytic.period_relation", r.to_dict(), r.ok


def _al_cache(cfg):
    from .lfunctions import ALCache

    return ALCache(Path(cfg.cache_dir) / "a_ell.csv")


def cmd_lvalue(args, cfg):
    from .lfunctions import l_value

    r = l_value(args.n, order=1 if args.deriv else 0, target_error=args.target,
                workers=cfg.scan_workers, cache=_al_cache(cfg))
    return "lfunctions.l_value", r.to_dict(), True


def cmd_classify(args, cfg):
    from .lfunctions import classify

    r = classify(args.p, threshold=cfg.lvalue_zero_threshold, workers=cfg.scan_workers,
                 cache=_al_cache(cfg))
    return "lfunctions.classify", r.to_dict(), True


def cmd_example17(args, cfg):
    from .heegner import heegner_example_17

    r = heegner_example_17(min(cfg.precision_digits, 60))
    return "heegner.example17", r.to_dict(with_timings=getattr(args, 'timings', False)), r.ok


def cmd_gz_check(args, cfg):
    from .heegner import gz_check

    r = gz_check(17, workers=cfg.scan_workers)
    return "heegner.gz_check", r.to_dict(with_timings=getattr(args, 'timings', False)), r.in_band and r.second_ok


def cmd_selftest(args, cfg):
    from .selftest import run_selftest

    checks = run_selftest(cfg)
    failed = [c for c in checks if not c["pass"]]
    return "selftest", {"checks": checks, "failed": len(failed)}, not failed


COMMANDS = {
    "check": cmd_check,
    "scan": cmd_scan,
    "qcheck": cmd_qcheck,
    "cm-verify": cmd_cm_verify,
    "moduli": cmd_moduli,
    "periods": cmd_periods,
    "lvalue": cmd_lvalue,
    "classify": cmd_classify,
    "example17": cmd_example17,
    "gz-check": cmd_gz_check,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a flag given before the subcommand from being reset after it
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = common.add_argument_group("configuration")
    g.add_argument("--config", help="JSON config file")
    g.add_argument("--precision", type=int, help="working decimal digits")
    g.add_argument("--order-cap", type=int, help="largest q-series order")
    g.add_argument("--workers", type=int, help="worker processes")
    g.add_argument("--oracle-max", type=int, help="run the exhaustive group oracle up to this p")
    g.add_argument("--cache-dir", help="directory for cached a_ell values")
    g.add_argument("--format", choices=["json", "csv", "text"])
    g.add_argument("--zero-threshold", type=float, help="L-values below this are treated as zero")
    g.add_argument("--timings", action="store_true", help="include wall-clock timings")

    ap = argparse.ArgumentParser(prog="cubesum", description=__doc__.splitlines()[0], parents=[common])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, help=help_, parents=[common])

    add("check", "decide the criterion for one prime").add_argument("p", type=int)
    s = add("scan", "run the criterion over a range of primes")
    s.add_argument("lo", type=int)
    s.add_argument("hi", type=int)
    s.add_argument("--out", help="CSV file; resumes from its last checkpoint")
    s.add_argument("--block", type=int, default=10_000, help="checkpoint every this many integers")
    q = add("qcheck", "verify a q-series identity")
    q.add_argument("--identity", choices=["theta", "modular-eq", "sumkron"], required=True)
    q.add_argument("--order", type=int, default=None, help="series order, or the prime bound for sumkron")
    add("cm-verify", "evaluate the modular parametrization at the CM points")
    m = add("moduli", "singular moduli norm divisibility")
    m.add_argument("p", type=int)
    m.add_argument("--digits", type=int, default=None)
    add("periods", "real period relation").add_argument("p", type=int)
    lv = add("lvalue", "central value of L(E^n, s)")
    lv.add_argument("n", type=int)
    lv.add_argument("--deriv", action="store_true", help="also report L'(1) when the sign is -1")
    lv.add_argument("--target", type=float, default=1e-10, help="target absolute error")
    add("classify", "which of p, p^2 carries a point (BSD-conditional)").add_argument("p", type=int)
    add("example17", "the p = 17 Heegner point")
    add("gz-check", "height formula consistency at p = 17")
    add("selftest", "quick invariant suite")
    return ap


def run(argv=None, out=None, environ=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = load_config(args, environ)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"cubesum: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        op, result, ok = COMMANDS[args.command](args, cfg)
    except AssertionError as exc:
        # EquivalenceViolation carries the offending record
        payload = {"error": str(exc), "counterexample": getattr(exc, "record", None)}
        emit(envelope(args.command, cfg, payload, False), cfg, out)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"cubesum {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if "rows_csv" in result:
        # scan rows straight to stdout in csv mode
        (out or sys.stdout).write(result.pop("rows_csv"))
    else:
        emit(envelope(op, cfg, result, ok), cfg, out)
    return EXIT_OK if ok else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
