"""Command line entry point: ``wigner-calc verify``."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from importlib import resources

from .checks import CRITERIA, SUITES, CheckResult, SuiteConfig, criteria_status, run_checks

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

_CONFIG_KEYS = {"suite", "seed", "basis", "max_degree", "fock_level", "tol", "gue_dim", "gue_samples",
                "format", "report"}


class ConfigError(ValueError):
    pass


def load_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("report.schema.json").read_text())


def parse_suites(spec) -> tuple[str, ...]:
    if isinstance(spec, str):
        spec = [spec]
    names = []
    for item in spec:
        names.extend(s.strip() for s in str(item).split(",") if s.strip())
    if not names or "all" in names:
        return SUITES
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suite(s): {', '.join(unknown)}; choose from all, {', '.join(SUITES)}")
    return tuple(s for s in SUITES if s in names)


def build_config(args: argparse.Namespace) -> tuple[SuiteConfig, dict]:
    """Merge defaults, the optional JSON config file and explicit flags (flags win)."""
    merged: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        data = {k.replace("-", "_"): v for k, v in data.items()}
        extra = set(data) - _CONFIG_KEYS
        if extra:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(extra))}")
        merged.update(data)
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if "seed" not in merged:
        env = os.environ.get("WIGNER_CALC_SEED")
        if env is not None:
            try:
                merged["seed"] = int(env)
            except ValueError:
                raise ConfigError(f"WIGNER_CALC_SEED must be an integer, got {env!r}") from None
    fields = {k: merged[k] for k in ("seed", "basis", "max_degree", "fock_level", "tol",
                                     "gue_dim", "gue_samples") if k in merged}
    for k, v in fields.items():
        ok = isinstance(v, (int, float)) and not isinstance(v, bool) if k == "tol" else \
            isinstance(v, int) and not isinstance(v, bool)
        if not ok and not (k == "tol" and v is None):
            raise ConfigError(f"{k} has the wrong type: {v!r}")
    cfg = SuiteConfig(suites=parse_suites(merged.get("suite", "all")), **fields)
    try:
        cfg.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = {"format": merged.get("format", "table"), "report": merged.get("report")}
    if out["format"] not in ("json", "table"):
        raise ConfigError(f"unknown format {out['format']!r}")
    return cfg, out


def build_report(cfg: SuiteConfig, results: list[CheckResult], elapsed: float) -> dict:
    status = criteria_status(results)
    failed = sum(not r.passed for r in results)
    return {
        "config": {"suites": list(cfg.suites), "seed": cfg.seed, "basis": cfg.basis,
                   "max_degree": cfg.max_degree, "fock_level": cfg.fock_level, "tol": cfg.tol,
                   "gue_dim": cfg.gue_dim, "gue_samples": cfg.gue_samples},
        "summary": {"total": len(results), "passed": len(results) - failed, "failed": failed,
                    "status": "FAIL" if failed else "PASS",
                    "criteria": {str(c): "PASS" if ok else "FAIL" for c, ok in status.items()},
                    "elapsed": round(elapsed, 6)},
        "checks": [r.to_dict() for r in sorted(results, key=lambda r: r.check_id)],
    }


def emit_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def emit_table(report: dict) -> str:
    header = ("check", "crit", "status", "residual", "tol", "anchor")
    rows = [(c["check_id"], str(c["criterion"]), c["status"],
             c["max_residual"] if isinstance(c["max_residual"], str) else f"{c['max_residual']:.3e}",
             f"{c['tolerance']:.0e}", c["anchor"]) for c in report["checks"]]
    widths = [max(len(r[i]) for r in rows + [header]) for i in range(len(header))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip(),
             "  ".join("-" * w for w in widths)]
    if not rows:
        return "\n".join(lines) + "\n"
    lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in rows]
    s = report["summary"]
    lines.append(f"{s['passed']}/{s['total']} checks passed: {s['status']}")
    for c, st in s["criteria"].items():
        lines.append(f"  criterion {c:>2} {st}  {CRITERIA[int(c)]}")
    return "\n".join(lines) + "\n"


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wigner-calc", description="Free Wigner chaos calculus checks")
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run seeded identity checks")
    v.add_argument("--suite", action="append",
                   help=f"suite to run (repeatable or comma separated): all, {', '.join(SUITES)}")
    v.add_argument("--seed", type=int, help="master seed (fallback: WIGNER_CALC_SEED, then 42)")
    v.add_argument("--basis", type=int, help="number of basis vectors d (default 6)")
    v.add_argument("--max-degree", dest="max_degree", type=int, help="largest chaos degree D (default 5)")
    v.add_argument("--fock-level", dest="fock_level", type=int, help="Fock truncation level L (default 10)")
    v.add_argument("--tol", type=float, help="override the numeric tolerances (exact checks stay exact)")
    v.add_argument("--gue-dim", dest="gue_dim", type=int, help="GUE matrix size N (default 500)")
    v.add_argument("--gue-samples", dest="gue_samples", type=int, help="GUE samples M (default 2)")
    v.add_argument("--report", help="also write the report to this path")
    v.add_argument("--format", choices=("json", "table"), help="output format (default table)")
    v.add_argument("--config", help="JSON file with the same keys as the flags")
    return parser


def verify(args: argparse.Namespace) -> int:
    try:
        cfg, out = build_config(args)
    except ConfigError as exc:
        print(f"wigner-calc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    start = time.perf_counter()
    results = run_checks(cfg)
    report = build_report(cfg, results, time.perf_counter() - start)
    text = emit_json(report) if out["format"] == "json" else emit_table(report)
    sys.stdout.write(text)
    if out["report"]:
        with open(out["report"], "w") as fh:
            fh.write(text)
    return EXIT_FAIL if report["summary"]["failed"] else EXIT_PASS


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "verify":
        return verify(args)
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
