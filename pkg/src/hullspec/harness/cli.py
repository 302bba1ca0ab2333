"""Command line entry point: ``hullspec VERB [options]``.

Exit codes: 0 when every assertion passed, 2 when a refinement certificate
degraded, 1 when an invariant was violated (or the input was rejected).
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .config import KINDS, ConfigError, ExperimentConfig, load_config
from .experiments import run
from .records import ResultRecord

OUT_ENV = "HULLSPEC_OUT"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hullspec", description=__doc__.splitlines()[0])
    ap.add_argument("verb", choices=KINDS)
    ap.add_argument("--config", type=Path, help="flat key = value experiment file")
    ap.add_argument("--out", type=Path, help=f"output directory (default ${OUT_ENV} or .)")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--grid", type=int)
    ap.add_argument("--tol", type=float)
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                    help="override a config key (repeatable)")
    return ap


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config, args.verb) if args.config else ExperimentConfig.default(args.verb)
    raw = dict(cfg.params)
    for item in args.overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        raw[key.strip()] = value.strip()
    for key in ("seed", "grid", "tol", "format"):
        val = getattr(args, key)
        if val is not None:
            raw[key] = val
    return ExperimentConfig.build(args.verb, raw)


def write_outputs(rec: ResultRecord, out: Path, fmt: str) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    stem = rec.experiment.replace("-", "_")
    paths = []
    if fmt == "json":
        p = out / f"{stem}.json"
        p.write_text(rec.to_json(), encoding="utf-8")
        paths.append(p)
    else:
        for name, table in rec.tables.items():
            p = out / f"{stem}_{name}.csv"
            p.write_text(table.to_csv(), encoding="utf-8")
            paths.append(p)
    return paths


def summarize(rec: ResultRecord) -> list[str]:
    lines = [f"{rec.experiment}: {rec.status}"]
    o = rec.outputs
    if "spectrum" in o:
        lines.append("spectrum: " + " U ".join(f"[{lo:.12g}, {hi:.12g}]" for lo, hi in o["spectrum"]))
    if "consecutive_text" in o:
        lines.append("d_H(n, n+1): " + ", ".join(o["consecutive_text"]))
    if "norms" in o:
        lines.append("norms: " + ", ".join(f"{v:.12g}" for v in o["norms"]))
    if "bound" in o:
        lines.append(f"periodic bound: {o['bound']} (attained by {o['attained_by']})")
    if "continuity" in rec.tables:
        for a, b, _, text in rec.tables["continuity"].rows:
            lines.append(f"d_H({a}, {b}) = {text}")
    for name, c in rec.checks.items():
        lines.append(f"  {'PASS' if c['passed'] else 'FAIL'} {name}")
    lines += [f"  {m}" for m in rec.messages]
    return lines


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        rec = run(cfg)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"hullspec: error: {exc}", file=sys.stderr)
        return 1
    out = args.out or Path(cfg["out"] or os.environ.get(OUT_ENV, "."))
    for line in summarize(rec):
        print(line)
    for p in write_outputs(rec, out, cfg["format"]):
        print(f"wrote {p}")
    return rec.exit_code


if __name__ == "__main__":
    sys.exit(main())
