"""Experiment configuration: a flat ``key = value`` file with a versioned header.

Example::

    # hullspec-config v1
    kind = converge
    model = fibonacci
    coupling = 1.0
    alpha = golden
    count = 8

Lines starting with ``#`` after the header are comments.  Keys outside the
schema of the chosen ``kind`` are rejected, as are non-positive tolerances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

CONFIG_HEADER = "# hullspec-config v1"

KINDS = ("bands", "converge", "p2check", "butterfly", "counterexample", "groupoid-selftest")


class ConfigError(ValueError):
    pass


def _int(s):
    return int(s)


def _float(s):
    v = float(s)
    if not math.isfinite(v):
        raise ValueError("not finite")
    return v


def _str(s):
    return str(s)


def _bool(s):
    t = str(s).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _alpha(s):
    t = str(s).strip().lower()
    return t if t in ("golden", "silver", "sqrt2") else _float(t)


def _fluxes(s):
    out = []
    for item in str(s).split(","):
        item = item.strip()
        if item:
            f = Fraction(item)
            out.append((f.numerator, f.denominator))
    return out


def _floats(s):
    return [_float(x) for x in str(s).split(",") if x.strip()]


def _strs(s):
    return [x.strip() for x in str(s).split(",") if x.strip()]


# key -> (parser, default, kinds using it)
COMMON = {
    "kind": (_str, None),
    "seed": (_int, 0),
    "grid": (_int, 64),
    "tol": (_float, 1e-10),
    "max_iter": (_int, 200),
    "out": (_str, ""),
    "format": (_str, "json"),
}

SCHEMA = {
    "bands": {"model": (_str, "laplacian"), "coupling": (_float, 1.0), "word": (_str, "a"),
              "cells": (_int, 0)},
    "converge": {"model": (_str, "fibonacci"), "coupling": (_float, 1.0),
                 "alpha": (_alpha, "golden"), "count": (_int, 8), "horizon": (_int, 64)},
    "p2check": {"model": (_str, "fibonacci"), "coupling": (_float, 1.0),
                "alpha": (_alpha, "golden"), "count": (_int, 8), "poly": (_floats, [0.0, 1.0])},
    "butterfly": {"fluxes": (_fluxes, [(0, 1), (1, 2)]), "coupling": (_float, 1.0),
                  "qmax": (_int, 64)},
    "counterexample": {"pmax": (_int, 12), "window": (_int, 8), "control": (_int, 10),
                       "horizon": (_int, 64)},
    "groupoid-selftest": {"count": (_int, 50), "twisted": (_bool, True),
                          "families": (_strs, ["pair", "set", "cyclic", "cyclic2"])},
}

TOLERANCE_KEYS = ("tol",)
POSITIVE_INTS = ("grid", "max_iter", "count", "pmax", "qmax", "horizon")


@dataclass
class ExperimentConfig:
    kind: str
    params: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.params[key]

    def get(self, key, default=None):
        return self.params.get(key, default)

    @classmethod
    def default(cls, kind: str) -> "ExperimentConfig":
        return cls.build(kind, {})

    @classmethod
    def build(cls, kind: str, raw: dict) -> "ExperimentConfig":
        """Typed config from string (or already typed) values."""
        if kind not in SCHEMA:
            raise ConfigError(f"unknown experiment kind {kind!r}; choose from {', '.join(KINDS)}")
        schema = {**COMMON, **SCHEMA[kind]}
        unknown = sorted(set(raw) - set(schema))
        if unknown:
            raise ConfigError(f"unknown keys for {kind}: {', '.join(unknown)}")
        params = {}
        for key, (parse, default) in schema.items():
            if key == "kind":
                continue
            if key in raw:
                try:
                    params[key] = parse(raw[key]) if isinstance(raw[key], str) else raw[key]
                except (ValueError, ZeroDivisionError) as exc:
                    raise ConfigError(f"bad value for {key}: {raw[key]!r} ({exc})") from None
            else:
                params[key] = default
        cfg = cls(kind, params)
        cfg.check()
        return cfg

    def check(self):
        for key in TOLERANCE_KEYS:
            if not self.params[key] > 0:
                raise ConfigError(f"tolerance {key} must be positive")
        for key in POSITIVE_INTS:
            if key in self.params and self.params[key] < 1:
                raise ConfigError(f"{key} must be >= 1")
        if self.params["format"] not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.kind == "p2check" and len(self.params["poly"]) > 3:
            raise ConfigError("p2check takes polynomials of degree at most 2")

    def with_overrides(self, **values) -> "ExperimentConfig":
        raw = dict(self.params)
        raw.update({k: v for k, v in values.items() if v is not None})
        return ExperimentConfig.build(self.kind, raw)

    def to_text(self) -> str:
        lines = [CONFIG_HEADER, f"kind = {self.kind}"]
        for key in sorted(self.params):
            lines.append(f"{key} = {_render(self.params[key])}")
        return "\n".join(lines) + "\n"


def _render(v):
    if isinstance(v, list):
        if v and isinstance(v[0], tuple):
            return ",".join(f"{p}/{q}" for p, q in v)
        return ",".join(repr(x) if isinstance(x, float) else str(x) for x in v)
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v) if isinstance(v, float) else str(v)


def parse_config(text: str, kind: str | None = None) -> ExperimentConfig:
    lines = text.splitlines()
    if not lines or lines[0].strip() != CONFIG_HEADER:
        raise ConfigError(f"config must start with {CONFIG_HEADER!r}")
    raw = {}
    for no, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {no}: expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key in raw:
            raise ConfigError(f"line {no}: duplicate key {key!r}")
        raw[key] = value
    file_kind = raw.pop("kind", None)
    if kind is not None and file_kind is not None and file_kind != kind:
        raise ConfigError(f"config is for {file_kind!r}, not {kind!r}")
    kind = kind or file_kind
    if kind is None:
        raise ConfigError("config does not name a kind")
    return ExperimentConfig.build(kind, raw)


def load_config(path, kind: str | None = None) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), kind)
