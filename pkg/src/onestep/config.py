"""INI-style run configuration for the command line.

Example::

    [run]
    functional = isd
    target = beta22
    initial = linear
    grid_m = 4096
    eps_points = 101
    seed = 7
    out = results

    [kde]
    rule = undersmoothed
    boundary = truncate

    [simulate]
    n = 500, 2000
    reps = 500

Several initial distributions are separated by ``;`` or newlines, because
``mix(...)`` and ``pmf(...)`` use commas.
"""
from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, replace
from pathlib import Path as FsPath
from typing import Optional

from .dist import DEFAULT_M
from .errors import ConfigError, UnsupportedError
from .estimators import KdeConfig
from .functionals import REGISTRY

KNOWN = {
    "run": {"functional", "target", "initial", "grid_m", "eps_points", "seed", "out"},
    "kde": {"rule", "h", "c", "boundary", "kernel"},
    "simplex": {"resolution"},
    "simulate": {"n", "reps"},
    "rates": {"mode", "direction", "t_max", "t_count", "n", "reps"},
}


@dataclass
class RunConfig:
    functional: str = "isd"
    target: str = "beta22"
    initial: list = field(default_factory=list)
    grid_m: int = DEFAULT_M
    eps_points: int = 101
    seed: Optional[int] = None
    out: Optional[str] = None
    kde: KdeConfig = field(default_factory=lambda: KdeConfig(rule="undersmoothed"))
    simplex_resolution: int = 201
    sim_n: list = field(default_factory=lambda: [2000])
    sim_reps: int = 500
    rates_mode: str = "direction"
    rates_direction: str = "uniform"
    rates_t_max: float = 0.01
    rates_t_count: int = 8
    rates_n: list = field(default_factory=lambda: [500, 2000, 8000, 32000])
    rates_reps: int = 200
    source: Optional[str] = None

    def with_overrides(self, seed=None, out=None, functional=None) -> "RunConfig":
        changes = {}
        if seed is not None:
            changes["seed"] = seed
        if out is not None:
            changes["out"] = out
        if functional is not None:
            changes["functional"] = functional
        cfg = replace(self, **changes)
        if cfg.functional not in REGISTRY:
            raise ConfigError(f"unknown functional {cfg.functional!r}; choose from {sorted(REGISTRY)}")
        return cfg


def _line_of(text: str, section: str, key: str) -> Optional[int]:
    cur = None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"^\[(.+)\]$", s)
        if m:
            cur = m.group(1).strip()
        elif cur == section and re.match(rf"^{re.escape(key)}\s*[=:]", s):
            return i
    return None


class _Reader:
    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source
        self.cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
        try:
            self.cp.read_string(text, source=source)
        except configparser.ParsingError as e:
            lines = ", ".join(str(ln) for ln, _ in e.errors)
            raise ConfigError(f"{source}: cannot parse line(s) {lines}") from None
        except configparser.Error as e:
            ln = getattr(e, "lineno", None)
            where = f" line {ln}" if ln else ""
            raise ConfigError(f"{source}:{where} {e.message}") from None

    def fail(self, section, key, msg):
        ln = _line_of(self.text, section, key)
        where = f" line {ln}" if ln else ""
        raise ConfigError(f"{self.source}:{where} [{section}] {key}: {msg}")

    def get(self, section, key):
        if self.cp.has_option(section, key):
            return self.cp.get(section, key).strip()
        return None

    def int(self, section, key, default, minimum=None):
        raw = self.get(section, key)
        if raw is None or raw == "":
            return default
        try:
            v = int(raw)
        except ValueError:
            self.fail(section, key, f"expected an integer, got {raw!r}")
        if minimum is not None and v < minimum:
            self.fail(section, key, f"must be at least {minimum}")
        return v

    def float(self, section, key, default):
        raw = self.get(section, key)
        if raw is None or raw == "":
            return default
        try:
            return float(raw)
        except ValueError:
            self.fail(section, key, f"expected a number, got {raw!r}")

    def int_list(self, section, key, default):
        raw = self.get(section, key)
        if raw is None or raw == "":
            return default
        try:
            vals = [int(v) for v in re.split(r"[,\s]+", raw) if v]
        except ValueError:
            self.fail(section, key, f"expected a list of integers, got {raw!r}")
        if not vals:
            self.fail(section, key, "empty list")
        return vals


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    r = _Reader(text, source)
    for section in r.cp.sections():
        if section not in KNOWN:
            raise ConfigError(f"{source}: line {_line_of_section(text, section)} unknown section [{section}]")
        for key in r.cp.options(section):
            if key not in KNOWN[section]:
                r.fail(section, key, "unknown key")
    d = RunConfig()
    functional = r.get("run", "functional") or d.functional
    if functional not in REGISTRY:
        r.fail("run", "functional", f"unknown functional {functional!r}")
    initial_raw = r.get("run", "initial") or ""
    initial = [s.strip() for s in re.split(r"[;\n]", initial_raw) if s.strip()]
    kde_kwargs = {"rule": r.get("kde", "rule") or "undersmoothed",
                  "boundary": r.get("kde", "boundary") or "truncate",
                  "kernel": r.get("kde", "kernel") or "gaussian"}
    for key in ("h", "c"):
        v = r.float("kde", key, None)
        if v is not None:
            kde_kwargs[key] = v
    try:
        kde = KdeConfig(**kde_kwargs)
    except (UnsupportedError, ValueError) as e:
        r.fail("kde", _kde_key(e, kde_kwargs), str(e))
    mode = r.get("rates", "mode") or d.rates_mode
    if mode not in ("direction", "kde"):
        r.fail("rates", "mode", f"expected 'direction' or 'kde', got {mode!r}")
    seed = r.get("run", "seed")
    return RunConfig(
        functional=functional,
        target=r.get("run", "target") or d.target,
        initial=initial,
        grid_m=r.int("run", "grid_m", d.grid_m, minimum=2),
        eps_points=r.int("run", "eps_points", d.eps_points, minimum=3),
        seed=r.int("run", "seed", None) if seed else None,
        out=r.get("run", "out") or None,
        kde=kde,
        simplex_resolution=r.int("simplex", "resolution", d.simplex_resolution, minimum=2),
        sim_n=r.int_list("simulate", "n", d.sim_n),
        sim_reps=r.int("simulate", "reps", d.sim_reps),
        rates_mode=mode,
        rates_direction=r.get("rates", "direction") or d.rates_direction,
        rates_t_max=r.float("rates", "t_max", d.rates_t_max),
        rates_t_count=r.int("rates", "t_count", d.rates_t_count, minimum=2),
        rates_n=r.int_list("rates", "n", d.rates_n),
        rates_reps=r.int("rates", "reps", d.rates_reps, minimum=1),
        source=source,
    )


def _line_of_section(text: str, section: str):
    for i, line in enumerate(text.splitlines(), 1):
        if line.strip() == f"[{section}]":
            return i
    return "?"


def _kde_key(err: Exception, kwargs: dict) -> str:
    msg = str(err)
    for key in ("kernel", "boundary", "rule"):
        if key in msg:
            return key
    return "h" if kwargs.get("rule") == "fixed" else "c"


def load_config(path) -> RunConfig:
    path = FsPath(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    return parse_config(path.read_text(), str(path))
