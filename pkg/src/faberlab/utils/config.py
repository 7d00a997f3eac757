#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Run configuration: TOML files, degree lists and angle parsing.
"""

import os
import re
import json
import math
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import toml

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ("json", "csv")
THREADS_ENV = "FABERLAB_THREADS"

_RANGE = re.compile(r"^\s*(\d+)\s*\.\.\s*(\d+)\s*$")
_PI_ANGLE = re.compile(r"^\s*(\d+)?\s*(?:/\s*(\d+))?\s*\*?\s*pi\s*(?:/\s*(\d+))?\s*$", re.IGNORECASE)


class ConfigError(ValueError):
    """Invalid run configuration or command-line value."""


def parse_degrees(text: Union[str, int, List[int], None]) -> List[int]:
    """
    Parse a degree list: "a..b" (inclusive), "1,2,5", a single integer or a list.

    Raises:
        ConfigError: On an empty list, negative or malformed values
    """
    if text is None:
        raise ConfigError("degree list is empty")
    if isinstance(text, int):
        values = [text]
    elif isinstance(text, (list, tuple)):
        values = [int(v) for v in text]
    else:
        match = _RANGE.match(text)
        if match:
            lo, hi = int(match.group(1)), int(match.group(2))
            if hi < lo:
                raise ConfigError(f"degree range {text!r} is empty")
            values = list(range(lo, hi + 1))
        else:
            parts = [p.strip() for p in text.split(",") if p.strip()]
            try:
                values = [int(p) for p in parts]
            except ValueError:
                raise ConfigError(f"malformed degree list {text!r}")
    if not values:
        raise ConfigError("degree list is empty")
    if any(v < 0 for v in values):
        raise ConfigError(f"degrees must be non-negative, got {values}")
    return sorted(set(values))


def parse_angle(value: Union[str, float, int]) -> Tuple[float, Optional[Fraction]]:
    """
    Parse an angle in radians, or a rational multiple of pi such as "3/4pi",
    "pi/2" or "pi".

    Returns:
        (radians, exact angle/pi or None)
    """
    if isinstance(value, (int, float)):
        return float(value), None
    match = _PI_ANGLE.match(value)
    if match:
        num, den, trailing = match.groups()
        if den and trailing:
            raise ConfigError(f"ambiguous angle {value!r}")
        frac = Fraction(int(num) if num else 1, int(den or trailing or 1))
        return float(frac) * math.pi, frac
    try:
        return float(value), None
    except ValueError:
        raise ConfigError(f"cannot parse angle {value!r}")


def parse_grid(text: str) -> Tuple[float, float, float, float, int]:
    """Parse "re0,re1,im0,im1,count" into a lattice description."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 5:
        raise ConfigError(f"grid must be re0,re1,im0,im1,count, got {text!r}")
    try:
        re0, re1, im0, im1 = (float(p) for p in parts[:4])
        count = int(parts[4])
    except ValueError:
        raise ConfigError(f"malformed grid {text!r}")
    if count < 1 or re1 < re0 or im1 < im0:
        raise ConfigError(f"empty grid {text!r}")
    return re0, re1, im0, im1, count


def default_threads() -> int:
    """Worker count from FABERLAB_THREADS, else min(4, cpu count)."""
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            logger.warning(f"Ignoring non-integer {THREADS_ENV}={raw!r}")
    return max(1, min(4, os.cpu_count() or 1))


@dataclass(frozen=True)
class RunConfig:
    """
    Settings of one CLI run.

    Attributes:
        map_spec: Profile id, path to a JSON spec, or inline JSON
        degrees: Degrees to process
        out_dir: Output directory
        fmt: Output format, json or csv
        tol: Tolerance overrides keyed by check or operation name
        seed: Seed for sampled test points
        threads: Worker cap
    """

    map_spec: Optional[str] = None
    degrees: List[int] = field(default_factory=list)
    out_dir: str = "."
    fmt: str = "json"
    tol: Dict[str, float] = field(default_factory=dict)
    seed: int = 0
    threads: int = field(default_factory=default_threads)

    def __post_init__(self) -> None:
        if self.fmt not in OUTPUT_FORMATS:
            raise ConfigError(f"output format must be one of {OUTPUT_FORMATS}, got {self.fmt!r}")
        if any(d < 0 for d in self.degrees):
            raise ConfigError("degrees must be non-negative")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")

    def merged(self, **overrides: Any) -> "RunConfig":
        """Copy with every non-None override applied."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        if "tol" in changes:
            changes["tol"] = {**self.tol, **changes["tol"]}
        return replace(self, **changes)


def load_config(path: Union[str, Path]) -> RunConfig:
    """
    Load a RunConfig from the [run] table of a TOML file.

    Example:
        [run]
        map = "two-corner-3pi4"
        n = "20..90"
        out = "results"
        format = "csv"
        seed = 7
        [run.tol]
        oracle = 1e-8
    """
    try:
        data = toml.load(str(path))
    except (OSError, toml.TomlDecodeError) as e:
        raise ConfigError(f"cannot read configuration {path}: {str(e)}")
    run = data.get("run", {})
    kwargs: Dict[str, Any] = {}
    if "map" in run:
        spec = run["map"]
        kwargs["map_spec"] = spec if isinstance(spec, str) else json.dumps(spec)
    if "n" in run:
        kwargs["degrees"] = parse_degrees(run["n"])
    if "out" in run:
        kwargs["out_dir"] = str(run["out"])
    if "format" in run:
        kwargs["fmt"] = str(run["format"])
    try:
        if "seed" in run:
            kwargs["seed"] = int(run["seed"])
        if "threads" in run:
            kwargs["threads"] = max(1, int(run["threads"]))
        if "tol" in run:
            kwargs["tol"] = {str(k): float(v) for k, v in run["tol"].items()}
    except (TypeError, ValueError, AttributeError) as e:
        raise ConfigError(f"invalid [run] value in {path}: {str(e)}")
    logger.info(f"Loaded configuration from {path}")
    return RunConfig(**kwargs)
