#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Main entry point for faberlab.
Provides the gen, zeros, predict and verify commands.
"""

import sys
import logging
from typing import Any, Callable, Dict, Optional

import click

from faberlab import __version__
from faberlab.core.controller import FaberLabController
from faberlab.utils.config import (
    OUTPUT_FORMATS,
    ConfigError,
    RunConfig,
    load_config,
    parse_degrees,
)
from faberlab.utils.logger import LOG_LEVELS, configure_logging

logger = logging.getLogger(__name__)

EXIT_CODES = {"spec": 2, "usage": 2, "numeric": 3, "verify": 1, "internal": 1}


def run_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """Options shared by every command; unset options fall back to the config file."""
    options = [
        click.option("--map", "map_spec", help="Map profile id, path to a JSON spec, or inline JSON"),
        click.option("--n", "degrees", help="Degrees: a..b, a comma list, or a single value"),
        click.option("--out", "out_dir", type=click.Path(file_okay=False), help="Output directory"),
        click.option("--format", "fmt", type=click.Choice(OUTPUT_FORMATS), help="Output format"),
        click.option("--seed", type=click.IntRange(min=0), help="Seed for sampled test points"),
        click.option("--tol", type=float, help="Tolerance override"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _resolve(ctx: click.Context, degrees: Optional[str], **overrides: Any) -> RunConfig:
    config: RunConfig = ctx.obj["config"]
    try:
        parsed = parse_degrees(degrees) if degrees is not None else None
        return config.merged(degrees=parsed, **overrides)
    except ConfigError as e:
        raise click.UsageError(str(e), ctx=ctx)


def _warn_ignored(command: str, **flags: Any) -> None:
    for name, value in flags.items():
        if value is not None:
            logger.warning(f"{command} does not use --{name}; ignored")


def _require(ctx: click.Context, config: RunConfig, need_degrees: bool = True) -> None:
    if not config.map_spec:
        raise click.UsageError("no map given; use --map or a [run] map entry", ctx=ctx)
    if need_degrees and not config.degrees:
        raise click.UsageError("no degrees given; use --n or a [run] n entry", ctx=ctx)


def _progress(percent: int, message: str) -> None:
    """Display progress on stderr."""
    click.echo(f"{percent}% - {message}", err=True)


def _finish(ctx: click.Context, result: Dict[str, Any]) -> None:
    if result.get("success", False):
        click.echo(result["message"])
        return
    click.echo(f"Error: {result['message']}", err=True)
    ctx.exit(EXIT_CODES.get(result.get("error_kind", "internal"), 1))


@click.group()
@click.version_option(__version__, prog_name="faberlab")
@click.option(
    "--log-level",
    type=click.Choice(list(LOG_LEVELS), case_sensitive=False),
    default="warning",
    show_default=True,
    help="Console log level",
)
@click.option("--log-file", type=click.Path(dir_okay=False), help="Also log to this file")
@click.option("--save-log", is_flag=True, help="Also log to faberlab.log in the user log directory")
@click.option(
    "--maps-dir",
    type=click.Path(exists=True, file_okay=False),
    help="Directory with extra map profiles",
)
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    help="TOML file with a [run] table",
)
@click.pass_context
def cli(
    ctx: click.Context,
    log_level: str,
    log_file: Optional[str],
    save_log: bool,
    maps_dir: Optional[str],
    config_path: Optional[str],
) -> None:
    """faberlab - Faber polynomials, asymptotic models and zeros."""
    configure_logging(log_level, log_file, default_file=save_log)
    ctx.ensure_object(dict)
    ctx.obj["maps_dir"] = maps_dir
    try:
        ctx.obj["config"] = load_config(config_path) if config_path else RunConfig()
    except ConfigError as e:
        raise click.UsageError(str(e), ctx=ctx)


@cli.command()
@run_options
@click.pass_context
def gen(
    ctx: click.Context,
    map_spec: Optional[str],
    degrees: Optional[str],
    out_dir: Optional[str],
    fmt: Optional[str],
    seed: Optional[int],
    tol: Optional[float],
) -> None:
    """Write Faber polynomial coefficients, one file per degree."""
    _warn_ignored("gen", seed=seed, tol=tol)
    config = _resolve(ctx, degrees, map_spec=map_spec, out_dir=out_dir, fmt=fmt, seed=seed)
    _require(ctx, config)
    controller = FaberLabController(ctx.obj["maps_dir"], threads=config.threads)
    result = controller.generate(
        config.map_spec or "", config.degrees, config.out_dir, config.fmt, progress_callback=_progress
    )
    _finish(ctx, result)


@cli.command()
@run_options
@click.pass_context
def zeros(
    ctx: click.Context,
    map_spec: Optional[str],
    degrees: Optional[str],
    out_dir: Optional[str],
    fmt: Optional[str],
    seed: Optional[int],
    tol: Optional[float],
) -> None:
    """Find the zeros of F_n; writes zeros_nNNNN.json and zeros.csv."""
    tol_override = {"roots": tol} if tol is not None else None
    _warn_ignored("zeros", seed=seed, format=fmt)
    config = _resolve(ctx, degrees, map_spec=map_spec, out_dir=out_dir, seed=seed, tol=tol_override)
    _require(ctx, config)
    controller = FaberLabController(ctx.obj["maps_dir"], threads=config.threads)
    kwargs: Dict[str, Any] = {"progress_callback": _progress}
    if "roots" in config.tol:
        kwargs["tol"] = config.tol["roots"]
    result = controller.zeros(config.map_spec or "", config.degrees, config.out_dir, **kwargs)
    _finish(ctx, result)


@cli.command()
@run_options
@click.option("--grid", help="Evaluation grid re0,re1,im0,im1,count for H_n")
@click.pass_context
def predict(
    ctx: click.Context,
    map_spec: Optional[str],
    degrees: Optional[str],
    out_dir: Optional[str],
    fmt: Optional[str],
    seed: Optional[int],
    tol: Optional[float],
    grid: Optional[str],
) -> None:
    """Write the asymptotic predictions of a map to prediction.json."""
    _warn_ignored("predict", seed=seed, tol=tol, format=fmt)
    config = _resolve(ctx, degrees, map_spec=map_spec, out_dir=out_dir, fmt=fmt, seed=seed)
    _require(ctx, config)
    controller = FaberLabController(ctx.obj["maps_dir"], threads=config.threads)
    result = controller.predict(
        config.map_spec or "", config.degrees, config.out_dir, grid, progress_callback=_progress
    )
    for warning in result.get("warnings", []):
        click.echo(f"Warning: {warning}", err=True)
    _finish(ctx, result)


@cli.command()
@run_options
@click.pass_context
def verify(
    ctx: click.Context,
    map_spec: Optional[str],
    degrees: Optional[str],
    out_dir: Optional[str],
    fmt: Optional[str],
    seed: Optional[int],
    tol: Optional[float],
) -> None:
    """
    Run the acceptance suite on the built-in maps.

    --tol overrides the oracle-equivalence tolerance; --n restricts the
    degrees of the zero-free exterior check.
    """
    tol_override = {"oracle": tol} if tol is not None else None
    config = _resolve(ctx, degrees, seed=seed, tol=tol_override)
    _warn_ignored("verify", map=map_spec or None, format=fmt)
    controller = FaberLabController(ctx.obj["maps_dir"], threads=config.threads)
    result = controller.verify(
        tolerances=config.tol,
        seed=config.seed,
        degrees=config.degrees or None,
        out_dir=out_dir,
        progress_callback=_progress,
    )
    for check in result.get("report", {}).get("checks", []):
        status = "PASS" if check["passed"] else "FAIL"
        residual = "n/a" if check["residual"] is None else f"{check['residual']:.3e}"
        click.echo(f"{status}  {check['name']:<28} residual {residual}  threshold {check['threshold']:.3e}")
    _finish(ctx, result)


def main() -> int:
    """Main entry point for the application."""
    return cli()  # type: ignore[no-any-return]


if __name__ == "__main__":
    sys.exit(main())
