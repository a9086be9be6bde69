import re
from typing import Any, Dict

import click
from dotenv import load_dotenv
from pydantic import ValidationError

from .log import configure_logging, logger
from .settings import RvlSettings
from .types import CommandReport, RunConfig
from .commands import (
    GenerateCommand, LagrangianCommand, LinearizeCommand, NumericCommand, SelfAdjointCommand,
)


def build_settings(**cli_overrides) -> RvlSettings:
    """Build RvlSettings with CLI overrides (non-None values take precedence)."""
    overrides = {k: v for k, v in cli_overrides.items() if v is not None}
    return RvlSettings(**overrides)


def _split(kwargs: Dict[str, Any]) -> tuple[RvlSettings, Dict[str, Any]]:
    """Options named after settings fields override them; the rest are command arguments."""
    load_dotenv()
    settings = build_settings(**{k: v for k, v in kwargs.items() if k.startswith("RVL_")})
    configure_logging(settings.RVL_LOG_LEVEL)
    return settings, {k: v for k, v in kwargs.items() if not k.startswith("RVL_")}


def _emit(report: CommandReport) -> None:
    if report.text:
        click.echo(report.text, err=report.error)
    if report.exit_code:
        raise SystemExit(report.exit_code)


def _config(**fields) -> RunConfig:
    try:
        return RunConfig(**fields)
    except ValidationError as e:
        logger.error(f"Invalid options: {e}")
        raise SystemExit(2)


def _run(kwargs: Dict[str, Any], build) -> None:
    try:
        settings, options = _split(kwargs)
    except ValidationError as e:
        click.echo(f"error: invalid settings: {e}", err=True)
        raise SystemExit(2)
    _emit(build(settings, options))


def _parse_recurrence(ctx, param, value):
    if value is None:
        return None
    match = re.fullmatch(r"\s*n\s*=\s*(\d+)\s*", value)
    if match is None:
        raise click.BadParameter("expected n=<k>, e.g. n=2")
    return int(match.group(1))


order_option = click.option('--order', '-N', 'order', type=int, required=True, help='Order N of the chain equation.')
alphas_option = click.option('--alphas', 'alphas_path', type=click.Path(exists=True, dir_okay=False, readable=True), default=None, help='Alpha table with lines "aJ = <sexpr>"; unlisted alphas stay symbolic.')
format_option = click.option('--format', 'RVL_FORMAT', type=click.Choice(["plain", "latex", "sexpr"]), default=None, envvar='RVL_FORMAT', help='Output format for formulas.')


@click.group()
def cli():
    """rvl - Lagrangians for the Riccati chain through Cole-Hopf linearization"""
    pass


@cli.command()
@order_option
@alphas_option
@format_option
def generate(**kwargs) -> None:
    """Print the order-N chain equation."""
    _run(kwargs, lambda settings, o: GenerateCommand(settings)(
        _config(command="generate", order=o["order"], alphas_path=o["alphas_path"], format=settings.RVL_FORMAT)
    ))


@cli.command()
@order_option
@alphas_option
@format_option
@click.option('--round-trip', 'round_trip', is_flag=True, default=False, help='Also check the Cole-Hopf certificate and recover the chain equation.')
def linearize(**kwargs) -> None:
    """Print the linear equation of order N+1 behind the order-N chain equation."""
    _run(kwargs, lambda settings, o: LinearizeCommand(settings)(
        _config(command="linearize", order=o["order"], alphas_path=o["alphas_path"], format=settings.RVL_FORMAT),
        round_trip=o["round_trip"],
    ))


@cli.command()
@click.argument('operator_path', type=click.Path(exists=True, dir_okay=False, readable=True), required=False)
@click.option('--recurrence', 'recurrence', type=str, default=None, callback=_parse_recurrence, help='Audit the odd-coefficient formulas for n=<k>.')
@click.option('--form', 'form', type=click.Choice(["recurrence", "closed", "both"]), default="both", help='Which printed form to audit.')
@format_option
def selfadjoint(**kwargs) -> None:
    """Check a linear operator for self-adjointness, or audit the odd-coefficient formulas."""

    def build(settings, o):
        forms = ("recurrence", "closed") if o["form"] == "both" else (o["form"],)
        return SelfAdjointCommand(settings)(
            _config(command="selfadjoint", format=settings.RVL_FORMAT),
            operator_path=o["operator_path"], recurrence=o["recurrence"], forms=forms,
        )

    _run(kwargs, build)


@cli.command()
@order_option
@alphas_option
@format_option
@click.option('--reduce-gauge', 'reduce', is_flag=True, default=False, help='Also print the gauge-reduced Lagrangian.')
def lagrangian(**kwargs) -> None:
    """Build the Lagrangian of an odd-order chain equation and verify its Euler-Lagrange equation."""
    _run(kwargs, lambda settings, o: LagrangianCommand(settings)(
        _config(command="lagrangian", order=o["order"], alphas_path=o["alphas_path"], format=settings.RVL_FORMAT),
        reduce=o["reduce"],
    ))


@cli.command()
@click.argument('subcommand', type=click.Choice(["riccati", "colehopf", "variation"]))
@click.option('--order', '-N', 'order', type=int, default=1, show_default=True, help='Order N of the chain equation.')
@click.option('--a0', 'a0', type=float, default=None, help='Constant value of alpha_0.')
@click.option('--a1', 'a1', type=float, default=None, help='Constant value of alpha_1.')
@click.option('--a2', 'a2', type=float, default=None, help='Constant value of alpha_2.')
@click.option('--a3', 'a3', type=float, default=None, help='Constant value of alpha_3.')
@click.option('--alphas', 'alphas_path', type=click.Path(exists=True, dir_okay=False, readable=True), default=None, help='Binding file with lines "NAME = const|table|expr ...".')
@click.option('--init', 'init', type=float, multiple=True, help='Initial value; repeat once per derivative, lowest first.')
@click.option('--range', 'x_range', type=float, nargs=2, required=True, help='Integration interval x0 x1.')
@click.option('--step', 'RVL_STEP', type=float, default=None, envvar='RVL_STEP', help='Uniform step h.')
@click.option('--epsilon', 'RVL_EPSILON', type=float, default=None, envvar='RVL_EPSILON', help='Perturbation size for the first variation.')
@click.option('--at', 'at', type=float, default=None, help='Also report the solution at this x.')
@click.option('--out', 'out', type=click.Path(dir_okay=False, writable=True), default=None, help='Write the trajectory as CSV.')
@click.option('--form', 'form', type=click.Choice(["riccati", "linear"]), default="riccati", help='Lagrangian varied by "variation": in w, or in y.')
@click.option('--perturb', 'perturb', type=float, default=0.0, help='Drift added to the solution before "variation", making it a non-solution.')
@click.option('--convergence', 'convergence', is_flag=True, default=False, help='Measure the convergence order of "riccati" by step halving.')
@format_option
def numeric(**kwargs) -> None:
    """Numerical checks: integrate the chain, test Cole-Hopf consistency, or test stationarity of the action."""

    def build(settings, o):
        config = _config(
            command="numeric", order=o["order"], alphas_path=o["alphas_path"], format=settings.RVL_FORMAT,
            x_range=o["x_range"], step=settings.RVL_STEP, epsilon=settings.RVL_EPSILON, out=o["out"],
        )
        constants = {name: o[name] for name in ("a0", "a1", "a2", "a3") if o[name] is not None}
        return NumericCommand(settings)(
            config, o["subcommand"], constants=constants, init=list(o["init"]) or None, at=o["at"],
            form=o["form"], perturb=o["perturb"], convergence=o["convergence"],
        )

    _run(kwargs, build)


def main():
    cli()
