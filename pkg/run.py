import functools
import logging
import os

import click

from config import Config
from peps_mqc.circuit import load_circuit
from peps_mqc.compiler import compile as compile_circuit
from peps_mqc.compiler import load_pattern
from peps_mqc.crossing import CanonicalGate
from peps_mqc.exceptions import MqcError, VerificationError
from peps_mqc.simulator import ENUMERATE, SAMPLE
from reporting import ReportFactory
from reporting.analysis_reports import SPECTRUM, VERIFY

logger = logging.getLogger("peps_mqc")

SAVE_REPORTS = "peps_mqc.save_reports"


def handles_errors(command):
    """Turns package errors into the documented exit codes."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return command(*args, **kwargs)
        except MqcError as error:
            click.echo(f"error: {error.message}", err=True)
            ctx.exit(error.exit_code)

    return wrapper


def report_path(report, report_dir: str) -> str:
    """``report_dir/<report filename>.json``, creating the directory on first use."""
    os.makedirs(report_dir, exist_ok=True)
    return os.path.join(report_dir, f"{report.filename or report.report_type}.json")


def emit(report, path):
    """
    Writes the report to ``path``, to the configured report directory under ``--save``, or to stdout. Fails with exit
    code 4 if its checks did not pass.
    """
    ctx = click.get_current_context(silent=True)
    if not path and ctx is not None and ctx.meta.get(SAVE_REPORTS):
        path = report_path(report, (ctx.obj or Config).REPORT_DIR)
    text = report.return_data(path)
    if path:
        click.echo(f"wrote {path}", err=True)
    else:
        click.echo(text, nl=False)
    if not report.passed:
        raise VerificationError(f"{report.report_type} checks failed")


@click.group()
@click.option("--log-level", default=Config.LOG_LEVEL, show_default=True, help="Python logging level")
@click.option("--save", is_flag=True, help="Write reports without --report into the configured REPORT_DIR")
@click.pass_context
def cli(ctx, log_level, save):
    """
    Deterministic measurement-based computation on a four-level honeycomb PEPS: compile circuits to adaptive
    measurement patterns, simulate and cross-check them, and verify the model's local-gate and Hamiltonian claims.
    """
    logging.basicConfig(level=log_level.upper(), format="%(asctime)s %(name)s %(levelname)s %(message)s")
    ctx.meta[SAVE_REPORTS] = save
    try:
        ctx.obj = Config.validate()
    except MqcError as error:
        click.echo(f"error: {error.message}", err=True)
        ctx.exit(error.exit_code)


@cli.command(name="compile")
@click.argument("circuit_file", type=click.File("r"))
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="Where to write the pattern JSON")
@click.pass_obj
@handles_errors
def compile_command(config, circuit_file, output):
    """
    Compile a circuit JSON file into a measurement pattern
    """
    pattern = compile_circuit(load_circuit(circuit_file.read()))
    emit(ReportFactory.create_report("compile", pattern=pattern, config=config.as_dict()), output)


@cli.command()
@click.argument("pattern_file", type=click.File("r"))
@click.option("--enumerate", "mode", flag_value=ENUMERATE, default=True, help="Walk every outcome branch")
@click.option("--sample", "samples", type=click.IntRange(min=1), help="Draw this many random branches instead")
@click.option("--seed", type=int, default=None, help="Seed for --sample (defaults to the configured seed)")
@click.option("--threads", type=click.IntRange(min=1), envvar="PEPS_MQC_THREADS", default=None)
@click.option("--report", type=click.Path(dir_okay=False), help="Where to write the report")
@click.pass_obj
@handles_errors
def simulate(config, pattern_file, mode, samples, seed, threads, report):
    """
    Run a compiled pattern in correlation space and check every branch against the intended circuit
    """
    pattern = load_pattern(pattern_file.read())
    emit(
        ReportFactory.create_report(
            "simulate",
            pattern=pattern,
            mode=SAMPLE if samples else mode,
            samples=samples or 1,
            seed=config.SEED if seed is None else seed,
            max_branches=config.MAX_BRANCHES,
            threads=threads or config.THREADS,
            tolerance=config.PHASE_TOLERANCE,
            config=config.as_dict(),
        ),
        report,
    )


@cli.command()
@click.option("--alpha", type=float, default=0.0, show_default=True)
@click.option("--beta", type=float, default=0.0, show_default=True)
@click.option("--gamma", type=float, default=0.0, show_default=True)
@click.option("--verify", "samples", type=click.IntRange(min=0), default=0, help="Random members to test per family")
@click.option("--seed", type=int, default=None)
@click.option("--scan", is_flag=True, help="Grid check of P1 Z(t1) (x) P2 Z(t2) against the families")
@click.option("--report", type=click.Path(dir_okay=False))
@click.pass_obj
@handles_errors
def crossing(config, alpha, beta, gamma, samples, seed, scan, report):
    """
    Find every local gate that crosses exp(i/2 (alpha XX + beta YY + gamma ZZ)) locally
    """
    emit(
        ReportFactory.create_report(
            "crossing",
            gate=CanonicalGate(alpha, beta, gamma),
            samples=samples,
            seed=config.SEED if seed is None else seed,
            scan=scan,
            tolerance=config.PHASE_TOLERANCE,
            config=config.as_dict(),
        ),
        report,
    )


@cli.command()
@click.argument("mode", type=click.Choice([VERIFY, SPECTRUM]))
@click.option("--patch", type=click.Choice(["unit7", "vertical3"]), default="unit7", show_default=True)
@click.option("--term-dir", type=click.Path(file_okay=False), default=None, help="Directory of shorthand files")
@click.option("--report", type=click.Path(dir_okay=False))
@click.pass_obj
@handles_errors
def hamiltonian(config, mode, patch, term_dir, report):
    """
    Check the parent Hamiltonian terms (verify) or diagonalize them on a patch (spectrum)
    """
    emit(
        ReportFactory.create_report(
            "hamiltonian",
            mode=mode,
            patch=patch,
            term_dir=term_dir or config.TERM_DIR,
            tolerance=config.SOLVER_TOLERANCE,
            max_dim=config.MAX_PATCH_DIM,
            max_iterations=config.SOLVER_MAX_ITERATIONS,
            config=config.as_dict(),
        ),
        report,
    )


@cli.group()
def oracle():
    """
    Brute-force physical state-vector checks
    """


@oracle.command()
@click.option("--circuit", "circuit_file", type=click.File("r"), required=True)
@click.option("--max-sites", type=click.IntRange(min=1), default=None)
@click.option("--report", type=click.Path(dir_okay=False))
@click.pass_obj
@handles_errors
def validate(config, circuit_file, max_sites, report):
    """
    Compare every branch of the compiled circuit with an explicit contraction of the patch
    """
    emit(
        ReportFactory.create_report(
            "oracle",
            circuit=load_circuit(circuit_file.read()),
            max_sites=max_sites or config.MAX_ORACLE_SITES,
            tolerance=config.PHASE_TOLERANCE,
            max_branches=config.MAX_BRANCHES,
            config=config.as_dict(),
        ),
        report,
    )


@cli.command(name="dump-model")
@click.option("--seed", type=int, default=None)
@click.option("--report", type=click.Path(dir_okay=False))
@click.pass_obj
@handles_errors
def dump_model(config, seed, report):
    """
    Write the model constants, the c tables and the by-product census
    """
    emit(
        ReportFactory.create_report(
            "model", seed=config.SEED if seed is None else seed, config=config.as_dict()
        ),
        report,
    )


if __name__ == "__main__":
    cli()
