#!/usr/bin/env python3
"""Main CLI entry point for bianchi-lvalues."""
import functools
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Callable, Dict, List

import click
import mpmath
from rich.console import Console
from rich.logging import RichHandler

import config
from coefficient_cache import CoefficientStore
from data_loader import JobConfig, load_job, load_newform, parse_all
from errors import BianchiError, ConfigError, MalformedSpec, NumericalError
from forms.base import BianchiForm
from forms.base_change import base_change
from forms.factory import create_form
from forms.newform_data import ClassicalNewformData
from forms.stabilised import StabilisedForm, slope_class
from hecke_chars import HeckeCharacter, make_character
from lfun.lvalues import (
    compare_sides,
    fe_residual,
    fricke_sign_estimate,
    lambda_value,
    relative_tolerance,
    stabilisation_check,
)
from lfun.oracle import base_change_lambda_oracle
from padic.interpolation import padic_fe_check
from quadfield import ImagQuadField, ideals_up_to_norm
from renderer import Renderer
from reports import ErrorReport, FEReport, LValueReport, ReportWriter, open_report_stream
from validators import validate_newform

log = logging.getLogger("bianchi")


def setup_logging(verbose: bool, quiet: bool):
    """Route library logging through rich on stderr."""
    level = logging.DEBUG if verbose else logging.ERROR if quiet else getattr(logging, config.LOG_LEVEL.upper(), logging.WARNING)
    handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=False)
    logging.basicConfig(level=level, format="%(message)s", handlers=[handler], force=True)


def fail(error: Exception, renderer: Renderer):
    """Render an error and exit with its code (1 for anything outside the library's hierarchy)."""
    if isinstance(error, BianchiError):
        renderer.render_error(error.render())
        sys.exit(error.exit_code)
    renderer.render_error(str(error))
    sys.exit(1)


# ─── Jobs ───────────────────────────────────────────────────────────────────

@dataclass
class JobContext:
    """Everything parsed and built for a job, before any L-value is computed."""

    job: JobConfig
    field: ImagQuadField
    newform: ClassicalNewformData
    characters: List[HeckeCharacter]
    form: BianchiForm


NEEDS_PRIME = {"stabilise", "check-padic-fe", "slopes"}


def prepare(job: JobConfig, kind: str) -> JobContext:
    """Parse every referenced file, then build the form."""
    field, newform, characters = parse_all(job)
    if kind in NEEDS_PRIME and job.prime is None:
        raise ConfigError(f"{kind} needs --prime")
    if not characters:
        characters = [make_character(field, 1, (0, 0), label="trivial")]
    store = CoefficientStore(job.cache_dir) if job.cache_dir else CoefficientStore()
    form = create_form(newform, field, job.fricke_sign, job.prime, job.stabilise_choices(), store, job.prec)
    return JobContext(job, field, newform, characters, form)


def _split_point(job: JobConfig):
    return mpmath.mpf(job.split_point) if job.split_point else None


def _lvalue(ctx: JobContext, psi: HeckeCharacter) -> LValueReport:
    return lambda_value(ctx.form, psi, ctx.job.prec, _split_point(ctx.job))


def _check_fe(ctx: JobContext, psi: HeckeCharacter) -> FEReport:
    return fe_residual(ctx.form, psi, ctx.job.prec, _split_point(ctx.job), ctx.job.flip_sign, ctx.job.tolerance)


def _stabilise(ctx: JobContext, psi: HeckeCharacter) -> FEReport:
    return stabilisation_check(ctx.form, psi, ctx.job.prec, _split_point(ctx.job), ctx.job.tolerance)


def _check_padic_fe(ctx: JobContext, psi: HeckeCharacter) -> FEReport:
    return padic_fe_check(ctx.form, psi, ctx.job.prec, _split_point(ctx.job), ctx.job.flip_sign, ctx.job.tolerance)


TASKS: Dict[str, Callable[[JobContext, HeckeCharacter], Any]] = {
    "lvalue": _lvalue,
    "check-fe": _check_fe,
    "stabilise": _stabilise,
    "check-padic-fe": _check_padic_fe,
}


def evaluate(kind: str, ctx: JobContext, psi: HeckeCharacter):
    """One (form, character) task; library errors become an error record."""
    try:
        return TASKS[kind](ctx, psi)
    except BianchiError as e:
        log.error("%s %s: %s", ctx.form.label, psi.id, e.message)
        return ErrorReport(f"{kind}:{ctx.form.label}:{psi.id}", e.error_code, e.message, e.exit_code)


_WORKER_CONTEXTS: Dict[str, JobContext] = {}


def _worker(kind: str, job: JobConfig, index: int):
    """Process-pool entry point; each worker builds its context once per job."""
    key = json.dumps(asdict(job), sort_keys=True, default=str)
    ctx = _WORKER_CONTEXTS.get(key)
    if ctx is None:
        ctx = _WORKER_CONTEXTS[key] = prepare(job, kind)
    return evaluate(kind, ctx, ctx.characters[index])


def exit_code_for(results: List[Any]) -> int:
    codes = [r.exit_code for r in results if isinstance(r, ErrorReport)]
    if any(isinstance(r, FEReport) and not r.passed for r in results):
        codes.append(NumericalError.exit_code)
    return max(codes, default=0)


def run_batch(kind: str, job: JobConfig, renderer: Renderer) -> int:
    """Run ``kind`` for every character of the job and write one record each."""
    stream = open_report_stream(job.out)
    writer = ReportWriter(stream, job.echo(), job.prec)
    try:
        try:
            ctx = prepare(job, kind)
        except BianchiError as e:
            writer.write(ErrorReport(kind, e.error_code, e.message, e.exit_code))
            raise
        renderer.render_info(f"{ctx.form.label}: {len(ctx.characters)} character(s), precision {job.prec}")
        if job.workers > 1 and len(ctx.characters) > 1:
            with ProcessPoolExecutor(max_workers=job.workers) as pool:
                results = list(pool.map(functools.partial(_worker, kind, job), range(len(ctx.characters))))
        else:
            results = [evaluate(kind, ctx, psi) for psi in ctx.characters]
        writer.write_all(results)
    finally:
        if stream is not sys.stdout:
            stream.close()

    errors = [r for r in results if isinstance(r, ErrorReport)]
    for error in errors:
        renderer.render_error(f"ERROR_CODE: {error.error_code}\nERROR_MESSAGE: {error.job}: {error.message}")
    if kind == "lvalue":
        renderer.render_lvalues([r for r in results if isinstance(r, LValueReport)])
    else:
        checks = [r for r in results if isinstance(r, FEReport)]
        renderer.render_fe(checks, title=kind)
        renderer.render_summary(checks, errors)
    return exit_code_for(results)


# ─── Options ────────────────────────────────────────────────────────────────

def logging_options(f):
    f = click.option("--quiet", "-q", is_flag=True, help="Only print errors")(f)
    f = click.option("--verbose", "-v", is_flag=True, help="Debug logging (truncations, certificates, cache hits)")(f)
    return f


def job_options(f):
    """Flags shared by every job command; each overrides the job file."""
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON job file"),
        click.option("--field", "field_d", type=int, help="d with K = Q(sqrt(d)) of class number one"),
        click.option("--newform", help="Newform file or name under data/newforms (e.g. 11a)"),
        click.option("--chars", multiple=True, help="Character file or name under data/characters (repeatable)"),
        click.option("--prec", type=int, help="Working precision in decimal digits"),
        click.option("--split-point", help="Split point c for the Mellin integral"),
        click.option("--fricke-sign", help="+1, -1, 'classical' or 'estimate'"),
        click.option("--prime", type=int, help="Rational prime p for stabilisation"),
        click.option("--stabilise", type=click.Choice(["plus", "minus"], case_sensitive=False),
                     help="Root choice at every prime above p (plus = smaller valuation)"),
        click.option("--out", type=click.Path(dir_okay=False), help="Append JSON-lines reports here (default stdout)"),
        click.option("--cache-dir", type=click.Path(file_okay=False), help="Coefficient store directory"),
        click.option("--tolerance", help="Pass/fail threshold on the relative residual"),
        click.option("--workers", type=int, help="Process pool size (1 runs in-process)"),
        click.option("--bound", type=int, help="Coefficients required up to this prime"),
        click.option("--flip-sign", is_flag=True, default=None, help="Negate epsilon (negative control)"),
    ]
    for option in reversed(options):
        f = option(f)
    return logging_options(f)


def job_from_options(options: Dict[str, Any]) -> JobConfig:
    overrides = {
        "field": options["field_d"],
        "newform": options["newform"],
        "characters": list(options["chars"]) or None,
        "prec": options["prec"],
        "split_point": options["split_point"],
        "fricke_sign": options["fricke_sign"],
        "prime": options["prime"],
        "stabilise": options["stabilise"],
        "out": options["out"],
        "cache_dir": options["cache_dir"],
        "tolerance": options["tolerance"],
        "workers": options["workers"],
        "bound": options["bound"],
        "flip_sign": options["flip_sign"] or None,
    }
    return load_job(options["config_path"], overrides)


def _batch_command(kind: str, options: Dict[str, Any]):
    renderer = Renderer(quiet=options["quiet"])
    setup_logging(options["verbose"], options["quiet"])
    try:
        job = job_from_options(options)
        code = run_batch(kind, job, renderer)
    except Exception as e:
        fail(e, renderer)
    sys.exit(code)


# ─── Commands ───────────────────────────────────────────────────────────────

@click.group()
@click.version_option(version=config.VERSION)
def cli():
    """Twisted L-values of base-change Bianchi modular forms and their functional equations."""
    pass


@cli.command()
@click.argument("files", nargs=-1, required=True)
@click.option("--bound", type=int, help="Require a_ell for every prime up to this bound")
@click.option("--field", "field_d", type=int, help="Warm the store with the base change to this field")
@click.option("--warm-norm", type=int, default=100, show_default=True, help="Largest ideal norm to warm")
@click.option("--cache-dir", type=click.Path(file_okay=False), help="Coefficient store directory")
@click.option("--out", type=click.Path(dir_okay=False), help="Append JSON-lines reports here (default stdout)")
@logging_options
def ingest(files, bound, field_d, warm_norm, cache_dir, out, verbose, quiet):
    """
    Validate newform files and store them.

    Examples:
        bianchi ingest 11a
        bianchi ingest data/newforms/37a.json --bound 100 --field -1
    """
    renderer = Renderer(quiet=quiet)
    setup_logging(verbose, quiet)
    store = CoefficientStore(cache_dir) if cache_dir else CoefficientStore()
    stream = open_report_stream(out)
    writer = ReportWriter(stream, {"files": list(files), "bound": bound, "field_d": field_d})
    try:
        for name in files:
            data = load_newform(name, bound, strict=False)
            result = validate_newform(data)
            if not result:
                for error in result.errors:
                    renderer.render_error(f"{data.label}: {error}")
                raise MalformedSpec(f"{data.label}: {len(result.errors)} validation error(s)", error_code="INVALID_NEWFORM")
            stored = store.put_newform(data.label, data.to_record())
            warmed = 0
            if field_d is not None:
                form = base_change(data, ImagQuadField(field_d), store=store)
                for ideal in ideals_up_to_norm(form.field, min(warm_norm, data.bound)):
                    form.coefficient(ideal)
                    warmed += 1
            writer.write({
                "kind": "ingest",
                "form": data.label,
                "stored": stored,
                "coefficients": len(data.coefficients),
                "bound": data.bound,
                "warnings": result.warnings,
                "warmed": warmed,
            })
            for warning in result.warnings:
                renderer.render_warning(warning)
            if stored:
                renderer.render_success(f"{data.label}: {len(data.coefficients)} coefficients stored")
            else:
                renderer.render_info(f"{data.label}: already in the store")
    except Exception as e:
        if isinstance(e, BianchiError):
            writer.write(ErrorReport("ingest", e.error_code, e.message, e.exit_code))
        fail(e, renderer)
    finally:
        if stream is not sys.stdout:
            stream.close()


@cli.command()
@job_options
def lvalue(**options):
    """
    Compute Lambda(F, psi) for every character of the job.

    Examples:
        bianchi lvalue --field -1 --newform 11a
        bianchi lvalue --config data/jobs/batch_mod3.json
    """
    _batch_command("lvalue", options)


@cli.command(name="check-fe")
@job_options
def check_fe(**options):
    """
    Check the complex functional equation for every character.

    Examples:
        bianchi check-fe --config data/jobs/acceptance_qi_11a.json
        bianchi check-fe --field -1 --newform 11a --flip-sign
    """
    _batch_command("check-fe", options)


@cli.command()
@job_options
def stabilise(**options):
    """
    Compare Lambda of the p-stabilisation with Z * Lambda of the base change.

    Examples:
        bianchi stabilise --field -1 --newform 11a --prime 5
    """
    _batch_command("stabilise", options)


@cli.command(name="check-padic-fe")
@job_options
def check_padic_fe(**options):
    """
    Check the p-adic functional equation at characters of conductor dividing p^oo.

    Examples:
        bianchi check-padic-fe --config data/jobs/padic_qi_11a_p5.json
    """
    _batch_command("check-padic-fe", options)


@cli.command(name="fricke-sign")
@job_options
def fricke_sign(**options):
    """
    Determine epsilon(n) from the functional equation.

    Examples:
        bianchi fricke-sign --field -1 --newform 11a
    """
    renderer = Renderer(quiet=options["quiet"])
    setup_logging(options["verbose"], options["quiet"])
    try:
        job = job_from_options(options)
        field, newform, characters = parse_all(job)
        store = CoefficientStore(job.cache_dir) if job.cache_dir else CoefficientStore()
        form = base_change(newform, field, store=store)
        estimate = fricke_sign_estimate(form, job.prec, characters or None)
        record = {
            "kind": "fricke-sign",
            "form": form.label,
            "sign": estimate.sign,
            "confidence": mpmath.nstr(estimate.confidence, 5),
            "residuals": {str(s): mpmath.nstr(r, 5) for s, r in sorted(estimate.residuals.items())},
            "characters": list(estimate.characters),
            "classical": estimate.classical,
            "agrees_with_classical": estimate.agrees_with_classical,
        }
        stream = open_report_stream(job.out)
        try:
            ReportWriter(stream, job.echo(), job.prec).write(record)
        finally:
            if stream is not sys.stdout:
                stream.close()
        renderer.render_table(
            "Fricke sign",
            ["form", "sign", "confidence", "residual +1", "residual -1", "classical"],
            [(form.label, f"{estimate.sign:+d}", estimate.confidence, estimate.residuals.get(1),
              estimate.residuals.get(-1), estimate.classical)],
        )
        code = 0
        if estimate.agrees_with_classical is False:
            renderer.render_warning("the estimated sign disagrees with the Atkin-Lehner data")
            code = NumericalError.exit_code
    except Exception as e:
        fail(e, renderer)
    sys.exit(code)


@cli.command()
@click.option("--j", "twist", type=int, default=0, show_default=True, help="Use the trivial character of type (j, j)")
@job_options
def oracle(twist, **options):
    """
    Cross-check Lambda(F, trivial) against L(f, j+1) L(f x chi_D, j+1).

    Examples:
        bianchi oracle --field -1 --newform 11a
        bianchi oracle --field -1 --newform 5.4.a --j 1
    """
    renderer = Renderer(quiet=options["quiet"])
    setup_logging(options["verbose"], options["quiet"])
    try:
        job = job_from_options(options)
        ctx = prepare(job, "oracle")
        psi = make_character(ctx.field, 1, (twist, twist), label=f"trivial({twist},{twist})")
        computed = lambda_value(ctx.form, psi, job.prec, _split_point(job))
        expected = base_change_lambda_oracle(ctx.newform, ctx.field, twist, job.prec)
        reference = LValueReport(
            form=expected.label,
            character=psi.id,
            value=mpmath.mpc(expected.value),
            split_point=None,
            fricke_sign_used=None,
            certified_abs_error=expected.abs_error,
            terms_used=expected.terms_used,
            precision=job.prec,
            path="oracle",
            magnitude=computed.magnitude,
        )
        one = mpmath.mpc(1)
        residual, absolute = compare_sides(computed, reference, one, one, one, job.prec)
        tolerance = relative_tolerance(job.prec) if job.tolerance is None else mpmath.mpf(job.tolerance)
        report = FEReport(computed, reference, one, residual, tolerance, one, one, absolute, "oracle")
        report.extra["root_number"] = expected.root_number
        stream = open_report_stream(job.out)
        try:
            ReportWriter(stream, job.echo(), job.prec).write(report)
        finally:
            if stream is not sys.stdout:
                stream.close()
        renderer.render_fe([report], title="oracle")
        renderer.render_summary([report])
        code = exit_code_for([report])
    except Exception as e:
        fail(e, renderer)
    sys.exit(code)


@cli.command()
@job_options
def slopes(**options):
    """
    Hecke roots, slopes and the small-slope test at every prime above p.

    Examples:
        bianchi slopes --field -1 --newform 11a --prime 3
    """
    renderer = Renderer(quiet=options["quiet"])
    setup_logging(options["verbose"], options["quiet"])
    try:
        job = job_from_options(options)
        ctx = prepare(job, "slopes")
        form = ctx.form
        if not isinstance(form, StabilisedForm):
            raise ConfigError("slopes needs --prime")
        classification = slope_class(form)
        bounds = dict(classification.bounds)
        primes = []
        for prime in form.primes:
            alpha, beta = form.alpha(prime), form.beta(prime)
            primes.append({
                "prime": repr(prime),
                "lambda": alpha.trace,
                "alpha": str(alpha),
                "beta": str(beta),
                "slope": str(alpha.valuation),
                "bound": str(bounds[prime]),
            })
        record = {"kind": "slopes", "form": form.label, "p": form.p, "primes": primes, "class": classification.kind.value}
        stream = open_report_stream(job.out)
        try:
            ReportWriter(stream, job.echo(), job.prec).write(record)
        finally:
            if stream is not sys.stdout:
                stream.close()
        renderer.render_table(
            f"Slopes of {form.label} at {form.p} ({classification.kind.value})",
            ["prime", "a_P", "alpha", "slope", "bound"],
            [(p["prime"], p["lambda"], p["alpha"], p["slope"], p["bound"]) for p in primes],
        )
    except Exception as e:
        fail(e, renderer)


if __name__ == "__main__":
    cli()
