#!/usr/bin/env python3
"""
hardness-chain CLI

Exit codes: 0 satisfiable / feasible / verified, 1 unsatisfiable /
infeasible / no-instance / not verified, 2 usage or data error.
"""

import functools
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import click
from rich.console import Console
from rich.panel import Panel
from rich.progress import track
from rich.table import Table

from . import __version__
from .config.logging_config import setup_logging
from .config.settings import COEFF_MODES, RESIDUE_MODES, Settings
from .core.corpus import generate_corpus
from .core.errors import DimensionMismatch, HardnessChainError
from .core.mrd import NoInstance, mrd_witness_from_z, reduce_qc_to_mrd, solve_mrd, verify_mrd
from .core.pipeline import PipelineOptions, PipelineResult, ReductionPipeline, corpus_audit_frame, growth_report
from .core.qc_reduction import AuditReport, audit, check_uniqueness, reduce_sat_to_qc, solve_qc_brute, verify_qc
from .core.sat import Assignment, eval_formula, simplify, solve_brute
from .core.stoch_ilp import (
    ReductionTag,
    Solution,
    encode_binary,
    ilp_parameters,
    reduce_mrd_to_ilp,
    solve_exhaustive,
    solve_reduced,
    verify_solution,
)
from .parsers import DimacsParser, DocumentParser, ILPParser
from .utils import documents
from .utils.data_utils import format_magnitude
from .utils.export_utils import ExportManager

console = Console()

KINDS = ("cnf", "qc", "mrd", "2ssilp")


def handle_errors(func: Callable) -> Callable:
    """Report library and file errors in red and exit with status 2"""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except (HardnessChainError, OSError) as e:
            console.print(f"[red]Error: {e}[/red]")
            sys.exit(2)

    return wrapper


def coeff_mode_option(func: Callable) -> Callable:
    return click.option("--coeff-mode", type=click.Choice(COEFF_MODES), default=None,
                        help="Linear-form coefficients (default from settings: derived)")(func)


def residue_mode_option(func: Callable) -> Callable:
    return click.option("--residue-mode", type=click.Choice(RESIDUE_MODES), default=None,
                        help="Residues kept per modulus (default from settings: full)")(func)


def seed_option(func: Callable) -> Callable:
    return click.option("--seed", type=int, default=None, help="Seed for random probes and corpora")(func)


def brute_cap_option(func: Callable) -> Callable:
    return click.option("--brute-cap", type=click.IntRange(min=1), default=None,
                        help="Largest value scanned by brute-force oracles")(func)


@click.group()
@click.version_option(version=__version__)
@click.option("--config", "-c", type=click.Path(exists=True, dir_okay=False),
              help="Path to configuration file")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose output")
@click.pass_context
def main(ctx, config, verbose):
    """hardness-chain - 3-SAT -> QC -> MRD -> 2-stage stochastic ILP reductions"""
    ctx.ensure_object(dict)
    settings = Settings(config)
    setup_logging(settings.logging, verbose)
    ctx.obj["settings"] = settings
    ctx.obj["verbose"] = verbose


def _settings(ctx) -> Settings:
    return ctx.obj["settings"]


def _options(ctx, coeff_mode=None, residue_mode=None, encode=None, seed=None, brute_cap=None) -> PipelineOptions:
    options = PipelineOptions.from_settings(_settings(ctx))
    if coeff_mode:
        options.coeff_mode = coeff_mode
    if residue_mode:
        options.residue_mode = residue_mode
    if encode is not None:
        options.encode = encode
    if seed is not None:
        options.seed = seed
    if brute_cap is not None:
        options.brute_cap = brute_cap
    return options


def _write_document(settings: Settings, document, output: Optional[str]):
    if output:
        path = ExportManager(settings).export(document, "document", output)
        console.print(f"[green]Wrote {path}[/green]")


def _reduction_shaped(ilp) -> bool:
    try:
        ReductionTag.from_ilp(ilp)
    except DimensionMismatch:
        return False
    return True


def _load_qc(settings: Settings, path: str):
    return documents.qc_from_document(DocumentParser(settings, "qc").parse_file(path))


def _load_mrd(settings: Settings, path: str):
    return documents.mrd_from_document(DocumentParser(settings, "mrd").parse_file(path))


@main.command("sat-qc")
@click.argument("input_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "-o", required=True, type=click.Path(), help="Output qc document")
@coeff_mode_option
@click.pass_context
@handle_errors
def sat_qc(ctx, input_file, output, coeff_mode):
    """Reduce a DIMACS formula to a Quadratic Congruences instance"""
    settings = _settings(ctx)
    options = _options(ctx, coeff_mode=coeff_mode)
    formula = DimacsParser(settings).parse_file(input_file)
    simplified = simplify(formula)

    if simplified.num_clauses < 2:
        model = solve_brute(simplified, settings.oracle.max_sat_vars)
        verdict = "satisfiable" if model is not None else "unsatisfiable"
        console.print(f"[yellow]Trivially reduced ({simplified.num_clauses} clause(s)): {verdict}[/yellow]")
        sys.exit(0 if model is not None else 1)

    qc, system = reduce_sat_to_qc(simplified, options.coeff_mode)
    _write_document(settings, documents.qc_document(qc, system), output)
    display_qc(qc, system)


@main.command("qc-mrd")
@click.argument("input_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "-o", required=True, type=click.Path(), help="Output mrd document")
@residue_mode_option
@click.pass_context
@handle_errors
def qc_mrd(ctx, input_file, output, residue_mode):
    """Reduce a QC instance to a Multiple-Residue instance"""
    settings = _settings(ctx)
    options = _options(ctx, residue_mode=residue_mode)
    qc, _ = _load_qc(settings, input_file)
    result = reduce_qc_to_mrd(qc, options.residue_mode)
    _write_document(settings, documents.mrd_document(result, options.residue_mode), output)
    if isinstance(result, NoInstance):
        console.print("[yellow]alpha is a non-residue for some modulus: NoInstance[/yellow]")
        sys.exit(1)
    console.print(f"{len(result.equations)} equations, zeta {format_magnitude(result.zeta)}")


@main.command("mrd-ilp")
@click.argument("input_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "-o", required=True, type=click.Path(), help="Output .2ssilp file")
@click.pass_context
@handle_errors
def mrd_ilp(ctx, input_file, output):
    """Reduce a Multiple-Residue instance to a 2-stage stochastic ILP"""
    settings = _settings(ctx)
    result = _load_mrd(settings, input_file)
    if isinstance(result, NoInstance):
        console.print("[yellow]NoInstance has no ILP counterpart[/yellow]")
        sys.exit(1)
    ilp = reduce_mrd_to_ilp(result)
    path = ExportManager(settings).export(ilp, "2ssilp", output)
    console.print(f"[green]Wrote {path}[/green]")
    display_parameters(ilp_parameters(ilp))


@main.command()
@click.argument("input_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "-o", required=True, type=click.Path(), help="Output .2ssilp file")
@click.pass_context
@handle_errors
def encode(ctx, input_file, output):
    """Apply the binary digit encoding to a 2-stage ILP"""
    settings = _settings(ctx)
    ilp = ILPParser(settings).parse_file(input_file)
    encoded = encode_binary(ilp)
    path = ExportManager(settings).export(encoded.ilp, "2ssilp", output)
    console.print(f"[green]Wrote {path}[/green] (D = {encoded.digit_count})")
    display_parameters(ilp_parameters(encoded.ilp))


@main.command()
@click.argument("kind", type=click.Choice(KINDS))
@click.argument("input_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "-o", type=click.Path(), help="Write the solution as a witness document")
@click.option("--method", type=click.Choice(["auto", "reduced", "exhaustive"]), default="auto",
              help="2ssilp solver: structure-aware scan or box enumeration")
@brute_cap_option
@click.pass_context
@handle_errors
def solve(ctx, kind, input_file, output, method, brute_cap):
    """Solve an instance with the exact desk-scale oracle"""
    settings = _settings(ctx)
    cap = brute_cap or settings.oracle.brute_cap
    witness = None

    if kind == "cnf":
        formula = DimacsParser(settings).parse_file(input_file)
        model = solve_brute(formula, settings.oracle.max_sat_vars)
        if model is not None:
            witness = documents.witness_document("sat", assignment=model.values)
            console.print(f"satisfiable: {' '.join(str(b) for b in model.as_bits())}")
    elif kind == "qc":
        qc, _ = _load_qc(settings, input_file)
        z = solve_qc_brute(qc, cap, chunk=settings.oracle.vector_chunk)
        if z is not None:
            witness = documents.witness_document("qc", z=z)
            console.print(f"z = {z}")
    elif kind == "mrd":
        found = solve_mrd(_load_mrd(settings, input_file), settings.oracle.mrd_search_limit)
        if found is not None:
            z, choice = found
            witness = documents.witness_document("mrd", z=z, choice=choice)
            console.print(f"z = {z}, choice {list(choice)}")
    else:
        ilp = ILPParser(settings).parse_file(input_file)
        if method == "exhaustive" or (method == "auto" and not _reduction_shaped(ilp)):
            solution = solve_exhaustive(ilp, settings.oracle.exhaustive_limit)
        else:
            solution = solve_reduced(ilp, limit=cap, chunk=settings.oracle.vector_chunk)
        if solution is not None:
            witness = documents.witness_document("2ssilp", solution=solution.x)
            console.print(f"x = {list(solution.x)}")

    if witness is None:
        console.print("[yellow]No solution[/yellow]")
        sys.exit(1)
    _write_document(settings, witness, output)


@main.command()
@click.argument("kind", type=click.Choice(KINDS))
@click.argument("input_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--witness", "-w", "witness_file", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Witness document to check")
@click.pass_context
@handle_errors
def verify(ctx, kind, input_file, witness_file):
    """Check a witness against an instance"""
    settings = _settings(ctx)
    witness = DocumentParser(settings, "witness").parse_file(witness_file)

    if kind == "cnf":
        formula = DimacsParser(settings).parse_file(input_file)
        values = documents.witness_assignment(witness)
        ok = len(values) == formula.num_vars and eval_formula(formula, Assignment(values))[0]
    elif kind == "qc":
        qc, _ = _load_qc(settings, input_file)
        ok = verify_qc(qc, documents.witness_z(witness))
    elif kind == "mrd":
        instance = _load_mrd(settings, input_file)
        z = documents.witness_z(witness)
        ok = verify_mrd(instance, z)
        if ok and witness.choice is not None:
            ok = documents.witness_choice(witness) == mrd_witness_from_z(instance, z)
    else:
        ilp = ILPParser(settings).parse_file(input_file)
        x = documents.witness_solution(witness)
        ok = len(x) == ilp.num_columns and verify_solution(ilp, Solution(x))

    if ok:
        console.print("[green]Witness verified[/green]")
        return
    console.print("[red]Witness rejected[/red]")
    sys.exit(1)


@main.command()
@click.argument("input_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "-o", required=True, type=click.Path(file_okay=False), help="Output directory")
@coeff_mode_option
@residue_mode_option
@click.option("--encode/--no-encode", default=None, help="Also apply the binary encoding")
@seed_option
@brute_cap_option
@click.pass_context
@handle_errors
def pipeline(ctx, input_file, output, coeff_mode, residue_mode, encode, seed, brute_cap):
    """Run the whole chain on a DIMACS formula and save every artifact"""
    settings = _settings(ctx)
    options = _options(ctx, coeff_mode, residue_mode, encode, seed, brute_cap)
    runner = ReductionPipeline(settings)

    console.print(Panel(f"[bold blue]Reducing {input_file}[/bold blue]"))
    result = runner.run(Path(input_file), options)
    runner.save_results(result, output)
    display_result(result, ctx.obj.get("verbose", False))
    console.print(f"[green]Results saved to: {output}[/green]")
    sys.exit(result.exit_code)


@main.command("audit")
@click.argument("input_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "-o", type=click.Path(file_okay=False), help="Directory for audit.yaml and audit.txt")
@click.option("--uniqueness/--no-uniqueness", default=True, help="Also check uniqueness of the signed sums")
@coeff_mode_option
@seed_option
@click.pass_context
@handle_errors
def audit_command(ctx, input_file, output, uniqueness, coeff_mode, seed):
    """Audit the QC construction of a DIMACS formula or a qc document"""
    settings = _settings(ctx)
    options = _options(ctx, coeff_mode=coeff_mode, seed=seed)

    if DimacsParser(settings).can_parse(input_file):
        simplified = simplify(DimacsParser(settings).parse_file(input_file))
        qc, system = reduce_sat_to_qc(simplified, options.coeff_mode)
    else:
        qc, system = _load_qc(settings, input_file)
        if system is None:
            raise click.UsageError("the qc document carries no 'system' section to audit")

    report = audit(qc, system, strict=False)
    unique = None
    if uniqueness and system.n + 1 <= settings.oracle.max_sign_bits:
        unique = check_uniqueness(system, settings.audit.uniqueness_samples, options.seed,
                                  settings.oracle.max_sign_bits)
        report.checks["uniqueness"] = unique.holds

    display_audit(report)
    if output:
        exporter = ExportManager(settings)
        exporter.export(documents.audit_document(report), "document", Path(output) / "audit.yaml")
        exporter.export(report, "summary", Path(output) / "audit.txt", title=input_file, uniqueness=unique)
        console.print(f"[green]Audit saved to: {output}[/green]")
    sys.exit(0 if report.passed else 1)


@main.command("gen-corpus")
@click.option("--output", "-o", required=True, type=click.Path(file_okay=False), help="Output directory")
@click.option("--count", type=click.IntRange(min=0), default=None, help="Number of formulas")
@click.option("--num-vars", type=click.IntRange(3, 5), default=None, help="Variables per formula")
@click.option("--num-clauses", type=click.IntRange(1, 6), default=None, help="Clauses per formula")
@seed_option
@click.option("--audit/--no-audit", "run_audit", default=False,
              help="Run the pipeline on every formula and write corpus-audit.csv")
@coeff_mode_option
@residue_mode_option
@click.pass_context
@handle_errors
def gen_corpus(ctx, output, count, num_vars, num_clauses, seed, run_audit, coeff_mode, residue_mode):
    """Generate a seeded corpus of random 3-CNF formulas"""
    settings = _settings(ctx)
    corpus_settings = settings.corpus
    formulas = generate_corpus(
        count if count is not None else corpus_settings.count,
        num_vars or corpus_settings.num_vars,
        num_clauses or corpus_settings.num_clauses,
        seed if seed is not None else corpus_settings.seed,
    )

    exporter = ExportManager(settings)
    output_path = Path(output)
    width = max(3, len(str(len(formulas))))
    for index, formula in enumerate(formulas):
        exporter.export(formula, "cnf", output_path / f"formula-{index:0{width}d}.cnf")
    console.print(f"[green]Wrote {len(formulas)} formulas to {output}[/green]")

    if not run_audit:
        return

    options = _options(ctx, coeff_mode, residue_mode, seed=seed)
    runner = ReductionPipeline(settings)
    results = [runner.run(f, options) for f in track(formulas, description="Reducing corpus...")]
    frame = corpus_audit_frame(results)
    exporter.export(frame, "csv", output_path / "corpus-audit.csv")
    display_growth(growth_report(frame))
    satisfiable = sum(r.satisfiable for r in results)
    failing = [i for i, r in enumerate(results) if not r.all_checks_pass]
    console.print(f"{satisfiable}/{len(results)} satisfiable, formulas with failing checks: {failing or 'none'}")


def display_qc(qc, system):
    """Display the size of a QC instance"""
    table = Table(title="Quadratic Congruences instance")
    table.add_column("Value", style="cyan")
    table.add_column("Size", style="white")
    table.add_row("alpha", format_magnitude(qc.alpha))
    table.add_row("beta", format_magnitude(qc.beta))
    table.add_row("gamma", format_magnitude(qc.gamma))
    table.add_row("primes of beta", str(len(qc.beta_factorization.factors)))
    table.add_row("n = 2m' + l'", str(system.n))
    console.print(table)


def display_parameters(parameters: Dict[str, int]):
    table = Table(title="2-stage ILP parameters")
    table.add_column("Parameter", style="cyan")
    table.add_column("Value", style="white")
    for name, value in parameters.items():
        shown = format_magnitude(value) if abs(value) >= 10 ** 12 else str(value)
        table.add_row(name, shown)
    console.print(table)


def display_audit(report: AuditReport):
    """Display structural checks and the main size values"""
    table = Table(title="Audit")
    table.add_column("Check", style="cyan")
    table.add_column("Result")
    for name, ok in report.checks.items():
        table.add_row(name, "[green]pass[/green]" if ok else "[red]FAIL[/red]")
    console.print(table)

    values = report.values
    console.print(
        f"primes {values.get('num_primes')} (expected {values.get('expected_num_primes')}), "
        f"alpha/beta/gamma bits {values.get('alpha_bits')}/{values.get('beta_bits')}/{values.get('gamma_bits')}, "
        f"grid threshold {values.get('grid_threshold')} vs claimed {values.get('claimed_grid_threshold')}"
    )


def display_result(result: PipelineResult, verbose: bool = False):
    """Display the outcome of one pipeline run"""
    verdict = "satisfiable" if result.satisfiable else "unsatisfiable"
    if result.trivially_reduced:
        console.print(f"[yellow]Trivially reduced: {verdict}[/yellow]")
        return

    table = Table(title=f"Pipeline ({verdict})")
    table.add_column("Layer", style="cyan")
    table.add_column("Check")
    for name, ok in result.layer_checks.items():
        table.add_row(name, "[green]pass[/green]" if ok else "[red]FAIL[/red]")
    console.print(table)

    if result.no_instance:
        console.print("[yellow]QC -> MRD produced NoInstance[/yellow]")
    if result.pair_misses:
        console.print(f"[yellow]pair mode missed residues {result.pair_misses}[/yellow]")
    if verbose and result.audit is not None:
        display_audit(result.audit)


def display_growth(report):
    table = Table(title="Size growth by l+m")
    for column in report.table.columns:
        table.add_column(str(column))
    for _, row in report.table.iterrows():
        table.add_row(*(f"{v:.2f}" if isinstance(v, float) else str(v) for v in row))
    console.print(table)
    flags = ", ".join(f"{name}: {'yes' if ok else 'no'}" for name, ok in report.monotone.items())
    console.print(f"non-decreasing in l+m: {flags}")


if __name__ == "__main__":
    main()
