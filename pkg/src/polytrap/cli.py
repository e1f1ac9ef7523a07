"""CLI principal do projeto polytrap."""

from __future__ import annotations

import json
import os
import sys
from contextlib import contextmanager
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, TextIO

import click
import typer
from rich.console import Console

from polytrap import __version__
from polytrap.config import ConfigManager, Settings
from polytrap.crosschecks import run_crosschecks
from polytrap.dynamics import (
    build_graph,
    export_edges,
    format_ext_point,
    graph_summary,
    orbit,
    periodic_points_ext,
    trajectory,
    write_summary,
)
from polytrap.errors import BudgetExceeded, InvalidConfig, InvalidInput, PolytrapError, SizeBoundExceeded
from polytrap.modfield import format_poly_t, make_ext_field, parse_modulus, primes_in_range, require_prime
from polytrap.poly import BUILTIN_MAPS, builtin, resolve_map
from polytrap.reports import (
    CONTROL_SCHEMA,
    GRAPH_FILE_SCHEMA,
    GRAPH_SUMMARY_SCHEMA,
    REPORT_SCHEMA,
    SEARCH_SUMMARY_SCHEMA,
    VERDICT_SCHEMA,
    build_manifest,
    report_outcomes,
    reports_payload,
    reports_table,
    schema_text,
    summary_table,
    write_json_report,
)
from polytrap.search import SearchConfig, SearchSummary, control_run, iter_verdicts
from polytrap.traps import TrapReport, all_hold, verify_all
from polytrap.utils import RunContext, active_log_file, available_log_files, logger
from polytrap.validators import build_point, check_plane_budget, parse_primes

app = typer.Typer(add_completion=False, help="Verificacao de armadilhas de mapas polinomiais sobre corpos finitos")
console = Console()

EXIT_OK = 0
EXIT_CLAIM_FAILED = 1
EXIT_INVALID_INPUT = 2
EXIT_SIZE_EXCEEDED = 3
EXIT_INTERRUPTED = 130

SIZE_GUIDANCE = "Dica: use `polytrap orbit` para orbitas individuais ou `verify --sampled` para amostragem."
CONTROL_PRIME_LIMIT = 31

_INVALID_INPUT_NAMES = tuple(cls.__name__ for cls in InvalidInput.__subclasses__()) + ("InvalidInput",)
_SIZE_NAMES = ("SizeBoundExceeded", "BudgetExceeded")


def _compact(schema: Dict[str, Any]) -> str:
    return json.dumps(schema, separators=(",", ":"), sort_keys=True)


@contextmanager
def _guard(command: str) -> Iterator[None]:
    """Traduz excecoes da biblioteca em codigos de saida."""
    try:
        yield
    except (typer.Exit, click.ClickException):
        raise
    except InvalidInput as exc:
        logger.warning(f"{command}: entrada invalida: {exc}")
        typer.secho(f"✗ {exc}", fg=typer.colors.RED, err=True)
        raise typer.Exit(code=EXIT_INVALID_INPUT)
    except (SizeBoundExceeded, BudgetExceeded) as exc:
        logger.warning(f"{command}: limite excedido: {exc}")
        typer.secho(f"✗ {exc}", fg=typer.colors.RED, err=True)
        typer.echo(SIZE_GUIDANCE, err=True)
        raise typer.Exit(code=EXIT_SIZE_EXCEEDED)
    except PolytrapError as exc:
        logger.error(f"{command}: {type(exc).__name__}: {exc}")
        typer.secho(f"✗ {exc}", fg=typer.colors.RED, err=True)
        raise typer.Exit(code=EXIT_CLAIM_FAILED)
    except KeyboardInterrupt:
        logger.warning(f"Comando '{command}' interrompido pelo usuario")
        typer.secho(f"\n⚠ Comando '{command}' interrompido", fg=typer.colors.YELLOW, err=True)
        raise typer.Exit(code=EXIT_INTERRUPTED)
    except Exception as exc:
        logger.error(f"Erro fatal no comando '{command}': {exc}", exc_info=True)
        typer.secho(f"\n✗ Erro fatal no comando '{command}': {exc}", fg=typer.colors.RED, bold=True, err=True)
        raise typer.Exit(code=EXIT_CLAIM_FAILED)


def _run_ctx(ctx: typer.Context) -> RunContext:
    return ctx.obj or RunContext()


def _resolve_jobs(jobs: int) -> int:
    if jobs < 0:
        raise InvalidInput(f"--jobs invalido: {jobs}")
    return jobs or os.cpu_count() or 1


def _version_callback(value: bool) -> None:
    """Imprime a versao e encerra imediatamente."""

    if value:
        typer.echo(f"polytrap {__version__}")
        raise typer.Exit()


@app.callback()
def main(
    ctx: typer.Context,
    jobs: Optional[int] = typer.Option(
        None, "--jobs", "-j", envvar="POLYTRAP_JOBS", help="Processos de trabalho (0 = todos os nucleos)"
    ),
    seed: Optional[int] = typer.Option(None, "--seed", help="Semente dos modos amostrados"),
    reproducible: bool = typer.Option(False, "--reproducible", help="Omite horarios e tempos dos JSON gerados"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="Arquivo YAML/JSON com secao 'settings'"),
    version: Optional[bool] = typer.Option(
        None,
        "--version",
        "-V",
        is_eager=True,
        callback=_version_callback,
        help="Mostra a versao do CLI e sai",
    ),
) -> None:
    """Opcoes globais compartilhadas por todos os subcomandos."""

    with _guard("polytrap"):
        try:
            settings = Settings.from_env()
            if config is not None:
                if not config.is_file():
                    raise InvalidConfig(f"arquivo de configuracao nao encontrado: {config}")
                settings = ConfigManager(config).settings(settings)
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from exc
        if jobs is not None:
            jobs = _resolve_jobs(jobs)
    ctx.obj = RunContext.from_settings(settings, jobs=jobs, seed=seed, reproducible=reproducible)


# ============================================================================
# verify
# ============================================================================


def _reports_exit_code(reports: List[TrapReport]) -> int:
    errors = [r.error for r in reports if r.error]
    if any(e.startswith(_SIZE_NAMES) for e in errors):
        return EXIT_SIZE_EXCEEDED
    if any(e.startswith(_INVALID_INPUT_NAMES) for e in errors):
        return EXIT_INVALID_INPUT
    return EXIT_OK if all_hold(reports) else EXIT_CLAIM_FAILED


@app.command(epilog="Esquema JSON (--json): " + _compact(REPORT_SCHEMA))
def verify(
    ctx: typer.Context,
    map_spec: str = typer.Argument(..., metavar="MAP", help=f"{', '.join(BUILTIN_MAPS)}, all ou arquivo de mapa"),
    primes: str = typer.Option(..., "--primes", "-p", help="Lista ou faixa: 7 | 2,3,5 | 2..199"),
    exhaustive: bool = typer.Option(False, "--exhaustive", help="Exige grafo completo (sem amostragem)"),
    sampled: bool = typer.Option(False, "--sampled", help="Forca o modo amostrado"),
    stream: bool = typer.Option(False, "--stream", help="power_trap: varre o plano inteiro em blocos, sem grafo"),
    sample_size: Optional[int] = typer.Option(None, "--sample-size", help="Pontos no modo amostrado"),
    ratio: bool = typer.Option(False, "--ratio", help="Inclui a recorrencia de razao do mapa"),
    jobs: Optional[int] = typer.Option(
        None, "--jobs", "-j", envvar="POLYTRAP_JOBS", help="Processos de trabalho (0 = todos os nucleos)"
    ),
    seed: Optional[int] = typer.Option(None, "--seed", help="Semente dos modos amostrados"),
    json_out: Optional[Path] = typer.Option(None, "--json", help="Grava relatorio JSON com manifesto"),
) -> None:
    """Verifica as afirmacoes de armadilha para cada primo."""

    run = _run_ctx(ctx)
    with _guard("verify"):
        if exhaustive and sampled:
            raise InvalidInput("--exhaustive e --sampled sao mutuamente exclusivos")
        if stream and (exhaustive or sampled):
            raise InvalidInput("--stream exclui --exhaustive e --sampled")
        prime_list = parse_primes(primes)
        if map_spec == "all":
            maps, include_ratio = None, True
        else:
            fmap = resolve_map(map_spec, coefficient_bound=run.coefficient_bound)
            maps, include_ratio = [fmap], ratio
        if stream and (map_spec == "all" or maps[0] != builtin("power_trap")):
            raise InvalidInput("--stream so se aplica a power_trap")
        run = replace(
            run,
            jobs=_resolve_jobs(jobs) if jobs is not None else run.jobs,
            seed=run.seed if seed is None else seed,
            force_sampled=sampled,
            stream_plane=stream,
            sampled_fallback=run.sampled_fallback and not exhaustive,
            sample_size=sample_size or run.sample_size,
        )
        mode = "sampled" if sampled else "streamed" if stream else "exhaustive" if exhaustive else "auto"
        manifest = build_manifest(
            "verify", {"map": map_spec, "primes": prime_list, "mode": mode, "ratio": include_ratio},
            run.seed, run.reproducible,
        )
        if not prime_list:
            typer.secho("⚠ Nenhum primo na faixa informada", fg=typer.colors.YELLOW)
        reports = verify_all(prime_list, run, maps, include_ratio)

    console.print(reports_table(reports))
    for r in reports:
        if r.note:
            typer.echo(r.note)
        if r.error:
            typer.secho(f"✗ {r.map_name} p={r.p}: {r.error}", fg=typer.colors.RED)
        elif not r.holds:
            typer.secho(f"✗ {r.claim_id.value} {r.map_name} p={r.p}: testemunha {r.witness}", fg=typer.colors.RED)

    if json_out is not None:
        write_json_report(json_out, manifest.finish(report_outcomes(reports)), reports_payload(reports, run.reproducible))
        typer.echo(f"Relatorio gravado em {json_out}")

    code = _reports_exit_code(reports)
    if code == EXIT_OK:
        typer.secho(f"✓ {len(reports)} verificacoes conferem", fg=typer.colors.GREEN, bold=True)
    raise typer.Exit(code=code)


# ============================================================================
# orbit / graph / ext
# ============================================================================


@app.command(name="orbit")
def orbit_cmd(
    ctx: typer.Context,
    map_spec: str = typer.Argument(..., metavar="MAP"),
    p: int = typer.Argument(..., help="Primo"),
    coords: List[int] = typer.Argument(..., help="Coordenadas do ponto inicial"),
    max_steps: Optional[int] = typer.Option(None, "--max-steps", help="Limite de cauda + ciclo (padrao p^n)"),
    as_json: bool = typer.Option(False, "--json", help="Imprime o resumo em JSON"),
) -> None:
    """Segue a orbita de um ponto com memoria constante e anota cauda e ciclo."""

    run = _run_ctx(ctx)
    with _guard("orbit"):
        require_prime(p)
        fmap = resolve_map(map_spec, coefficient_bound=run.coefficient_bound)
        start = build_point(fmap, coords, p)
        if max_steps is not None and max_steps < 1:
            raise InvalidInput(f"--max-steps deve ser >= 1 (recebido {max_steps})")
        summary = orbit(fmap, start, p ** fmap.num_vars if max_steps is None else max_steps)
        # cada ponto distinto uma vez; a reentrada vai na linha de anotacao
        points = trajectory(fmap, start, summary.tail_length + summary.cycle_length - 1)

    if as_json:
        typer.echo(json.dumps({
            "map": fmap.label(),
            "p": p,
            "start": list(start.coords),
            "tail_length": summary.tail_length,
            "cycle_length": summary.cycle_length,
            "hits_target": summary.hits_target,
            "steps_to_target": summary.steps_to_target,
        }, sort_keys=True))
        return

    mu, lam = summary.tail_length, summary.cycle_length
    typer.echo(" -> ".join(str(q) for q in points))
    typer.echo(f"cauda: {mu}  ciclo: {lam} (reentra em {points[mu]})")
    zero = "(" + ",".join("0" * fmap.num_vars) + ")"
    if summary.hits_target:
        typer.secho(f"✓ reaches {zero} in {summary.steps_to_target} steps", fg=typer.colors.GREEN)
    else:
        typer.secho(f"⚠ never reaches {zero}; cycle detected (length {lam})", fg=typer.colors.YELLOW)


@app.command(
    epilog="Esquema JSON (--export summary): "
    + _compact(GRAPH_SUMMARY_SCHEMA)
    + " | com -o: "
    + _compact(GRAPH_FILE_SCHEMA)
)
def graph(
    ctx: typer.Context,
    map_spec: str = typer.Argument(..., metavar="MAP"),
    p: int = typer.Argument(..., help="Primo"),
    export: Optional[str] = typer.Option(None, "--export", help="edges | summary"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Arquivo de saida"),
) -> None:
    """Constroi o grafo funcional completo modulo p."""

    run = _run_ctx(ctx)
    with _guard("graph"):
        if export not in (None, "edges", "summary"):
            raise InvalidInput(f"--export invalido: {export} (use edges ou summary)")
        require_prime(p)
        fmap = resolve_map(map_spec, coefficient_bound=run.coefficient_bound)
        ok, message = check_plane_budget(p, fmap.num_vars, run)
        if not ok:
            typer.secho(f"✗ {message}", fg=typer.colors.RED, err=True)
            typer.echo(SIZE_GUIDANCE, err=True)
            raise typer.Exit(code=EXIT_SIZE_EXCEEDED)
        result = build_graph(fmap, p, run)

    if export is None:
        console.print(summary_table(graph_summary(result, fmap)))
        return

    if output is None:
        if export == "edges":
            export_edges(result, sys.stdout)
        else:
            write_summary(result, sys.stdout, fmap)
        return

    if export == "edges":
        with output.open("w") as handle:
            export_edges(result, handle)
    else:
        manifest = build_manifest("graph", {"map": map_spec, "p": p}, run.seed, run.reproducible)
        write_json_report(output, manifest.finish(), {"summary": graph_summary(result, fmap)})
    typer.echo(f"Exportado para {output}")


@app.command()
def ext(
    ctx: typer.Context,
    map_spec: str = typer.Argument(..., metavar="MAP"),
    p: int = typer.Argument(..., help="Caracteristica"),
    k: int = typer.Argument(..., help="Grau da extensao"),
    modulus: Optional[str] = typer.Option(None, "--modulus", help="Polinomio monico irredutivel em t"),
) -> None:
    """Lista os pontos periodicos nao nulos sobre GF(p^k)."""

    run = _run_ctx(ctx)
    with _guard("ext"):
        fmap = resolve_map(map_spec, coefficient_bound=run.coefficient_bound)
        coeffs = parse_modulus(modulus, p, k) if modulus else None
        field = make_ext_field(p, k, coeffs, bound=run.ext_enumeration_bound)
        periodic = periodic_points_ext(fmap, field, run)

    cycles = []
    i = 0
    while i < len(periodic):
        period = periodic[i][1]
        cycles.append([coords for coords, _ in periodic[i:i + period]])
        i += period
    nonzero = [c for c in cycles if not (len(c) == 1 and all(x.is_zero() for x in c[0]))]

    typer.echo(f"GF({p}^{k}) com modulo {format_poly_t(field.modulus)}")
    if not nonzero:
        typer.echo("no nonzero periodic points")
        return
    for cycle in nonzero:
        typer.echo(f"{len(cycle)}-cycle: " + " -> ".join(format_ext_point(c) for c in cycle))


# ============================================================================
# search
# ============================================================================


def _emit(obj: Dict[str, Any], handle: Optional[TextIO]) -> None:
    text = json.dumps(obj, sort_keys=True)
    if handle is None:
        typer.echo(text)
    else:
        handle.write(text + "\n")


@app.command(
    epilog="Esquema JSON de cada veredicto: "
    + _compact(VERDICT_SCHEMA)
    + " | controle: "
    + _compact(CONTROL_SCHEMA)
    + " | resumo final: "
    + _compact(SEARCH_SUMMARY_SCHEMA)
)
def search(
    ctx: typer.Context,
    config: Optional[Path] = typer.Argument(None, help="Configuracao YAML/JSON (padrao: valores de fabrica)"),
    show_all: bool = typer.Option(False, "--all", help="Tambem transmite candidatos rejeitados"),
    control: bool = typer.Option(False, "--control", help="Roda antes o controle F_at (atrator unico, p <= 31)"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Grava as linhas JSON em arquivo"),
) -> None:
    """Busca limitada de mapas com dois pontos fixos; transmite veredictos em JSON lines."""

    run = _run_ctx(ctx)
    code = EXIT_OK
    with _guard("search"):
        cfg = SearchConfig.from_file(config) if config else SearchConfig()
        handle = output.open("w") if output else None
        try:
            if control:
                for result in control_run(primes_in_range(2, CONTROL_PRIME_LIMIT), run):
                    _emit({"control": "additive_trap", **result.to_json()}, handle)
                    if not result.sorts_correctly:
                        code = EXIT_CLAIM_FAILED
            summary = SearchSummary()
            for verdict in iter_verdicts(cfg, run):
                summary.record(verdict)
                if show_all or verdict.overall == "pass":
                    _emit(verdict.to_json(), handle)
            _emit(summary.finish(cfg).to_json(), handle)
        finally:
            if handle is not None:
                handle.close()
    if output is not None:
        typer.echo(f"Veredictos gravados em {output}", err=True)
    raise typer.Exit(code=code)


# ============================================================================
# Utilitarios
# ============================================================================


@app.command()
def selfcheck(ctx: typer.Context) -> None:
    """Confere a biblioteca contra oraculos de forca bruta."""

    if not run_crosschecks(_run_ctx(ctx)):
        raise typer.Exit(code=EXIT_CLAIM_FAILED)


@app.command()
def schema(
    name: str = typer.Argument(..., help="report | graph | graph-file | verdict | control | search-summary")
) -> None:
    """Imprime um dos esquemas JSON publicados."""

    schemas = {
        "report": REPORT_SCHEMA,
        "graph": GRAPH_SUMMARY_SCHEMA,
        "graph-file": GRAPH_FILE_SCHEMA,
        "verdict": VERDICT_SCHEMA,
        "control": CONTROL_SCHEMA,
        "search-summary": SEARCH_SUMMARY_SCHEMA,
    }
    if name not in schemas:
        typer.secho(f"✗ esquema desconhecido: {name}", fg=typer.colors.RED, err=True)
        raise typer.Exit(code=EXIT_INVALID_INPUT)
    typer.echo(schema_text(schemas[name]))


@app.command()
def version() -> None:
    """Mostra a versao do CLI."""

    typer.echo(f"polytrap {__version__}")


@app.command()
def generate_config(
    output: str = typer.Option("polytrap-search.yaml", "--output", "-o", help="Arquivo de saida"),
) -> None:
    """Gera template da configuracao de busca (YAML/JSON)."""

    path = ConfigManager.create_template(output)
    typer.echo(f"Template gravado em {path}")


debug_app = typer.Typer(help="Ferramentas de depuracao e investigacao de logs")
app.add_typer(debug_app, name="debug")


@debug_app.command(name="logs")
def debug_logs(
    lines: int = typer.Option(200, "--lines", "-n", help="Quantidade de linhas finais por arquivo"),
    pager: bool = typer.Option(False, "--pager/--no-pager", help="Exibe com paginador"),
) -> None:
    """Mostra os logs do polytrap."""

    logs = available_log_files()
    if not logs:
        typer.secho("Nenhum log encontrado", fg=typer.colors.YELLOW)
        return

    typer.echo(f"Log ativo: {active_log_file()}")
    chunks = []
    for path in logs:
        try:
            data = "\n".join(path.read_text().splitlines()[-lines:])
        except OSError as exc:
            data = f"[erro ao ler {path}: {exc}]"
        chunks.append(f"===== {path} =====\n{data}")

    output = "\n\n".join(chunks)
    if pager:
        with console.pager():
            console.print(output, markup=False, highlight=False)
    else:
        typer.echo(output)


def main_entrypoint() -> None:
    """Ponto de entrada para console_scripts."""
    app()


if __name__ == "__main__":
    main_entrypoint()
