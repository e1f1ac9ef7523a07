"""Oraculos de forca bruta para auto-verificacao (`polytrap selfcheck`)."""

from __future__ import annotations

from typing import Callable, List, Tuple

import typer

from polytrap.dynamics import build_graph, orbit, periodic_points_ext, point_of_index
from polytrap.errors import PolytrapError
from polytrap.modfield import euler_phi, make_ext_field, mod_pow, mult_order, primes_in_range
from polytrap.poly import BUILTIN_MAPS, builtin
from polytrap.utils import RunContext, logger

ORACLE_PRIME_LIMIT = 31
EXT_SIZE_LIMIT = 256
MOD_POW_EXPONENTS = 65


def _naive_pow(a: int, e: int, p: int) -> int:
    result = 1 % p
    for _ in range(e):
        result = result * a % p
    return result


def _naive_order(a: int, p: int) -> int:
    x, m = a % p, 1
    while x != 1:
        x = x * a % p
        m += 1
    return m


def check_mod_pow(limit: int = ORACLE_PRIME_LIMIT) -> Tuple[bool, str]:
    for p in primes_in_range(2, limit):
        for a in range(p):
            for e in range(MOD_POW_EXPONENTS):
                if mod_pow(a, e, p) != _naive_pow(a, e, p):
                    return False, f"mod_pow({a}, {e}, {p}) diverge"
    return True, f"mod_pow confere com multiplicacao repetida para p <= {limit}, e < {MOD_POW_EXPONENTS}"


def check_mult_order(limit: int = ORACLE_PRIME_LIMIT) -> Tuple[bool, str]:
    for p in primes_in_range(2, limit):
        for a in range(1, p):
            if mult_order(a, p) != _naive_order(a, p):
                return False, f"mult_order({a}, {p}) diverge"
    return True, f"mult_order confere com busca linear para p <= {limit}"


def check_orbit_vs_graph(limit: int = ORACLE_PRIME_LIMIT, ctx: RunContext | None = None) -> Tuple[bool, str]:
    """Cauda/ciclo de Brent (memoria constante) contra o grafo funcional."""
    checked = 0
    for name in BUILTIN_MAPS:
        fmap = builtin(name)
        for p in primes_in_range(2, limit):
            graph = build_graph(fmap, p, ctx)
            for i in range(graph.size):
                summary = orbit(fmap, point_of_index(i, p, 2), graph.size)
                cycle = len(graph.cycles[graph.basin_id[i]])
                if (summary.tail_length, summary.cycle_length) != (int(graph.tail_depth[i]), cycle):
                    return False, f"{name} p={p} ponto {graph.point(i)}: orbita e grafo divergem"
                checked += 1
    return True, f"{checked} orbitas conferem com o grafo (p <= {limit})"


def check_ext_orders(limit: int = EXT_SIZE_LIMIT) -> Tuple[bool, str]:
    """Ordens em GF(p^k)^*: dividem p^k - 1 e ha phi(p^k - 1) geradores."""
    fields = 0
    for p in primes_in_range(2, limit):
        k = 1
        while p ** k <= limit:
            field = make_ext_field(p, k)
            group = field.size - 1
            orders = [e.order() for e in field.elements() if not e.is_zero()]
            if any(group % o for o in orders):
                return False, f"{field}: ordem que nao divide {group}"
            if orders.count(group) != euler_phi(group):
                return False, f"{field}: numero de geradores diferente de phi({group})"
            fields += 1
            k += 1
    return True, f"{fields} corpos GF(p^k) com p^k <= {limit} conferem"


def check_gf4_cycle() -> Tuple[bool, str]:
    """F_at sobre GF(4) tem o 2-ciclo (t,1) <-> (t+1,1)."""
    field = make_ext_field(2, 2)
    nonzero = {
        tuple(str(c) for c in coords): period
        for coords, period in periodic_points_ext(builtin("additive_trap"), field)
        if any(not c.is_zero() for c in coords)
    }
    expected = {("t", "1"): 2, ("t+1", "1"): 2}
    if nonzero != expected:
        return False, f"periodicos nao nulos em GF(4): {nonzero}"
    return True, "2-ciclo (t,1) <-> (t+1,1) encontrado em GF(4)"


CHECKS: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
    ("mod_pow", check_mod_pow),
    ("mult_order", check_mult_order),
    ("orbita x grafo", check_orbit_vs_graph),
    ("ordens em GF(p^k)", check_ext_orders),
    ("2-ciclo em GF(4)", check_gf4_cycle),
]


def run_crosschecks(ctx: RunContext | None = None) -> bool:
    """Executa todos os oraculos; True se todos passaram."""
    ctx = ctx or RunContext()
    logger.info("Iniciando auto-verificacao por oraculos de forca bruta...")
    typer.secho("\n=== Auto-verificacao ===", fg=typer.colors.CYAN, bold=True)

    all_passed = True
    for name, check in CHECKS:
        try:
            passed, message = check()
        except PolytrapError as exc:
            passed, message = False, f"{type(exc).__name__}: {exc}"
        icon = "✓" if passed else "✗"
        color = typer.colors.GREEN if passed else typer.colors.RED
        typer.secho(f"  {icon} {name}: {message}", fg=color)
        logger.info(f"Oraculo '{name}': {'PASS' if passed else 'FAIL'} - {message}")
        if not passed:
            all_passed = False
            ctx.errors.append(f"Oraculo falhou: {name} - {message}")

    typer.echo("")
    if all_passed:
        typer.secho("✓ Todos os oraculos conferem", fg=typer.colors.GREEN, bold=True)
    else:
        typer.secho("✗ Divergencias encontradas", fg=typer.colors.RED, bold=True)
        logger.error("Auto-verificacao falhou")
    return all_passed


