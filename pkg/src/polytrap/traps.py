"""Verificadores das armadilhas aditiva, multiplicativa e de potencia.

Cada verificador devolve um `TrapReport` com previsao, observacao e
testemunhas. As contagens previstas vem sempre de argumentos de contagem
sobre classes de razao r = y/x, nunca do grafo funcional.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from polytrap.dynamics import (
    build_graph,
    check_graph_budget,
    nilpotency_index,
    point_of_index,
    trapped_mask,
)
from polytrap.errors import NonPrimeModulus, PolytrapError, SizeBoundExceeded
from polytrap.modfield import (
    fermat_exponent,
    is_prime,
    is_primitive_root,
    is_two_primary,
    mult_order,
    require_prime,
    subgroup_generated,
    two_adic_valuation,
)
from polytrap.poly import BUILTIN_MAPS, Point, PolyMap, builtin, canonical_map_name, map_evaluate_vectorized
from polytrap.utils import RunContext, logger, run_parallel, stopwatch

EXHAUSTIVE = "exhaustive"
SAMPLED = "sampled"
STREAMED = "streamed"

# acima disso a tabela de ordens via mult_order da lugar ao teste por quadrados
ORDER_TABLE_LIMIT = 1 << 16


class ClaimId(str, Enum):
    RATIO_RECURRENCE = "ratio_recurrence"
    ADDITIVE_TRAP = "additive_trap"
    MULTIPLICATIVE_TRAP = "multiplicative_trap"
    POWER_TRAP = "power_trap"
    SINGLE_ATTRACTOR = "single_attractor"


@dataclass(frozen=True)
class RatioClass:
    """Residuo r = y/x de um ponto com x, y != 0."""

    r: int
    p: int

    def __post_init__(self):
        if not 1 <= self.r < self.p:
            raise ValueError(f"classe de razao {self.r} fora de [1, {self.p})")

    @classmethod
    def of(cls, x: int, y: int, p: int) -> "RatioClass":
        x, y = x % p, y % p
        if x == 0 or y == 0:
            raise ValueError(f"({x},{y}) nao tem classe de razao")
        return cls(y * pow(x, -1, p) % p, p)

    def order(self) -> int:
        return mult_order(self.r, self.p)


@dataclass
class TrapReport:
    map_name: str
    p: int
    claim_id: ClaimId
    expected: str
    holds: bool
    nilpotency_index: Optional[int] = None
    witness: Optional[Point] = None
    predicted_untrapped_count: Optional[int] = None
    observed_untrapped_count: Optional[int] = None
    elapsed: float = 0.0
    mode: str = EXHAUSTIVE
    details: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def note(self) -> Optional[str]:
        return self.details.get("note")

    def to_json(self, include_timing: bool = True) -> Dict[str, Any]:
        return {
            "map": self.map_name,
            "p": self.p,
            "claim": self.claim_id.value,
            "holds": self.holds,
            "nilpotency_index": self.nilpotency_index,
            "witness": list(self.witness.coords) if self.witness is not None else None,
            "predicted_untrapped": self.predicted_untrapped_count,
            "observed_untrapped": self.observed_untrapped_count,
            "mode": self.mode,
            "elapsed_ms": round(self.elapsed * 1000, 3) if include_timing else None,
            "details": self.details,
            "error": self.error,
        }


# ============================================================================
# Aritmetica vetorizada sobre o plano
# ============================================================================


def _pow_mod_array(a: np.ndarray, e: int, p: int) -> np.ndarray:
    result = np.ones_like(a, dtype=np.int64)
    base = np.asarray(a, dtype=np.int64) % p
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def _inverse_array(a: np.ndarray, p: int) -> np.ndarray:
    """Inverso modular elemento a elemento (0 vai para 0)."""
    return _pow_mod_array(a, p - 2, p) if p > 2 else np.asarray(a, dtype=np.int64) % p


def _wants_sampling(p: int, ctx: RunContext) -> bool:
    if ctx.force_sampled:
        return True
    try:
        check_graph_budget(p * p, ctx)
    except SizeBoundExceeded:
        if not ctx.sampled_fallback:
            raise
        message = f"p={p}: plano com {p * p} pontos acima do orcamento; usando amostragem"
        logger.info(message)
        ctx.warnings.append(message)
        return True
    return False


def _plane(p: int) -> Tuple[np.ndarray, np.ndarray]:
    xs, ys = np.divmod(np.arange(p * p, dtype=np.int64), p)
    return xs, ys


def _sample(p: int, ctx: RunContext) -> Tuple[np.ndarray, np.ndarray]:
    # semente por primo: resultado independente da ordem e do paralelismo
    rng = np.random.default_rng([ctx.seed, p])
    pts = rng.integers(0, p, size=(ctx.sample_size, 2), dtype=np.int64)
    return pts[:, 0], pts[:, 1]


def _points(p: int, ctx: RunContext) -> Tuple[np.ndarray, np.ndarray, str]:
    if _wants_sampling(p, ctx):
        xs, ys = _sample(p, ctx)
        return xs, ys, SAMPLED
    xs, ys = _plane(p)
    return xs, ys, EXHAUSTIVE


def _sampling_details(mode: str, ctx: RunContext) -> Dict[str, Any]:
    return {"sample_size": ctx.sample_size, "seed": ctx.seed} if mode == SAMPLED else {}


def kill_steps(fmap: PolyMap, coords: Sequence[np.ndarray], p: int, limit: int) -> np.ndarray:
    """Primeiro passo em que cada ponto chega a zero; -1 se nao chega em `limit` passos."""
    current = [np.array(c, dtype=np.int64) % p for c in coords]
    steps = np.full(len(current[0]), -1, dtype=np.int64)
    steps[np.all([c == 0 for c in current], axis=0)] = 0
    for step in range(1, limit + 1):
        alive = np.flatnonzero(steps < 0)
        if alive.size == 0:
            break
        images = map_evaluate_vectorized(fmap, [c[alive] for c in current], p)
        for c, image in zip(current, images):
            c[alive] = image
        steps[alive[np.all([image == 0 for image in images], axis=0)]] = step
    return steps


def _first_point(mask: np.ndarray, xs: np.ndarray, ys: np.ndarray, p: int) -> Optional[Point]:
    hits = np.flatnonzero(mask)
    if hits.size == 0:
        return None
    i = int(hits[0])
    return Point((int(xs[i]), int(ys[i])), p)


@lru_cache(maxsize=64)
def _two_primary_table(p: int) -> np.ndarray:
    table = np.zeros(p, dtype=bool)
    table[1:] = [is_two_primary(mult_order(a, p)) for a in range(1, p)]
    return table


def _two_primary_ratios(r: np.ndarray, p: int) -> np.ndarray:
    """r (nao nulo) tem ordem potencia de 2."""
    if p <= ORDER_TABLE_LIMIT:
        return _two_primary_table(p)[r]
    # ordem 2-primaria <=> r^(2^v) = 1 com v = v2(p-1)
    s = np.asarray(r, dtype=np.int64) % p
    for _ in range(two_adic_valuation(p - 1)):
        s = s * s % p
    return s == 1


# ============================================================================
# Recorrencias de razao
# ============================================================================

# v/u = g(r) na orientacao canonica; a orientacao impressa das armadilhas
# multiplicativa e de potencia e u/v
RATIO_RULES: Dict[str, Tuple[str, str, bool]] = {
    "additive_trap": ("v/u = y/x + 1", "v/u", False),
    "multiplicative_trap": ("v/u = 2*(y/x)", "u/v", True),
    "power_trap": ("v/u = (y/x)^2", "u/v", True),
}


def _ratio_image(name: str, r: np.ndarray, p: int) -> np.ndarray:
    if name == "additive_trap":
        return (r + 1) % p
    if name == "multiplicative_trap":
        return 2 * r % p
    return r * r % p


def verify_ratio_recurrence(map_name: str, p: int, ctx: Optional[RunContext] = None) -> TrapReport:
    ctx = ctx or RunContext()
    name = canonical_map_name(map_name)
    require_prime(p)
    identity, printed, exclude_diagonal = RATIO_RULES[name]
    fmap = builtin(name)
    with stopwatch() as elapsed:
        xs, ys, mode = _points(p, ctx)
        u, v = map_evaluate_vectorized(fmap, [xs, ys], p)
        valid = (xs != 0) & (ys != 0) & (u != 0)
        if exclude_diagonal:
            valid &= xs != ys
        r = ys * _inverse_array(xs, p) % p
        g = _ratio_image(name, r, p)
        canonical_fail = valid & (v * _inverse_array(u, p) % p != g)
        if printed == "v/u":
            printed_fail = canonical_fail
        else:
            printed_fail = valid & (v != 0) & (u * _inverse_array(v, p) % p != g)
        holds = not canonical_fail.any()
        witness = _first_point(canonical_fail, xs, ys, p)
        details = {
            "identity": identity,
            "checked_points": int(valid.sum()),
            "canonical_orientation": "v/u",
            "canonical_holds": holds,
            "printed_orientation": printed,
            "printed_holds": not printed_fail.any(),
            **_sampling_details(mode, ctx),
        }
    report = TrapReport(
        name, p, ClaimId.RATIO_RECURRENCE, identity, holds, witness=witness,
        elapsed=elapsed(), mode=mode, details=details,
    )
    _log_report(report)
    return report


# ============================================================================
# Armadilha aditiva
# ============================================================================


def verify_additive_trap(p: int, ctx: Optional[RunContext] = None) -> TrapReport:
    """A p-esima iterada de F_at e identicamente (0,0)."""
    ctx = ctx or RunContext()
    require_prime(p)
    fmap = builtin("additive_trap")
    expected = f"F^{p} sends every point to (0,0)"
    with stopwatch() as elapsed:
        if _wants_sampling(p, ctx):
            xs, ys = _sample(p, ctx)
            steps = kill_steps(fmap, [xs, ys], p, p)
            alive = steps < 0
            report = TrapReport(
                "additive_trap", p, ClaimId.ADDITIVE_TRAP, expected, not alive.any(),
                witness=_first_point(alive, xs, ys, p),
                predicted_untrapped_count=0,
                observed_untrapped_count=int(alive.sum()),
                mode=SAMPLED,
                details={"max_kill_step": int(steps.max()), **_sampling_details(SAMPLED, ctx)},
            )
        else:
            graph = build_graph(fmap, p, ctx)
            zero = Point((0, 0), p)
            n_index = nilpotency_index(graph, zero)
            untrapped = ~trapped_mask(graph, zero)
            holds = n_index is not None and n_index <= p
            witness = None
            if not holds:
                hits = np.flatnonzero(untrapped)
                # todos presos mas indice > p: testemunha e o ponto de cauda maxima
                i = int(hits[0]) if hits.size else int(np.argmax(graph.tail_depth))
                witness = point_of_index(i, p, 2)
            report = TrapReport(
                "additive_trap", p, ClaimId.ADDITIVE_TRAP, expected, holds,
                nilpotency_index=n_index,
                witness=witness,
                predicted_untrapped_count=0,
                observed_untrapped_count=int(untrapped.sum()),
                details={
                    "minimal_iterations": n_index,
                    "minimal_equals_p": n_index == p,
                    "cycle_count": len(graph.cycles),
                },
            )
    report.elapsed = elapsed()
    _log_report(report)
    return report


# ============================================================================
# Armadilha multiplicativa
# ============================================================================


def predicted_multiplicative_untrapped(p: int) -> int:
    """(p-1) * |F_p^* \\ <2>|: x livre, razao fora do subgrupo gerado por 2."""
    if p == 2:
        return 0
    return (p - 1) * (p - 1 - len(subgroup_generated(2, p)))


def verify_multiplicative_trap(p: int, ctx: Optional[RunContext] = None) -> TrapReport:
    ctx = ctx or RunContext()
    require_prime(p)
    fmap = builtin("multiplicative_trap")
    degenerate = p == 2
    generator = degenerate or is_primitive_root(2, p)
    order = 1 if degenerate else mult_order(2, p)
    predicted = predicted_multiplicative_untrapped(p)
    if degenerate:
        expected = "p = 2: coefficient 2 vanishes, every point reaches (0,0)"
    elif generator:
        expected = "2 generates (Z/pZ)^*: every point reaches (0,0)"
    else:
        expected = f"2 has order {order}: untrapped points are exactly the ratio classes outside <2>"

    with stopwatch() as elapsed:
        xs, ys, mode = _points(p, ctx)
        r = ys * _inverse_array(xs, p) % p
        # r em <2> <=> r^ord(2) = 1
        in_subgroup = _pow_mod_array(r, order, p) == 1
        predicted_trapped = (xs == 0) | (ys == 0) | (xs == ys) | in_subgroup
        if degenerate:
            predicted_trapped = np.ones_like(xs, dtype=bool)

        if mode == SAMPLED:
            observed_trapped = kill_steps(fmap, [xs, ys], p, order + 2) >= 0
            n_index = None
            extra: Dict[str, Any] = _sampling_details(mode, ctx)
        else:
            graph = build_graph(fmap, p, ctx)
            observed_trapped = trapped_mask(graph, Point((0, 0), p))
            n_index = nilpotency_index(graph, Point((0, 0), p))
            extra = {"cycle_count": len(graph.cycles)}

        untrapped = ~observed_trapped
        mismatch = predicted_trapped != observed_trapped
        observed = int(untrapped.sum())
        holds = not mismatch.any()
        if mode == EXHAUSTIVE:
            holds = holds and observed == predicted
            if not generator:
                observed_classes = sorted({int(c) for c in r[untrapped]})
                expected_classes = characterize_untrapped("multiplicative_trap", p)["untrapped_ratio_classes"]
                extra["untrapped_ratio_classes"] = observed_classes
                holds = holds and observed_classes == expected_classes and observed > 0

        if mismatch.any():
            witness = _first_point(mismatch, xs, ys, p)
        elif not generator:
            witness = _first_point(untrapped, xs, ys, p)
        else:
            witness = None

        details: Dict[str, Any] = {"order_of_2": order, "two_is_generator": generator, "degenerate": degenerate, **extra}
        if not generator and witness is not None and holds:
            details["note"] = f"conditional claim: 2 not a generator; untrapped witness {witness}"

    report = TrapReport(
        "multiplicative_trap", p, ClaimId.MULTIPLICATIVE_TRAP, expected, holds,
        nilpotency_index=n_index,
        witness=witness,
        predicted_untrapped_count=predicted if mode == EXHAUSTIVE else int((~predicted_trapped).sum()),
        observed_untrapped_count=observed,
        elapsed=elapsed(),
        mode=mode,
        details=details,
    )
    _log_report(report)
    return report


# ============================================================================
# Armadilha de potencia
# ============================================================================


def kill_iterations_bound(p: int) -> int:
    """Todo ponto preso de F_pt chega a (0,0) em ate v2(p-1)+1 passos."""
    return two_adic_valuation(p - 1) + 1


def predicted_power_untrapped(p: int) -> int:
    """p^2 - (2p-1) - (p-1) * 2^v2(p-1): eixos mais razoes de ordem 2-primaria."""
    return p * p - (2 * p - 1) - (p - 1) * (1 << two_adic_valuation(p - 1))


def characterize_untrapped(map_name: str, p: int) -> Dict[str, Any]:
    """Classes de razao y/x que escapam de (0,0), deduzidas so da recorrencia de razao."""
    name = canonical_map_name(map_name)
    require_prime(p)
    if name == "additive_trap" or p == 2:
        classes: List[int] = []
        count = 0
    elif name == "multiplicative_trap":
        classes = sorted(set(range(1, p)) - subgroup_generated(2, p))
        count = predicted_multiplicative_untrapped(p)
    else:
        classes = [r for r in range(1, p) if not is_two_primary(mult_order(r, p))]
        count = predicted_power_untrapped(p)
    return {"map": name, "p": p, "untrapped_ratio_classes": classes, "predicted_untrapped": count}


def _power_plane_chunk(task: Tuple[int, int, int]) -> Tuple[int, int, int, bool]:
    """Indices [start, stop): (nao presos, 1o desvio, 1o sobrevivente de Fermat, k passos bastam)."""
    p, start, stop = task
    k = fermat_exponent(p)
    bound = kill_iterations_bound(p)
    xs, ys = np.divmod(np.arange(start, stop, dtype=np.int64), p)
    axes = (xs == 0) | (ys == 0)
    r = ys * _inverse_array(xs, p) % p
    predicted_trapped = axes | _two_primary_ratios(np.where(axes, 1, r), p)
    steps = kill_steps(builtin("power_trap"), [xs, ys], p, max(bound, (k or 0) + 1))
    killed = (steps >= 0) & (steps <= bound)

    mismatch = np.flatnonzero(predicted_trapped != killed)
    first_mismatch = start + int(mismatch[0]) if mismatch.size else -1
    first_survivor, k_suffice = -1, True
    if k is not None:
        survivors = np.flatnonzero((steps < 0) | (steps > k + 1))
        first_survivor = start + int(survivors[0]) if survivors.size else -1
        k_suffice = bool(((steps >= 0) & (steps <= k)).all())
    return int((~killed).sum()), first_mismatch, first_survivor, k_suffice


def _verify_power_trap_streamed(p: int, ctx: RunContext, expected: str) -> TrapReport:
    """Plano inteiro em blocos de ctx.chunk_size, sem grafo funcional.

    Preso aqui significa chegar a (0,0) em ate kill_iterations_bound(p)
    passos; a memoria fica limitada a um bloco por processo.
    """

    k = fermat_exponent(p)
    size = p * p
    chunk = max(1, ctx.chunk_size)
    tasks = [(p, start, min(start + chunk, size)) for start in range(0, size, chunk)]
    logger.info(f"power_trap p={p}: varrendo {size} pontos em {len(tasks)} blocos (jobs={ctx.jobs})")

    with stopwatch() as elapsed:
        parts = run_parallel(_power_plane_chunk, tasks, ctx.jobs)
        observed = sum(part[0] for part in parts)
        predicted = predicted_power_untrapped(p)
        mismatches = [part[1] for part in parts if part[1] >= 0]
        holds = not mismatches and observed == predicted
        witness = mismatches[0] if mismatches else None
        details: Dict[str, Any] = {
            "kill_iterations_bound": kill_iterations_bound(p),
            "fermat_exponent": k,
            "chunks": len(tasks),
        }
        if k is not None:
            survivors = [part[2] for part in parts if part[2] >= 0]
            details["fermat_iterations_suffice"] = not survivors
            details["k_iterations_suffice"] = all(part[3] for part in parts)
            holds = holds and not survivors
            if witness is None and survivors:
                witness = survivors[0]

    report = TrapReport(
        "power_trap", p, ClaimId.POWER_TRAP, expected, holds,
        witness=None if witness is None else point_of_index(witness, p, 2),
        predicted_untrapped_count=predicted,
        observed_untrapped_count=observed,
        elapsed=elapsed(),
        mode=STREAMED,
        details=details,
    )
    _log_report(report)
    return report


def verify_power_trap(p: int, ctx: Optional[RunContext] = None) -> TrapReport:
    ctx = ctx or RunContext()
    require_prime(p)
    fmap = builtin("power_trap")
    k = fermat_exponent(p)
    bound = kill_iterations_bound(p)
    if k is not None:
        expected = f"p = 2^{k}+1: F^{k + 1} sends every point to (0,0)"
    else:
        expected = "trapped set = {x=0} U {y=0} U {ord(y/x) a power of 2}"
    if ctx.stream_plane:
        return _verify_power_trap_streamed(p, ctx, expected)

    with stopwatch() as elapsed:
        xs, ys, mode = _points(p, ctx)
        r = ys * _inverse_array(xs, p) % p
        axes = (xs == 0) | (ys == 0)
        predicted_trapped = axes | _two_primary_ratios(np.where(axes, 1, r), p)
        steps = kill_steps(fmap, [xs, ys], p, max(bound, (k or 0) + 1))
        killed_by_bound = (steps >= 0) & (steps <= bound)
        details: Dict[str, Any] = {"kill_iterations_bound": bound, "fermat_exponent": k}

        if mode == SAMPLED:
            observed_trapped = killed_by_bound
            n_index = None
            details.update(_sampling_details(mode, ctx))
        else:
            graph = build_graph(fmap, p, ctx)
            observed_trapped = trapped_mask(graph, Point((0, 0), p))
            n_index = nilpotency_index(graph, Point((0, 0), p))
            details["cycle_count"] = len(graph.cycles)
            details["kill_bound_exact"] = bool(np.array_equal(killed_by_bound, observed_trapped))

        mismatch = predicted_trapped != observed_trapped
        observed = int((~observed_trapped).sum())
        predicted = predicted_power_untrapped(p) if mode == EXHAUSTIVE else int((~predicted_trapped).sum())
        holds = not mismatch.any() and observed == predicted
        if mode == EXHAUSTIVE:
            holds = holds and details["kill_bound_exact"]
        witness = _first_point(mismatch, xs, ys, p)

        if k is not None:
            survivors = (steps < 0) | (steps > k + 1)
            details["fermat_iterations_suffice"] = not survivors.any()
            details["k_iterations_suffice"] = bool(((steps >= 0) & (steps <= k)).all())
            holds = holds and details["fermat_iterations_suffice"]
            if witness is None:
                witness = _first_point(survivors, xs, ys, p)

    report = TrapReport(
        "power_trap", p, ClaimId.POWER_TRAP, expected, holds,
        nilpotency_index=n_index,
        witness=witness,
        predicted_untrapped_count=predicted,
        observed_untrapped_count=observed,
        elapsed=elapsed(),
        mode=mode,
        details=details,
    )
    _log_report(report)
    return report


# ============================================================================
# Atrator unico (mapas arbitrarios)
# ============================================================================


def verify_single_attractor(fmap: PolyMap, p: int, ctx: Optional[RunContext] = None) -> TrapReport:
    """A origem e o unico ciclo do mapa modulo p (e um ponto fixo)."""
    ctx = ctx or RunContext()
    require_prime(p)
    zero = Point((0,) * fmap.num_vars, p)
    with stopwatch() as elapsed:
        graph = build_graph(fmap, p, ctx)
        n_index = nilpotency_index(graph, zero)
        untrapped = ~trapped_mask(graph, zero)
        hits = np.flatnonzero(untrapped)
        witness = point_of_index(int(hits[0]), p, fmap.num_vars) if hits.size else None
    report = TrapReport(
        fmap.label(), p, ClaimId.SINGLE_ATTRACTOR, f"{zero} is the only cycle", n_index is not None,
        nilpotency_index=n_index,
        witness=witness,
        predicted_untrapped_count=0,
        observed_untrapped_count=int(untrapped.sum()),
        elapsed=elapsed(),
        details={"cycle_count": len(graph.cycles)},
    )
    _log_report(report)
    return report


# ============================================================================
# Suite
# ============================================================================

MapSpec = Union[str, PolyMap]

_CLAIM_OF_MAP = {
    "additive_trap": ClaimId.ADDITIVE_TRAP,
    "multiplicative_trap": ClaimId.MULTIPLICATIVE_TRAP,
    "power_trap": ClaimId.POWER_TRAP,
}


def _builtin_name(spec: MapSpec) -> Optional[str]:
    if isinstance(spec, PolyMap):
        # arquivo com nome de mapa embutido so conta se as componentes coincidem
        if spec.name in BUILTIN_MAPS and spec == builtin(spec.name):
            return spec.name
        return None
    return canonical_map_name(spec)


def _run_task(task: Tuple[str, MapSpec, int, RunContext]) -> TrapReport:
    kind, spec, p, ctx = task
    try:
        if kind == "ratio":
            return verify_ratio_recurrence(_builtin_name(spec), p, ctx)
        if kind == "additive_trap":
            return verify_additive_trap(p, ctx)
        if kind == "multiplicative_trap":
            return verify_multiplicative_trap(p, ctx)
        if kind == "power_trap":
            return verify_power_trap(p, ctx)
        return verify_single_attractor(spec, p, ctx)
    except PolytrapError as exc:
        return _failure_record(spec, p, _claim_of_task(kind, spec), exc)


def _claim_of_task(kind: str, spec: MapSpec) -> ClaimId:
    if kind == "ratio":
        return ClaimId.RATIO_RECURRENCE
    return _CLAIM_OF_MAP.get(kind, ClaimId.SINGLE_ATTRACTOR)


def _failure_record(spec: MapSpec, p: int, claim: ClaimId, exc: Exception) -> TrapReport:
    name = spec.label() if isinstance(spec, PolyMap) else str(spec)
    logger.warning(f"{name} p={p}: {type(exc).__name__}: {exc}")
    return TrapReport(name, p, claim, "", False, error=f"{type(exc).__name__}: {exc}")


def verify_all(
    primes: Iterable[int],
    ctx: Optional[RunContext] = None,
    maps: Optional[Sequence[MapSpec]] = None,
    include_ratio: bool = True,
) -> List[TrapReport]:
    """Roda todos os verificadores aplicaveis por primo, em ordem deterministica.

    Ordem: primos na ordem dada; para cada primo, mapas na ordem dada (padrao:
    aditiva, multiplicativa, potencia), verificacao da armadilha antes da
    recorrencia de razao. Erros viram registros de falha.
    """

    ctx = ctx or RunContext()
    primes = list(primes)
    maps = list(maps) if maps is not None else list(BUILTIN_MAPS)
    # paralelismo entre primos; com varios primos cada tarefa roda serial
    task_ctx = replace(ctx, jobs=1) if len(primes) > 1 and ctx.jobs > 1 else ctx

    tasks: List[Tuple[str, MapSpec, int, RunContext]] = []
    slots: List[Union[int, TrapReport]] = []
    for p in primes:
        for spec in maps:
            name = _builtin_name(spec)
            kinds = [name, "ratio"] if name and include_ratio else [name or "single"]
            for kind in kinds:
                if not is_prime(p):
                    slots.append(_failure_record(spec, p, _claim_of_task(kind, spec), NonPrimeModulus(p)))
                    continue
                slots.append(len(tasks))
                tasks.append((kind, spec, p, task_ctx))

    logger.info(f"verify_all: {len(tasks)} verificacoes em {len(primes)} primos (jobs={ctx.jobs})")
    results = run_parallel(_run_task, tasks, ctx.jobs if len(primes) > 1 else 1)
    return [results[s] if isinstance(s, int) else s for s in slots]


def all_hold(reports: Iterable[TrapReport]) -> bool:
    return all(r.holds and r.error is None for r in reports)


def _log_report(report: TrapReport) -> None:
    status = "OK" if report.holds else "FALHA"
    message = (
        f"{report.claim_id.value} {report.map_name} p={report.p} [{report.mode}] {status} "
        f"indice={report.nilpotency_index} em {report.elapsed * 1000:.1f}ms"
    )
    if report.holds:
        logger.info(message)
    else:
        logger.warning(f"{message} testemunha={report.witness}")
