"""Busca limitada por mapas inteiros com dois pontos fixos que separam o plano.

Um candidato passa quando fixa A e B sobre Z e, modulo cada primo testado,
toda orbita chega a A se a primeira coordenada inicial e 0 e a B caso
contrario. A e B vem da configuracao.

Ordem de enumeracao (documentada e estavel):
  - monomios por grau total crescente; dentro do grau, expoentes em ordem
    lexicografica decrescente (x^2 antes de x*y antes de y^2);
  - coeficientes nao nulos em ordem numerica crescente dentro da faixa;
  - componentes com 0, 1, ..., max_terms termos, combinacoes de monomios na
    ordem acima e, para cada combinacao, coeficientes em produto cartesiano;
  - mapas como produto cartesiano das componentes (primeira mais externa).
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import yaml

from polytrap.config import ConfigManager
from polytrap.dynamics import (
    FunctionalGraph,
    build_graph,
    evaluate_map_plane,
    indices_to_coords,
    iterate_points,
    point_index,
)
from polytrap.errors import (
    ExactRangeExceeded,
    InvalidConfig,
    NotFixedModP,
    PolytrapError,
)
from polytrap.modfield import is_prime, require_prime
from polytrap.poly import (
    DEFAULT_EXACT_BOUND,
    Monomial,
    Point,
    Polynomial,
    PolyMap,
    builtin,
    format_polynomial,
    map_evaluate,
    map_evaluate_int,
)
from polytrap.utils import RunContext, logger, run_parallel

BATCH_SIZE = 2048


@dataclass(frozen=True)
class SearchConfig:
    num_vars: int = 2
    max_degree: int = 4
    coefficient_range: Tuple[int, int] = (-2, 2)
    max_terms: int = 2
    primes: Tuple[int, ...] = (2, 3, 5, 7, 11, 13)
    fixed_point_a: Tuple[int, ...] = (0, 0)
    fixed_point_b: Tuple[int, ...] = (1, 0)
    iteration_budget: Optional[int] = None
    candidate_budget: int = 100_000
    linear_bound: Optional[float] = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        problems = []
        if self.num_vars < 1:
            problems.append("num_vars deve ser >= 1")
        if self.max_degree < 0:
            problems.append("max_degree deve ser >= 0")
        if self.max_terms < 1:
            problems.append("max_terms deve ser >= 1")
        lo, hi = self.coefficient_range
        if lo > hi:
            problems.append(f"coefficient_range invalido: [{lo}, {hi}]")
        for name in ("fixed_point_a", "fixed_point_b"):
            if len(getattr(self, name)) != self.num_vars:
                problems.append(f"{name} deve ter {self.num_vars} coordenadas")
        a, b = self.fixed_point_a, self.fixed_point_b
        if a == b:
            problems.append("fixed_point_a e fixed_point_b devem ser distintos")
        if a and a[0] != 0:
            problems.append("fixed_point_a deve ter primeira coordenada 0")
        if b and b[0] == 0:
            problems.append("fixed_point_b deve ter primeira coordenada diferente de 0")
        bad = [p for p in self.primes if not is_prime(p)]
        if bad:
            problems.append(f"primos invalidos: {', '.join(map(str, bad))}")
        if self.iteration_budget is not None and self.iteration_budget < 1:
            problems.append("iteration_budget deve ser >= 1")
        if self.candidate_budget < 0:
            problems.append("candidate_budget deve ser >= 0")
        if self.linear_bound is not None and self.linear_bound <= 0:
            problems.append("linear_bound deve ser positivo")
        if problems:
            raise InvalidConfig("; ".join(problems))

    @classmethod
    def from_mapping(cls, data: Dict[str, Any]) -> "SearchConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidConfig(f"chaves desconhecidas: {', '.join(sorted(unknown))}")
        values: Dict[str, Any] = {}
        try:
            for key, raw in data.items():
                if raw is None:
                    values[key] = None
                elif key in ("coefficient_range", "primes", "fixed_point_a", "fixed_point_b"):
                    values[key] = tuple(int(v) for v in raw)
                elif key == "linear_bound":
                    values[key] = float(raw)
                else:
                    values[key] = int(raw)
        except (TypeError, ValueError) as exc:
            raise InvalidConfig(f"valor invalido na configuracao: {exc}") from exc
        if "coefficient_range" in values and len(values["coefficient_range"]) != 2:
            raise InvalidConfig("coefficient_range deve ser [lo, hi]")
        for key in ("num_vars", "max_degree", "max_terms", "candidate_budget", "coefficient_range", "primes"):
            if values.get(key, 0) is None:
                raise InvalidConfig(f"{key} nao pode ser nulo")
        return cls(**values)

    @classmethod
    def from_file(cls, path: str | Path) -> "SearchConfig":
        path = Path(path)
        if not path.is_file():
            raise InvalidConfig(f"arquivo de configuracao nao encontrado: {path}")
        try:
            manager = ConfigManager(path)
        except (ValueError, yaml.YAMLError) as exc:
            raise InvalidConfig(f"{path}: {exc}") from exc
        return cls.from_mapping(manager.get_section("search"))

    def to_json(self) -> Dict[str, Any]:
        data = asdict(self)
        for key in ("coefficient_range", "primes", "fixed_point_a", "fixed_point_b"):
            data[key] = list(data[key])
        return data


# ============================================================================
# Enumeracao
# ============================================================================


def monomials(num_vars: int, max_degree: int) -> List[Tuple[int, ...]]:
    result = []
    for d in range(max_degree + 1):
        level = [e for e in itertools.product(range(d + 1), repeat=num_vars) if sum(e) == d]
        result.extend(sorted(level, reverse=True))
    return result


def nonzero_coefficients(lo: int, hi: int) -> List[int]:
    return [c for c in range(lo, hi + 1) if c != 0]


def enumerate_components(config: SearchConfig) -> Iterator[Polynomial]:
    """Todas as componentes admissiveis, sem termos de coeficiente zero."""
    monos = monomials(config.num_vars, config.max_degree)
    coeffs = nonzero_coefficients(*config.coefficient_range)
    for t in range(config.max_terms + 1):
        if t and not coeffs:
            break
        for chosen in itertools.combinations(monos, t):
            for values in itertools.product(coeffs, repeat=t):
                terms = tuple(Monomial(e, c) for e, c in zip(chosen, values))
                yield Polynomial.from_dict(config.num_vars, {m.exponents: m.coefficient for m in terms})


def candidate_space_size(config: SearchConfig) -> int:
    """Numero de mapas antes do corte por candidate_budget."""
    return sum(1 for _ in enumerate_components(config)) ** config.num_vars


def enumerate_candidates(config: SearchConfig) -> Iterator[PolyMap]:
    """Fluxo deterministico de mapas, truncado em candidate_budget."""
    components = list(enumerate_components(config))
    product = itertools.product(components, repeat=config.num_vars)
    for comps in itertools.islice(product, config.candidate_budget):
        yield PolyMap(config.num_vars, tuple(comps))


# ============================================================================
# Predicados
# ============================================================================


def is_fixed_over_Z(fmap: PolyMap, point: Sequence[int], *, bound: int = DEFAULT_EXACT_BOUND) -> bool:
    """F(point) == point em aritmetica inteira exata."""
    return map_evaluate_int(fmap, point, bound=bound) == tuple(point)


@dataclass(frozen=True)
class SortResult:
    p: int
    sorts_correctly: bool
    required_iterate: Optional[int] = None
    failure_witness: Optional[Point] = None
    degenerate: bool = False
    reason: Optional[str] = None

    def to_json(self) -> Dict[str, Any]:
        return {
            "p": self.p,
            "sorts_correctly": self.sorts_correctly,
            "required_iterate": self.required_iterate,
            "failure_witness": list(self.failure_witness.coords) if self.failure_witness else None,
            "degenerate": self.degenerate,
            "reason": self.reason,
        }


def _reduced_fixed(fmap: PolyMap, coords: Sequence[int], p: int) -> Point:
    point = Point.of(coords, p)
    if map_evaluate(fmap, point) != point:
        raise NotFixedModP(coords, p)
    return point


def _check_basins(graph: FunctionalGraph, expected_cycle: np.ndarray, budget: Optional[int]) -> SortResult:
    """Cada ponto deve cair no ciclo `expected_cycle[i]` (indice de ciclo)."""
    p = graph.p
    wrong = np.flatnonzero(graph.basin_id != expected_cycle)
    if wrong.size:
        return SortResult(p, False, failure_witness=graph.point(int(wrong[0])), reason="wrong basin")
    required = graph.max_tail_depth()
    if budget is not None and required > budget:
        deepest = int(np.argmax(graph.tail_depth))
        return SortResult(p, False, required, graph.point(deepest), reason=f"requires {required} > budget {budget}")
    return SortResult(p, True, required)


def sorts_by_first_coordinate(
    fmap: PolyMap,
    p: int,
    a: Sequence[int],
    b: Sequence[int],
    budget: Optional[int] = None,
    ctx: Optional[RunContext] = None,
) -> SortResult:
    """Orbitas com x1 = 0 chegam a A, as demais a B (modulo p)."""
    ctx = ctx or RunContext()
    require_prime(p)
    pa = _reduced_fixed(fmap, a, p)
    pb = _reduced_fixed(fmap, b, p)
    if pa == pb:
        return SortResult(p, True, degenerate=True, reason="fixed points collide mod p")

    graph = build_graph(fmap, p, ctx)
    ia = point_index(pa)
    ib = point_index(pb)
    if sorted(graph.cycles) != sorted([(ia,), (ib,)]):
        extra = next(c for c in graph.cycles if c not in ((ia,), (ib,)))
        return SortResult(p, False, failure_witness=graph.point(extra[0]), reason=f"extra cycle of length {len(extra)}")

    first = np.arange(graph.size, dtype=np.int64) // p ** (fmap.num_vars - 1)
    expected = np.where(first == 0, graph.basin_id[ia], graph.basin_id[ib])
    return _check_basins(graph, expected, budget)


def sorts_to_single_attractor(
    fmap: PolyMap, p: int, target: Sequence[int], budget: Optional[int] = None, ctx: Optional[RunContext] = None
) -> SortResult:
    """Variante de controle: toda orbita chega ao alvo."""
    ctx = ctx or RunContext()
    require_prime(p)
    pt = _reduced_fixed(fmap, target, p)
    graph = build_graph(fmap, p, ctx)
    it = point_index(pt)
    expected = np.full(graph.size, graph.basin_id[it], dtype=np.int64)
    return _check_basins(graph, expected, budget)


def reverify_pass(fmap: PolyMap, p: int, a: Sequence[int], b: Sequence[int], steps: int) -> bool:
    """Confere por iteracao direta que F^steps separa o plano em {A, B}."""
    n = fmap.num_vars
    coords = indices_to_coords(np.arange(p ** n, dtype=np.int64), p, n)
    final = iterate_points(fmap, evaluate_map_plane(fmap, p), p, steps - 1) if steps else coords
    target_a = np.array([c % p for c in a], dtype=np.int64)[:, None]
    target_b = np.array([c % p for c in b], dtype=np.int64)[:, None]
    stacked = np.vstack(final)
    goes_a = np.all(stacked == target_a, axis=0)
    goes_b = np.all(stacked == target_b, axis=0)
    return bool(np.all(np.where(coords[0] == 0, goes_a, goes_b)))


def control_run(primes: Sequence[int], ctx: Optional[RunContext] = None) -> List[SortResult]:
    """F_at como atrator unico em (0,0): valida a maquinaria da busca."""
    fmap = builtin("additive_trap")
    return [sorts_to_single_attractor(fmap, p, (0, 0), ctx=ctx) for p in primes]


# ============================================================================
# Veredictos
# ============================================================================


@dataclass
class CandidateVerdict:
    index: int
    map: PolyMap
    fixed_over_Z: bool
    per_prime: List[SortResult] = field(default_factory=list)
    reason: Optional[str] = None
    exceeds_linear_bound: List[int] = field(default_factory=list)

    @property
    def overall(self) -> str:
        ok = self.fixed_over_Z and self.reason is None and all(r.sorts_correctly for r in self.per_prime)
        return "pass" if ok else "fail"

    def to_json(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "map": [format_polynomial(c) for c in self.map.components],
            "fixed_over_Z": self.fixed_over_Z,
            "per_prime": [r.to_json() for r in self.per_prime],
            "overall": self.overall,
            "reason": self.reason,
            "exceeds_linear_bound": self.exceeds_linear_bound,
        }


def judge_candidate(index: int, fmap: PolyMap, config: SearchConfig, ctx: RunContext) -> CandidateVerdict:
    a, b = config.fixed_point_a, config.fixed_point_b
    try:
        if not is_fixed_over_Z(fmap, a, bound=ctx.exact_range_bound):
            return CandidateVerdict(index, fmap, False, reason="A not fixed over Z")
        if not is_fixed_over_Z(fmap, b, bound=ctx.exact_range_bound):
            return CandidateVerdict(index, fmap, False, reason="B not fixed over Z")
    except ExactRangeExceeded as exc:
        return CandidateVerdict(index, fmap, False, reason=f"ExactRangeExceeded: {exc}")

    verdict = CandidateVerdict(index, fmap, True)
    for p in config.primes:
        budget = config.iteration_budget
        try:
            result = sorts_by_first_coordinate(fmap, p, a, b, budget, ctx)
        except PolytrapError as exc:
            result = SortResult(p, False, reason=f"{type(exc).__name__}: {exc}")
        verdict.per_prime.append(result)
        if not result.sorts_correctly:
            verdict.reason = f"fails at p={p}"
            break
        if config.linear_bound is not None and result.required_iterate is not None:
            if result.required_iterate > config.linear_bound * p:
                verdict.exceeds_linear_bound.append(p)

    if verdict.overall == "pass":
        for result in verdict.per_prime:
            if result.degenerate:
                continue
            if not reverify_pass(fmap, result.p, a, b, result.required_iterate):
                logger.error(f"candidato {index}: reverificacao falhou em p={result.p}")
                verdict.reason = f"re-verification failed at p={result.p}"
                break
    return verdict


def _judge_task(task: Tuple[int, PolyMap, SearchConfig, RunContext]) -> CandidateVerdict:
    return judge_candidate(*task)


def iter_verdicts(config: SearchConfig, ctx: Optional[RunContext] = None) -> Iterator[CandidateVerdict]:
    """Veredictos de todos os candidatos, na ordem de enumeracao."""
    ctx = ctx or RunContext()
    task_ctx = replace(ctx, jobs=1)
    candidates = enumerate(enumerate_candidates(config))
    while True:
        batch = [(i, fmap, config, task_ctx) for i, fmap in itertools.islice(candidates, BATCH_SIZE)]
        if not batch:
            return
        yield from run_parallel(_judge_task, batch, ctx.jobs)


@dataclass
class SearchSummary:
    candidates_tested: int = 0
    rejected_not_fixed: int = 0
    rejected_by_prime: Dict[int, int] = field(default_factory=dict)
    rejected_other: int = 0
    passes: int = 0
    degenerate_primes: List[int] = field(default_factory=list)
    no_primes_tested: bool = False
    truncated: bool = False

    def record(self, verdict: CandidateVerdict) -> None:
        self.candidates_tested += 1
        if not verdict.fixed_over_Z:
            self.rejected_not_fixed += 1
        elif verdict.overall == "pass":
            self.passes += 1
        elif verdict.per_prime and not verdict.per_prime[-1].sorts_correctly:
            p = verdict.per_prime[-1].p
            self.rejected_by_prime[p] = self.rejected_by_prime.get(p, 0) + 1
        else:
            self.rejected_other += 1
        for result in verdict.per_prime:
            if result.degenerate and result.p not in self.degenerate_primes:
                self.degenerate_primes.append(result.p)

    def finish(self, config: SearchConfig) -> "SearchSummary":
        self.degenerate_primes.sort()
        self.no_primes_tested = not config.primes
        self.truncated = candidate_space_size(config) > config.candidate_budget
        return self

    def to_json(self) -> Dict[str, Any]:
        data = asdict(self)
        data["rejected_by_prime"] = {str(p): n for p, n in sorted(self.rejected_by_prime.items())}
        return {"summary": data}


def run_search(config: SearchConfig, ctx: Optional[RunContext] = None) -> Tuple[List[CandidateVerdict], SearchSummary]:
    """Somente os aprovados, em ordem de enumeracao, e o resumo por etapa."""
    passes: List[CandidateVerdict] = []
    summary = SearchSummary()
    for verdict in iter_verdicts(config, ctx):
        summary.record(verdict)
        if verdict.overall == "pass":
            passes.append(verdict)
    summary.finish(config)
    logger.info(
        f"run_search: {summary.candidates_tested} candidatos, {summary.passes} aprovados, "
        f"{summary.rejected_not_fixed} sem pontos fixos"
    )
    return passes, summary
