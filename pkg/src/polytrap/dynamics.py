"""Orbitas e grafos funcionais de mapas polinomiais sobre F_p^n e GF(p^k)^n.

Indexacao de pontos: mixed-radix linha-major, primeira coordenada mais
significativa: index = sum(coords[j] * p^(n-1-j)).
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from polytrap.errors import BudgetExceeded, DimensionMismatch, SizeBoundExceeded, TargetNotFixed
from polytrap.modfield import ExtElement, ExtField, ext_eval_poly, require_prime
from polytrap.poly import Point, PolyMap, map_evaluate, map_evaluate_vectorized
from polytrap.utils import RunContext, logger, run_parallel


# ============================================================================
# Indexacao
# ============================================================================


def point_index(point: Point) -> int:
    index = 0
    for c in point.coords:
        if not 0 <= c < point.modulus:
            raise ValueError(f"coordenada {c} fora de [0, {point.modulus})")
        index = index * point.modulus + c
    return index


def point_of_index(i: int, p: int, n: int) -> Point:
    if not 0 <= i < p ** n:
        raise IndexError(f"indice {i} fora de [0, {p}^{n})")
    coords = []
    for _ in range(n):
        i, c = divmod(i, p)
        coords.append(c)
    return Point(tuple(reversed(coords)), p)


def indices_to_coords(indices: np.ndarray, p: int, n: int) -> List[np.ndarray]:
    coords = []
    rest = np.asarray(indices, dtype=np.int64)
    for _ in range(n):
        rest, c = np.divmod(rest, p)
        coords.append(c)
    return coords[::-1]


def coords_to_indices(coords: Sequence[np.ndarray], p: int) -> np.ndarray:
    index = np.zeros(np.shape(coords[0]), dtype=np.int64)
    for c in coords:
        index = index * p + c
    return index


# ============================================================================
# Iteracao e orbitas
# ============================================================================


def iterate_k(fmap: PolyMap, point: Point, k: int) -> Point:
    if len(point.coords) != fmap.num_vars:
        raise DimensionMismatch(f"ponto com {len(point.coords)} coordenadas para mapa em {fmap.num_vars} variaveis")
    for _ in range(k):
        point = map_evaluate(fmap, point)
    return point


def iterate_points(fmap: PolyMap, coords: Sequence[np.ndarray], p: int, k: int) -> List[np.ndarray]:
    """Aplica o mapa k vezes a arrays de coordenadas (vetorizado)."""
    current = [np.asarray(c, dtype=np.int64) % p for c in coords]
    for _ in range(k):
        current = map_evaluate_vectorized(fmap, current, p)
    return current


def evaluate_map_plane(fmap: PolyMap, p: int) -> List[np.ndarray]:
    """Imagem de todo o plano F_p^n, na ordem dos indices."""
    size = p ** fmap.num_vars
    return map_evaluate_vectorized(fmap, indices_to_coords(np.arange(size, dtype=np.int64), p, fmap.num_vars), p)


def trajectory(fmap: PolyMap, point: Point, steps: int) -> List[Point]:
    """[x0, F(x0), ..., F^steps(x0)]."""
    points = [point]
    for _ in range(steps):
        point = map_evaluate(fmap, point)
        points.append(point)
    return points


@dataclass(frozen=True)
class OrbitSummary:
    start: Point
    tail_length: int
    cycle_length: int
    hits_target: bool
    steps_to_target: Optional[int]


def orbit(fmap: PolyMap, point: Point, max_steps: int) -> OrbitSummary:
    """Cauda e ciclo com memoria O(1) (Brent, tartaruga teletransportada).

    `BudgetExceeded` quando cauda + ciclo > max_steps; com max_steps >= p^n o
    resultado e sempre exato. O alvo e o ponto todo zero.
    """

    if max_steps < 1:
        raise ValueError("max_steps deve ser >= 1")
    step = lambda q: map_evaluate(fmap, q)  # noqa: E731
    horizon = 3 * max_steps

    # fase 1: comprimento do ciclo
    power = lam = 1
    tortoise = point
    hare = step(point)
    hare_pos = 1
    while tortoise != hare:
        if hare_pos > horizon:
            raise BudgetExceeded(max_steps)
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = step(hare)
        hare_pos += 1
        lam += 1

    # fase 2: comprimento da cauda
    tortoise = hare = point
    for _ in range(lam):
        hare = step(hare)
    mu = 0
    while tortoise != hare:
        tortoise = step(tortoise)
        hare = step(hare)
        mu += 1
    if mu + lam > max_steps:
        raise BudgetExceeded(max_steps)

    steps_to_target = None
    current = point
    for i in range(mu + lam):
        if current.is_zero():
            steps_to_target = i
            break
        current = step(current)
    return OrbitSummary(point, mu, lam, steps_to_target is not None, steps_to_target)


# ============================================================================
# Grafo funcional
# ============================================================================


@dataclass(frozen=True)
class FunctionalGraph:
    p: int
    n: int
    size: int
    successor: np.ndarray
    cycles: Tuple[Tuple[int, ...], ...]
    tail_depth: np.ndarray
    basin_id: np.ndarray

    def point(self, index: int) -> Point:
        return point_of_index(index, self.p, self.n)

    def max_tail_depth(self) -> int:
        return int(self.tail_depth.max()) if self.size else 0

    def basin_sizes(self) -> List[int]:
        return np.bincount(self.basin_id, minlength=len(self.cycles)).tolist()


def _successor_chunk(task: Tuple[PolyMap, int, int, int]) -> np.ndarray:
    fmap, p, start, stop = task
    coords = indices_to_coords(np.arange(start, stop, dtype=np.int64), p, fmap.num_vars)
    return coords_to_indices(map_evaluate_vectorized(fmap, coords, p), p)


def successor_array(fmap: PolyMap, p: int, ctx: Optional[RunContext] = None) -> np.ndarray:
    """F(i) para todo indice, em blocos contiguos (paralelos com ctx.jobs > 1)."""
    ctx = ctx or RunContext()
    size = p ** fmap.num_vars
    chunk = max(1, ctx.chunk_size)
    tasks = [(fmap, p, start, min(start + chunk, size)) for start in range(0, size, chunk)]
    logger.debug(f"successor_array: {fmap.label()} p={p} size={size} blocos={len(tasks)} jobs={ctx.jobs}")
    parts = run_parallel(_successor_chunk, tasks, ctx.jobs)
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def analyze_successors(successor: np.ndarray) -> Tuple[Tuple[Tuple[int, ...], ...], np.ndarray, np.ndarray]:
    """Ciclos por descascamento de grau de entrada, profundidades por BFS reversa.

    Retorna (cycles, tail_depth, basin_id). Cada ciclo comeca no menor indice e
    os ciclos sao ordenados por esse indice.
    """

    succ = np.asarray(successor, dtype=np.int64)
    size = len(succ)
    succ_list = succ.tolist()
    indegree = np.bincount(succ, minlength=size).tolist()

    # descascamento: remove repetidamente os pontos de grau de entrada 0
    on_cycle = [True] * size
    queue = deque(i for i in range(size) if indegree[i] == 0)
    while queue:
        i = queue.popleft()
        on_cycle[i] = False
        j = succ_list[i]
        indegree[j] -= 1
        if indegree[j] == 0:
            queue.append(j)

    tail_depth = [-1] * size
    basin_id = [-1] * size
    cycles: List[Tuple[int, ...]] = []
    for i in range(size):
        if on_cycle[i] and basin_id[i] < 0:
            members = []
            j = i
            while basin_id[j] < 0:
                basin_id[j] = len(cycles)
                tail_depth[j] = 0
                members.append(j)
                j = succ_list[j]
            cycles.append(tuple(members))

    # predecessores em formato CSR
    order = np.argsort(succ, kind="stable").tolist()
    starts = np.concatenate(([0], np.cumsum(np.bincount(succ, minlength=size)))).tolist()
    frontier = deque(i for i in range(size) if on_cycle[i])
    while frontier:
        j = frontier.popleft()
        for k in range(starts[j], starts[j + 1]):
            i = order[k]
            if tail_depth[i] < 0:
                tail_depth[i] = tail_depth[j] + 1
                basin_id[i] = basin_id[j]
                frontier.append(i)

    return tuple(cycles), np.asarray(tail_depth, dtype=np.int64), np.asarray(basin_id, dtype=np.int64)


def check_graph_budget(size: int, ctx: RunContext) -> None:
    if size > ctx.max_graph_points:
        raise SizeBoundExceeded("grafo excede o orcamento de memoria; use amostragem de orbitas", size, ctx.max_graph_points)


def build_graph(fmap: PolyMap, p: int, ctx: Optional[RunContext] = None) -> FunctionalGraph:
    ctx = ctx or RunContext()
    require_prime(p)
    size = p ** fmap.num_vars
    check_graph_budget(size, ctx)
    successor = successor_array(fmap, p, ctx)
    cycles, tail_depth, basin_id = analyze_successors(successor)
    logger.debug(f"build_graph: {fmap.label()} p={p} ciclos={len(cycles)} cauda_max={int(tail_depth.max())}")
    return FunctionalGraph(p, fmap.num_vars, size, successor, cycles, tail_depth, basin_id)


def _target_index(graph: FunctionalGraph, target: Point) -> int:
    t = point_index(target)
    if int(graph.successor[t]) != t:
        raise TargetNotFixed(target.coords, graph.point(int(graph.successor[t])).coords)
    return t


def nilpotency_index(graph: FunctionalGraph, target: Point) -> Optional[int]:
    """Menor N com F^N constante igual ao alvo, ou None se existem outros ciclos."""
    t = _target_index(graph, target)
    if len(graph.cycles) == 1 and graph.cycles[0] == (t,):
        return graph.max_tail_depth()
    return None


def trapped_mask(graph: FunctionalGraph, target: Point) -> np.ndarray:
    t = _target_index(graph, target)
    return graph.basin_id == graph.basin_id[t]


def trapped_set(graph: FunctionalGraph, target: Point) -> frozenset:
    """Indices cujas orbitas chegam ao alvo (bacia do ciclo {alvo})."""
    return frozenset(np.flatnonzero(trapped_mask(graph, target)).tolist())


def cycle_spectrum(graph: FunctionalGraph) -> List[int]:
    return sorted(len(c) for c in graph.cycles)


# ============================================================================
# Exportacao
# ============================================================================


def export_edges(graph: FunctionalGraph, stream: TextIO) -> None:
    for i, j in enumerate(graph.successor.tolist()):
        stream.write(f"{i} -> {j}\n")


def graph_summary(graph: FunctionalGraph, fmap: Optional[PolyMap] = None) -> Dict[str, object]:
    spectrum = Counter(cycle_spectrum(graph))
    return {
        "map": fmap.label() if fmap else None,
        "p": graph.p,
        "n": graph.n,
        "size": graph.size,
        "cycle_count": len(graph.cycles),
        "cycle_spectrum": {str(length): count for length, count in sorted(spectrum.items())},
        "max_tail_depth": graph.max_tail_depth(),
        "basin_sizes": graph.basin_sizes(),
        "cycles": [
            [list(graph.point(i).coords) for i in cycle] for cycle in graph.cycles if len(cycle) <= 16
        ],
    }


def write_summary(graph: FunctionalGraph, stream: TextIO, fmap: Optional[PolyMap] = None) -> None:
    json.dump(graph_summary(graph, fmap), stream, indent=2)
    stream.write("\n")


# ============================================================================
# Extensoes GF(p^k)
# ============================================================================


def ext_point_of_index(field: ExtField, index: int, n: int) -> Tuple[ExtElement, ...]:
    coords = []
    for _ in range(n):
        index, c = divmod(index, field.size)
        coords.append(field.element_of_index(c))
    return tuple(reversed(coords))


def ext_point_index(field: ExtField, coords: Iterable[ExtElement]) -> int:
    index = 0
    for c in coords:
        index = index * field.size + field.index_of(c)
    return index


def ext_map_evaluate(fmap: PolyMap, coords: Sequence[ExtElement]) -> Tuple[ExtElement, ...]:
    return tuple(ext_eval_poly(c, coords) for c in fmap.components)


def periodic_points_ext(
    fmap: PolyMap, field: ExtField, ctx: Optional[RunContext] = None
) -> List[Tuple[Tuple[ExtElement, ...], int]]:
    """Todos os pontos periodicos de GF(p^k)^n com seus periodos minimos."""
    ctx = ctx or RunContext()
    size = field.size ** fmap.num_vars
    if size > ctx.ext_enumeration_bound:
        raise SizeBoundExceeded(f"GF({field.p}^{field.k})^{fmap.num_vars} excede o limite", size, ctx.ext_enumeration_bound)
    successor = np.empty(size, dtype=np.int64)
    for i in range(size):
        image = ext_map_evaluate(fmap, ext_point_of_index(field, i, fmap.num_vars))
        successor[i] = ext_point_index(field, image)
    cycles, _, _ = analyze_successors(successor)
    logger.info(f"periodic_points_ext: {fmap.label()} sobre {field}: {len(cycles)} ciclos")
    result = []
    for cycle in cycles:
        for i in cycle:
            result.append((ext_point_of_index(field, i, fmap.num_vars), len(cycle)))
    return result


def format_ext_point(coords: Sequence[ExtElement]) -> str:
    return "(" + ", ".join(str(c) for c in coords) + ")"
