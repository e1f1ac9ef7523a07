import io

import numpy as np
import pytest

from polytrap.dynamics import (
    analyze_successors,
    build_graph,
    cycle_spectrum,
    evaluate_map_plane,
    export_edges,
    graph_summary,
    iterate_k,
    nilpotency_index,
    orbit,
    periodic_points_ext,
    point_index,
    point_of_index,
    trajectory,
    trapped_set,
)
from polytrap.errors import BudgetExceeded, SizeBoundExceeded, TargetNotFixed
from polytrap.modfield import make_ext_field, primes_in_range
from polytrap.poly import Point, PolyMap, builtin
from polytrap.utils import RunContext


def test_point_indexing():
    assert point_index(Point((2, 3), 7)) == 17
    assert point_index(Point((0, 0), 5)) == 0
    assert point_of_index(17, 7, 2) == Point((2, 3), 7)


def test_iterate_k():
    at = builtin("additive_trap")
    assert iterate_k(at, Point((1, 1), 2), 2) == Point((0, 0), 2)
    assert iterate_k(at, Point((2, 3), 7), 0) == Point((2, 3), 7)
    assert iterate_k(at, Point((2, 3), 7), 1) == Point((5, 2), 7)


def test_trajectory_of_additive_trap():
    points = trajectory(builtin("additive_trap"), Point((2, 3), 7), 3)
    assert [p.coords for p in points] == [(2, 3), (5, 2), (1, 0), (0, 0)]


def test_orbit_reaches_target():
    summary = orbit(builtin("additive_trap"), Point((1, 1), 2), 4)
    assert (summary.tail_length, summary.cycle_length) == (2, 1)
    assert summary.hits_target
    assert summary.steps_to_target == 2


def test_orbit_from_fixed_target():
    summary = orbit(builtin("power_trap"), Point((0, 0), 11), 1)
    assert (summary.tail_length, summary.cycle_length, summary.steps_to_target) == (0, 1, 0)


def test_orbit_of_multiplicative_cycle():
    mt = builtin("multiplicative_trap")
    summary = orbit(mt, Point((1, 3), 7), 49)
    assert not summary.hits_target
    assert summary.steps_to_target is None
    ratios = set()
    for q in trajectory(mt, Point((1, 3), 7), summary.tail_length + summary.cycle_length):
        x, y = q.coords
        ratios.add(y * pow(x, -1, 7) % 7)
    assert ratios == {3, 5, 6}


def test_orbit_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        orbit(builtin("additive_trap"), Point((1, 1), 2), 2)


def test_orbit_property_tail_plus_cycle():
    fmap = builtin("multiplicative_trap")
    for i in range(49):
        start = point_of_index(i, 7, 2)
        s = orbit(fmap, start, 49)
        assert iterate_k(fmap, start, s.tail_length + s.cycle_length) == iterate_k(fmap, start, s.tail_length)


def test_graph_of_additive_trap_mod_2():
    graph = build_graph(builtin("additive_trap"), 2)
    assert graph.size == 4
    assert graph.cycles == ((0,),)
    assert graph.tail_depth.tolist() == [0, 1, 1, 2]
    assert nilpotency_index(graph, Point((0, 0), 2)) == 2
    assert cycle_spectrum(graph) == [1]


def test_identity_graph_is_all_fixed_points():
    graph = build_graph(PolyMap.identity(2), 3)
    assert cycle_spectrum(graph) == [1] * 9
    assert graph.tail_depth.tolist() == [0] * 9
    assert nilpotency_index(graph, Point((0, 0), 3)) is None


def test_graph_invariants_hold():
    graph = build_graph(builtin("multiplicative_trap"), 7)
    succ = graph.successor
    for i in range(graph.size):
        if graph.tail_depth[i] == 0:
            cycle = graph.cycles[graph.basin_id[i]]
            assert i in cycle
            assert int(succ[i]) in cycle
        else:
            assert graph.tail_depth[i] == graph.tail_depth[succ[i]] + 1
            assert graph.basin_id[i] == graph.basin_id[succ[i]]
    assert len(graph.cycles) > 1
    assert nilpotency_index(graph, Point((0, 0), 7)) is None


def test_cycles_start_at_min_index_and_are_sorted():
    graph = build_graph(builtin("multiplicative_trap"), 7)
    assert all(c[0] == min(c) for c in graph.cycles)
    assert [c[0] for c in graph.cycles] == sorted(c[0] for c in graph.cycles)


def test_chunked_and_parallel_graphs_agree():
    fmap = builtin("power_trap")
    serial = build_graph(fmap, 13)
    chunked = build_graph(fmap, 13, RunContext(chunk_size=10, jobs=2))
    assert np.array_equal(serial.successor, chunked.successor)
    assert serial.cycles == chunked.cycles


def test_trapped_sets():
    five = build_graph(builtin("additive_trap"), 5)
    assert trapped_set(five, Point((0, 0), 5)) == frozenset(range(25))
    seven = build_graph(builtin("multiplicative_trap"), 7)
    trapped = trapped_set(seven, Point((0, 0), 7))
    assert len(trapped) < 49
    assert point_index(Point((1, 3), 7)) not in trapped


def test_target_must_be_fixed():
    graph = build_graph(PolyMap.from_texts(["x + 1", "y"]), 3)
    with pytest.raises(TargetNotFixed):
        nilpotency_index(graph, Point((0, 0), 3))


def test_graph_budget():
    with pytest.raises(SizeBoundExceeded):
        build_graph(builtin("additive_trap"), 11, RunContext(max_graph_points=100))


def test_analyze_successors_on_hand_made_array():
    cycles, depth, basin = analyze_successors(np.array([1, 2, 1, 3, 3]))
    assert cycles == ((1, 2), (3,))
    assert depth.tolist() == [1, 0, 0, 0, 1]
    assert basin.tolist() == [0, 0, 0, 1, 1]


def test_exports():
    graph = build_graph(builtin("additive_trap"), 2)
    buffer = io.StringIO()
    export_edges(graph, buffer)
    assert buffer.getvalue() == "0 -> 0\n1 -> 0\n2 -> 0\n3 -> 2\n"
    summary = graph_summary(graph)
    assert summary["cycle_spectrum"] == {"1": 1}
    assert summary["max_tail_depth"] == 2


def test_gf4_two_cycle():
    field = make_ext_field(2, 2)
    periodic = periodic_points_ext(builtin("additive_trap"), field)
    found = {tuple(str(c) for c in coords): period for coords, period in periodic}
    assert found == {("0", "0"): 1, ("t", "1"): 2, ("t+1", "1"): 2}


def test_gf2_only_origin_is_periodic():
    periodic = periodic_points_ext(builtin("additive_trap"), make_ext_field(2, 1))
    assert [(tuple(str(c) for c in coords), period) for coords, period in periodic] == [(("0", "0"), 1)]


def test_evaluate_map_plane_matches_successors():
    fmap = builtin("power_trap")
    graph = build_graph(fmap, 5)
    images = evaluate_map_plane(fmap, 5)
    assert np.array_equal(images[0] * 5 + images[1], graph.successor)


def test_iterate_k_walks_the_successor_array():
    fmap = builtin("multiplicative_trap")
    graph = build_graph(fmap, 11)
    succ = graph.successor.tolist()
    for i in range(0, graph.size, 7):
        j = i
        for k in range(51):
            assert point_index(iterate_k(fmap, graph.point(i), k)) == j, (i, k)
            j = succ[j]


GRAPH_MAPS = [
    builtin("additive_trap"),
    builtin("multiplicative_trap"),
    builtin("power_trap"),
    PolyMap.from_texts(["x^2 + y", "x*y + 1"]),
]


@pytest.mark.parametrize("fmap", GRAPH_MAPS, ids=lambda m: m.label())
def test_peeling_matches_brute_force(fmap):
    for p in primes_in_range(2, 13):
        graph = build_graph(fmap, p)
        succ = graph.successor
        # apos size passos todo ponto ja esta no seu ciclo
        landing = np.arange(graph.size, dtype=np.int64)
        for _ in range(graph.size):
            landing = succ[landing]
        on_cycle = set(landing.tolist())
        assert {i for c in graph.cycles for i in c} == on_cycle

        for cycle in graph.cycles:
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                assert int(succ[a]) == b

        for i in range(graph.size):
            depth, j = 0, i
            while j not in on_cycle:
                j, depth = int(succ[j]), depth + 1
            assert graph.tail_depth[i] == depth
            assert graph.basin_id[i] == graph.basin_id[landing[i]]


@pytest.mark.parametrize("fmap", GRAPH_MAPS, ids=lambda m: m.label())
def test_basins_partition_the_plane(fmap):
    for p in primes_in_range(2, 13):
        graph = build_graph(fmap, p)
        assert graph.basin_id.min() >= 0
        assert graph.basin_id.max() == len(graph.cycles) - 1
        assert sum(graph.basin_sizes()) == graph.size
        assert all(size >= len(c) for size, c in zip(graph.basin_sizes(), graph.cycles))
