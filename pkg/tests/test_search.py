import hashlib
import json

import pytest

from polytrap.errors import InvalidConfig, NotFixedModP
from polytrap.poly import PolyMap, format_polynomial, parse
from polytrap.search import (
    SearchConfig,
    SearchSummary,
    candidate_space_size,
    control_run,
    enumerate_candidates,
    enumerate_components,
    is_fixed_over_Z,
    iter_verdicts,
    judge_candidate,
    monomials,
    reverify_pass,
    run_search,
    sorts_by_first_coordinate,
)
from polytrap.utils import RunContext

SMALL = dict(max_degree=2, coefficient_range=(0, 1), max_terms=1, primes=(2, 3, 5))


def test_config_defaults_and_validation():
    config = SearchConfig()
    assert config.fixed_point_a == (0, 0)
    assert config.fixed_point_b == (1, 0)
    with pytest.raises(InvalidConfig):
        SearchConfig(fixed_point_a=(0, 0), fixed_point_b=(0, 0))
    with pytest.raises(InvalidConfig):
        SearchConfig(fixed_point_b=(0, 5))
    with pytest.raises(InvalidConfig):
        SearchConfig(primes=(2, 4))
    with pytest.raises(InvalidConfig):
        SearchConfig(coefficient_range=(3, -3))


def test_config_from_mapping_and_file(tmp_path):
    with pytest.raises(InvalidConfig):
        SearchConfig.from_mapping({"max_degre": 3})
    path = tmp_path / "search.yaml"
    path.write_text("max_degree: 3\nprimes: [2, 3]\ncoefficient_range: [-1, 1]\n")
    config = SearchConfig.from_file(path)
    assert config.max_degree == 3
    assert config.primes == (2, 3)
    assert config.to_json()["coefficient_range"] == [-1, 1]
    with pytest.raises(InvalidConfig):
        SearchConfig.from_file(tmp_path / "missing.yaml")


def test_monomial_order():
    assert monomials(2, 2) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def test_enumeration_contains_additive_trap_components():
    config = SearchConfig(max_degree=3, coefficient_range=(-1, 2), max_terms=2)
    seen = {format_polynomial(c) for c in enumerate_components(config)}
    assert format_polynomial(parse("x^2*y", 2)) in seen
    assert format_polynomial(parse("x^2*y + x*y^2", 2)) in seen
    assert "0" in seen


def test_enumeration_budget_and_constants():
    assert list(enumerate_candidates(SearchConfig(candidate_budget=0))) == []
    constants = list(enumerate_components(SearchConfig(max_degree=0, coefficient_range=(-1, 2))))
    assert len(constants) == 4
    assert all(c.is_zero() or c.degree() == 0 for c in constants)
    budgeted = list(enumerate_candidates(SearchConfig(candidate_budget=7)))
    assert len(budgeted) == 7


def test_is_fixed_over_Z():
    fmap = PolyMap.from_texts(["x^2", "0"])
    assert is_fixed_over_Z(fmap, (0, 0))
    assert is_fixed_over_Z(fmap, (1, 0))
    assert not is_fixed_over_Z(fmap, (2, 0))


def test_identity_map_fails_with_extra_cycle():
    verdict = judge_candidate(0, PolyMap.identity(2), SearchConfig(primes=(2, 3)), RunContext())
    assert verdict.fixed_over_Z
    assert verdict.overall == "fail"
    assert verdict.reason == "fails at p=2"
    assert verdict.per_prime[0].reason.startswith("extra cycle")


def test_square_map_sorts_for_small_primes():
    fmap = PolyMap.from_texts(["x^2", "0"])
    result = sorts_by_first_coordinate(fmap, 5, (0, 0), (1, 0))
    assert result.sorts_correctly
    assert result.required_iterate == 2
    assert reverify_pass(fmap, 5, (0, 0), (1, 0), 2)
    failed = sorts_by_first_coordinate(fmap, 7, (0, 0), (1, 0))
    assert not failed.sorts_correctly


def test_iteration_budget_is_enforced():
    fmap = PolyMap.from_texts(["x^2", "0"])
    result = sorts_by_first_coordinate(fmap, 5, (0, 0), (1, 0), budget=1)
    assert not result.sorts_correctly
    assert result.required_iterate == 2


def test_fixed_point_must_survive_reduction():
    fmap = PolyMap.from_texts(["x + 1", "y"])
    with pytest.raises(NotFixedModP):
        sorts_by_first_coordinate(fmap, 3, (0, 0), (1, 0))


def test_control_run_passes():
    results = control_run([2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31])
    assert all(r.sorts_correctly for r in results)


def test_small_search_finds_square_map():
    passes, summary = run_search(SearchConfig(**SMALL))
    found = [[format_polynomial(c) for c in v.map.components] for v in passes]
    assert ["x^2", "0"] in found
    assert summary.candidates_tested == 49
    assert summary.passes == len(passes)
    assert not summary.no_primes_tested
    assert summary.to_json()["summary"]["candidates_tested"] == 49


def test_empty_prime_list_passes_vacuously():
    passes, summary = run_search(SearchConfig(primes=(), candidate_budget=10))
    assert summary.no_primes_tested
    assert all(v.fixed_over_Z for v in passes)
    assert summary.truncated


def test_search_is_deterministic():
    config = SearchConfig(**SMALL)
    first, _ = run_search(config)
    second, _ = run_search(config, RunContext(jobs=2))
    assert [v.to_json() for v in first] == [v.to_json() for v in second]


def _stream_digest(config: SearchConfig) -> tuple:
    digest = hashlib.sha256()
    count = 0
    for verdict in iter_verdicts(config):
        digest.update(json.dumps(verdict.to_json(), sort_keys=True).encode() + b"\n")
        count += 1
    return count, digest.hexdigest()


def test_default_search_stream_is_byte_identical_across_runs():
    config = SearchConfig()
    first = _stream_digest(config)
    assert first[0] == config.candidate_budget
    assert _stream_digest(SearchConfig()) == first


def test_truncated_only_when_candidates_are_left_over():
    base = dict(max_degree=0, coefficient_range=(1, 1), max_terms=1, primes=(2, 3))
    assert candidate_space_size(SearchConfig(**base)) == 4

    exact = SearchConfig(**base, candidate_budget=4)
    _, summary = run_search(exact)
    assert summary.candidates_tested == 4
    assert not summary.truncated

    short = SearchConfig(**base, candidate_budget=3)
    _, summary = run_search(short)
    assert summary.candidates_tested == 3
    assert summary.truncated

    assert not SearchSummary().finish(SearchConfig(**base, candidate_budget=10)).truncated
