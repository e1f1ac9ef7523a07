import pytest

from polytrap.errors import NonPrimeModulus
from polytrap.modfield import is_primitive_root, primes_in_range
from polytrap.poly import Point, PolyMap
from polytrap.traps import (
    STREAMED,
    ClaimId,
    RatioClass,
    all_hold,
    characterize_untrapped,
    kill_iterations_bound,
    predicted_multiplicative_untrapped,
    predicted_power_untrapped,
    verify_additive_trap,
    verify_all,
    verify_multiplicative_trap,
    verify_power_trap,
    verify_ratio_recurrence,
    verify_single_attractor,
)
from polytrap.utils import RunContext


def test_additive_trap_small_primes():
    report = verify_additive_trap(2)
    assert report.holds
    assert report.nilpotency_index == 2
    for p in (5, 7):
        report = verify_additive_trap(p)
        assert report.holds
        assert report.nilpotency_index <= p
        assert report.details["minimal_iterations"] == report.nilpotency_index


def test_additive_trap_up_to_199():
    reports = verify_all(primes_in_range(2, 199), maps=["additive_trap"], include_ratio=False)
    assert len(reports) == 46
    assert all_hold(reports)
    assert all(r.nilpotency_index <= r.p for r in reports)


def test_multiplicative_trap_with_generator():
    for p in (11, 13):
        report = verify_multiplicative_trap(p)
        assert report.holds
        assert report.observed_untrapped_count == 0
        assert report.witness is None


def test_multiplicative_trap_conditional_case():
    report = verify_multiplicative_trap(7)
    assert report.holds
    assert report.witness == Point((1, 3), 7)
    assert report.details["untrapped_ratio_classes"] == [3, 5, 6]
    assert report.predicted_untrapped_count == report.observed_untrapped_count == 18
    assert report.note == "conditional claim: 2 not a generator; untrapped witness (1,3)"


def test_multiplicative_trap_degenerate_p2():
    report = verify_multiplicative_trap(2)
    assert report.holds
    assert report.details["degenerate"]


def test_multiplicative_dichotomy_up_to_199():
    for p in primes_in_range(3, 199):
        report = verify_multiplicative_trap(p)
        assert report.holds, p
        assert (report.observed_untrapped_count == 0) == is_primitive_root(2, p)
        assert report.observed_untrapped_count == predicted_multiplicative_untrapped(p)


def test_power_trap_fermat_primes():
    for p, k in ((3, 1), (5, 2), (17, 4), (257, 8)):
        report = verify_power_trap(p)
        assert report.holds, p
        assert report.details["fermat_exponent"] == k
        assert report.details["fermat_iterations_suffice"]
        assert report.observed_untrapped_count == 0


def test_power_trap_p7_characterization():
    report = verify_power_trap(7)
    assert report.holds
    assert 49 - report.observed_untrapped_count == 25
    assert predicted_power_untrapped(7) == 24
    assert report.details["kill_iterations_bound"] == 2


def test_power_trap_characterization_up_to_97():
    for p in primes_in_range(3, 97):
        report = verify_power_trap(p)
        assert report.holds, p
        assert report.details["kill_bound_exact"]


def test_kill_iterations_bound():
    assert kill_iterations_bound(65537) == 17
    assert kill_iterations_bound(7) == 2


def test_power_trap_sampled_mode():
    ctx = RunContext(force_sampled=True, sample_size=5000, seed=7)
    report = verify_power_trap(17, ctx)
    assert report.mode == "sampled"
    assert report.holds
    assert report.details["sample_size"] == 5000


def test_sampled_mode_is_seeded():
    ctx = RunContext(force_sampled=True, sample_size=2000, seed=11)
    first = verify_multiplicative_trap(31, ctx)
    second = verify_multiplicative_trap(31, ctx)
    assert first.holds
    assert first.observed_untrapped_count == second.observed_untrapped_count


def test_ratio_recurrences_canonical_orientation():
    for p in primes_in_range(2, 199):
        for name in ("additive_trap", "multiplicative_trap", "power_trap"):
            report = verify_ratio_recurrence(name, p)
            assert report.holds, (name, p)
            assert report.details["canonical_holds"]


def test_printed_orientation_audit():
    report = verify_ratio_recurrence("multiplicative_trap", 11)
    assert report.details["printed_orientation"] == "u/v"
    assert not report.details["printed_holds"]
    additive = verify_ratio_recurrence("additive_trap", 11)
    assert additive.details["printed_orientation"] == "v/u"
    assert additive.details["printed_holds"]


def test_ratio_recurrence_vacuous_at_p2():
    report = verify_ratio_recurrence("multiplicative_trap", 2)
    assert report.holds
    assert report.details["checked_points"] == 0


def test_ratio_recurrence_rejects_non_prime():
    with pytest.raises(NonPrimeModulus):
        verify_ratio_recurrence("power_trap", 9)


def test_ratio_class():
    assert RatioClass.of(2, 3, 7).r == 5
    assert RatioClass.of(1, 3, 7).order() == 6
    with pytest.raises(ValueError):
        RatioClass(0, 7)


def test_single_attractor_for_custom_maps():
    assert verify_single_attractor(PolyMap.from_texts(["x^2*y", "x^2*y + x*y^2"]), 5).holds
    report = verify_single_attractor(PolyMap.identity(2), 3)
    assert not report.holds
    assert report.witness == Point((0, 1), 3)


def test_verify_all_order_and_errors():
    reports = verify_all([2, 3, 5])
    assert [(r.p, r.claim_id) for r in reports[:6]] == [
        (2, ClaimId.ADDITIVE_TRAP),
        (2, ClaimId.RATIO_RECURRENCE),
        (2, ClaimId.MULTIPLICATIVE_TRAP),
        (2, ClaimId.RATIO_RECURRENCE),
        (2, ClaimId.POWER_TRAP),
        (2, ClaimId.RATIO_RECURRENCE),
    ]
    assert len(reports) == 18
    assert all(r.holds for r in reports if r.claim_id == ClaimId.ADDITIVE_TRAP)
    assert verify_all([]) == []
    failures = verify_all([4], maps=["additive_trap"], include_ratio=False)
    assert len(failures) == 1
    assert not failures[0].holds
    assert failures[0].error.startswith("NonPrimeModulus")


def test_verify_all_parallel_matches_serial():
    serial = verify_all([5, 7, 11], RunContext(jobs=1))
    parallel = verify_all([5, 7, 11], RunContext(jobs=3))
    assert [r.to_json(include_timing=False) for r in serial] == [r.to_json(include_timing=False) for r in parallel]


def test_report_json_shape():
    data = verify_multiplicative_trap(7).to_json()
    assert data["witness"] == [1, 3]
    assert data["claim"] == "multiplicative_trap"
    assert data["mode"] == "exhaustive"
    assert set(data) >= {"map", "p", "holds", "nilpotency_index", "predicted_untrapped", "observed_untrapped", "elapsed_ms"}


def test_characterize_untrapped():
    assert characterize_untrapped("mt", 7)["untrapped_ratio_classes"] == [3, 5, 6]
    power = characterize_untrapped("power_trap", 7)
    assert power["untrapped_ratio_classes"] == [2, 3, 4, 5]
    assert power["predicted_untrapped"] == 6 * len(power["untrapped_ratio_classes"])
    assert characterize_untrapped("at", 11)["predicted_untrapped"] == 0


def test_budget_fallback_switches_to_sampling():
    ctx = RunContext(max_graph_points=100, sample_size=500)
    report = verify_power_trap(101, ctx)
    assert report.mode == "sampled"
    assert report.holds
    assert ctx.warnings


@pytest.mark.parametrize("p", [7, 13, 17, 257])
def test_streamed_power_trap_agrees_with_closed_form(p):
    report = verify_power_trap(p, RunContext(stream_plane=True, chunk_size=1000))
    assert report.mode == STREAMED
    assert report.holds
    assert report.witness is None
    assert report.observed_untrapped_count == predicted_power_untrapped(p)
    assert report.details["chunks"] == -(-p * p // 1000)
    if p in (17, 257):
        assert report.details["fermat_iterations_suffice"]
        assert report.observed_untrapped_count == 0


def test_streamed_matches_exhaustive_counts():
    streamed = verify_power_trap(13, RunContext(stream_plane=True, chunk_size=7, jobs=2))
    exhaustive = verify_power_trap(13)
    assert exhaustive.details["kill_bound_exact"]
    assert streamed.observed_untrapped_count == exhaustive.observed_untrapped_count
    assert streamed.details["kill_iterations_bound"] == exhaustive.details["kill_iterations_bound"]
