import numpy as np
import pytest

from secregion import (
    ChannelPair,
    Scenario,
    oma_timeshare,
    random_search_region,
    region_contains,
    solve_wiretap,
    tdma_region,
    waterfill,
)


class TestRandomSearchRegion:
    def test_single_sample_is_origin(self, ch22):
        reg = random_search_region(ch22, Scenario("C", False), 5.0, 1, seed=0)
        assert len(reg.points) == 1
        assert reg.points[0].as_array().tolist() == [0.0, 0.0, 0.0]

    def test_scalar_known_optimum(self):
        ch = ChannelPair([[2.0]], [[1.0]])
        reg = random_search_region(ch, Scenario("C", False), 1.0, 20000, seed=1)
        assert reg.max_rate(1) == pytest.approx(0.5 * np.log2(2.5), abs=1e-2)
        assert reg.max_rate(1) <= 0.5 * np.log2(2.5) + 1e-12

    def test_deterministic(self, ch22):
        a = random_search_region(ch22, Scenario("B", False), 4.0, 500, seed=7)
        b = random_search_region(ch22, Scenario("B", False), 4.0, 500, seed=7)
        assert len(a.points) == len(b.points)
        for pa, pb in zip(a.points, b.points):
            assert pa.as_array().tolist() == pb.as_array().tolist()

    def test_relaxing_security_only_enlarges(self, ch22):
        # the same covariances rated without security constraints dominate
        # the secured rating pointwise, so the A-region contains the C-region
        regc = random_search_region(ch22, Scenario("C", False), 6.0, 3000, seed=3)
        rega = random_search_region(ch22, Scenario("A", False), 6.0, 3000, seed=3)
        for p in regc.points:
            assert region_contains(rega, p, slack=1e-9)

    def test_common_share_respected(self, ch22):
        reg = random_search_region(ch22, Scenario("A", True), 6.0, 2000, seed=5)
        assert reg.max_rate(0) > 0.0


class TestTdmaRegion:
    def test_zero_power(self, ch22):
        reg = tdma_region(ch22, Scenario("A"), 0.0)
        assert reg.points[0].as_array().tolist() == [0.0, 0.0, 0.0]

    def test_diagonal_closed_form(self):
        ch = ChannelPair(np.diag([2.0, 1.0]), np.diag([1.0, 2.0]))
        reg = tdma_region(ch, Scenario("A"), 1.0)
        (pt,) = reg.points
        _, r1 = waterfill(ch.h1, 1.0)
        _, r2 = waterfill(ch.h2, 1.0)
        assert pt.r1 == pytest.approx(r1 / 3.0, abs=1e-12)
        assert pt.r2 == pytest.approx(r2 / 3.0, abs=1e-12)
        assert pt.r0 > 0

    def test_two_slots_without_common(self, ch22):
        reg = tdma_region(ch22, Scenario("A", common_enabled=False), 4.0)
        (pt,) = reg.points
        _, r1 = waterfill(ch22.h1, 4.0)
        assert pt.r0 == 0.0
        assert pt.r1 == pytest.approx(r1 / 2.0, abs=1e-12)

    def test_wiretap_slots_for_secured_users(self, ch22):
        reg = tdma_region(ch22, Scenario("C"), 6.0)
        (pt,) = reg.points
        ref1 = solve_wiretap(ch22.h1, ch22.h2, 6.0).rate
        ref2 = solve_wiretap(ch22.h2, ch22.h1, 6.0).rate
        assert pt.r1 == pytest.approx(ref1 / 3.0, abs=1e-9)
        assert pt.r2 == pytest.approx(ref2 / 3.0, abs=1e-9)


class TestOmaTimeshare:
    def test_requires_common_off(self, ch22):
        with pytest.raises(ValueError):
            oma_timeshare(ch22, Scenario("A", common_enabled=True), 1.0)

    def test_symmetric_channels(self):
        ch = ChannelPair(np.diag([2.0, 1.0]), np.diag([1.0, 2.0]))
        reg = oma_timeshare(ch, Scenario("A", common_enabled=False), 2.0)
        rates = sorted((p.r1, p.r2) for p in reg.points)
        assert rates[0][0] == 0.0 and rates[1][1] == 0.0
        assert rates[0][1] == pytest.approx(rates[1][0], abs=1e-12)

    def test_endpoints_match_solvers(self, ch22):
        reg = oma_timeshare(ch22, Scenario("C", common_enabled=False), 12.0)
        ref1 = solve_wiretap(ch22.h1, ch22.h2, 12.0).rate
        ref2 = solve_wiretap(ch22.h2, ch22.h1, 12.0).rate
        assert any(p.r1 == pytest.approx(ref1, abs=1e-9) for p in reg.points)
        assert any(p.r2 == pytest.approx(ref2, abs=1e-9) for p in reg.points)

    def test_private_endpoint_is_waterfilling(self, ch22):
        reg = oma_timeshare(ch22, Scenario("B", common_enabled=False), 4.0)
        _, wf2 = waterfill(ch22.h2, 4.0)
        assert any(p.r2 == pytest.approx(wf2, abs=1e-12) for p in reg.points)
