import numpy as np
import pytest

import plasmix as px
from plasmix.analysis import (
    ErrorReport,
    compute_error_report,
    err_at_point,
    err_time_space,
    err_time_space_mapped,
    probe_node,
    sigma_sq,
)
from plasmix.splitting import Trajectory


def synthetic_trajectory(grid_points, time_steps, snapshot_steps, xi1, xi2, n1=None, n2=None):
    """Hand-built trajectory for metric oracles (no solver involved)."""
    scenario = px.Scenario(
        profile=px.Profile.UPHILL,
        mixture=px.fickian_mixture(1e-6),  # loose stability bound for any (J, N)
        reaction=None,
        grid_points=grid_points,
        time_steps=time_steps,
        scheme=px.Scheme.pure_diffusion(),
    )
    steps = np.asarray(snapshot_steps, dtype=np.int64)
    times = steps * (1.0 / time_steps)
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    shape = (len(steps), grid_points + 1)
    assert xi1.shape == shape
    zeros = np.zeros(shape)
    return Trajectory(
        scenario=scenario,
        scheme=px.Scheme.pure_diffusion(),
        step_indices=steps,
        times=times,
        xi1=xi1,
        xi2=xi2,
        n1=zeros.copy() if n1 is None else np.asarray(n1, dtype=float),
        n2=zeros.copy() if n2 is None else np.asarray(n2, dtype=float),
        loop_seconds=0.0,
    )


def offset_pair(grid_points=50, time_steps=200, delta=0.1):
    snaps = list(range(0, time_steps + 1, time_steps // 4))
    shape = (len(snaps), grid_points + 1)
    rng = np.random.default_rng(1)
    base1 = rng.uniform(0.1, 0.6, size=shape)
    base2 = rng.uniform(0.05, 0.3, size=shape)
    traj = synthetic_trajectory(grid_points, time_steps, snaps, base1, base2)
    ref = synthetic_trajectory(grid_points, time_steps, snaps, base1 + delta, base2)
    return traj, ref


class TestSigmaSq:
    def test_identical_trajectories_give_zero(self):
        traj, _ = offset_pair()
        assert sigma_sq(traj, traj, 1) == 0.0
        assert sigma_sq(traj, traj, "vec") == 0.0

    def test_constant_offset_squares(self):
        traj, ref = offset_pair(delta=0.1)
        assert sigma_sq(traj, ref, 1) == pytest.approx(0.01, rel=1e-12)
        assert sigma_sq(traj, ref, 2) == 0.0
        assert sigma_sq(traj, ref, "vec") == pytest.approx(0.01, rel=1e-12)
        assert sigma_sq(traj, ref, 1, node=7) == pytest.approx(0.01, rel=1e-12)

    def test_symmetric_under_swap(self):
        traj, ref = offset_pair()
        assert sigma_sq(traj, ref, "vec") == pytest.approx(sigma_sq(ref, traj, "vec"), rel=1e-14)

    def test_matches_hand_summation(self):
        # 4 steps, uniform snapshot spacing 0.25, probe a single node
        rng = np.random.default_rng(33)
        xi1_t = rng.uniform(0, 1, (5, 3))
        xi1_r = rng.uniform(0, 1, (5, 3))
        zeros = np.zeros_like(xi1_t)
        traj = synthetic_trajectory(2, 4, [0, 1, 2, 3, 4], xi1_t, zeros)
        ref = synthetic_trajectory(2, 4, [0, 1, 2, 3, 4], xi1_r, zeros)
        expected = sum(0.25 * (xi1_r[s, 1] - xi1_t[s, 1]) ** 2 for s in (1, 2, 3, 4))
        assert sigma_sq(traj, ref, 1, node=1) == pytest.approx(expected, rel=1e-14)

    def test_requires_same_grid(self):
        traj, _ = offset_pair(grid_points=50)
        _, ref = offset_pair(grid_points=40, time_steps=200)
        with pytest.raises(ValueError):
            sigma_sq(traj, ref, 1)

    def test_rejects_unknown_component(self):
        traj, ref = offset_pair()
        with pytest.raises(ValueError):
            sigma_sq(traj, ref, 3)


class TestErrAtPoint:
    def test_identical_trajectories_give_zero(self):
        traj, _ = offset_pair()
        assert err_at_point(traj, traj, 0.72, 1) == 0.0

    def test_constant_offset_integrates_to_delta(self):
        traj, ref = offset_pair(delta=0.1)
        assert err_at_point(traj, ref, 0.5, 1) == pytest.approx(0.1, rel=1e-12)
        # the closure mirrors a pure xi1 offset into xi3
        assert err_at_point(traj, ref, 0.5, "vec") == pytest.approx(0.2, rel=1e-12)

    def test_probe_node_rounding(self):
        assert probe_node(0.72, 140) == 101
        assert probe_node(0.72, 50) == 36
        assert probe_node(0.0, 50) == 0

    def test_matches_hand_summation(self):
        xi1_t = np.array([[0.1, 0.0, 0.3], [0.4, 0.0, 0.1], [0.2, 0.0, 0.2]])
        xi1_r = np.array([[0.1, 0.0, 0.3], [0.1, 0.0, 0.1], [0.6, 0.0, 0.2]])
        zeros = np.zeros_like(xi1_t)
        traj = synthetic_trajectory(2, 2, [0, 1, 2], xi1_t, zeros)
        ref = synthetic_trajectory(2, 2, [0, 1, 2], xi1_r, zeros)
        expected = 0.5 * abs(0.1 - 0.4) + 0.5 * abs(0.6 - 0.2)
        assert err_at_point(traj, ref, 0.0, 1) == pytest.approx(expected, rel=1e-14)

    def test_rejects_probe_outside_domain(self):
        traj, ref = offset_pair()
        with pytest.raises(ValueError):
            err_at_point(traj, ref, 1.5, 1)


class TestErrTimeSpace:
    def test_same_run_gives_zero(self):
        traj, _ = offset_pair(grid_points=50)
        assert err_time_space(traj, traj, 1) == 0.0

    def test_constant_offset_scales_with_skeleton_measure(self):
        # 51 nodes x (1/50) spacing x delta x T = 1.02 * delta
        traj, ref = offset_pair(grid_points=50, delta=0.1)
        assert err_time_space(traj, ref, 1) == pytest.approx(0.102, rel=1e-12)
        assert err_time_space(traj, ref, "vec") == pytest.approx(0.204, rel=1e-12)

    def test_identical_grid_reduces_to_summed_point_errors(self):
        rng = np.random.default_rng(8)
        snaps = [0, 50, 100, 150, 200]
        shape = (5, 51)
        traj = synthetic_trajectory(
            50, 200, snaps, rng.uniform(0, 1, shape), rng.uniform(0, 1, shape)
        )
        ref = synthetic_trajectory(
            50, 200, snaps, rng.uniform(0, 1, shape), rng.uniform(0, 1, shape)
        )
        total = err_time_space(traj, ref, 1)
        summed = sum(err_at_point(traj, ref, k / 50.0, 1) for k in range(51)) / 50.0
        assert total == pytest.approx(summed, rel=1e-12)

    def test_mapped_core_matches_double_loop_oracle(self):
        # tiny 4 -> 8 hierarchy with explicit index maps
        rng = np.random.default_rng(21)
        snaps_t = [0, 2, 4]
        snaps_r = [0, 4, 8]
        traj = synthetic_trajectory(4, 4, snaps_t, rng.uniform(0, 1, (3, 5)), np.zeros((3, 5)))
        ref = synthetic_trajectory(8, 8, snaps_r, rng.uniform(0, 1, (3, 9)), np.zeros((3, 9)))
        nodes_t = np.arange(5)
        nodes_r = 2 * np.arange(5)
        dx_coarse = 0.25
        got = err_time_space_mapped(traj, ref, nodes_t, nodes_r, dx_coarse, 1)
        expected = 0.0
        for k in range(5):
            for s in (1, 2):
                w = 0.5
                expected += dx_coarse * w * abs(
                    ref.xi1[s, nodes_r[k]] - traj.xi1[s, nodes_t[k]]
                )
        assert got == pytest.approx(expected, rel=1e-13)

    def test_rejects_grids_outside_hierarchy(self):
        traj, _ = offset_pair(grid_points=40)
        ref, _ = offset_pair(grid_points=50)
        with pytest.raises(ValueError):
            err_time_space(traj, ref, 1)

    def test_rejects_disjoint_snapshot_times(self):
        a = synthetic_trajectory(4, 7, [0, 7], np.zeros((2, 5)), np.zeros((2, 5)))
        b = synthetic_trajectory(4, 11, [0, 3], np.zeros((2, 5)), np.zeros((2, 5)))
        with pytest.raises(ValueError):
            err_time_space_mapped(a, b, np.arange(5), np.arange(5), 0.25, 1)


class TestErrorReport:
    def test_bundles_all_three_components(self):
        traj, ref = offset_pair(grid_points=50, delta=0.1)
        report = compute_error_report(traj, ref, "err-time-space")
        assert report.err1 == pytest.approx(0.102, rel=1e-12)
        assert report.err2 == 0.0
        assert report.err_vec == pytest.approx(0.204, rel=1e-12)
        assert report.kind == "err-time-space"
        assert report.scheme == "pure-diffusion"
        point = compute_error_report(traj, ref, "err-at-point", x=0.3)
        assert point.err1 == pytest.approx(0.1, rel=1e-12)
        sigma = compute_error_report(traj, ref, "sigma-sq")
        assert sigma.err1 == pytest.approx(0.01, rel=1e-12)

    def test_rejects_bad_kind_and_negative_values(self):
        traj, ref = offset_pair()
        with pytest.raises(ValueError):
            compute_error_report(traj, ref, "energy-norm")
        with pytest.raises(ValueError):
            compute_error_report(traj, ref, "err-at-point")
        with pytest.raises(ValueError):
            ErrorReport(-1.0, 0.0, 0.0, "sigma-sq", 1e-3, "ab")


class TestObservedOrder:
    def test_exact_first_and_second_order(self):
        dts = np.array([0.1, 0.05, 0.025, 0.0125])
        assert px.observed_order(3.0 * dts, dts) == pytest.approx(1.0, abs=1e-12)
        assert px.observed_order(3.0 * dts**2, dts) == pytest.approx(2.0, abs=1e-12)

    def test_noisy_slope_recovered(self):
        rng = np.random.default_rng(17)
        dts = np.array([0.2, 0.1, 0.05, 0.025, 0.0125])
        errs = 2.0 * dts**1.5 * (1.0 + rng.uniform(-0.05, 0.05, size=dts.size))
        slope = px.observed_order(errs, dts)
        assert 1.4 <= slope <= 1.6

    def test_nonpositive_error_not_estimable(self):
        assert px.observed_order([1e-3, 0.0, 1e-5], [0.1, 0.05, 0.025]) is None

    def test_requires_three_pairs(self):
        with pytest.raises(ValueError):
            px.observed_order([1e-3, 1e-4], [0.1, 0.05])


class TestUphillRegion:
    def test_uniform_profile_has_zero_indicator(self):
        shape = (3, 11)
        traj = synthetic_trajectory(
            10, 10, [0, 5, 10], np.full(shape, 0.5), np.full(shape, 0.2)
        )
        assert np.all(px.uphill_region(traj) == 0.0)

    def test_fickian_run_never_counter_gradient(self):
        sc = px.Scenario(
            px.Profile.UPHILL,
            px.fickian_mixture(),
            None,
            30,
            1500,
            px.Scheme.pure_diffusion(),
        )
        traj = px.run_pure_diffusion(sc, cadence=100)
        assert not np.any(px.uphill_region(traj) < 0.0)

    def test_semi_degenerate_run_has_both_signs(self):
        sc = px.Scenario(
            px.Profile.UPHILL,
            px.duncan_toor_uphill_mixture(),
            None,
            50,
            5000,
            px.Scheme.pure_diffusion(),
        )
        indicator = px.uphill_region(px.run_pure_diffusion(sc, cadence=100))
        assert np.any(indicator < 0.0)
        assert np.any(indicator > 0.0)
