import numpy as np
import pytest

import plasmix as px
from plasmix.steppers import ReactionEulerCoeffs
from conftest import dense_forward_matrix


def rk4_linear(s, t, y0, steps):
    """Dense-output-free RK4 oracle for dy/dt = s @ y."""
    y = np.asarray(y0, dtype=float).copy()
    h = t / steps
    for _ in range(steps):
        k1 = s @ y
        k2 = s @ (y + 0.5 * h * k1)
        k3 = s @ (y + 0.5 * h * k2)
        k4 = s @ (y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


class TestDiffusionStep:
    def test_zero_flux_leaves_field_unchanged(self, hydrogen):
        grid = px.Grid1D(9)
        field = px.build_initial(px.Profile.UPHILL, 9)
        flux = px.FluxField(np.zeros(10), np.zeros(10))
        out = px.diffusion_step(field, flux, 1e-3, grid.forward_op())
        assert np.array_equal(out.xi1, field.xi1)
        assert np.array_equal(out.xi2, field.xi2)

    def test_conserves_mass_with_no_flux_boundaries(self):
        rng = np.random.default_rng(5)
        grid = px.Grid1D(25)
        field = px.SpeciesField(rng.uniform(0, 0.5, 26), rng.uniform(0, 0.4, 26))
        n1 = rng.normal(size=26)
        n2 = rng.normal(size=26)
        n1[0] = n1[-1] = n2[0] = n2[-1] = 0.0
        out = px.diffusion_step(field, px.FluxField(n1, n2), 2e-3, grid.forward_op())
        assert out.xi1.sum() == pytest.approx(field.xi1.sum(), rel=1e-13)
        assert out.xi2.sum() == pytest.approx(field.xi2.sum(), rel=1e-13)

    def test_small_grid_update_against_dense_oracle(self):
        # J = 4, dx = 0.25: divergence of (0, .1, .2, .1, 0) is
        # (0, .4, .4, -.4, -.4), so mass moves from the high plateau into
        # the empty tail
        grid = px.Grid1D(4)
        field = px.SpeciesField(np.array([0.8, 0.8, 0.4, 0.0, 0.0]), np.full(5, 0.2))
        n1 = np.array([0.0, 0.1, 0.2, 0.1, 0.0])
        flux = px.FluxField(n1, np.zeros(5))
        out = px.diffusion_step(field, flux, 0.01, grid.forward_op())
        div_hand = np.array([0.0, 0.4, 0.4, -0.4, -0.4])
        assert np.allclose(out.xi1, field.xi1 - 0.01 * div_hand, rtol=0, atol=1e-15)
        div_dense = dense_forward_matrix(4, grid.dx) @ n1
        assert np.allclose(out.xi1, field.xi1 - 0.01 * div_dense, rtol=0, atol=1e-15)
        assert np.array_equal(out.xi2, field.xi2)

    def test_shape_and_direction_errors(self, hydrogen):
        grid = px.Grid1D(4)
        field = px.build_initial(px.Profile.UPHILL, 4)
        flux = px.FluxField(np.zeros(6), np.zeros(6))
        with pytest.raises(ValueError):
            px.diffusion_step(field, flux, 1e-3, grid.forward_op())
        with pytest.raises(ValueError):
            px.diffusion_step(field, px.FluxField(np.zeros(5), np.zeros(5)), 1e-3, grid.backward_op())


class TestReactionEuler:
    def test_zero_rates_identity(self):
        field = px.build_initial(px.Profile.UPHILL, 6)
        coeffs = ReactionEulerCoeffs.from_matrix(px.ReactionMatrix.zero())
        out = px.reaction_step_euler(field, coeffs, 1e-3)
        assert np.array_equal(out.xi1, field.xi1)
        assert np.array_equal(out.xi2, field.xi2)

    def test_matches_full_three_species_euler(self):
        # the closure-eliminated affine form is Euler on the 3x3 system
        rx = px.reaction_matrix_example(1)
        coeffs = ReactionEulerCoeffs.from_matrix(rx)
        field = px.SpeciesField(np.array([0.5]), np.array([0.2]))
        out = px.reaction_step_euler(field, coeffs, 1e-3)
        full = np.array([0.5, 0.2, 0.3]) + 1e-3 * (rx.lam @ np.array([0.5, 0.2, 0.3]))
        assert out.xi1[0] == pytest.approx(full[0], abs=1e-16)
        assert out.xi2[0] == pytest.approx(full[1], abs=1e-16)
        # the implied third component equals the full system's third row
        assert out.xi3[0] == pytest.approx(full[2], abs=1e-13)

    def test_one_step_defect_is_second_order(self):
        # halving dt cuts the Euler-vs-exact defect by about 4
        rx = px.reaction_matrix_example(3)
        coeffs = ReactionEulerCoeffs.from_matrix(rx)
        field = px.build_initial(px.Profile.UPHILL, 10)
        defects = []
        for dt in (1e-2, 5e-3, 2.5e-3):
            euler = px.reaction_step_euler(field, coeffs, dt)
            exact = px.reaction_step_exact(field, rx, dt)
            defects.append(
                max(
                    np.abs(euler.xi1 - exact.xi1).max(),
                    np.abs(euler.xi2 - exact.xi2).max(),
                )
            )
        assert 3.5 <= defects[0] / defects[1] <= 4.5
        assert 3.5 <= defects[1] / defects[2] <= 4.5


class TestMatrixExp:
    def test_zero_matrix_gives_identity(self):
        assert np.array_equal(px.matrix_exp_3x3(np.zeros((3, 3)), 1.7), np.eye(3))

    def test_diagonal_case(self):
        rates = np.array([-0.3, 0.1, -2.0])
        t = 0.8
        out = px.matrix_exp_3x3(np.diag(rates), t)
        assert np.allclose(out, np.diag(np.exp(rates * t)), rtol=1e-13, atol=1e-16)

    def test_against_rk4_oracle(self):
        # exp(Lam * 0.1) applied to a state vs 1e5-step RK4 integration
        lam = px.reaction_matrix_example(1).lam
        xi0 = np.array([0.5, 0.2, 0.3])
        propagated = px.matrix_exp_3x3(lam, 0.1) @ xi0
        reference = rk4_linear(lam, 0.1, xi0, 100_000)
        assert np.abs(propagated - reference).max() < 1e-10

    def test_semigroup_property_on_random_matrices(self):
        rng = np.random.default_rng(99)
        for _ in range(20):
            s = rng.uniform(-1.0, 1.0, size=(3, 3))
            whole = px.matrix_exp_3x3(s, 1.0)
            split = px.matrix_exp_3x3(s, 0.3) @ px.matrix_exp_3x3(s, 0.7)
            assert np.abs(whole - split).max() < 1e-11

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            px.matrix_exp_3x3(np.zeros((2, 2)), 1.0)
        with pytest.raises(ValueError):
            px.matrix_exp_3x3(np.full((3, 3), np.nan), 1.0)


class TestReactionExact:
    def test_zero_matrix_identity(self):
        field = px.build_initial(px.Profile.STEP, 8)
        out = px.reaction_step_exact(field, px.ReactionMatrix.zero(), 0.5)
        assert np.array_equal(out.xi1, field.xi1)
        assert np.array_equal(out.xi2, field.xi2)

    def test_matches_rk4_at_production_step(self):
        rx = px.reaction_matrix_example(1)
        field = px.SpeciesField(np.array([0.5]), np.array([0.2]))
        out = px.reaction_step_exact(field, rx, 2.5e-5)
        ref = rk4_linear(rx.lam, 2.5e-5, [0.5, 0.2, 0.3], 1000)
        assert out.xi1[0] == pytest.approx(ref[0], abs=1e-12)
        assert out.xi2[0] == pytest.approx(ref[1], abs=1e-12)

    def test_conservative_matrix_preserves_node_sums_long_run(self):
        # 1e5 repeated exact steps: the closure keeps each node's total at 1
        rx = px.reaction_matrix_example(3)
        field = px.SpeciesField(np.array([0.5, 0.1, 0.8]), np.array([0.2, 0.6, 0.1]))
        propagator = px.matrix_exp_3x3(rx.lam, 2.5e-5)
        xi1, xi2 = field.xi1.copy(), field.xi2.copy()
        worst = 0.0
        for _ in range(100_000):
            xi3 = (1.0 - xi1) - xi2
            stacked = propagator @ np.vstack([xi1, xi2, xi3])
            xi1, xi2 = stacked[0], stacked[1]
            total = xi1 + xi2 + ((1.0 - xi1) - xi2)
            worst = max(worst, np.abs(total - 1.0).max())
        assert worst < 1e-13
