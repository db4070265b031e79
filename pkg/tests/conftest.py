import numpy as np
import pytest

import plasmix as px


@pytest.fixture
def hydrogen():
    return px.hydrogen_mixture()


@pytest.fixture
def uphill_mix():
    return px.duncan_toor_uphill_mixture()


@pytest.fixture
def asymptotic_mix():
    return px.duncan_toor_asymptotic_mixture()


def small_reaction_scenario(example_id=3, grid_points=20, time_steps=600):
    """Hydrogen scenario small enough for fast tests.

    time_steps >= 1.36 * grid_points^2 keeps even the multi-stage Picard
    iterations inside their contraction range (4 * d_max * dt / dx^2 <= 1).
    """
    return px.Scenario(
        profile=px.Profile.UPHILL,
        mixture=px.hydrogen_mixture(),
        reaction=px.reaction_matrix_example(example_id),
        grid_points=grid_points,
        time_steps=time_steps,
        scheme=px.Scheme.ab(),
    )


def small_zero_reaction_scenario(grid_points=20, time_steps=600):
    return px.Scenario(
        profile=px.Profile.UPHILL,
        mixture=px.hydrogen_mixture(),
        reaction=px.ReactionMatrix.zero(),
        grid_points=grid_points,
        time_steps=time_steps,
        scheme=px.Scheme.ab(),
    )


def small_pure_diffusion_scenario(grid_points=20, time_steps=600):
    return px.Scenario(
        profile=px.Profile.UPHILL,
        mixture=px.hydrogen_mixture(),
        reaction=None,
        grid_points=grid_points,
        time_steps=time_steps,
        scheme=px.Scheme.pure_diffusion(),
    )


def dense_forward_matrix(grid_points, dx):
    """Divergence stencil as an explicit matrix (test oracle only)."""
    m = grid_points + 1
    a = np.zeros((m, m))
    a[0, 0] = 1.0
    for j in range(1, m):
        a[j, j] = 1.0
        a[j, j - 1] = -1.0
    return a / dx


def dense_backward_matrix(grid_points, dx):
    """Gradient stencil as an explicit matrix (test oracle only)."""
    m = grid_points + 1
    a = np.zeros((m, m))
    for j in range(m - 1):
        a[j, j] = -1.0
        a[j, j + 1] = 1.0
    a[m - 1, m - 1] = -1.0
    return a / dx
