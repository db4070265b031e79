"""Uniform grid, one-sided difference operators, and the stability bound.

The two bidiagonal operators pair up: the forward operator advances the
conservation law (applied to fluxes) and the backward operator forms the
mole-fraction gradients the fluxes are built from.  Their composition is
the standard three-point Laplacian in the interior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .model import MixtureParams


@dataclass(frozen=True)
class Grid1D:
    """J intervals on [0, 1]: nodes x_j = j / J, spacing dx = 1 / J [cm]."""

    intervals: int
    dx: float = field(init=False)

    def __post_init__(self):
        if self.intervals < 2:
            raise ValueError(f"need at least 2 intervals, got {self.intervals}")
        object.__setattr__(self, "dx", 1.0 / self.intervals)

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.intervals + 1) / self.intervals

    @property
    def node_count(self) -> int:
        return self.intervals + 1

    def forward_op(self) -> "UpwindOperator":
        return UpwindOperator(Direction.FORWARD, self.dx)

    def backward_op(self) -> "UpwindOperator":
        return UpwindOperator(Direction.BACKWARD, self.dx)


class Direction(Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True)
class UpwindOperator:
    """One-sided difference stencil, applied matrix-free in O(J).

    forward:  (Av)_0 = v_0 / dx,             (Av)_j = (v_j - v_{j-1}) / dx
    backward: (Av)_j = (v_{j+1} - v_j) / dx, (Av)_J = -v_J / dx

    The forward stencil is the divergence of the conservation update; the
    backward stencil forms the gradients feeding the flux solve.  This
    adjoint pairing composes into the standard three-point Laplacian, the
    combination under which explicit diffusion stepping is stable.  Both
    stencils reproduce the slope of a linear profile exactly wherever they
    read two nodes.
    """

    direction: Direction
    dx: float
    inv_dx: float = field(init=False)

    def __post_init__(self):
        if not self.dx > 0.0:
            raise ValueError(f"dx must be positive, got {self.dx}")
        object.__setattr__(self, "inv_dx", 1.0 / self.dx)

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return apply_upwind(self, v)


def apply_upwind(op: UpwindOperator, v: np.ndarray) -> np.ndarray:
    """Apply the bidiagonal stencil to a node vector."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.shape[0] < 2:
        raise ValueError(f"expected a node vector of length >= 2, got shape {v.shape}")
    out = np.empty_like(v)
    if op.direction is Direction.FORWARD:
        out[0] = v[0] * op.inv_dx
        out[1:] = (v[1:] - v[:-1]) * op.inv_dx
    else:
        out[:-1] = (v[1:] - v[:-1]) * op.inv_dx
        out[-1] = (-v[-1]) * op.inv_dx
    return out


def cfl_max_dt(dx: float, params: MixtureParams) -> float:
    """Largest stable time step [s] for explicit diffusion stepping.

    dt <= dx^2 / (2 * d_max), with d_max the largest binary coefficient;
    taking the largest is the conservative reading of the bound.
    """
    if not dx > 0.0:
        raise ValueError(f"dx must be positive, got {dx}")
    return dx * dx / (2.0 * params.d_max)


@dataclass(frozen=True)
class GridLevel:
    """(J, N) pair of the refinement hierarchy; the finest one is the reference."""

    grid_points: int
    time_steps: int
    reference: bool = False

    def __iter__(self):
        return iter((self.grid_points, self.time_steps))


def cfl_grid_pairs() -> list[GridLevel]:
    """The (J, N) refinement hierarchy; every pair satisfies J^2 <= N."""
    return [
        GridLevel(190, 80000, reference=True),
        GridLevel(140, 40000),
        GridLevel(100, 20000),
        GridLevel(70, 10000),
        GridLevel(50, 5000),
    ]


#: Node count J of each hierarchy level, coarsest first.
HIERARCHY_J = (50, 70, 100, 140, 190)

#: Index-map stretch factor from the 51-node coarse skeleton to each level.
_LEVEL_FACTORS = (1.0, math.sqrt(2.0), 2.0, 2.0 * math.sqrt(2.0), 4.0)


def hierarchy_level(grid_points: int) -> int:
    """Level index (0 = coarsest) of a grid in the refinement hierarchy."""
    try:
        return HIERARCHY_J.index(grid_points)
    except ValueError:
        raise ValueError(
            f"J = {grid_points} is not in the grid hierarchy {HIERARCHY_J}"
        ) from None


def coarse_grid_map(k: int, level: int) -> int:
    """Map coarse-skeleton node k (0..50) to a node index on a finer level.

    Levels stretch by 1, sqrt(2), 2, 2*sqrt(2), 4 with flooring; results are
    clamped to the level's last node (the nominal 4k map would reach 200 on
    the 191-node grid, and floor(50 * 2 * sqrt(2)) = 141 on the 141-node one).
    """
    if not 0 <= k <= 50:
        raise ValueError(f"coarse index must be in [0, 50], got {k}")
    if not 0 <= level <= 4:
        raise ValueError(f"level must be in [0, 4], got {level}")
    if level == 0:
        return k
    mapped = math.floor(k * _LEVEL_FACTORS[level])
    return min(mapped, HIERARCHY_J[level])
