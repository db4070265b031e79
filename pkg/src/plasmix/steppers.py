"""Single-substep integrators: explicit diffusion and linear kinetics.

The kinetics come in two flavours.  The explicit Euler form is what the
splitting drivers compose; it is Euler on d(xi)/dt = Lam * xi with xi3
eliminated through the closure, i.e. the affine node update

    xi1 += dt * ((lam11 - lam13) xi1 + (lam12 - lam13) xi2 + lam13)

and symmetrically for xi2.  The exact form propagates the full 3-vector
with a matrix exponential and serves as the reaction sub-flow oracle for
the convergence studies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels, reaction_scalars
from .discretization import Direction, UpwindOperator
from .model import FluxField, ReactionMatrix, SpeciesField


@dataclass(frozen=True)
class ReactionEulerCoeffs:
    """Closure-eliminated affine coefficients [1/s] of the rate matrix."""

    a11: float
    a12: float
    c1: float
    a21: float
    a22: float
    c2: float

    @classmethod
    def from_matrix(cls, reaction: ReactionMatrix) -> "ReactionEulerCoeffs":
        lam = reaction.lam
        return cls(
            a11=lam[0, 0] - lam[0, 2],
            a12=lam[0, 1] - lam[0, 2],
            c1=lam[0, 2],
            a21=lam[1, 0] - lam[1, 2],
            a22=lam[1, 1] - lam[1, 2],
            c2=lam[1, 2],
        )


def diffusion_step(
    field: SpeciesField, flux: FluxField, dt: float, d_plus: UpwindOperator
) -> SpeciesField:
    """Explicit conservation update xi_i <- xi_i - dt * D+ N_i."""
    if d_plus.direction is not Direction.FORWARD:
        raise ValueError("the conservation update uses the forward-difference operator")
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if len(field) != len(flux):
        raise ValueError(f"field has {len(field)} nodes but flux has {len(flux)}")
    xi1 = field.xi1.copy()
    xi2 = field.xi2.copy()
    kernels.diffusion_apply(xi1, xi2, flux.n1, flux.n2, dt, d_plus.inv_dx)
    return SpeciesField(xi1, xi2)


def reaction_step_euler(
    field: SpeciesField, coeffs: ReactionEulerCoeffs, dt: float
) -> SpeciesField:
    """One explicit Euler step of the eliminated linear kinetics at every node."""
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    xi1 = field.xi1.copy()
    xi2 = field.xi2.copy()
    kernels.reaction_apply(xi1, xi2, reaction_scalars(coeffs), dt)
    return SpeciesField(xi1, xi2)


def matrix_exp_3x3(s: np.ndarray, t: float) -> np.ndarray:
    """exp(s * t) by scaling-and-squaring with a truncated power series.

    The series is summed until the next term falls below 1e-13 in absolute
    element size.  Always converges for finite input; a closed form via
    eigendecomposition would be fragile for defective matrices.
    """
    a = np.asarray(s, dtype=float) * t
    if a.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    norm = np.abs(a).sum(axis=0).max()
    squarings = max(0, int(np.ceil(np.log2(norm / 0.5)))) if norm > 0.5 else 0
    a = a / 2.0**squarings
    result = np.eye(3)
    term = np.eye(3)
    k = 1
    while True:
        term = term @ a / k
        result = result + term
        if np.abs(term).max() < 1e-13:
            break
        k += 1
    for _ in range(squarings):
        result = result @ result
    return result


def reaction_step_exact(
    field: SpeciesField, reaction: ReactionMatrix, dt: float
) -> SpeciesField:
    """Propagate the full 3-species kinetics exactly over dt at every node.

    Assembles (xi1, xi2, 1 - xi1 - xi2), multiplies by exp(Lam * dt), and
    stores the first two components.
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    propagator = matrix_exp_3x3(reaction.lam, dt)
    stacked = np.vstack([field.xi1, field.xi2, field.xi3])
    advanced = propagator @ stacked
    return SpeciesField(advanced[0].copy(), advanced[1].copy())
