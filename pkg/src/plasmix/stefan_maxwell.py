"""Closed-form inversion of the reduced two-species flux system.

Eliminating species 3 via the closures leaves, at every grid node, the
2x2 linear system

    [ 1/d13 + alpha*xi2    -alpha*xi1   ] [N1]   [-grad xi1]
    [ -beta*xi2             1/d23 + beta*xi1 ] [N2] = [-grad xi2]

whose inverse has the scalar prefactor
gamma = d13*d23 / (1 + alpha*d13*xi2 + beta*d23*xi1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels, mixture_scalars
from .discretization import Direction, UpwindOperator
from .errors import FluxSingularityError
from .model import FluxField, MixtureParams, SpeciesField

#: Guard threshold for the gamma denominator; for the physical parameter
#: ranges the denominator stays near one, so this only catches pathologies.
DEN_EPS = 1e-14


@dataclass(frozen=True)
class FluxSolveInput:
    """Mole fractions, their spatial gradients [1/cm], and mixture constants
    at a single node."""

    xi1: float
    xi2: float
    g1: float
    g2: float
    params: MixtureParams


def invert_flux_node(inp: FluxSolveInput) -> tuple[float, float]:
    """Solve the 2x2 node system for (N1, N2) in closed form."""
    p = inp.params
    a13 = p.alpha * p.d13
    b23 = p.beta * p.d23
    den = (1.0 + a13 * inp.xi2) + b23 * inp.xi1
    if abs(den) < DEN_EPS:
        raise FluxSingularityError(None, inp.xi1, inp.xi2, den)
    gam = (p.d13 * p.d23) / den
    n1 = gam * ((1.0 / p.d23 + p.beta * inp.xi1) * (-inp.g1) + (p.alpha * inp.xi1) * (-inp.g2))
    n2 = gam * ((p.beta * inp.xi2) * (-inp.g1) + (1.0 / p.d13 + p.alpha * inp.xi2) * (-inp.g2))
    return n1, n2


def forward_flux_map(inp: FluxSolveInput, n1: float, n2: float) -> tuple[float, float]:
    """Apply the un-inverted 2x2 node system to a flux pair.

    Returns (-g1, -g2) when (n1, n2) solves the system; used to round-trip
    the closed-form inverse.
    """
    p = inp.params
    r1 = (1.0 / p.d13 + p.alpha * inp.xi2) * n1 + (-p.alpha * inp.xi1) * n2
    r2 = (-p.beta * inp.xi2) * n1 + (1.0 / p.d23 + p.beta * inp.xi1) * n2
    return r1, r2


def compute_fluxes(
    field: SpeciesField, params: MixtureParams, grad_op: UpwindOperator
) -> FluxField:
    """Fluxes at every node from backward-difference gradients.

    Boundary nodes are overwritten to zero afterwards (no-flux walls).
    """
    if grad_op.direction is not Direction.BACKWARD:
        raise ValueError("gradients must use the backward-difference operator")
    xi1 = np.ascontiguousarray(field.xi1)
    xi2 = np.ascontiguousarray(field.xi2)
    n1 = np.empty_like(xi1)
    n2 = np.empty_like(xi2)
    kernels.flux_update(xi1, xi2, n1, n2, mixture_scalars(params), grad_op.inv_dx)
    return FluxField(n1, n2)
