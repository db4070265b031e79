"""Pure-numpy time-stepping kernels (fallback backend).

The compiled extension in ``_kernels.pyx`` implements the same API with the
same floating-point expression trees; results of the two backends are
bit-identical.  Any change to an update formula here must be mirrored there.

State enters as four contiguous float64 node vectors (xi1, xi2, n1, n2) that
are advanced in place.  Mixture scalars travel as the 7-vector produced by
``_backend.mixture_scalars`` and reaction coefficients as the 6-vector from
``_backend.reaction_scalars``.
"""

from __future__ import annotations

import numpy as np

from .errors import FluxSingularityError

BACKEND_NAME = "python"

#: Guard threshold for the flux-inversion denominator.
DEN_EPS = 1e-14


def flux_update(xi1, xi2, n1, n2, mix, inv_dx):
    """Solve the 2x2 flux system at every node and zero the boundary fluxes.

    Gradients use the backward stencil; the closed-form inverse applies
    gamma * [[1/d23 + beta*xi1, alpha*xi1], [beta*xi2, 1/d13 + alpha*xi2]]
    to (-grad xi1, -grad xi2), with gamma = d13*d23 / (1 + alpha*d13*xi2
    + beta*d23*xi1).
    """
    alpha, beta, inv_d13, inv_d23, dd, a13, b23 = mix
    g1 = np.empty_like(xi1)
    g2 = np.empty_like(xi2)
    g1[:-1] = (xi1[1:] - xi1[:-1]) * inv_dx
    g1[-1] = (-xi1[-1]) * inv_dx
    g2[:-1] = (xi2[1:] - xi2[:-1]) * inv_dx
    g2[-1] = (-xi2[-1]) * inv_dx
    den = (1.0 + a13 * xi2) + b23 * xi1
    bad = np.abs(den) < DEN_EPS
    if bad.any():
        j = int(np.argmax(bad))
        raise FluxSingularityError(j, float(xi1[j]), float(xi2[j]), float(den[j]))
    gam = dd / den
    n1[:] = gam * ((inv_d23 + beta * xi1) * (-g1) + (alpha * xi1) * (-g2))
    n2[:] = gam * ((beta * xi2) * (-g1) + (inv_d13 + alpha * xi2) * (-g2))
    n1[0] = 0.0
    n1[-1] = 0.0
    n2[0] = 0.0
    n2[-1] = 0.0


def _dplus(n, inv_dx):
    out = np.empty_like(n)
    out[0] = n[0] * inv_dx
    out[1:] = (n[1:] - n[:-1]) * inv_dx
    return out


def diffusion_apply(xi1, xi2, n1, n2, dt, inv_dx):
    """One explicit conservation update xi_i <- xi_i - dt * D+ N_i."""
    xi1[:] = xi1 - dt * _dplus(n1, inv_dx)
    xi2[:] = xi2 - dt * _dplus(n2, inv_dx)


def reaction_apply(xi1, xi2, rc, dt):
    """One explicit Euler step of the closure-eliminated linear kinetics."""
    a11, a12, c1, a21, a22, c2 = rc
    r1 = (a11 * xi1 + a12 * xi2) + c1
    r2 = (a21 * xi1 + a22 * xi2) + c2
    xi1[:] = xi1 + dt * r1
    xi2[:] = xi2 + dt * r2


def _picard_sweep(anchor1, anchor2, cur1, cur2, n1, n2, rc, dt, inv_dx):
    """One coupled sweep anchored at the previous time level.

    new = anchor - dt * D+ N(prev iterate) + dt * reaction(prev iterate)
    """
    a11, a12, c1, a21, a22, c2 = rc
    new1 = (anchor1 - dt * _dplus(n1, inv_dx)) + dt * ((a11 * cur1 + a12 * cur2) + c1)
    new2 = (anchor2 - dt * _dplus(n2, inv_dx)) + dt * ((a21 * cur1 + a22 * cur2) + c2)
    return new1, new2


def advance_pure_diffusion(xi1, xi2, n1, n2, mix, rc, inv_dx, dt, nsteps, iters=0, inner=0, outer=0):
    """nsteps of: conservation update with the lagged flux, then flux refresh."""
    for _ in range(nsteps):
        diffusion_apply(xi1, xi2, n1, n2, dt, inv_dx)
        flux_update(xi1, xi2, n1, n2, mix, inv_dx)


def advance_ab(xi1, xi2, n1, n2, mix, rc, inv_dx, dt, nsteps, iters=0, inner=0, outer=0):
    """Sequential splitting: full diffusion step, then full reaction step."""
    for _ in range(nsteps):
        diffusion_apply(xi1, xi2, n1, n2, dt, inv_dx)
        reaction_apply(xi1, xi2, rc, dt)
        flux_update(xi1, xi2, n1, n2, mix, inv_dx)


def advance_aba_frozen(xi1, xi2, n1, n2, mix, rc, inv_dx, dt, nsteps, iters=0, inner=0, outer=0):
    """Strang-type splitting reusing one predictor flux for both half steps."""
    half = 0.5 * dt
    for _ in range(nsteps):
        flux_update(xi1, xi2, n1, n2, mix, inv_dx)
        diffusion_apply(xi1, xi2, n1, n2, half, inv_dx)
        reaction_apply(xi1, xi2, rc, dt)
        diffusion_apply(xi1, xi2, n1, n2, half, inv_dx)


def advance_aba_updated(xi1, xi2, n1, n2, mix, rc, inv_dx, dt, nsteps, iters=0, inner=0, outer=0):
    """Strang-type splitting with a mid-step flux refresh and two half reactions."""
    half = 0.5 * dt
    for _ in range(nsteps):
        flux_update(xi1, xi2, n1, n2, mix, inv_dx)
        diffusion_apply(xi1, xi2, n1, n2, half, inv_dx)
        reaction_apply(xi1, xi2, rc, half)
        flux_update(xi1, xi2, n1, n2, mix, inv_dx)
        reaction_apply(xi1, xi2, rc, half)
        diffusion_apply(xi1, xi2, n1, n2, half, inv_dx)


def advance_picard(xi1, xi2, n1, n2, mix, rc, inv_dx, dt, nsteps, iters, inner=0, outer=0):
    """Fixpoint sweeps of the coupled implicit-Euler update.

    Iterate 0 of each macro step is the converged (state, flux) pair of the
    previous one; every sweep reads the previous iterate on the right-hand
    side and its flux is recomputed from the new iterate.
    """
    for _ in range(nsteps):
        anchor1 = xi1.copy()
        anchor2 = xi2.copy()
        for _i in range(iters):
            new1, new2 = _picard_sweep(anchor1, anchor2, xi1, xi2, n1, n2, rc, dt, inv_dx)
            xi1[:] = new1
            xi2[:] = new2
            flux_update(xi1, xi2, n1, n2, mix, inv_dx)


def advance_nested(xi1, xi2, n1, n2, mix, rc, inv_dx, dt, nsteps, iters=0, inner=1, outer=1):
    """Inner reaction sweeps at a fixed flux iterate, outer flux refreshes."""
    for _ in range(nsteps):
        anchor1 = xi1.copy()
        anchor2 = xi2.copy()
        for _j in range(outer):
            for _i in range(inner):
                new1, new2 = _picard_sweep(anchor1, anchor2, xi1, xi2, n1, n2, rc, dt, inv_dx)
                xi1[:] = new1
                xi2[:] = new2
            flux_update(xi1, xi2, n1, n2, mix, inv_dx)
