"""Full time-loop drivers for the transport-reaction system.

Every driver walks the same explicit skeleton: mole fractions advance under
the conservation law with fluxes from the closed-form node inversion, and
the linear kinetics are interleaved according to the scheme.  The hot loop
runs in the selected kernel backend; drivers only handle setup, snapshot
bookkeeping and timing.

Snapshots store (state, flux) pairs where the flux is always the one
consistent with the stored state, i.e. recomputed from it.  For the
schemes that carry a state-consistent flux anyway (pure diffusion, the
sequential split, the Picard variants) this recomputation reproduces the
carried flux bit for bit.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ._backend import BACKEND, kernels, mixture_scalars, reaction_scalars
from .model import ReactionMatrix, Scenario, Scheme, SpeciesField, FluxField, build_initial
from .steppers import ReactionEulerCoeffs

#: Target snapshot count per run; cadence defaults to ceil(N / 200).
DEFAULT_SNAPSHOTS = 200


@dataclass(frozen=True)
class Trajectory:
    """Snapshots of one run: times [s], states and fluxes per snapshot.

    Arrays are stacked (snapshot, node) and frozen read-only.  xi3 and n3
    are never stored; accessors materialise them from the closures.
    """

    scenario: Scenario
    scheme: Scheme
    step_indices: np.ndarray
    times: np.ndarray
    xi1: np.ndarray
    xi2: np.ndarray
    n1: np.ndarray
    n2: np.ndarray
    loop_seconds: float
    backend: str = field(default=BACKEND)

    def __post_init__(self):
        for name in ("step_indices", "times", "xi1", "xi2", "n1", "n2"):
            arr = getattr(self, name)
            arr.flags.writeable = False

    @property
    def xi3(self) -> np.ndarray:
        return (1.0 - self.xi1) - self.xi2

    @property
    def n3(self) -> np.ndarray:
        return (-self.n1) - self.n2

    @property
    def snapshot_count(self) -> int:
        return self.times.shape[0]

    @property
    def node_count(self) -> int:
        return self.xi1.shape[1]

    def state(self, i: int) -> SpeciesField:
        return SpeciesField(self.xi1[i], self.xi2[i])

    def flux(self, i: int) -> FluxField:
        return FluxField(self.n1[i], self.n2[i])


def snapshot_steps(time_steps: int, cadence: int | None = None) -> list[int]:
    """Step indices to store: every cadence-th step plus the final one."""
    c = cadence if cadence is not None else max(1, math.ceil(time_steps / DEFAULT_SNAPSHOTS))
    if c < 1:
        raise ValueError(f"cadence must be >= 1, got {cadence}")
    steps = list(range(0, time_steps + 1, c))
    if steps[-1] != time_steps:
        steps.append(time_steps)
    return steps


_ADVANCE = {
    "pure-diffusion": "advance_pure_diffusion",
    "ab": "advance_ab",
    "aba-frozen": "advance_aba_frozen",
    "aba-updated": "advance_aba_updated",
    "picard": "advance_picard",
    "nested": "advance_nested",
}


def _drive(scenario: Scenario, scheme: Scheme, cadence: int | None) -> Trajectory:
    if scheme.needs_reaction:
        if scenario.reaction is None:
            raise ValueError(f"scheme {scheme.label!r} requires a reaction matrix")
        rc = reaction_scalars(ReactionEulerCoeffs.from_matrix(scenario.reaction))
    else:
        if scenario.reaction is not None:
            raise ValueError("pure diffusion requires a scenario without reaction")
        rc = np.zeros(6)

    grid_points = scenario.grid_points
    mix = mixture_scalars(scenario.mixture)
    inv_dx = 1.0 / scenario.dx
    dt = scenario.dt

    initial = build_initial(scenario.profile, grid_points)
    xi1 = initial.xi1.copy()
    xi2 = initial.xi2.copy()
    n1 = np.empty_like(xi1)
    n2 = np.empty_like(xi2)
    kernels.flux_update(xi1, xi2, n1, n2, mix, inv_dx)

    steps = snapshot_steps(scenario.time_steps, cadence)
    count = len(steps)
    snap_xi1 = np.empty((count, grid_points + 1))
    snap_xi2 = np.empty_like(snap_xi1)
    snap_n1 = np.empty_like(snap_xi1)
    snap_n2 = np.empty_like(snap_xi1)

    def record(slot):
        snap_xi1[slot] = xi1
        snap_xi2[slot] = xi2
        kernels.flux_update(xi1, xi2, snap_n1[slot], snap_n2[slot], mix, inv_dx)

    record(0)
    advance = getattr(kernels, _ADVANCE[scheme.kind])
    loop_seconds = 0.0
    for slot in range(1, count):
        nsteps = steps[slot] - steps[slot - 1]
        tic = time.perf_counter()
        advance(
            xi1, xi2, n1, n2, mix, rc, inv_dx, dt, nsteps,
            iters=scheme.iters, inner=scheme.inner, outer=scheme.outer,
        )
        loop_seconds += time.perf_counter() - tic
        record(slot)

    step_arr = np.asarray(steps, dtype=np.int64)
    times = step_arr * (scenario.horizon / scenario.time_steps)
    return Trajectory(
        scenario=scenario,
        scheme=scheme,
        step_indices=step_arr,
        times=times,
        xi1=snap_xi1,
        xi2=snap_xi2,
        n1=snap_n1,
        n2=snap_n2,
        loop_seconds=loop_seconds,
    )


def run_pure_diffusion(scenario: Scenario, cadence: int | None = None) -> Trajectory:
    """Explicit stepping of the pure transport problem (no kinetics).

    Per step: xi <- xi - dt * D+ N with the lagged flux, then the flux is
    refreshed from the new state; boundary fluxes are zeroed every solve.
    """
    return _drive(scenario, Scheme.pure_diffusion(), cadence)


def run_ab(scenario: Scenario, cadence: int | None = None) -> Trajectory:
    """Sequential (first-order) splitting: full-dt diffusion, full-dt reaction.

    The diffusion substep uses the flux computed from the state at substep
    start.  With a zero rate matrix this reproduces run_pure_diffusion
    bit for bit.
    """
    return _drive(scenario, Scheme.ab(), cadence)


def run_aba_frozen(scenario: Scenario, cadence: int | None = None) -> Trajectory:
    """Strang-type splitting without flux updating.

    A predictor flux is computed from the state at step start and reused by
    both half-dt diffusion substeps; the reaction substep in between runs
    over the full dt (as specified, asymmetric on purpose).
    """
    return _drive(scenario, Scheme.aba_frozen(), cadence)


def run_aba_updated(scenario: Scenario, cadence: int | None = None) -> Trajectory:
    """Strang-type splitting with flux updating.

    Half-dt diffusion, half-dt reaction, flux re-predictor at the midpoint
    state, half-dt reaction, half-dt diffusion.
    """
    return _drive(scenario, Scheme.aba_updated(), cadence)


def run_picard_reaction(
    scenario: Scenario, iters: int, cadence: int | None = None
) -> Trajectory:
    """Fixpoint iteration of the coupled implicit-Euler update.

    Iterate 0 of each macro step is the converged (state, flux) pair of the
    previous step.  Each of the ``iters`` sweeps reads the previous iterate
    on the right-hand side:

        xi_i = xi^n - dt * D+ N_(i-1) + dt * R(xi_(i-1))

    and N_i is recomputed from xi_i; the final pair is carried over.
    iters = 2 and 3 are the iter2 / iter3 schemes of the comparison study.
    """
    return _drive(scenario, Scheme.picard(iters), cadence)


def run_picard_nested(
    scenario: Scenario, inner: int, outer: int, cadence: int | None = None
) -> Trajectory:
    """Inner reaction sweeps at a fixed flux iterate, outer flux refreshes.

    Each of the ``outer`` iterations holds the flux fixed while running
    ``inner`` sweeps of the anchored update, then recomputes the flux from
    the latest iterate.  inner = 1 collapses to run_picard_reaction(outer).
    """
    return _drive(scenario, Scheme.nested(inner, outer), cadence)


def run_scenario(scenario: Scenario, cadence: int | None = None) -> Trajectory:
    """Dispatch on scenario.scheme."""
    scheme = scenario.scheme
    if scheme.kind == "picard":
        return run_picard_reaction(scenario, scheme.iters, cadence)
    if scheme.kind == "nested":
        return run_picard_nested(scenario, scheme.inner, scheme.outer, cadence)
    return _drive(scenario, scheme, cadence)


def zero_reaction(scenario: Scenario) -> Scenario:
    """Copy of a scenario with the rate matrix replaced by zeros."""
    return Scenario(
        profile=scenario.profile,
        mixture=scenario.mixture,
        reaction=ReactionMatrix.zero(),
        grid_points=scenario.grid_points,
        time_steps=scenario.time_steps,
        scheme=scenario.scheme,
        horizon=scenario.horizon,
    )
