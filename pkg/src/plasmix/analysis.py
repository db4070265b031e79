"""Error metrics, cross-grid comparison, order estimation, uphill detection.

Runs on different grids of the refinement hierarchy are compared on the
51-node coarse skeleton via floor-index maps and on shared snapshot times.
Time sums follow the Riemann convention: snapshot s >= 1 contributes with
weight t_s - t_(s-1), so a constant integrand integrates to exactly T.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discretization import Grid1D, coarse_grid_map, hierarchy_level
from .model import Profile, MixtureParams, ReactionMatrix, build_initial
from .splitting import Trajectory
from .steppers import matrix_exp_3x3
from .stefan_maxwell import compute_fluxes

#: Coarse-skeleton geometry: 51 nodes with spacing 1/50.
COARSE_NODES = 51
DX_COARSE = 1.0 / 50.0

_COMPONENTS = (1, 2, "vec")


def shared_snapshots(traj: Trajectory, ref: Trajectory):
    """Indices of snapshots taken at identical times in both runs.

    Times are matched exactly in integer arithmetic (step k of N equals
    step m of M iff k * M == m * N), so cadence choices cannot introduce
    floating-point mismatches.  t = 0 is required and is the anchor of the
    first time weight.
    """
    n_t = traj.scenario.time_steps
    n_r = ref.scenario.time_steps
    ref_slots = {int(step): i for i, step in enumerate(ref.step_indices)}
    idx_t, idx_r = [], []
    for i, step in enumerate(traj.step_indices):
        num = int(step) * n_r
        if num % n_t == 0 and num // n_t in ref_slots:
            idx_t.append(i)
            idx_r.append(ref_slots[num // n_t])
    if len(idx_t) < 2 or traj.step_indices[idx_t[0]] != 0:
        raise ValueError("trajectories share too few snapshot times to compare")
    return np.asarray(idx_t), np.asarray(idx_r)


def _time_weights(times: np.ndarray) -> np.ndarray:
    """Interval lengths ending at each snapshot after t = 0."""
    return np.diff(times)


def _component_diffs(traj, ref, idx_t, idx_r, component, nodes_t=None, nodes_r=None):
    """|ref - traj| per (shared snapshot, compared node stack).

    component 1 or 2 selects one species; 'vec' stacks all three (xi3 via
    the closure) along a leading axis so callers can reduce as they need.
    """
    if component not in _COMPONENTS:
        raise ValueError(f"component must be one of {_COMPONENTS}, got {component!r}")

    def pick(arr_t, arr_r):
        a = arr_t[idx_t]
        b = arr_r[idx_r]
        if nodes_t is not None:
            a = a[:, nodes_t]
            b = b[:, nodes_r]
        return b - a

    if component == 1:
        return np.abs(pick(traj.xi1, ref.xi1))[None]
    if component == 2:
        return np.abs(pick(traj.xi2, ref.xi2))[None]
    return np.stack(
        [
            np.abs(pick(traj.xi1, ref.xi1)),
            np.abs(pick(traj.xi2, ref.xi2)),
            np.abs(pick(traj.xi3, ref.xi3)),
        ]
    )


def sigma_sq(traj: Trajectory, ref: Trajectory, component=1, node: int | None = None) -> float:
    """Time-averaged mean-square deviation between two same-grid runs.

    (1/T) * sum_s dt_s * (scheme - ref)^2 over shared snapshot times; the
    vectorial variant adds the squares of both stored components.  With
    node = None the square is averaged over the grid nodes, otherwise it is
    taken at that node.
    """
    if traj.node_count != ref.node_count:
        raise ValueError("sigma_sq requires both runs on the same grid")
    idx_t, idx_r = shared_snapshots(traj, ref)
    w = _time_weights(traj.times[idx_t])
    horizon = traj.times[idx_t][-1]

    def sq(arr_t, arr_r):
        d = arr_r[idx_r] - arr_t[idx_t]
        return d * d

    if component == 1:
        s = sq(traj.xi1, ref.xi1)
    elif component == 2:
        s = sq(traj.xi2, ref.xi2)
    elif component == "vec":
        s = sq(traj.xi1, ref.xi1) + sq(traj.xi2, ref.xi2)
    else:
        raise ValueError(f"component must be one of {_COMPONENTS}, got {component!r}")
    per_time = s[:, node] if node is not None else s.mean(axis=1)
    return float((w * per_time[1:]).sum() / horizon)


def err_at_point(traj: Trajectory, ref: Trajectory, x: float, component=1) -> float:
    """L1-in-time deviation at a probe location.

    The probe maps to the nearest node on each grid (round(x * J)); the
    vectorial variant sums the absolute deviations of all three species.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"probe location must be in [0, 1], got {x}")
    idx_t, idx_r = shared_snapshots(traj, ref)
    w = _time_weights(traj.times[idx_t])
    node_t = probe_node(x, traj.scenario.grid_points)
    node_r = probe_node(x, ref.scenario.grid_points)
    d = _component_diffs(
        traj, ref, idx_t, idx_r, component,
        nodes_t=np.array([node_t]), nodes_r=np.array([node_r]),
    )
    per_time = d.sum(axis=0)[:, 0]
    return float((w * per_time[1:]).sum())


def probe_node(x: float, grid_points: int) -> int:
    """Nearest-node index of a probe location (e.g. 0.72 -> node 101 of 141)."""
    return int(round(x * grid_points))


def err_time_space_mapped(
    traj: Trajectory,
    ref: Trajectory,
    nodes_t: np.ndarray,
    nodes_r: np.ndarray,
    dx_coarse: float,
    component=1,
) -> float:
    """Space-time L1 deviation on an explicit pair of node maps.

    sum_k dx_coarse * sum_s dt_s * |ref(map_r(k), t_s) - traj(map_t(k), t_s)|
    """
    nodes_t = np.asarray(nodes_t)
    nodes_r = np.asarray(nodes_r)
    if nodes_t.shape != nodes_r.shape:
        raise ValueError("node maps must have equal length")
    idx_t, idx_r = shared_snapshots(traj, ref)
    w = _time_weights(traj.times[idx_t])
    d = _component_diffs(traj, ref, idx_t, idx_r, component, nodes_t, nodes_r)
    per_time = d.sum(axis=0).sum(axis=1)
    return float(dx_coarse * (w * per_time[1:]).sum())


def err_time_space(traj: Trajectory, ref: Trajectory, component=1) -> float:
    """Space-time L1 deviation on the 51-node coarse skeleton.

    Both runs must sit on hierarchy grids; each is restricted through its
    level's floor-index map before the double sum.
    """
    level_t = hierarchy_level(traj.scenario.grid_points)
    level_r = hierarchy_level(ref.scenario.grid_points)
    ks = np.arange(COARSE_NODES)
    nodes_t = np.array([coarse_grid_map(int(k), level_t) for k in ks])
    nodes_r = np.array([coarse_grid_map(int(k), level_r) for k in ks])
    return err_time_space_mapped(traj, ref, nodes_t, nodes_r, DX_COARSE, component)


@dataclass(frozen=True)
class ErrorReport:
    """Bundle of per-component and vectorial deviations for one comparison.

    kind names the metric (sigma-sq | err-at-point | err-time-space); dt and
    scheme label identify the compared run.
    """

    err1: float
    err2: float
    err_vec: float
    kind: str
    dt: float
    scheme: str

    def __post_init__(self):
        if min(self.err1, self.err2, self.err_vec) < 0.0:
            raise ValueError("deviations cannot be negative")


def compute_error_report(traj: Trajectory, ref: Trajectory, kind: str, x: float | None = None) -> ErrorReport:
    """Evaluate one metric for both components and the vectorial form."""
    if kind == "sigma-sq":
        values = [sigma_sq(traj, ref, c) for c in (1, 2, "vec")]
    elif kind == "err-at-point":
        if x is None:
            raise ValueError("err-at-point needs a probe location")
        values = [err_at_point(traj, ref, x, c) for c in (1, 2, "vec")]
    elif kind == "err-time-space":
        values = [err_time_space(traj, ref, c) for c in (1, 2, "vec")]
    else:
        raise ValueError(f"unknown metric kind {kind!r}")
    return ErrorReport(
        err1=values[0],
        err2=values[1],
        err_vec=values[2],
        kind=kind,
        dt=traj.scenario.dt,
        scheme=traj.scheme.label,
    )


def observed_order(errors, dts) -> float | None:
    """Least-squares slope of log(err) against log(dt).

    Returns None when any error is non-positive (no slope can honestly be
    fitted through a zero or negative deviation).
    """
    errors = np.asarray(errors, dtype=float)
    dts = np.asarray(dts, dtype=float)
    if errors.shape != dts.shape or errors.size < 3:
        raise ValueError("need at least 3 (err, dt) pairs of equal length")
    if np.any(dts <= 0.0):
        raise ValueError("time steps must be positive")
    if np.any(errors <= 0.0):
        return None
    slope = np.polyfit(np.log(dts), np.log(errors), 1)[0]
    return float(slope)


def uphill_region(traj: Trajectory) -> np.ndarray:
    """Sign of -N2 * (backward-difference of xi2) per snapshot and node.

    Negative entries mark cells where the species-2 flux points up its own
    gradient, the counter-gradient transport impossible under plain Fick
    diffusion.  The gradient uses the same backward stencil as the solver.
    """
    if traj.n2.size == 0:
        raise ValueError("trajectory carries no flux snapshots")
    inv_dx = float(traj.scenario.grid_points)
    g2 = np.empty_like(traj.xi2)
    g2[:, :-1] = (traj.xi2[:, 1:] - traj.xi2[:, :-1]) * inv_dx
    g2[:, -1] = (-traj.xi2[:, -1]) * inv_dx
    return np.sign(-traj.n2 * g2)


# ---------------------------------------------------------------------------
# Splitting-order study on the frozen-flux linear surrogate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrderFit:
    """Self-convergence data of one scheme: consecutive-halving deviations."""

    dts: np.ndarray
    errors: np.ndarray
    slope: float | None


def splitting_order_study(
    profile: str,
    mixture: MixtureParams,
    reaction: ReactionMatrix,
    grid_points: int,
    steps_list,
    schemes=("ab", "aba-frozen", "aba-updated"),
) -> dict[str, OrderFit]:
    """Measure pure splitting orders on a linear surrogate problem.

    The transport term is frozen at its exact initial value (a constant
    source per node, whose one-step Euler update is therefore exact) and
    the kinetics advance with the exact matrix-exponential flow.  The only
    remaining error is the splitting error, so sequential splitting shows
    slope 1 and the Strang-type compositions slope 2.

    Self-convergence: for each consecutive halving dt -> dt/2 the deviation
    is max-norm between the two final states; the slope is fitted through
    (dt, deviation) pairs.
    """
    steps_list = sorted(int(n) for n in steps_list)
    if len(steps_list) < 4:
        raise ValueError("need at least 4 step counts for a 3-point slope fit")
    for coarse, fine in zip(steps_list, steps_list[1:]):
        if fine != 2 * coarse:
            raise ValueError("step counts must form a halving hierarchy")

    initial = build_initial(profile, grid_points)
    grid = Grid1D(grid_points)
    flux0 = compute_fluxes(initial, mixture, grid.backward_op())
    d_plus = grid.forward_op()
    source1 = -d_plus(flux0.n1)
    source2 = -d_plus(flux0.n2)

    finals: dict[str, list[np.ndarray]] = {s: [] for s in schemes}
    for n_steps in steps_list:
        dt = 1.0 / n_steps
        e_full = matrix_exp_3x3(reaction.lam, dt)
        e_half = matrix_exp_3x3(reaction.lam, 0.5 * dt)
        for scheme in schemes:
            xi1 = initial.xi1.copy()
            xi2 = initial.xi2.copy()
            for _ in range(n_steps):
                if scheme == "ab":
                    xi1 += dt * source1
                    xi2 += dt * source2
                    xi1, xi2 = _exact_react(xi1, xi2, e_full)
                elif scheme == "aba-frozen":
                    xi1 += 0.5 * dt * source1
                    xi2 += 0.5 * dt * source2
                    xi1, xi2 = _exact_react(xi1, xi2, e_full)
                    xi1 += 0.5 * dt * source1
                    xi2 += 0.5 * dt * source2
                elif scheme == "aba-updated":
                    xi1 += 0.5 * dt * source1
                    xi2 += 0.5 * dt * source2
                    xi1, xi2 = _exact_react(xi1, xi2, e_half)
                    xi1, xi2 = _exact_react(xi1, xi2, e_half)
                    xi1 += 0.5 * dt * source1
                    xi2 += 0.5 * dt * source2
                else:
                    raise ValueError(f"unknown surrogate scheme {scheme!r}")
            finals[scheme].append(np.stack([xi1, xi2]))

    fits = {}
    dts = np.array([1.0 / n for n in steps_list])
    for scheme in schemes:
        devs = np.array(
            [
                np.abs(finals[scheme][i + 1] - finals[scheme][i]).max()
                for i in range(len(steps_list) - 1)
            ]
        )
        fits[scheme] = OrderFit(dts=dts[:-1], errors=devs, slope=observed_order(devs, dts[:-1]))
    return fits


def _exact_react(xi1, xi2, propagator):
    xi3 = (1.0 - xi1) - xi2
    new1 = propagator[0, 0] * xi1 + propagator[0, 1] * xi2 + propagator[0, 2] * xi3
    new2 = propagator[1, 0] * xi1 + propagator[1, 1] * xi2 + propagator[1, 2] * xi3
    return new1, new2
