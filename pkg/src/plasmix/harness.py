"""Run configuration, orchestration, and CSV/report emission.

Config files are flat ``key=value`` lines with ``#`` comments.  All floats
are serialised with 17 significant digits so every CSV round-trips to the
exact in-memory values; line endings are LF.  Identical configs produce
bit-identical CSV files.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .analysis import err_time_space, observed_order, probe_node, sigma_sq
from .discretization import cfl_grid_pairs, cfl_max_dt
from .errors import CFLViolationError, ConfigError
from .model import (
    MixtureParams,
    Profile,
    ReactionMatrix,
    Scenario,
    Scheme,
    duncan_toor_asymptotic_mixture,
    duncan_toor_uphill_mixture,
    hydrogen_mixture,
    reaction_matrix_example,
)
from .splitting import Trajectory, run_scenario

DEFAULT_PROBE = 0.72


@dataclass(frozen=True)
class ScenarioSpec:
    """Named experiment: mixture, kinetics, and default initial profile."""

    mixture_factory: object
    reaction_id: int | None
    default_profile: str
    profile_fixed: bool


SCENARIOS = {
    "pure-diffusion-uphill": ScenarioSpec(
        duncan_toor_uphill_mixture, None, Profile.UPHILL, profile_fixed=True
    ),
    "pure-diffusion-asymptotic": ScenarioSpec(
        duncan_toor_asymptotic_mixture, None, Profile.STEP, profile_fixed=True
    ),
    "hydrogen-1": ScenarioSpec(hydrogen_mixture, 1, Profile.UPHILL, profile_fixed=False),
    "hydrogen-2": ScenarioSpec(hydrogen_mixture, 2, Profile.UPHILL, profile_fixed=False),
    "hydrogen-3": ScenarioSpec(hydrogen_mixture, 3, Profile.UPHILL, profile_fixed=False),
}


def scenario_mixture(name: str) -> MixtureParams:
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}")
    return SCENARIOS[name].mixture_factory()


@dataclass(frozen=True)
class RunConfig:
    """Validated description of one `run` invocation."""

    scenario_name: str
    scheme: Scheme
    grid_points: int
    time_steps: int
    profile: str
    cadence: int | None = None
    probe: float = DEFAULT_PROBE
    out: Path | None = None

    def to_scenario(self) -> Scenario:
        spec = SCENARIOS[self.scenario_name]
        reaction = (
            reaction_matrix_example(spec.reaction_id)
            if spec.reaction_id is not None
            else None
        )
        return Scenario(
            profile=self.profile,
            mixture=spec.mixture_factory(),
            reaction=reaction,
            grid_points=self.grid_points,
            time_steps=self.time_steps,
            scheme=self.scheme,
        )


def _parse_lines(text: str):
    """Yield (line_number, key, value) from key=value text with # comments."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value, got {raw.strip()!r}", lineno)
        key, value = line.split("=", 1)
        yield lineno, key.strip(), value.strip()


def _parse_grid(value: str, lineno: int) -> tuple[int, int]:
    parts = value.lower().split("x")
    if len(parts) != 2:
        raise ConfigError(f"grid must look like 140x40000, got {value!r}", lineno)
    try:
        j, n = int(parts[0]), int(parts[1])
    except ValueError:
        raise ConfigError(f"grid must be two integers, got {value!r}", lineno) from None
    return j, n


_RUN_KEYS = ("scenario", "scheme", "grid", "level", "cadence", "probe", "profile", "out")


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a `run` config (including the CFL gate)."""
    seen: dict[str, tuple[int, str]] = {}
    for lineno, key, value in _parse_lines(text):
        if key not in _RUN_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        seen[key] = (lineno, value)

    def require(key):
        if key not in seen:
            raise ConfigError(f"missing required key {key!r}")
        return seen[key]

    lineno, scenario_name = require("scenario")
    if scenario_name not in SCENARIOS:
        raise ConfigError(
            f"unknown scenario {scenario_name!r}; choose from {sorted(SCENARIOS)}", lineno
        )
    spec = SCENARIOS[scenario_name]

    lineno, scheme_text = require("scheme")
    try:
        scheme = Scheme.parse(scheme_text)
    except ValueError as exc:
        raise ConfigError(str(exc), lineno) from None
    if scheme.needs_reaction and spec.reaction_id is None:
        raise ConfigError(
            f"scheme {scheme.label!r} needs a reaction scenario, got {scenario_name!r}",
            lineno,
        )
    if not scheme.needs_reaction and spec.reaction_id is not None:
        raise ConfigError(
            f"scheme pure-diffusion does not apply to reaction scenario {scenario_name!r}",
            lineno,
        )

    if ("grid" in seen) == ("level" in seen):
        raise ConfigError("exactly one of 'grid' or 'level' must be given")
    if "grid" in seen:
        lineno, value = seen["grid"]
        grid_points, time_steps = _parse_grid(value, lineno)
        grid_line = lineno
    else:
        lineno, value = seen["level"]
        pairs = cfl_grid_pairs()
        try:
            idx = int(value)
            grid_points, time_steps = pairs[idx]
        except (ValueError, IndexError):
            raise ConfigError(
                f"level must be 0..{len(pairs) - 1}, got {value!r}", lineno
            ) from None
        grid_line = lineno

    profile = spec.default_profile
    if "profile" in seen:
        lineno, value = seen["profile"]
        if spec.profile_fixed:
            raise ConfigError(
                f"scenario {scenario_name!r} fixes the profile; drop the 'profile' key",
                lineno,
            )
        if value not in Profile.ALL:
            raise ConfigError(f"profile must be one of {Profile.ALL}, got {value!r}", lineno)
        profile = value

    cadence = None
    if "cadence" in seen:
        lineno, value = seen["cadence"]
        try:
            cadence = int(value)
        except ValueError:
            raise ConfigError(f"cadence must be an integer, got {value!r}", lineno) from None
        if cadence < 1:
            raise ConfigError(f"cadence must be >= 1, got {cadence}", lineno)

    probe = DEFAULT_PROBE
    if "probe" in seen:
        lineno, value = seen["probe"]
        try:
            probe = float(value)
        except ValueError:
            raise ConfigError(f"probe must be a number, got {value!r}", lineno) from None
        if not 0.0 <= probe <= 1.0:
            raise ConfigError(f"probe must be in [0, 1], got {probe}", lineno)

    out = Path(seen["out"][1]) if "out" in seen else None

    config = RunConfig(
        scenario_name=scenario_name,
        scheme=scheme,
        grid_points=grid_points,
        time_steps=time_steps,
        profile=profile,
        cadence=cadence,
        probe=probe,
        out=out,
    )
    try:
        config.to_scenario()
    except CFLViolationError as exc:
        raise ConfigError(str(exc), grid_line) from None
    return config


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_trajectory_csv(traj: Trajectory, path: Path) -> None:
    """One row per (snapshot, node); closures materialised at write time."""
    nodes = np.arange(traj.node_count) / traj.scenario.grid_points
    xi3 = traj.xi3
    n3 = traj.n3
    with open(path, "w", newline="\n") as fh:
        fh.write("t,x,xi1,xi2,xi3,N1,N2,N3\n")
        for s in range(traj.snapshot_count):
            t = traj.times[s]
            for j in range(traj.node_count):
                fh.write(
                    ",".join(
                        (
                            _fmt(t),
                            _fmt(nodes[j]),
                            _fmt(traj.xi1[s, j]),
                            _fmt(traj.xi2[s, j]),
                            _fmt(xi3[s, j]),
                            _fmt(traj.n1[s, j]),
                            _fmt(traj.n2[s, j]),
                            _fmt(n3[s, j]),
                        )
                    )
                    + "\n"
                )


def read_trajectory_csv(path: Path) -> dict[str, np.ndarray]:
    """Parse a trajectory.csv back into exact column arrays."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    return {name: np.asarray(data[name]) for name in data.dtype.names}


def write_probe_csv(traj: Trajectory, x: float, path: Path) -> None:
    """Time series of all three species at the probe node."""
    node = probe_node(x, traj.scenario.grid_points)
    xi3 = traj.xi3
    with open(path, "w", newline="\n") as fh:
        fh.write("t,xi1,xi2,xi3\n")
        for s in range(traj.snapshot_count):
            fh.write(
                ",".join(
                    (
                        _fmt(traj.times[s]),
                        _fmt(traj.xi1[s, node]),
                        _fmt(traj.xi2[s, node]),
                        _fmt(xi3[s, node]),
                    )
                )
                + "\n"
            )


def conservation_summary(traj: Trajectory) -> dict[str, float]:
    """The three conservation residuals of a trajectory.

    sum_drift_rel: worst relative drift of the per-species node sums (for
    reaction runs this includes the legitimate kinetic exchange and is
    reported as-is); boundary_flux_max: largest |N| at a wall; closure_max_dev:
    largest |xi1 + xi2 + xi3 - 1|.
    """
    drifts = []
    for arr in (traj.xi1, traj.xi2, traj.xi3):
        sums = arr.sum(axis=1)
        drifts.append(np.abs(sums - sums[0]).max() / abs(sums[0]))
    boundary = max(
        np.abs(traj.n1[:, 0]).max(),
        np.abs(traj.n1[:, -1]).max(),
        np.abs(traj.n2[:, 0]).max(),
        np.abs(traj.n2[:, -1]).max(),
    )
    closure = np.abs((traj.xi1 + traj.xi2 + traj.xi3) - 1.0).max()
    return {
        "sum_drift_rel_xi1": drifts[0],
        "sum_drift_rel_xi2": drifts[1],
        "sum_drift_rel_xi3": drifts[2],
        "sum_drift_rel": max(drifts),
        "boundary_flux_max": float(boundary),
        "closure_max_dev": float(closure),
    }


def write_summary(traj: Trajectory, config: RunConfig, path: Path) -> None:
    resid = conservation_summary(traj)
    with open(path, "w", newline="\n") as fh:
        fh.write(f"scenario = {config.scenario_name}\n")
        fh.write(f"scheme = {traj.scheme.label}\n")
        fh.write(f"profile = {config.profile}\n")
        fh.write(f"grid = {config.grid_points}x{config.time_steps}\n")
        fh.write(f"dt = {_fmt(traj.scenario.dt)}\n")
        fh.write(f"backend = {traj.backend}\n")
        fh.write(f"loop_seconds = {traj.loop_seconds:.6f}\n")
        for key in (
            "sum_drift_rel",
            "sum_drift_rel_xi1",
            "sum_drift_rel_xi2",
            "sum_drift_rel_xi3",
            "boundary_flux_max",
            "closure_max_dev",
        ):
            fh.write(f"{key} = {_fmt(resid[key])}\n")


def run(config: RunConfig, out_dir: Path) -> Trajectory:
    """Execute one configured run and write trajectory/summary/probe files."""
    scenario = config.to_scenario()
    traj = run_scenario(scenario, config.cadence)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(traj, out_dir / "trajectory.csv")
    write_summary(traj, config, out_dir / "summary.txt")
    if scenario.reaction is not None:
        write_probe_csv(traj, config.probe, out_dir / "probe.csv")
    return traj


# ---------------------------------------------------------------------------
# Convergence study
# ---------------------------------------------------------------------------

DEFAULT_STUDY_SCHEMES = ("ab", "aba-frozen", "iter2", "iter3")

_CONV_KEYS = ("scenario", "schemes", "levels", "probe", "profile")


@dataclass(frozen=True)
class ConvergenceConfig:
    scenario_name: str
    schemes: tuple[str, ...] = DEFAULT_STUDY_SCHEMES
    levels: tuple[int, ...] = (1, 2, 3, 4)
    probe: float = DEFAULT_PROBE
    profile: str = Profile.UPHILL


def parse_convergence_config(text: str) -> ConvergenceConfig:
    seen: dict[str, tuple[int, str]] = {}
    for lineno, key, value in _parse_lines(text):
        if key not in _CONV_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        seen[key] = (lineno, value)

    if "scenario" not in seen:
        raise ConfigError("missing required key 'scenario'")
    lineno, scenario_name = seen["scenario"]
    if scenario_name not in SCENARIOS or SCENARIOS[scenario_name].reaction_id is None:
        raise ConfigError(
            f"convergence study needs a reaction scenario, got {scenario_name!r}", lineno
        )

    schemes = DEFAULT_STUDY_SCHEMES
    if "schemes" in seen:
        lineno, value = seen["schemes"]
        schemes = tuple(s.strip() for s in value.split(",") if s.strip())
        allowed = {"ab", "aba-frozen", "aba-updated", "iter2", "iter3"}
        for s in schemes:
            if s not in allowed:
                raise ConfigError(
                    f"scheme {s!r} not allowed in the study; choose from {sorted(allowed)}",
                    lineno,
                )
        if not schemes:
            raise ConfigError("schemes list is empty", lineno)

    levels = (1, 2, 3, 4)
    if "levels" in seen:
        lineno, value = seen["levels"]
        try:
            levels = tuple(int(s) for s in value.split(",") if s.strip())
        except ValueError:
            raise ConfigError(f"levels must be integers, got {value!r}", lineno) from None
        for lv in levels:
            if not 1 <= lv <= 4:
                raise ConfigError(f"levels index the non-reference rows 1..4, got {lv}", lineno)

    probe = DEFAULT_PROBE
    if "probe" in seen:
        lineno, value = seen["probe"]
        probe = float(value)

    profile = Profile.UPHILL
    if "profile" in seen:
        lineno, value = seen["profile"]
        if value not in Profile.ALL:
            raise ConfigError(f"profile must be one of {Profile.ALL}", lineno)
        profile = value

    return ConvergenceConfig(scenario_name, schemes, levels, probe, profile)


@dataclass(frozen=True)
class TableauRow:
    scheme: str
    grid_points: int
    time_steps: int
    dt: float
    err1: float
    err2: float
    err_vec: float
    sigma_sq: float
    observed_order: float | None
    loop_seconds: float
    reference: bool = False


def _study_scenario(config: ConvergenceConfig, grid_points, time_steps) -> Scenario:
    spec = SCENARIOS[config.scenario_name]
    return Scenario(
        profile=config.profile,
        mixture=spec.mixture_factory(),
        reaction=reaction_matrix_example(spec.reaction_id),
        grid_points=grid_points,
        time_steps=time_steps,
        scheme=Scheme.ab(),
    )


def convergence(config: ConvergenceConfig, workers: int = 1) -> list[TableauRow]:
    """Reference run plus every (scheme, level) pair of the study matrix.

    The reference (finest hierarchy pair, three Picard sweeps) runs first;
    the remaining runs are independent and may execute on a thread pool.
    Rows come back in deterministic order regardless of worker count.
    """
    pairs = cfl_grid_pairs()
    ref_j, ref_n = pairs[0]
    ref_scenario = replace(_study_scenario(config, ref_j, ref_n), scheme=Scheme.picard(3))
    ref = run_scenario(ref_scenario)

    jobs = [
        (scheme, pairs[level].grid_points, pairs[level].time_steps)
        for scheme in config.schemes
        for level in config.levels
    ]

    def execute(job):
        scheme_label, grid_points, time_steps = job
        scenario = replace(
            _study_scenario(config, grid_points, time_steps),
            scheme=Scheme.parse(scheme_label),
        )
        traj = run_scenario(scenario)
        return TableauRow(
            scheme=scheme_label,
            grid_points=grid_points,
            time_steps=time_steps,
            dt=scenario.dt,
            err1=err_time_space(traj, ref, 1),
            err2=err_time_space(traj, ref, 2),
            err_vec=err_time_space(traj, ref, "vec"),
            sigma_sq=sigma_sq_cross(traj, ref),
            observed_order=None,
            loop_seconds=traj.loop_seconds,
        )

    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(execute, jobs))
    else:
        rows = [execute(job) for job in jobs]

    rows = _attach_orders(rows, config.schemes)
    ref_row = TableauRow(
        scheme="iter3",
        grid_points=ref_j,
        time_steps=ref_n,
        dt=ref_scenario.dt,
        err1=0.0,
        err2=0.0,
        err_vec=0.0,
        sigma_sq=0.0,
        observed_order=None,
        loop_seconds=ref.loop_seconds,
        reference=True,
    )
    return [ref_row] + rows


def sigma_sq_cross(traj: Trajectory, ref: Trajectory) -> float:
    """Vectorial time-averaged mean square on the coarse skeleton.

    Cross-grid variant of sigma_sq: both runs restricted through their
    hierarchy index maps, square deviations averaged over the 51 skeleton
    nodes.
    """
    from .analysis import COARSE_NODES, shared_snapshots, _time_weights
    from .discretization import coarse_grid_map, hierarchy_level

    level_t = hierarchy_level(traj.scenario.grid_points)
    level_r = hierarchy_level(ref.scenario.grid_points)
    nodes_t = np.array([coarse_grid_map(k, level_t) for k in range(COARSE_NODES)])
    nodes_r = np.array([coarse_grid_map(k, level_r) for k in range(COARSE_NODES)])
    idx_t, idx_r = shared_snapshots(traj, ref)
    w = _time_weights(traj.times[idx_t])
    horizon = traj.times[idx_t][-1]
    d1 = ref.xi1[idx_r][:, nodes_r] - traj.xi1[idx_t][:, nodes_t]
    d2 = ref.xi2[idx_r][:, nodes_r] - traj.xi2[idx_t][:, nodes_t]
    per_time = (d1 * d1 + d2 * d2).mean(axis=1)
    return float((w * per_time[1:]).sum() / horizon)


def _attach_orders(rows: list[TableauRow], schemes) -> list[TableauRow]:
    """Fit one observed order per scheme across its levels (err_vec vs dt)."""
    out = []
    for scheme in schemes:
        group = [r for r in rows if r.scheme == scheme]
        slope = None
        if len(group) >= 3:
            errs = [r.err_vec for r in group]
            dts = [r.dt for r in group]
            if all(e > 0 for e in errs):
                slope = observed_order(errs, dts)
        for r in group:
            out.append(replace(r, observed_order=slope))
    return out


def write_tableau_csv(rows: list[TableauRow], path: Path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(
            "scheme,J,N,dt,err1,err2,err_vec,sigma_sq,observed_order,loop_seconds,reference\n"
        )
        for r in rows:
            order = "" if r.observed_order is None else _fmt(r.observed_order)
            fh.write(
                ",".join(
                    (
                        r.scheme,
                        str(r.grid_points),
                        str(r.time_steps),
                        _fmt(r.dt),
                        _fmt(r.err1),
                        _fmt(r.err2),
                        _fmt(r.err_vec),
                        _fmt(r.sigma_sq),
                        order,
                        f"{r.loop_seconds:.6f}",
                        "1" if r.reference else "0",
                    )
                )
                + "\n"
            )


def cfl_report(grid_points: int, time_steps: int, scenario_name: str) -> tuple[float, float, bool]:
    """(dt, bound, passes) for the CFL gate of a named scenario."""
    mixture = scenario_mixture(scenario_name)
    dt = 1.0 / time_steps
    bound = cfl_max_dt(1.0 / grid_points, mixture)
    return dt, bound, dt <= bound
