"""Domain types and physical parameters for the three-species mixture.

Species are a weakly ionised hydrogen plasma: component 1 is H2,
component 2 is H2+, component 3 is H.  Mole fractions close to one
(xi3 = 1 - xi1 - xi2) and molar fluxes close to zero (N3 = -N1 - N2),
so only the first two components are ever stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CFLViolationError

#: Absolute tolerance for the column-sum test of a rate matrix.  Entries span
#: 1e-13 .. 1e-1, so exact conservation shows up many orders below this.
CONSERVATIVE_ATOL = 1e-18


@dataclass(frozen=True)
class MixtureParams:
    """Binary diffusion coefficients [cm^2/s] and derived coupling constants.

    alpha and beta [s/cm^2] are cached at construction:

        alpha = 1/d12 - 1/d13,   beta = 1/d12 - 1/d23
    """

    d12: float
    d13: float
    d23: float
    alpha: float = field(init=False)
    beta: float = field(init=False)

    def __post_init__(self):
        if not (self.d12 > 0.0 and self.d13 > 0.0 and self.d23 > 0.0):
            raise ValueError("binary diffusion coefficients must be positive")
        object.__setattr__(self, "alpha", 1.0 / self.d12 - 1.0 / self.d13)
        object.__setattr__(self, "beta", 1.0 / self.d12 - 1.0 / self.d23)

    @property
    def d_max(self) -> float:
        return max(self.d12, self.d13, self.d23)


def hydrogen_mixture() -> MixtureParams:
    """H2 / H2+ / H binary diffusion constants [cm^2/s]."""
    return MixtureParams(d12=0.34, d13=0.21, d23=0.21)


def duncan_toor_uphill_mixture() -> MixtureParams:
    """Semi-degenerate Duncan-Toor case: d12 = d13 makes alpha vanish."""
    return MixtureParams(d12=0.833, d13=0.833, d23=0.168)


def duncan_toor_asymptotic_mixture() -> MixtureParams:
    """Duncan-Toor parameters for the asymptotic-behaviour experiment."""
    return MixtureParams(d12=0.0833, d13=0.680, d23=0.168)


def fickian_mixture(d: float = 0.833) -> MixtureParams:
    """All binary coefficients equal: alpha = beta = 0, plain Fick diffusion."""
    return MixtureParams(d12=d, d13=d, d23=d)


@dataclass(frozen=True)
class ReactionMatrix:
    """3x3 rate matrix [1/s] acting on the mole-fraction vector.

    A matrix whose columns sum to zero conserves xi1 + xi2 + xi3 and is
    flagged ``conservative``.
    """

    lam: np.ndarray
    conservative: bool = field(init=False)

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        if lam.shape != (3, 3):
            raise ValueError(f"rate matrix must be 3x3, got {lam.shape}")
        if not np.all(np.isfinite(lam)):
            raise ValueError("rate matrix entries must be finite")
        object.__setattr__(self, "lam", lam)
        colsum = np.abs(lam.sum(axis=0)).max()
        object.__setattr__(self, "conservative", bool(colsum <= CONSERVATIVE_ATOL))

    @classmethod
    def zero(cls) -> "ReactionMatrix":
        return cls(np.zeros((3, 3)))

    def is_zero(self) -> bool:
        return not self.lam.any()


#: Diagonal rate constants of the three hydrogen-plasma examples [1/s].
_EXAMPLE_DIAGONALS = {
    1: (-4.276e-7, -2.082e-13, -4.276e-7),
    2: (-4.276e-2, -2.082e-8, -4.276e-8),
    3: (-4.276e-1, -2.082e-2, -4.276e-2),
}


def reaction_matrix_example(example_id: int) -> ReactionMatrix:
    """Rate matrix of hydrogen-plasma example 1, 2 or 3.

    Each diagonal entry lam_jj is split evenly onto the two off-diagonal
    entries of its column (lam_ij = -lam_jj / 2 for i != j), which makes
    every column sum to zero exactly and conserves total mole fraction.
    """
    if example_id not in _EXAMPLE_DIAGONALS:
        raise ValueError(f"example_id must be 1, 2 or 3, got {example_id!r}")
    l1, l2, l3 = _EXAMPLE_DIAGONALS[example_id]
    lam = np.array(
        [
            [l1, -l2 / 2.0, -l3 / 2.0],
            [-l1 / 2.0, l2, -l3 / 2.0],
            [-l1 / 2.0, -l2 / 2.0, l3],
        ]
    )
    return ReactionMatrix(lam)


def arrhenius_rates(t_e: float) -> tuple[float, float]:
    """Ionisation and dissociation rate constants [1/s] at electron temperature t_e [K].

    lambda1 = 1.58e-15 * t_e^0.5 * exp(-15.378 / t_e)
    lambda2 = 1.413e-15 * t_e^2  * exp(-4.48 / t_e)
    """
    if not t_e > 0.0:
        raise ValueError(f"electron temperature must be positive, got {t_e!r}")
    lambda1 = 1.58e-15 * math.sqrt(t_e) * math.exp(-15.378 / t_e)
    lambda2 = 1.413e-15 * t_e**2 * math.exp(-4.48 / t_e)
    return lambda1, lambda2


@dataclass(frozen=True)
class SpeciesField:
    """Mole fractions of components 1 and 2 at the J+1 grid nodes.

    xi3 is never stored; it is recovered pointwise from the closure
    xi3 = 1 - xi1 - xi2.  Treated as immutable after construction.
    """

    xi1: np.ndarray
    xi2: np.ndarray

    def __post_init__(self):
        xi1 = np.asarray(self.xi1, dtype=float)
        xi2 = np.asarray(self.xi2, dtype=float)
        if xi1.ndim != 1 or xi1.shape != xi2.shape:
            raise ValueError(
                f"xi1 and xi2 must be 1-d arrays of equal length, "
                f"got {xi1.shape} and {xi2.shape}"
            )
        object.__setattr__(self, "xi1", xi1)
        object.__setattr__(self, "xi2", xi2)

    @property
    def xi3(self) -> np.ndarray:
        return (1.0 - self.xi1) - self.xi2

    def __len__(self) -> int:
        return self.xi1.shape[0]


@dataclass(frozen=True)
class FluxField:
    """Molar fluxes of components 1 and 2 at the J+1 grid nodes.

    N3 follows from sum(N_j) = 0.  No-flux boundaries require the first and
    last node of both components to be zero.
    """

    n1: np.ndarray
    n2: np.ndarray

    def __post_init__(self):
        n1 = np.asarray(self.n1, dtype=float)
        n2 = np.asarray(self.n2, dtype=float)
        if n1.ndim != 1 or n1.shape != n2.shape:
            raise ValueError(
                f"n1 and n2 must be 1-d arrays of equal length, "
                f"got {n1.shape} and {n2.shape}"
            )
        for name, arr in (("n1", n1), ("n2", n2)):
            if arr[0] != 0.0 or arr[-1] != 0.0:
                raise ValueError(f"{name} must vanish at both boundary nodes")
        object.__setattr__(self, "n1", n1)
        object.__setattr__(self, "n2", n2)

    @property
    def n3(self) -> np.ndarray:
        return (-self.n1) - self.n2

    def __len__(self) -> int:
        return self.n1.shape[0]


class Profile:
    """Initial mole-fraction profiles on [0, 1]; xi2 = 0.2 everywhere."""

    UPHILL = "uphill"
    STEP = "step"
    ALL = (UPHILL, STEP)


def build_initial(profile: str, grid_points: int) -> SpeciesField:
    """Sample an initial profile at the nodes x_j = j / J.

    uphill: xi1 = 0.8 on [0, 0.25), 1.6 * (0.75 - x) on [0.25, 0.75),
            0 on [0.75, 1].
    step:   xi1 = 0.8 on [0, 0.5), 0 on [0.5, 1].
    """
    if grid_points < 2:
        raise ValueError(f"need at least 2 grid intervals, got {grid_points}")
    # Direct division hits breakpoints like 0.25 and 0.5 exactly where they
    # are representable, unlike accumulating j * dx.
    x = np.arange(grid_points + 1) / grid_points
    if profile == Profile.UPHILL:
        xi1 = np.where(x < 0.25, 0.8, np.where(x < 0.75, 1.6 * (0.75 - x), 0.0))
    elif profile == Profile.STEP:
        xi1 = np.where(x < 0.5, 0.8, 0.0)
    else:
        raise ValueError(f"unknown profile {profile!r}")
    xi2 = np.full(grid_points + 1, 0.2)
    return SpeciesField(xi1, xi2)


@dataclass(frozen=True)
class Scheme:
    """Time-integration scheme selector.

    kind is one of pure-diffusion | ab | aba-frozen | aba-updated |
    picard | nested; the Picard variants carry their sweep counts.
    """

    kind: str
    iters: int = 0
    inner: int = 0
    outer: int = 0

    KINDS = ("pure-diffusion", "ab", "aba-frozen", "aba-updated", "picard", "nested")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.kind == "picard" and self.iters < 1:
            raise ValueError("picard needs at least one sweep")
        if self.kind == "nested" and (self.inner < 1 or self.outer < 1):
            raise ValueError("nested picard needs inner >= 1 and outer >= 1")

    @classmethod
    def pure_diffusion(cls) -> "Scheme":
        return cls("pure-diffusion")

    @classmethod
    def ab(cls) -> "Scheme":
        return cls("ab")

    @classmethod
    def aba_frozen(cls) -> "Scheme":
        return cls("aba-frozen")

    @classmethod
    def aba_updated(cls) -> "Scheme":
        return cls("aba-updated")

    @classmethod
    def picard(cls, iters: int) -> "Scheme":
        return cls("picard", iters=iters)

    @classmethod
    def nested(cls, inner: int, outer: int) -> "Scheme":
        return cls("nested", inner=inner, outer=outer)

    @property
    def label(self) -> str:
        if self.kind == "picard":
            return f"iter{self.iters}"
        if self.kind == "nested":
            return f"nested-{self.inner}x{self.outer}"
        return self.kind

    @property
    def needs_reaction(self) -> bool:
        return self.kind != "pure-diffusion"

    @classmethod
    def parse(cls, text: str) -> "Scheme":
        """Parse a scheme label: iter2, picard:4, nested:2x2, ab, ..."""
        text = text.strip()
        if text in ("pure-diffusion", "ab", "aba-frozen", "aba-updated"):
            return cls(text)
        if text.startswith("iter"):
            return cls.picard(_parse_count(text[4:], text))
        if text.startswith("picard:"):
            return cls.picard(_parse_count(text[7:], text))
        if text.startswith("nested:"):
            body = text[7:]
            if "x" not in body:
                raise ValueError(f"bad nested scheme {text!r}, expected nested:IxJ")
            inner, outer = body.split("x", 1)
            return cls.nested(_parse_count(inner, text), _parse_count(outer, text))
        raise ValueError(f"unknown scheme {text!r}")


def _parse_count(token: str, context: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ValueError(f"bad iteration count in scheme {context!r}") from None
    if value < 1:
        raise ValueError(f"iteration count must be >= 1 in scheme {context!r}")
    return value


@dataclass(frozen=True)
class Scenario:
    """Complete description of one experiment on [0, 1] x [0, T].

    grid_points J is the interval count (J + 1 nodes); time_steps N gives
    dt = T / N, which must satisfy the explicit stability bound
    dt <= dx^2 / (2 * d_max).  Violations are a hard error at construction.
    """

    profile: str
    mixture: MixtureParams
    reaction: ReactionMatrix | None
    grid_points: int
    time_steps: int
    scheme: Scheme
    horizon: float = 1.0

    def __post_init__(self):
        if self.profile not in Profile.ALL:
            raise ValueError(f"unknown profile {self.profile!r}")
        if self.grid_points < 2:
            raise ValueError(f"grid_points must be >= 2, got {self.grid_points}")
        if self.time_steps < 1:
            raise ValueError(f"time_steps must be >= 1, got {self.time_steps}")
        if not self.horizon > 0.0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        dt_max = self.dx * self.dx / (2.0 * self.mixture.d_max)
        if self.dt > dt_max:
            raise CFLViolationError(self.dt, dt_max, self.grid_points, self.time_steps)

    @property
    def dx(self) -> float:
        return 1.0 / self.grid_points

    @property
    def dt(self) -> float:
        return self.horizon / self.time_steps
