"""Physical parameters, system variants, solution state, parameter
validation, and reproducible random initial data.

The six variants select which linear terms are present in the evolution
equations.  The two chi=0 variants decouple the micro-rotation field and
carry no stability guarantee; they are offered for boundary exploration
only and validation flags them accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .spectral import (
    GridSpec,
    SpectralVectorField,
    dealias,
    divergence_residual,
    hermitian_symmetrize,
    leray_project,
    zero_vector_field,
)


class SystemVariant(Enum):
    """Which subsystem of the magneto-micropolar equations is evolved."""

    FULL = "full"
    ZERO_KINEMATIC = "zero-kinematic"
    ZERO_KINEMATIC_ZERO_DIFFUSION = "zero-kinematic-zero-diffusion"
    PERTURBATION = "perturbation"
    INVISCID_RESISTIVE_MHD = "inviscid-resistive-mhd"
    IDEAL_MHD = "ideal-mhd"

    @property
    def uses_background(self) -> bool:
        """True when the magnetic unknown is the deviation from a constant
        background field and alpha transport terms are active."""
        return self is SystemVariant.PERTURBATION

    @property
    def forces_zero_mu(self) -> bool:
        return self is not SystemVariant.FULL

    @property
    def forces_zero_nu(self) -> bool:
        return self in (SystemVariant.ZERO_KINEMATIC_ZERO_DIFFUSION,
                        SystemVariant.PERTURBATION,
                        SystemVariant.IDEAL_MHD)

    @property
    def forces_zero_chi(self) -> bool:
        return self in (SystemVariant.INVISCID_RESISTIVE_MHD,
                        SystemVariant.IDEAL_MHD)

    @property
    def wire_id(self) -> int:
        """Stable integer id used by the checkpoint format."""
        return _WIRE_IDS[self]


_WIRE_IDS = {v: i for i, v in enumerate(SystemVariant)}
WIRE_VARIANTS = {i: v for v, i in _WIRE_IDS.items()}


@dataclass(frozen=True)
class PhysParams:
    """Equation coefficients plus the background vector and the Diophantine
    exponent used by the perturbation variant.

    mu / chi / nu are the kinematic, micro-rotation and magnetic
    diffusivities; kappa and eta are the angular viscosities.
    """

    mu: float = 0.0
    chi: float = 0.0
    kappa: float = 0.0
    eta: float = 0.0
    nu: float = 0.0
    alpha: tuple[float, float, float] = (0.0, 0.0, 0.0)
    r: float = 2.5

    def __post_init__(self):
        for name in ("mu", "chi", "kappa", "eta", "nu"):
            val = getattr(self, name)
            if not math.isfinite(val) or val < 0.0:
                raise ValueError(f"{name} must be finite and >= 0, got {val}")
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        if len(self.alpha) != 3 or not all(math.isfinite(a) for a in self.alpha):
            raise ValueError(f"alpha must be a finite 3-vector, got {self.alpha}")
        if not math.isfinite(self.r) or self.r <= 2.0:
            raise ValueError(f"Diophantine exponent r must exceed 2, got {self.r}")

    @property
    def alpha_vector(self) -> np.ndarray:
        return np.asarray(self.alpha, dtype=np.float64)

    @property
    def alpha_norm_sq(self) -> float:
        return float(np.dot(self.alpha_vector, self.alpha_vector))

    def u_diffusion(self, variant: SystemVariant) -> float:
        """Effective velocity diffusivity for the selected variant."""
        if variant.forces_zero_chi:
            return 0.0
        if variant is SystemVariant.FULL:
            return self.mu + self.chi
        return self.chi

    def magnetic_diffusion(self, variant: SystemVariant) -> float:
        return 0.0 if variant.forces_zero_nu else self.nu

    def coupling_chi(self, variant: SystemVariant) -> float:
        """chi as seen by the curl couplings and the micro-rotation damping."""
        return 0.0 if variant.forces_zero_chi else self.chi


@dataclass
class ValidationReport:
    ok: bool
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


_OPEN_PROBLEM_WARNING = "open problem regime, no stability guarantee"


def structural_violations(p: PhysParams, variant: SystemVariant) -> list[str]:
    """Coefficients the variant structurally forces to zero but that were
    supplied nonzero; such sets are rejected even by tendency assembly."""
    violations = []
    forced = []
    if variant.forces_zero_mu:
        forced.append(("mu", p.mu))
    if variant.forces_zero_nu:
        forced.append(("nu", p.nu))
    if variant.forces_zero_chi:
        forced.append(("chi", p.chi))
    for name, value in forced:
        if value != 0.0:
            violations.append(
                f"variant {variant.value!r} forces {name}=0, got {name}={value}")
    return violations


def validate_params(p: PhysParams, variant: SystemVariant,
                    strict: bool = True) -> ValidationReport:
    """Check the coefficient set against the hypotheses under which decay is
    guaranteed for the selected variant.

    Strict mode rejects violations; permissive mode downgrades every
    violation to a warning (for exploratory runs).  Each message names the
    specific failed inequality.
    """
    violations: list[str] = list(structural_violations(p, variant))
    warnings: list[str] = []

    if variant.forces_zero_chi:
        warnings.append(_OPEN_PROBLEM_WARNING)

    if variant is SystemVariant.ZERO_KINEMATIC:
        if p.chi <= 0.0:
            violations.append(f"zero-kinematic decay requires chi > 0, got chi={p.chi}")
        if p.eta <= 0.0:
            violations.append(f"zero-kinematic decay requires eta > 0, got eta={p.eta}")
        if p.nu <= 0.0:
            violations.append(f"zero-kinematic decay requires nu > 0, got nu={p.nu}")
    elif variant is SystemVariant.ZERO_KINEMATIC_ZERO_DIFFUSION:
        if p.chi <= 0.0:
            violations.append(f"variant requires chi > 0, got chi={p.chi}")
        if p.eta <= 0.0:
            violations.append(f"variant requires eta > 0, got eta={p.eta}")
    elif variant is SystemVariant.PERTURBATION:
        a2 = p.alpha_norm_sq
        if not a2 < p.chi:
            violations.append(
                f"structure condition |alpha|^2 < chi violated: "
                f"|alpha|^2={a2:.6g} >= chi={p.chi:.6g}")
        if not p.chi < 2.0:
            violations.append(
                f"structure condition chi < 2 violated: chi={p.chi:.6g}")
        if p.eta <= 0.0:
            violations.append(f"perturbation decay requires eta > 0, got eta={p.eta}")

    if strict:
        return ValidationReport(ok=not violations, errors=violations,
                                warnings=warnings)
    return ValidationReport(ok=True, errors=[], warnings=warnings + violations)


@dataclass(frozen=True, eq=False)
class State:
    """Solution snapshot: velocity, micro-rotation, and the magnetic unknown
    (the field itself, or its deviation from the background for the
    perturbation variant), tagged with the evolving variant."""

    u: SpectralVectorField
    omega: SpectralVectorField
    magnetic: SpectralVectorField
    variant: SystemVariant
    t: float = 0.0

    def __post_init__(self):
        n = self.u.grid.n
        if self.omega.grid.n != n or self.magnetic.grid.n != n:
            raise ValueError("state fields must share one grid")

    @property
    def grid(self) -> GridSpec:
        return self.u.grid

    def with_time(self, t: float) -> "State":
        return replace(self, t=t)


def check_state(state: State, div_tol: float = 1e-12) -> None:
    """Assert the state invariants: mean-zero fields, divergence-free u and
    magnetic component.  Raises ValueError on violation."""
    for name, f in (("u", state.u), ("omega", state.omega),
                    ("magnetic", state.magnetic)):
        if np.abs(f.coeffs[:, 0, 0, 0]).max() != 0.0:
            raise ValueError(f"{name} is not mean-zero")
    for name, f in (("u", state.u), ("magnetic", state.magnetic)):
        res = divergence_residual(f)
        if res > div_tol:
            raise ValueError(f"{name} divergence residual {res:.3e} > {div_tol}")


@dataclass(frozen=True)
class InitSpec:
    """Random initial data: spectral envelope |k|^(-slope) exp(-|k|^2/k_peak^2)
    with uniform phases, each field rescaled to Sobolev norm epsilon.

    ``sobolev_index`` is the rescaling norm: 3 for zero-kinematic decay runs,
    the high regularity index N for perturbation runs.  ``k_peak=None``
    defaults to n/6 at build time.
    """

    epsilon: float
    sobolev_index: float = 3.0
    spectrum_slope: float = 2.0
    k_peak: float | None = None
    seed: int = 0

    def __post_init__(self):
        if not math.isfinite(self.epsilon) or self.epsilon < 0.0:
            raise ValueError(f"epsilon must be finite and >= 0, got {self.epsilon}")
        if self.spectrum_slope < 0.0:
            raise ValueError("spectrum_slope must be >= 0")
        if self.k_peak is not None and self.k_peak <= 0.0:
            raise ValueError("k_peak must be positive")


def rescale_to_norm(f: SpectralVectorField, s: float,
                    target: float) -> SpectralVectorField:
    """Scale every coefficient by one real factor so the H^s norm equals
    ``target``; directions are unchanged."""
    from .norms import sobolev_norm

    if target < 0.0:
        raise ValueError("target norm must be >= 0")
    if target == 0.0:
        return zero_vector_field(f.grid)
    current = sobolev_norm(f, s)
    if current == 0.0:
        raise ValueError("cannot rescale the zero field to a positive norm")
    return SpectralVectorField(f.coeffs * (target / current), f.grid)


def _spectral_envelope(grid: GridSpec, slope: float, k_peak: float) -> np.ndarray:
    kmag = np.sqrt(grid.k_squared)
    kmag_safe = np.where(kmag == 0.0, 1.0, kmag)
    env = kmag_safe ** (-slope) * np.exp(-grid.k_squared / k_peak ** 2)
    env = env * grid.dealias_mask
    env[0, 0, 0] = 0.0
    return env


def make_random_state(grid: GridSpec, init: InitSpec, variant: SystemVariant,
                      seed: int | None = None) -> State:
    """Reproducible random state satisfying the smallness and mean-zero
    hypotheses.

    The stream is a single Philox generator keyed by the seed; per field
    (order u, omega, magnetic) one uniform(0, 2pi) phase array of shape
    (3, n, n, n) is drawn.  Identical seeds give bit-identical states.
    ``seed=None`` uses ``init.seed``.
    """
    from .norms import sobolev_norm  # noqa: F401  (rescale path)

    if seed is None:
        seed = init.seed
    k_peak = init.k_peak if init.k_peak is not None else grid.n / 6.0
    if k_peak > grid.kmax_dealias:
        raise ValueError(
            f"k_peak={k_peak} exceeds the dealias cutoff {grid.kmax_dealias}")

    if init.epsilon == 0.0:
        zero = zero_vector_field(grid)
        return State(zero, zero, zero, variant, t=0.0)

    rng = np.random.Generator(np.random.Philox(seed))
    envelope = _spectral_envelope(grid, init.spectrum_slope, k_peak)

    fields = []
    for name in ("u", "omega", "magnetic"):
        phases = rng.uniform(0.0, 2.0 * np.pi, size=(3,) + envelope.shape)
        coeffs = envelope[None] * np.exp(1j * phases)
        coeffs = hermitian_symmetrize(coeffs)
        coeffs[:, 0, 0, 0] = 0.0
        f = SpectralVectorField(coeffs, grid)
        if name != "omega":
            f = leray_project(f)
        f = dealias(f)
        fields.append(rescale_to_norm(f, init.sobolev_index, init.epsilon))
    return State(fields[0], fields[1], fields[2], variant, t=0.0)
