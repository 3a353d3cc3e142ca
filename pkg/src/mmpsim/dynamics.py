"""Right-hand-side evaluation for every system variant.

The tendency of each Fourier mode splits into a stiff diagonal part
(diffusion and damping symbols, treated exactly by the integrator) and an
explicit part (pseudo-spectral quadratic terms, the curl couplings, and the
background transport terms).  Pressure never appears: the velocity and
magnetic tendencies are Leray-projected.

The stiff symbol of the micro-rotation field is diagonal only after
splitting each mode into components parallel and perpendicular to k: the
parallel part sees (eta + kappa)|k|^2 + 4 chi, the perpendicular part
eta|k|^2 + 4 chi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import PhysParams, State, SystemVariant, structural_violations
from .spectral import (
    GridSpec,
    SpectralVectorField,
    gradient,
    grad_div,
    curl,
    divergence,
    inner_product,
    inverse_transform,
    l2_norm,
)

TWO_PI_CUBED = (2.0 * np.pi) ** 3


# ---------------------------------------------------------------------------
# array-level kernels (coefficients in, coefficients out)
# ---------------------------------------------------------------------------

def _curl_arrays(c: np.ndarray, grid: GridSpec) -> np.ndarray:
    k1, k2, k3 = grid.k_vectors
    return np.stack([
        1j * (k2 * c[2] - k3 * c[1]),
        1j * (k3 * c[0] - k1 * c[2]),
        1j * (k1 * c[1] - k2 * c[0]),
    ])


def project_arrays(c: np.ndarray, grid: GridSpec) -> np.ndarray:
    k1, k2, k3 = grid.k_vectors
    kdotv = (k1 * c[0] + k2 * c[1] + k3 * c[2]) / grid.k_squared_safe
    out = np.stack([c[0] - k1 * kdotv, c[1] - k2 * kdotv, c[2] - k3 * kdotv])
    out[:, 0, 0, 0] = 0.0
    return out


def _parallel_part(c: np.ndarray, grid: GridSpec) -> np.ndarray:
    k1, k2, k3 = grid.k_vectors
    kdotv = (k1 * c[0] + k2 * c[1] + k3 * c[2]) / grid.k_squared_safe
    return np.stack([k1 * kdotv, k2 * kdotv, k3 * kdotv])


def _to_physical(c: np.ndarray, grid: GridSpec) -> np.ndarray:
    return np.real(np.fft.ifftn(c, axes=(-3, -2, -1))) * grid.npoints


def _advect_arrays(v_phys: np.ndarray, f_hat: np.ndarray,
                   grid: GridSpec) -> np.ndarray:
    """(v.grad)f: physical-space product of v with the spectral gradient of
    f, transformed back and dealiased."""
    k1, k2, k3 = grid.k_vectors
    out = np.empty_like(f_hat)
    for i in range(3):
        df = _to_physical(np.stack([1j * k1 * f_hat[i],
                                    1j * k2 * f_hat[i],
                                    1j * k3 * f_hat[i]]), grid)
        prod = v_phys[0] * df[0] + v_phys[1] * df[1] + v_phys[2] * df[2]
        out[i] = np.fft.fftn(prod) / grid.npoints
    return out * grid.dealias_mask[None]


def _alpha_symbol(grid: GridSpec, alpha: np.ndarray) -> np.ndarray:
    k1, k2, k3 = grid.k_vectors
    return 1j * (alpha[0] * k1 + alpha[1] * k2 + alpha[2] * k3)


# ---------------------------------------------------------------------------
# stiff symbols and their exact propagator
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class StiffSymbols:
    """Non-negative per-mode damping rates of the diagonal linear part."""

    u: np.ndarray
    omega_perp: np.ndarray
    omega_par: np.ndarray
    magnetic: np.ndarray
    grid: GridSpec

    def propagator(self, dt: float) -> "StiffPropagator":
        return StiffPropagator(
            np.exp(-dt * self.u),
            np.exp(-dt * self.omega_perp),
            np.exp(-dt * self.omega_par),
            np.exp(-dt * self.magnetic),
            self.grid,
        )

    def apply_rhs(self, u: np.ndarray, w: np.ndarray,
                  m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Tendency contribution of the stiff part: -symbol * field."""
        w_par = _parallel_part(w, self.grid)
        dw = -self.omega_perp[None] * w - (self.omega_par
                                           - self.omega_perp)[None] * w_par
        return (-self.u[None] * u, dw, -self.magnetic[None] * m)


@dataclass(frozen=True, eq=False)
class StiffPropagator:
    """exp(-symbol * dt) applied per mode, with the parallel/perpendicular
    split of the micro-rotation field."""

    exp_u: np.ndarray
    exp_omega_perp: np.ndarray
    exp_omega_par: np.ndarray
    exp_magnetic: np.ndarray
    grid: GridSpec

    def apply(self, u: np.ndarray, w: np.ndarray,
              m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        w_par = _parallel_part(w, self.grid)
        w_new = self.exp_omega_perp[None] * w + (
            self.exp_omega_par - self.exp_omega_perp)[None] * w_par
        return (self.exp_u[None] * u, w_new, self.exp_magnetic[None] * m)


def stiff_symbols(grid: GridSpec, p: PhysParams,
                  variant: SystemVariant) -> StiffSymbols:
    ksq = grid.k_squared
    chi = p.coupling_chi(variant)
    return StiffSymbols(
        u=p.u_diffusion(variant) * ksq,
        omega_perp=p.eta * ksq + 4.0 * chi,
        omega_par=(p.eta + p.kappa) * ksq + 4.0 * chi,
        magnetic=p.magnetic_diffusion(variant) * ksq,
        grid=grid,
    )


# ---------------------------------------------------------------------------
# right-hand side
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RhsDecomposition:
    """Explicit tendency arrays plus the stiff diagonal symbols; their sum
    (stiff part evaluated at the state) is the full tendency."""

    explicit_u: np.ndarray
    explicit_omega: np.ndarray
    explicit_magnetic: np.ndarray
    stiff: StiffSymbols

    def total(self, state: State) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        su, sw, sm = self.stiff.apply_rhs(state.u.coeffs, state.omega.coeffs,
                                          state.magnetic.coeffs)
        return (self.explicit_u + su, self.explicit_omega + sw,
                self.explicit_magnetic + sm)


def advect(v: SpectralVectorField, f: SpectralVectorField) -> SpectralVectorField:
    """(v.grad)f, pseudo-spectral with 2/3 dealiasing of the product."""
    if v.grid.n != f.grid.n:
        raise ValueError("advect requires fields on a shared grid")
    v_phys = inverse_transform(v)
    return SpectralVectorField(_advect_arrays(v_phys, f.coeffs, f.grid), f.grid)


def _check_variant_consistency(p: PhysParams, variant: SystemVariant) -> None:
    structural = structural_violations(p, variant)
    if structural:
        raise ValueError("; ".join(structural))


def explicit_rhs_arrays(u_hat: np.ndarray, w_hat: np.ndarray, m_hat: np.ndarray,
                        grid: GridSpec, p: PhysParams, variant: SystemVariant,
                        linearized: bool = False
                        ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Explicit (non-stiff) tendency of the selected variant on raw
    coefficient arrays.  ``linearized=True`` drops the quadratic terms."""
    chi = p.coupling_chi(variant)
    two_chi = 2.0 * chi

    du = two_chi * _curl_arrays(w_hat, grid)
    dw = two_chi * _curl_arrays(u_hat, grid)
    dm = np.zeros_like(m_hat)

    if variant.uses_background:
        sym = _alpha_symbol(grid, p.alpha_vector)
        du = du + sym[None] * m_hat
        dm = dm + sym[None] * u_hat

    if not linearized:
        u_phys = _to_physical(u_hat, grid)
        m_phys = _to_physical(m_hat, grid)
        du = du - _advect_arrays(u_phys, u_hat, grid) \
            + _advect_arrays(m_phys, m_hat, grid)
        dw = dw - _advect_arrays(u_phys, w_hat, grid)
        dm = dm - _advect_arrays(u_phys, m_hat, grid) \
            + _advect_arrays(m_phys, u_hat, grid)

    du = project_arrays(du, grid)
    dm = project_arrays(dm, grid)
    dw[:, 0, 0, 0] = 0.0
    return du, dw, dm


def rhs(state: State, p: PhysParams, variant: SystemVariant,
        linearized: bool = False) -> RhsDecomposition:
    """Assemble the tendency of the selected variant at the given state.

    Rejects coefficient sets that contradict the variant structure (e.g. a
    nonzero magnetic diffusivity supplied to the ideal variant) and a state
    tagged with a different variant.
    """
    if state.variant is not variant:
        raise ValueError(f"state is tagged {state.variant.value!r}, "
                         f"rhs was asked for {variant.value!r}")
    _check_variant_consistency(p, variant)
    du, dw, dm = explicit_rhs_arrays(state.u.coeffs, state.omega.coeffs,
                                     state.magnetic.coeffs, state.grid,
                                     p, variant, linearized=linearized)
    return RhsDecomposition(du, dw, dm, stiff_symbols(state.grid, p, variant))


# ---------------------------------------------------------------------------
# discrete energy-flux audit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyFluxAudit:
    """Discrete counterparts of the inner products whose cancellation makes
    the L2 energy identity hold.  Every ``*_cancellation`` entry must vanish;
    ``coupling_transfer`` and ``dissipation`` are the surviving terms."""

    advection_u: float
    advection_omega: float
    advection_magnetic: float
    lorentz_cancellation: float
    alpha_cancellation: float | None
    curl_graddiv_omega: float
    coupling_transfer: float
    dissipation: float
    l2_energy_sq: float
    tolerance: float = 1e-10

    @property
    def max_relative_cancellation(self) -> float:
        entries = [self.advection_u, self.advection_omega,
                   self.advection_magnetic, self.lorentz_cancellation,
                   self.curl_graddiv_omega]
        if self.alpha_cancellation is not None:
            entries.append(self.alpha_cancellation)
        worst = max(abs(e) for e in entries)
        if self.l2_energy_sq == 0.0:
            return 0.0 if worst == 0.0 else np.inf
        return worst / self.l2_energy_sq

    @property
    def consistent(self) -> bool:
        return self.max_relative_cancellation <= self.tolerance


def energy_flux_audit(state: State, p: PhysParams,
                      variant: SystemVariant) -> EnergyFluxAudit:
    u, w, m = state.u, state.omega, state.magnetic
    chi = p.coupling_chi(variant)

    adv_u = inner_product(advect(u, u), u)
    adv_w = inner_product(advect(u, w), w)
    adv_m = inner_product(advect(u, m), m)
    lorentz = inner_product(advect(m, m), u) + inner_product(advect(m, u), m)

    alpha_pair = None
    if variant.uses_background:
        alpha = p.alpha_vector
        from .spectral import alpha_dot_grad
        alpha_pair = (inner_product(alpha_dot_grad(m, alpha), u)
                      + inner_product(alpha_dot_grad(u, alpha), m))

    curl_gd = inner_product(curl(grad_div(w)), curl(w))
    transfer = 4.0 * chi * inner_product(curl(u), w)

    def grad_sq(f):
        return sum(l2_norm(gradient(f.component(i))) ** 2 for i in range(3))

    dissipation = (p.u_diffusion(variant) * grad_sq(u)
                   + p.eta * grad_sq(w)
                   + p.kappa * l2_norm(divergence(w)) ** 2
                   + p.magnetic_diffusion(variant) * grad_sq(m)
                   + 4.0 * chi * l2_norm(w) ** 2)

    energy_sq = l2_norm(u) ** 2 + l2_norm(w) ** 2 + l2_norm(m) ** 2
    return EnergyFluxAudit(
        advection_u=adv_u,
        advection_omega=adv_w,
        advection_magnetic=adv_m,
        lorentz_cancellation=lorentz,
        alpha_cancellation=alpha_pair,
        curl_graddiv_omega=curl_gd,
        coupling_transfer=transfer,
        dissipation=dissipation,
        l2_energy_sq=energy_sq,
    )
