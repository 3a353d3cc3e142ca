"""RHS assembly: advection kernel vs direct convolution, stiff/explicit
recombination vs a monolithic evaluation, and the energy-flux audit."""

import numpy as np
import pytest

from mmpsim.dynamics import (
    advect,
    energy_flux_audit,
    rhs,
    stiff_symbols,
)
from mmpsim.fields import InitSpec, PhysParams, State, SystemVariant, make_random_state
from mmpsim.spectral import (
    GridSpec,
    SpectralVectorField,
    alpha_dot_grad,
    curl,
    dealias,
    forward_transform,
    laplacian,
    grad_div,
    leray_project,
    zero_mean,
    zero_vector_field,
)

ALPHA = tuple(0.9 * np.array([1.0, np.sqrt(2), np.sqrt(3)]) / np.sqrt(6.0))


def random_bandlimited(grid, seed):
    rng = np.random.default_rng(seed)
    phys = rng.standard_normal((3, grid.n, grid.n, grid.n))
    return zero_mean(dealias(forward_transform(phys, grid)))


def sine_column(grid):
    x1, _, _ = grid.physical_coords()
    phys = np.zeros((3, grid.n, grid.n, grid.n))
    phys[2] = np.sin(x1)
    return forward_transform(phys, grid)


class TestAdvect:
    def test_zero_velocity(self):
        g = GridSpec(8)
        f = random_bandlimited(g, 0)
        out = advect(zero_vector_field(g), f)
        assert np.abs(out.coeffs).max() == 0.0

    def test_transport_along_ignored_axis(self):
        # v = f = (0, 0, sin x1): (v.grad)f = sin x1 * d/dx3 f = 0
        g = GridSpec(16)
        v = sine_column(g)
        out = advect(v, v)
        assert np.abs(out.coeffs).max() < 1e-15

    def test_grid_mismatch(self):
        with pytest.raises(ValueError):
            advect(zero_vector_field(GridSpec(8)),
                   zero_vector_field(GridSpec(16)))

    def test_matches_convolution_oracle(self):
        g = GridSpec(8)
        v = random_bandlimited(g, 31)
        f = random_bandlimited(g, 32)
        out = advect(v, f)

        kc = g.kmax_dealias
        modes = [(a, b, c)
                 for a in range(-kc, kc + 1)
                 for b in range(-kc, kc + 1)
                 for c in range(-kc, kc + 1)]
        oracle = np.zeros((3, g.n, g.n, g.n), dtype=complex)
        for i in range(3):
            for p in modes:
                vp = v.coeffs[:, p[0], p[1], p[2]]
                for q in modes:
                    k = (p[0] + q[0], p[1] + q[1], p[2] + q[2])
                    if max(abs(k[0]), abs(k[1]), abs(k[2])) > kc:
                        continue
                    fq = f.coeffs[i, q[0], q[1], q[2]]
                    oracle[i][k] += (vp[0] * q[0] + vp[1] * q[1]
                                     + vp[2] * q[2]) * 1j * fq
        scale = np.abs(oracle).max()
        assert np.abs(out.coeffs - oracle).max() <= 1e-12 * scale


def monolithic_rhs(state, p, variant):
    """Independent one-pass assembly of the full tendency from the public
    spectral operators."""
    grid = state.grid
    u, w, m = state.u, state.omega, state.magnetic
    chi = p.coupling_chi(variant)

    du = SpectralVectorField(
        -advect(u, u).coeffs + advect(m, m).coeffs
        + 2.0 * chi * curl(w).coeffs, grid)
    dm = SpectralVectorField(
        -advect(u, m).coeffs + advect(m, u).coeffs, grid)
    if variant.uses_background:
        du = SpectralVectorField(
            du.coeffs + alpha_dot_grad(m, p.alpha_vector).coeffs, grid)
        dm = SpectralVectorField(
            dm.coeffs + alpha_dot_grad(u, p.alpha_vector).coeffs, grid)
    du = leray_project(du).coeffs + p.u_diffusion(variant) * laplacian(u).coeffs
    dm = leray_project(dm).coeffs \
        + p.magnetic_diffusion(variant) * laplacian(m).coeffs

    dw = (-advect(u, w).coeffs + 2.0 * chi * curl(u).coeffs
          - 4.0 * chi * w.coeffs + p.kappa * grad_div(w).coeffs
          + p.eta * laplacian(w).coeffs)
    dw[:, 0, 0, 0] = 0.0
    return du, dw, dm


class TestRhs:
    def make_state(self, variant, seed=0, n=8):
        grid = GridSpec(n)
        return make_random_state(grid, InitSpec(epsilon=0.01, seed=seed), variant)

    def test_zero_state_gives_zero_rhs(self):
        g = GridSpec(8)
        zero = zero_vector_field(g)
        state = State(zero, zero, zero, SystemVariant.ZERO_KINEMATIC)
        p = PhysParams(chi=1.0, eta=1.0, nu=1.0)
        decomp = rhs(state, p, SystemVariant.ZERO_KINEMATIC)
        total = decomp.total(state)
        for part in total:
            assert np.abs(part).max() == 0.0

    def test_omega_rhs_is_pure_coupling(self):
        # omega = magnetic = 0, u divergence-free: the omega tendency is
        # exactly 2 chi curl u
        g = GridSpec(16)
        u = leray_project(random_bandlimited(g, 5))
        zero = zero_vector_field(g)
        state = State(u, zero, zero, SystemVariant.ZERO_KINEMATIC)
        p = PhysParams(chi=1.0, eta=1.0, nu=1.0)
        decomp = rhs(state, p, SystemVariant.ZERO_KINEMATIC)
        _, dw, _ = decomp.total(state)
        expected = 2.0 * p.chi * curl(u).coeffs
        assert np.abs(dw - expected).max() <= 1e-14 * np.abs(expected).max()

    @pytest.mark.parametrize("variant,params", [
        (SystemVariant.FULL,
         PhysParams(mu=0.2, chi=1.0, kappa=0.4, eta=1.0, nu=0.5)),
        (SystemVariant.ZERO_KINEMATIC,
         PhysParams(chi=1.0, kappa=0.4, eta=1.0, nu=1.0)),
        (SystemVariant.ZERO_KINEMATIC_ZERO_DIFFUSION,
         PhysParams(chi=1.0, eta=1.0)),
        (SystemVariant.PERTURBATION,
         PhysParams(chi=1.0, kappa=0.3, eta=1.0, alpha=ALPHA, r=2.5)),
        (SystemVariant.INVISCID_RESISTIVE_MHD, PhysParams(nu=1.0)),
        (SystemVariant.IDEAL_MHD, PhysParams()),
    ])
    def test_recombination_matches_monolithic(self, variant, params):
        state = self.make_state(variant, seed=7)
        decomp = rhs(state, params, variant)
        total = decomp.total(state)
        oracle = monolithic_rhs(state, params, variant)
        for got, want in zip(total, oracle):
            scale = max(np.abs(want).max(), 1e-30)
            assert np.abs(got - want).max() <= 1e-13 * scale

    def test_magnetic_equation_linear_in_magnetic(self):
        # with the magnetic unknown identically zero its tendency vanishes
        state = self.make_state(SystemVariant.ZERO_KINEMATIC, seed=9, n=16)
        state = State(state.u, state.omega, zero_vector_field(state.grid),
                      SystemVariant.ZERO_KINEMATIC)
        p = PhysParams(chi=1.0, eta=1.0, nu=1.0)
        _, _, dm = rhs(state, p, SystemVariant.ZERO_KINEMATIC).total(state)
        assert np.abs(dm).max() == 0.0

    def test_inputs_not_mutated(self):
        state = self.make_state(SystemVariant.ZERO_KINEMATIC, seed=11)
        p = PhysParams(chi=1.0, eta=1.0, nu=1.0)
        before = [state.u.coeffs.copy(), state.omega.coeffs.copy(),
                  state.magnetic.coeffs.copy()]
        rhs(state, p, SystemVariant.ZERO_KINEMATIC)
        assert np.array_equal(state.u.coeffs, before[0])
        assert np.array_equal(state.omega.coeffs, before[1])
        assert np.array_equal(state.magnetic.coeffs, before[2])

    def test_variant_inconsistency_rejected(self):
        state = self.make_state(SystemVariant.IDEAL_MHD, seed=1)
        with pytest.raises(ValueError):
            rhs(state, PhysParams(nu=1.0), SystemVariant.IDEAL_MHD)

    def test_state_tag_mismatch_rejected(self):
        state = self.make_state(SystemVariant.ZERO_KINEMATIC, seed=1)
        with pytest.raises(ValueError):
            rhs(state, PhysParams(chi=1.0, eta=1.0), SystemVariant.PERTURBATION)


class TestStiffSymbols:
    def test_parallel_perpendicular_split(self):
        g = GridSpec(8)
        p = PhysParams(chi=1.0, kappa=0.7, eta=0.5, nu=0.25)
        sym = stiff_symbols(g, p, SystemVariant.ZERO_KINEMATIC)
        ksq = g.k_squared
        assert np.allclose(sym.omega_perp, 0.5 * ksq + 4.0)
        assert np.allclose(sym.omega_par, 1.2 * ksq + 4.0)
        assert np.allclose(sym.u, 1.0 * ksq)
        assert np.allclose(sym.magnetic, 0.25 * ksq)

    def test_propagator_matches_symbol_derivative(self):
        # d/dt exp(-sym t) field at t=0 equals the stiff tendency
        g = GridSpec(8)
        p = PhysParams(chi=0.8, kappa=0.6, eta=0.4, nu=0.2)
        sym = stiff_symbols(g, p, SystemVariant.FULL)
        state = make_random_state(g, InitSpec(epsilon=1.0, seed=3),
                                  SystemVariant.FULL)
        arrays = (state.u.coeffs, state.omega.coeffs, state.magnetic.coeffs)
        dt = 1e-7
        moved = sym.propagator(dt).apply(*arrays)
        tendency = sym.apply_rhs(*arrays)
        for new, old, dy in zip(moved, arrays, tendency):
            fd = (new - old) / dt
            assert np.abs(fd - dy).max() <= 1e-5 * max(np.abs(dy).max(), 1e-30)


class TestEnergyFluxAudit:
    def test_zero_state_all_zero(self):
        g = GridSpec(8)
        zero = zero_vector_field(g)
        state = State(zero, zero, zero, SystemVariant.ZERO_KINEMATIC)
        audit = energy_flux_audit(state, PhysParams(chi=1.0, eta=1.0, nu=1.0),
                                  SystemVariant.ZERO_KINEMATIC)
        assert audit.advection_u == 0.0
        assert audit.lorentz_cancellation == 0.0
        assert audit.coupling_transfer == 0.0
        assert audit.max_relative_cancellation == 0.0

    @pytest.mark.parametrize("seed", [0, 1])
    def test_cancellations_small(self, seed):
        g = GridSpec(16)
        state = make_random_state(g, InitSpec(epsilon=0.5, seed=seed),
                                  SystemVariant.ZERO_KINEMATIC)
        p = PhysParams(chi=1.0, eta=1.0, nu=1.0)
        audit = energy_flux_audit(state, p, SystemVariant.ZERO_KINEMATIC)
        assert audit.max_relative_cancellation <= 1e-10
        assert audit.consistent
        assert audit.dissipation > 0.0

    def test_alpha_antisymmetry(self):
        g = GridSpec(16)
        state = make_random_state(g, InitSpec(epsilon=0.5, seed=2),
                                  SystemVariant.PERTURBATION)
        p = PhysParams(chi=1.0, eta=1.0, alpha=ALPHA, r=2.5)
        audit = energy_flux_audit(state, p, SystemVariant.PERTURBATION)
        energy = audit.l2_energy_sq
        assert abs(audit.alpha_cancellation) <= 1e-12 * energy

    def test_curl_graddiv_orthogonality(self):
        g = GridSpec(16)
        state = make_random_state(g, InitSpec(epsilon=1.0, seed=4),
                                  SystemVariant.ZERO_KINEMATIC)
        p = PhysParams(chi=1.0, eta=1.0, nu=1.0)
        audit = energy_flux_audit(state, p, SystemVariant.ZERO_KINEMATIC)
        assert abs(audit.curl_graddiv_omega) <= 1e-12 * audit.l2_energy_sq
