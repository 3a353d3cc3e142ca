"""Built-in invariant suite: fast property checks on small grids, one
pass/fail line per property.  Covers the spectral identities, the energy
cancellations, the exact stiff propagation, and the I/O round-trips."""

from __future__ import annotations

import os
import tempfile

import numpy as np

from .checkpoint import load_checkpoint, save_checkpoint
from .diagio import read_diagnostics, write_diagnostics
from .diophantine import check_diophantine
from .dynamics import advect, energy_flux_audit, rhs
from .fields import InitSpec, PhysParams, State, SystemVariant, make_random_state
from .integrator import step
from .norms import DiagnosticsRecord, fit_decay, sobolev_norm
from .spectral import (
    GridSpec,
    SpectralVectorField,
    curl,
    dealias,
    divergence,
    divergence_residual,
    forward_transform,
    forward_transform_scalar,
    gradient,
    inner_product,
    inverse_transform,
    leray_project,
    zero_mean,
    zero_vector_field,
)

ZK = SystemVariant.ZERO_KINEMATIC
ZK_PARAMS = PhysParams(chi=1.0, eta=1.0, nu=1.0)


def _random_field(grid, seed):
    rng = np.random.default_rng(seed)
    phys = rng.standard_normal((3, grid.n, grid.n, grid.n))
    return forward_transform(phys, grid)


def _bandlimited(grid, seed):
    return zero_mean(dealias(_random_field(grid, seed)))


def check_round_trip():
    grid = GridSpec(16)
    rng = np.random.default_rng(0)
    phys = rng.standard_normal((3,) + (grid.n,) * 3)
    err = np.abs(inverse_transform(forward_transform(phys, grid)) - phys).max()
    return err <= 1e-12 * np.abs(phys).max(), f"max error {err:.2e}"


def check_parseval():
    grid = GridSpec(16)
    rng = np.random.default_rng(1)
    phys = rng.standard_normal((3,) + (grid.n,) * 3)
    f = forward_transform(phys, grid)
    quad = (2 * np.pi / grid.n) ** 3 * np.sum(phys ** 2)
    spectral_sum = inner_product(f, f)
    rel = abs(spectral_sum - quad) / quad
    return rel <= 1e-12, f"relative error {rel:.2e}"


def check_div_curl():
    grid = GridSpec(16)
    v = _bandlimited(grid, 2)
    res = np.abs(divergence(curl(v)).coeffs).max()
    scale = np.abs(v.coeffs).max()
    return res <= 1e-14 * scale, f"residual {res:.2e}"


def check_curl_grad():
    grid = GridSpec(16)
    s = zero_mean(dealias(forward_transform_scalar(
        np.random.default_rng(3).standard_normal((grid.n,) * 3), grid)))
    res = np.abs(curl(gradient(s)).coeffs).max()
    return res <= 1e-14 * max(np.abs(s.coeffs).max(), 1e-30), f"residual {res:.2e}"


def check_leray():
    grid = GridSpec(16)
    p = leray_project(_bandlimited(grid, 4))
    res = divergence_residual(p)
    pp = leray_project(p)
    drift = np.abs(pp.coeffs - p.coeffs).max() / np.abs(p.coeffs).max()
    ok = res <= 1e-12 and drift <= 1e-13
    return ok, f"divergence {res:.2e}, idempotence drift {drift:.2e}"


def check_dealias_idempotent():
    grid = GridSpec(8)
    f = _random_field(grid, 5)
    once = dealias(f)
    twice = dealias(once)
    return np.array_equal(once.coeffs, twice.coeffs), "exact"


def check_translation_equivariance():
    grid = GridSpec(16)
    rng = np.random.default_rng(6)
    phys = rng.standard_normal((grid.n,) * 3)
    f = forward_transform_scalar(phys, grid)
    shifted = forward_transform_scalar(np.roll(phys, -1, axis=0), grid)
    phase = np.exp(1j * grid.k_vectors[0] * grid.spacing)
    err = np.abs(shifted.coeffs - phase * f.coeffs).max()
    scale = np.abs(f.coeffs).max()
    return err <= 1e-12 * scale, f"max error {err:.2e}"


def check_advection_energy_neutral():
    grid = GridSpec(16)
    u = leray_project(_bandlimited(grid, 7))
    f = _bandlimited(grid, 8)
    flux = inner_product(advect(u, f), f)
    scale = inner_product(f, f)
    rel = abs(flux) / scale
    return rel <= 1e-10, f"relative flux {rel:.2e}"


def check_energy_cancellations():
    grid = GridSpec(16)
    state = make_random_state(grid, InitSpec(epsilon=0.5, seed=9), ZK)
    audit = energy_flux_audit(state, ZK_PARAMS, ZK)
    worst = audit.max_relative_cancellation
    return worst <= 1e-10, f"worst cancellation {worst:.2e}"


def check_magnetic_linearity():
    grid = GridSpec(16)
    state = make_random_state(grid, InitSpec(epsilon=0.1, seed=10), ZK)
    state = State(state.u, state.omega, zero_vector_field(grid), ZK)
    _, _, dm = rhs(state, ZK_PARAMS, ZK).total(state)
    res = np.abs(dm).max()
    return res == 0.0, f"magnetic tendency {res:.2e}"


def check_heat_exact():
    grid = GridSpec(16)
    x1, _, _ = grid.physical_coords()
    phys = np.zeros((3,) + (grid.n,) * 3)
    phys[2] = np.cos(x1)
    state = State(zero_vector_field(grid), zero_vector_field(grid),
                  forward_transform(phys, grid), ZK)
    for _ in range(10):
        state = step(state, ZK_PARAMS, ZK, 0.1)
    err = np.abs(inverse_transform(state.magnetic)
                 - np.exp(-1.0) * phys).max()
    return err <= 1e-10, f"max error {err:.2e}"


def check_step_divergence():
    grid = GridSpec(16)
    state = make_random_state(grid, InitSpec(epsilon=0.1, seed=11), ZK)
    for _ in range(3):
        state = step(state, ZK_PARAMS, ZK, 0.02)
    res = max(divergence_residual(state.u), divergence_residual(state.magnetic))
    return res <= 1e-11, f"residual {res:.2e}"


def check_norm_homogeneity():
    grid = GridSpec(16)
    f = _bandlimited(grid, 12)
    scaled = SpectralVectorField(2.5 * f.coeffs, grid)
    a = sobolev_norm(scaled, 3.0)
    b = 2.5 * sobolev_norm(f, 3.0)
    rel = abs(a - b) / b
    return rel <= 1e-13, f"relative error {rel:.2e}"


def check_norm_triangle():
    grid = GridSpec(16)
    f = _bandlimited(grid, 13)
    h = _bandlimited(grid, 14)
    total = SpectralVectorField(f.coeffs + h.coeffs, grid)
    gap = sobolev_norm(total, 3.0) - sobolev_norm(f, 3.0) - sobolev_norm(h, 3.0)
    return gap <= 1e-12, f"gap {gap:.2e}"


def check_fit_synthetic():
    t = np.linspace(0.0, 10.0, 50)
    report = fit_decay(t, 5.0 * np.exp(-0.3 * t), "exponential")
    ok = abs(report.rate - 0.3) <= 1e-6 and report.r_squared > 0.999999
    return ok, f"rate {report.rate:.8f}"


def check_diophantine_degenerate():
    a = check_diophantine((1.0, 0.0, 0.0), 2.5, 8)
    b = check_diophantine((1.0, 1.0, 0.0), 2.5, 8)
    return a.degenerate and b.degenerate, "axis and diagonal vectors flagged"


def check_diophantine_scaling():
    alpha = (1.0, np.sqrt(2.0), np.sqrt(3.0))
    base = check_diophantine(alpha, 2.5, 16)
    scaled = check_diophantine(tuple(2.0 * x for x in alpha), 2.5, 16)
    rel = abs(scaled.c_est - 2.0 * base.c_est) / (2.0 * base.c_est)
    return rel <= 1e-12, f"relative error {rel:.2e}"


def check_checkpoint_roundtrip():
    grid = GridSpec(8)
    state = make_random_state(grid, InitSpec(epsilon=0.1, seed=15), ZK)
    state = state.with_time(1.25)
    fd, path = tempfile.mkstemp(suffix=".mmp")
    os.close(fd)
    try:
        save_checkpoint(path, state, ZK_PARAMS, step=7, seed=15)
        data = load_checkpoint(path)
        ok = (np.array_equal(data.state.u.coeffs, state.u.coeffs)
              and np.array_equal(data.state.omega.coeffs, state.omega.coeffs)
              and np.array_equal(data.state.magnetic.coeffs,
                                 state.magnetic.coeffs)
              and data.state.t == state.t and data.step == 7
              and data.seed == 15)
    finally:
        os.unlink(path)
    return ok, "bit-exact"


def check_diagnostics_roundtrip():
    rec = DiagnosticsRecord(t=0.5, l2_energy=1.0 / 3.0, h3=np.pi,
                            div_u_max=1e-15, div_b_max=0.0, cancel_max=2e-12,
                            F_func=7.25)
    fd, path = tempfile.mkstemp(suffix=".csv")
    os.close(fd)
    try:
        write_diagnostics([rec], path)
        back = read_diagnostics(path)
    finally:
        os.unlink(path)
    return back == [rec], "bit-exact"


CHECKS = (
    ("transform-round-trip", check_round_trip),
    ("parseval", check_parseval),
    ("div-of-curl", check_div_curl),
    ("curl-of-grad", check_curl_grad),
    ("leray-projection", check_leray),
    ("dealias-idempotent", check_dealias_idempotent),
    ("translation-equivariance", check_translation_equivariance),
    ("advection-energy-neutral", check_advection_energy_neutral),
    ("energy-cancellations", check_energy_cancellations),
    ("magnetic-linearity", check_magnetic_linearity),
    ("exact-heat-decay", check_heat_exact),
    ("step-divergence-residual", check_step_divergence),
    ("norm-homogeneity", check_norm_homogeneity),
    ("norm-triangle", check_norm_triangle),
    ("decay-fit-synthetic", check_fit_synthetic),
    ("diophantine-degenerate", check_diophantine_degenerate),
    ("diophantine-scaling", check_diophantine_scaling),
    ("checkpoint-round-trip", check_checkpoint_roundtrip),
    ("diagnostics-round-trip", check_diagnostics_roundtrip),
)


def run_selftest(emit=print) -> bool:
    """Run every property; returns True when all pass."""
    all_ok = True
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failure, not an abort
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok &= ok
        emit(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})")
    return all_ok
