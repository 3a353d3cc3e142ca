"""Exponential decay with zero kinematic viscosity.

Evolves small random data under the zero-kinematic-viscosity system
(velocity diffusion comes only from the micro-rotation coupling chi) and
fits the decay rate of the H^3 norm.  Desk-scale version of the acceptance
run: a 16^3 grid keeps this under a minute.

Run with:  python3 demos/zero_viscosity_decay.py
"""

import numpy as np

from mmpsim import (
    GridSpec,
    InitSpec,
    PhysParams,
    StepperConfig,
    SystemVariant,
    fit_decay,
    make_random_state,
    run,
    validate_params,
)

variant = SystemVariant.ZERO_KINEMATIC
params = PhysParams(chi=1.0, eta=1.0, nu=1.0)
report = validate_params(params, variant, strict=True)
print(f"hypotheses check: ok={report.ok} warnings={report.warnings}")

grid = GridSpec(16)
state = make_random_state(grid, InitSpec(epsilon=0.01, seed=7), variant)
cfg = StepperConfig(dt=0.05, t_end=10.0, record_interval=0.25)

print(f"running {grid.n}^3, t in [0, {cfg.t_end}] ...")
result = run(state, params, variant, cfg)
print(f"status: {result.status.value} after {result.steps} steps")

times = np.array([r.t for r in result.records])
h3 = np.array([r.h3 for r in result.records])
energy = np.array([r.l2_energy for r in result.records])

print(f"\nH3 norm:    {h3[0]:.4e} -> {h3[-1]:.4e}")
print(f"L2 energy:  {energy[0]:.4e} -> {energy[-1]:.4e}")
worst = np.max(np.diff(energy) / energy[:-1])
print(f"worst relative energy increase between samples: {worst:.2e} "
      "(dissipation is monotone)")

fit = fit_decay(times, h3, "exponential", t_min=2.0)
print(f"\nexponential fit on t >= 2: "
      f"H3 ~ {fit.amplitude:.3e} * exp(-{fit.rate:.4f} t), "
      f"R^2 = {fit.r_squared:.6f}")

# the slowest linear mode of the coupled (u, omega) block at |k| = 1 decays
# at rate 3 - 2 sqrt(2); the fitted rate should sit near it
slowest = 3.0 - 2.0 * np.sqrt(2.0)
print(f"slowest linearized mode rate at |k|=1: {slowest:.4f}")
