"""
Reading out a mean value through the ion
========================================

Coupling the modes to the ion through ``H = gamma C sigma_x`` for a short
time t, after a quarter turn that puts the ion in the -1 eigenstate of
sigma_y, maps the vibrational mean onto the ion population:

    <sigma_z(t)> = -<sin(2 gamma t C)>

For ``2 gamma t |c| << 1`` the sine is linear and ``-<sigma_z>/(2 gamma t)``
estimates ``<C>``. The auto probe time keeps ``2 gamma t c_max`` at ``x_max``.
"""

import numpy as np

from iontrap_parity import (
    ProbeConfig,
    build_space,
    correlation_operator,
    end_to_end,
    run_direct_measurement,
    su2_coherent,
)

config = ProbeConfig(gamma=1e4, c_max=30.0, x_max=0.4)
print(f"probe time: {config.probe_time() * 1e9:.1f} ns")

# %%
# Eigenstates of C give the worst linearisation error at the largest |c|.
for N in (5, 20, 30):
    sp = build_space(N, N)
    r = run_direct_measurement(su2_coherent(sp, N), correlation_operator(sp), config)
    print(f"N={N:2d}: estimate {r.estimate:8.4f}  true {r.true_mean:8.4f}  "
          f"error {r.estimate - r.true_mean:+.4f}  bound {r.error_bound:.4f}")

# %%
# Shorter probes shrink the bias but also the signal that has to be resolved.
sp = build_space(30, 30)
psi, C = su2_coherent(sp, 30), correlation_operator(sp)
for x_max in (0.05, 0.1, 0.2, 0.4, 0.8):
    r = run_direct_measurement(psi, C, ProbeConfig(x_max=x_max))
    print(f"x_max={x_max:4.2f}: |<sigma_z>|={abs(r.sigma_z_readout):.4f}  "
          f"error={r.estimate - r.true_mean:+.5f}")

# %%
# Chaining the pulse, the post-selection and the probe.
for N in (20, 21):
    report, record = end_to_end(N, 1.0, 2.8)
    print(f"N={N}: conditioned <C>={record['conditioned_mean']:+.4f}  "
          f"estimate={report.estimate:+.4f}  p_ground={record['ground_probability']:.3f}")

assert np.isfinite(report.estimate)
