"""
Spectra inside a phonon-number sector
=====================================

``C_xy`` and ``L_z = i(a_x a_y^dag - a_x^dag a_y)`` both conserve total phonon
number. Inside the sector with N phonons they are unitarily equivalent and
share the spectrum ``-N, -N+2, ..., N``.
"""

import numpy as np

from iontrap_parity import (
    build_space,
    correlation_operator,
    observable,
    restrict,
    sector_basis,
    su2_coherent,
)

N = 6
sp = build_space(N, N)
idx = sector_basis(sp, N)
for kind in ("correlation", "angular_momentum_z"):
    block = restrict(observable(sp, kind), idx)
    print(f"{kind:20s}", np.round(np.linalg.eigvalsh(block), 9) + 0.0)

# %%
# The block of C_xy is a real tridiagonal matrix in the |k, N-k> basis.
print(np.round(restrict(correlation_operator(sp), idx).real, 3))

# %%
# The SU(2) coherent state sits at the top of the spectrum.
psi = su2_coherent(sp, N).amplitudes
residual = correlation_operator(sp).apply(psi) - N * psi
print("eigen-residual:", np.linalg.norm(residual))

# %%
# Its phonon-number distribution along x is binomial.
probs = np.abs(psi[idx]) ** 2
print("P(n_x = k):", np.round(probs, 4))
