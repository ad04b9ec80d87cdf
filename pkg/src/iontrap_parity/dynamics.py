"""
Interaction-picture Hamiltonians and exact time evolution.

Units: hbar = 1, so Hamiltonian entries are angular frequencies. The free
Hamiltonian of the trap and the internal levels is never applied; the two
couplings used here are already resonant interaction-picture terms, and the
free evolution of the degenerate x, y modes commutes with ``C_xy``.

Evolution uses the eigendecomposition of the (time-independent) Hamiltonian,
``exp(-iHt) = V exp(-i w t) V^dag``. Degenerate eigenvalues need no special
treatment and eigenpairs are never sorted or matched across calls. The
decomposition is cached on the operator, so a whole time grid costs one
diagonalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .exceptions import DimensionMismatchError, NotHermitianError, TruncationLeakError
from .hilbert import (
    EXCITED,
    GROUND,
    Operator,
    SpaceDescriptor,
    build_space,
    ladder,
    mode_block,
    sector_basis,
)
from .states import StateVector

__all__ = [
    "ScenarioConfig",
    "jcm_hamiltonian",
    "probe_hamiltonian",
    "evolve",
    "evolve_many",
    "analytic_jcm_state",
    "analytic_jcm_amplitudes",
    "top_layer_indices",
    "check_top_layer_leak",
]


@dataclass
class ScenarioConfig:
    """
    Parameters of a parity-effect run.

    The scan grid is dimensionless ``g*t``: ``n_points`` uniform samples on
    ``(0, gt_max]``, or an explicit ``gt_grid``. ``omega_*`` are the trap and
    transition angular frequencies in rad/s; they are kept for the record and
    do not enter the interaction-picture dynamics.
    """

    N: int
    g: float = 1.0
    gamma: float = 1e4
    gt_max: float = 3.0
    n_points: int = 3000
    gt_grid: Optional[Sequence[float]] = None
    n_max_x: Optional[int] = None
    n_max_y: Optional[int] = None
    probability_threshold: float = 1e-6
    refine: bool = False
    omega_xy: Optional[float] = None
    omega_z: Optional[float] = None
    omega_A: Optional[float] = None
    times: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 0:
            raise ValueError(f"N must be a non-negative integer, got {self.N!r}")
        self.N = int(self.N)
        if not self.g > 0:
            raise ValueError(f"g must be > 0, got {self.g!r}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma!r}")
        if self.n_max_x is None:
            self.n_max_x = self.N
        if self.n_max_y is None:
            self.n_max_y = self.N
        if self.n_max_x < self.N or self.n_max_y < self.N:
            raise ValueError("cutoffs must be at least N")
        if not 0 <= self.probability_threshold < 1:
            raise ValueError("probability_threshold must lie in [0, 1)")
        if self.gt_grid is not None:
            grid = np.asarray(self.gt_grid, dtype=float)
        else:
            if not self.gt_max > 0:
                raise ValueError(f"gt_max must be > 0, got {self.gt_max!r}")
            if int(self.n_points) != self.n_points or self.n_points < 1:
                raise ValueError(f"n_points must be a positive integer, got {self.n_points!r}")
            grid = np.linspace(self.gt_max / self.n_points, self.gt_max, int(self.n_points))
        if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
            raise ValueError("time grid must be non-empty and strictly increasing")
        self.times = grid

    @property
    def space(self) -> SpaceDescriptor:
        return build_space(self.n_max_x, self.n_max_y)


@lru_cache(maxsize=32)
def jcm_hamiltonian(space: SpaceDescriptor, g: float) -> Operator:
    """``H = g (a_x a_y sigma_+ + h.c.)``, the two-mode two-phonon coupling."""
    if not g > 0:
        raise ValueError(f"g must be > 0, got {g!r}")
    ax, ay = ladder(space, "x").matrix, ladder(space, "y").matrix
    sp = np.kron(np.eye(space.mode_dim), np.array([[0.0, 0.0], [1.0, 0.0]]))
    m = g * (ax @ ay @ sp)
    return Operator(space, m + m.T, f"H_jcm(g={g:g})", hermitian=True)


@lru_cache(maxsize=32)
def _probe_coupling(obs: Operator) -> Operator:
    sigma_x = np.array([[0.0, 1.0], [1.0, 0.0]])
    coupling = Operator(obs.space, np.kron(mode_block(obs), sigma_x), f"{obs.label} sigma_x",
                        hermitian=True)
    coupling.spectrum
    return coupling


def probe_hamiltonian(space: SpaceDescriptor, gamma: float, obs: Operator) -> Operator:
    """
    ``H = gamma * O (x) sigma_x`` for a vibrational observable ``O``.

    ``obs`` must act as the identity on the qubit; otherwise
    :class:`~iontrap_parity.exceptions.QubitCouplingError` is raised.
    """
    if obs.space != space:
        raise DimensionMismatchError(f"{obs.space} vs {space}")
    if not obs.hermitian:
        raise NotHermitianError(f"{obs.label or 'observable'} is not Hermitian")
    return (_probe_coupling(obs) * float(gamma)).relabel(f"H_probe(gamma={gamma:g}, {obs.label})")


def _check_pair(H: Operator, psi0: StateVector):
    if not H.hermitian:
        raise NotHermitianError(f"{H.label or 'Hamiltonian'} is not Hermitian")
    if H.space != psi0.space:
        raise DimensionMismatchError(f"{H.space} vs {psi0.space}")


def evolve_many(H: Operator, psi0: StateVector, times) -> np.ndarray:
    """Amplitudes ``exp(-iHt) psi0`` for each ``t`` in ``times``; shape ``(len(times), dim)``."""
    _check_pair(H, psi0)
    w, v = H.spectrum
    coeffs = v.conj().T @ psi0.amplitudes
    times = np.asarray(times, dtype=float)
    phases = np.exp(-1j * np.outer(times, w))
    out = (phases * coeffs) @ v.T
    out[times == 0] = psi0.amplitudes
    return out


def evolve(H: Operator, psi0: StateVector, t: float) -> StateVector:
    if t == 0:
        _check_pair(H, psi0)
        return psi0
    psi = evolve_many(H, psi0, [t])[0]
    return StateVector(psi0.space, psi)


def analytic_jcm_amplitudes(N: int, g: float, times, c) -> tuple[np.ndarray, np.ndarray]:
    """
    Closed-form sector amplitudes under the two-mode two-phonon coupling.

    Starting from ``sum_k c_k |k, N-k, ->``, each component rotates within the
    pair ``{|k, N-k, ->, |k-1, N-k-1, +>}`` at ``Omega_k = g sqrt(k (N-k))``.

    Returns
    -------
    ground : ndarray, shape (T, N+1)
        Amplitude on ``|k, N-k, ->``: ``c_k cos(Omega_k t)``.
    excited : ndarray, shape (T, N+1)
        Amplitude on ``|k-1, N-k-1, +>``: ``-i c_k sin(Omega_k t)``
        (identically zero for ``k = 0`` and ``k = N``).
    """
    c = np.asarray(c, dtype=complex)
    if c.shape != (N + 1,):
        raise ValueError(f"expected {N + 1} sector amplitudes, got {c.shape}")
    if abs(np.linalg.norm(c) - 1.0) > 1e-10:
        raise ValueError("sector amplitudes must be normalized")
    k = np.arange(N + 1)
    rabi = g * np.sqrt(k * (N - k))
    theta = np.outer(np.atleast_1d(np.asarray(times, dtype=float)), rabi)
    return c * np.cos(theta), -1j * c * np.sin(theta)


def analytic_jcm_state(N: int, g: float, t: float, c, space: Optional[SpaceDescriptor] = None
                       ) -> StateVector:
    """:func:`analytic_jcm_amplitudes` at one time, placed on ``space`` (default cutoffs ``(N, N)``)."""
    space = space or build_space(N, N)
    ground, excited = analytic_jcm_amplitudes(N, g, [t], c)
    psi = np.zeros(space.dim, dtype=complex)
    psi[sector_basis(space, N, GROUND)] = ground[0]
    if N >= 2:
        # |k-1, N-k-1, +> for k = 1..N-1, ascending n_x
        psi[sector_basis(space, N - 2, EXCITED)] = excited[0, 1:N]
    return StateVector(space, psi)


def top_layer_indices(space: SpaceDescriptor) -> np.ndarray:
    occ = space.occupations
    return np.flatnonzero((occ[:, 0] == space.n_max_x) | (occ[:, 1] == space.n_max_y))


def check_top_layer_leak(psi0: StateVector, amplitudes: np.ndarray, tol: float = 1e-12) -> float:
    """
    Largest population reached on top-layer states that were empty in ``psi0``.

    ``amplitudes`` may be one state or a stack from :func:`evolve_many`.
    Raises :class:`~iontrap_parity.exceptions.TruncationLeakError` above ``tol``.
    """
    top = top_layer_indices(psi0.space)
    empty = top[np.abs(psi0.amplitudes[top]) == 0]
    if empty.size == 0:
        return 0.0
    amps = np.atleast_2d(amplitudes)
    leak = float(np.max(np.abs(amps[:, empty]) ** 2))
    if leak > tol:
        raise TruncationLeakError(f"population {leak:.3e} reached the Fock cutoff")
    return leak
