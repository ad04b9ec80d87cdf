"""Pure states of the ion: Fock products, the SU(2) coherent state, qubit references."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .exceptions import DimensionMismatchError, PreconditionError, TruncationError
from .hilbert import EXCITED, GROUND, SpaceDescriptor, _qubit_index, sector_basis

__all__ = [
    "StateVector",
    "NORM_TOL",
    "fock_state",
    "su2_coherent",
    "sector_state",
    "qubit_reference",
    "vibrational_amplitudes",
    "overlap",
    "same_ray",
]

NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized complex amplitudes over ``space``'s basis."""

    space: SpaceDescriptor
    amplitudes: np.ndarray

    def __post_init__(self):
        psi = np.array(self.amplitudes, dtype=complex)
        if psi.shape != (self.space.dim,):
            raise DimensionMismatchError(
                f"amplitude vector of shape {psi.shape} for space of dimension {self.space.dim}"
            )
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm {norm:.15g})")
        psi.setflags(write=False)
        object.__setattr__(self, "amplitudes", psi)

    @classmethod
    def from_amplitudes(cls, space: SpaceDescriptor, amplitudes, normalize: bool = True):
        psi = np.asarray(amplitudes, dtype=complex)
        if normalize:
            norm = np.linalg.norm(psi)
            if norm == 0:
                raise ValueError("cannot normalize the zero vector")
            psi = psi / norm
        return cls(space, psi)

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def slice(self, s) -> np.ndarray:
        """Phonon amplitudes ``psi[n_x, n_y]`` attached to qubit level ``s``."""
        return vibrational_amplitudes(self)[:, :, _qubit_index(s)]


def vibrational_amplitudes(psi: StateVector) -> np.ndarray:
    """Amplitudes reshaped to ``[n_x, n_y, s]``."""
    return psi.amplitudes.reshape(psi.space.dx, psi.space.dy, 2)


def overlap(phi: StateVector, psi: StateVector) -> complex:
    if phi.space != psi.space:
        raise DimensionMismatchError(f"{phi.space} vs {psi.space}")
    return complex(np.vdot(phi.amplitudes, psi.amplitudes))


def same_ray(phi: StateVector, psi: StateVector, atol: float = 1e-10) -> bool:
    """Equality up to a global phase."""
    return abs(abs(overlap(phi, psi)) - 1.0) <= atol


def fock_state(space: SpaceDescriptor, n_x: int, n_y: int, s=GROUND) -> StateVector:
    psi = np.zeros(space.dim, dtype=complex)
    psi[space.index(n_x, n_y, s)] = 1.0
    return StateVector(space, psi)


def su2_coherent(space: SpaceDescriptor, N: int) -> StateVector:
    """
    Binomial superposition ``sum_k 2^{-N/2} sqrt(C(N,k)) |k, N-k>|->``.

    This is the state with all ``N`` quanta in the bisector mode
    ``(a_x + a_y)/sqrt(2)``, hence an eigenstate of ``C_xy`` with eigenvalue ``N``.
    Both cutoffs must be at least ``N``.
    """
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")
    if N > space.n_max_x or N > space.n_max_y:
        raise TruncationError(
            f"N={N} exceeds cutoffs ({space.n_max_x},{space.n_max_y})"
        )
    k = np.arange(N + 1)
    log_binom = gammaln(N + 1) - gammaln(k + 1) - gammaln(N - k + 1)
    weights = np.exp(0.5 * log_binom - 0.5 * N * np.log(2.0))
    psi = np.zeros(space.dim, dtype=complex)
    psi[sector_basis(space, N, GROUND)] = weights
    # binomial weights sum to one only up to rounding
    return StateVector.from_amplitudes(space, psi)


def sector_state(
    space: SpaceDescriptor, N: int, amplitudes: Sequence[complex], s=GROUND
) -> StateVector:
    """
    State ``sum_j c_j |k_j, N-k_j, s>`` over the phonon sector ``N``.

    ``amplitudes`` follow :func:`~iontrap_parity.hilbert.sector_basis` order
    and are normalized here.
    """
    idx = sector_basis(space, N, s)
    c = np.asarray(amplitudes, dtype=complex)
    if c.shape != (len(idx),):
        raise ValueError(f"sector N={N} has {len(idx)} states, got {c.shape[0]} amplitudes")
    psi = np.zeros(space.dim, dtype=complex)
    psi[idx] = c
    return StateVector.from_amplitudes(space, psi)


_SQRT_HALF = np.sqrt(0.5)
# qubit coefficients (ground, excited)
_REFERENCES = {
    "ground": np.array([1.0, 0.0], dtype=complex),
    "excited": np.array([0.0, 1.0], dtype=complex),
    # (|+> - i|->)/sqrt(2): sigma_y eigenvalue -1
    "minus_y": np.array([-1j * _SQRT_HALF, _SQRT_HALF]),
}


def qubit_reference(psi_vibr: StateVector, which: str = "ground") -> StateVector:
    """
    Attach a reference qubit state to a vibrational state.

    ``psi_vibr`` carries its phonon amplitudes on the ground slice (excited
    amplitudes must vanish). ``which`` is ``"ground"``, ``"excited"`` or
    ``"minus_y"``.
    """
    try:
        q = _REFERENCES[which]
    except KeyError:
        raise ValueError(f"unknown qubit reference {which!r}") from None
    amps = vibrational_amplitudes(psi_vibr)
    if np.max(np.abs(amps[:, :, EXCITED]), initial=0.0) > 1e-12:
        raise PreconditionError("vibrational state has amplitude on the excited slice")
    out = amps[:, :, GROUND][:, :, None] * q[None, None, :]
    return StateVector(psi_vibr.space, out.reshape(-1))
