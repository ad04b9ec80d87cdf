"""
Truncated two-mode Fock space tensored with a two-level ion.

Basis ordering is fixed: ``index(n_x, n_y, s) = ((n_x*(n_max_y+1)) + n_y)*2 + s``
with ``s = 0`` the ground level |-> and ``s = 1`` the excited level |+>.
Equivalently, a full-space matrix is ``kron(mode_x, mode_y, qubit)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Optional, Sequence

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    NotHermitianError,
    QubitCouplingError,
    TruncationError,
)

__all__ = [
    "GROUND",
    "EXCITED",
    "SpaceDescriptor",
    "Operator",
    "HermitianOperator",
    "build_space",
    "identity",
    "ladder",
    "pauli",
    "correlation_operator",
    "observable",
    "OBSERVABLE_KINDS",
    "sector_basis",
    "restrict",
    "acts_trivially_on_qubit",
    "mode_block",
    "commutator",
]

GROUND = 0
EXCITED = 1

HERMITIAN_TOL = 1e-12

_QUBIT_STATES = {"ground": GROUND, "excited": EXCITED, "-": GROUND, "+": EXCITED}


def _qubit_index(s) -> int:
    if isinstance(s, str):
        try:
            return _QUBIT_STATES[s]
        except KeyError:
            raise ValueError(f"unknown qubit state {s!r}") from None
    if s not in (GROUND, EXCITED):
        raise ValueError(f"qubit state must be 0 (ground) or 1 (excited), got {s!r}")
    return int(s)


@dataclass(frozen=True)
class SpaceDescriptor:
    """Cutoffs of the two vibrational modes; the qubit is always two-level."""

    n_max_x: int
    n_max_y: int

    def __post_init__(self):
        for name in ("n_max_x", "n_max_y"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {value!r}")

    @property
    def dx(self) -> int:
        return self.n_max_x + 1

    @property
    def dy(self) -> int:
        return self.n_max_y + 1

    @property
    def mode_dim(self) -> int:
        return self.dx * self.dy

    @property
    def dim(self) -> int:
        return self.mode_dim * 2

    def index(self, n_x: int, n_y: int, s=GROUND) -> int:
        s = _qubit_index(s)
        if not (0 <= n_x <= self.n_max_x and 0 <= n_y <= self.n_max_y):
            raise TruncationError(
                f"|{n_x},{n_y}> outside cutoffs ({self.n_max_x},{self.n_max_y})"
            )
        return (n_x * self.dy + n_y) * 2 + s

    def labels(self, index: int) -> tuple[int, int, int]:
        """Inverse of :meth:`index`: ``(n_x, n_y, s)``."""
        if not 0 <= index < self.dim:
            raise IndexError(index)
        cell, s = divmod(index, 2)
        n_x, n_y = divmod(cell, self.dy)
        return n_x, n_y, s

    @cached_property
    def occupations(self) -> np.ndarray:
        """``(dim, 3)`` integer table of ``(n_x, n_y, s)`` for every index."""
        nx, ny, s = np.meshgrid(
            np.arange(self.dx), np.arange(self.dy), np.arange(2), indexing="ij"
        )
        return np.stack([nx.ravel(), ny.ravel(), s.ravel()], axis=1)


def build_space(n_max_x: int, n_max_y: int) -> SpaceDescriptor:
    return SpaceDescriptor(int(n_max_x), int(n_max_y))


@dataclass(frozen=True, eq=False)
class Operator:
    """
    Dense matrix over a :class:`SpaceDescriptor` basis.

    Parameters
    ----------
    space : SpaceDescriptor
    matrix : array_like
        Square matrix of size ``space.dim``.
    label : str
        Name used in reports and exports.
    hermitian : bool or None
        ``True`` enforces ``M == M^dagger`` to 1e-12 and raises
        :class:`NotHermitianError` otherwise. ``False`` marks a deliberately
        non-Hermitian carrier (ladder operators). ``None`` detects.
    """

    space: SpaceDescriptor
    matrix: np.ndarray
    label: str = ""
    hermitian: Optional[bool] = field(default=None)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex if np.iscomplexobj(self.matrix) else float)
        if m.shape != (self.space.dim, self.space.dim):
            raise DimensionMismatchError(
                f"matrix shape {m.shape} does not match space dimension {self.space.dim}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        adjoint = m.conj().T if np.iscomplexobj(m) else m.T
        deviation = np.max(np.abs(m - adjoint), initial=0.0)
        if self.hermitian is None:
            object.__setattr__(self, "hermitian", bool(deviation <= HERMITIAN_TOL))
        elif self.hermitian and deviation > HERMITIAN_TOL:
            raise NotHermitianError(
                f"{self.label or 'operator'}: max |M - M^dag| = {deviation:.3e}"
            )

    @property
    def dim(self) -> int:
        return self.space.dim

    @cached_property
    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and eigenvectors (columns) of a Hermitian operator."""
        if not self.hermitian:
            raise NotHermitianError(f"{self.label or 'operator'} has no spectral decomposition")
        m = self.matrix
        if np.iscomplexobj(m) and not np.any(m.imag):
            m = m.real
        return np.linalg.eigh(m)

    def dag(self) -> "Operator":
        return Operator(
            self.space, self.matrix.conj().T, f"{self.label}^dag", hermitian=self.hermitian
        )

    def _check(self, other: "Operator"):
        if other.space != self.space:
            raise DimensionMismatchError(f"{self.space} vs {other.space}")

    def __matmul__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.space, self.matrix @ other.matrix, f"{self.label}*{other.label}")
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.space, self.matrix + other.matrix, f"{self.label}+{other.label}")
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.space, self.matrix - other.matrix, f"{self.label}-{other.label}")
        return NotImplemented

    def __mul__(self, factor):
        if not np.isscalar(factor):
            return NotImplemented
        out = Operator(self.space, self.matrix * factor, self.label)
        # real rescaling keeps the eigenbasis
        if "spectrum" in self.__dict__ and np.isreal(factor) and out.hermitian:
            w, v = self.spectrum
            out.__dict__["spectrum"] = (w * float(np.real(factor)), v)
        return out

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def apply(self, vector: np.ndarray) -> np.ndarray:
        return self.matrix @ vector

    def relabel(self, label: str) -> "Operator":
        out = Operator(self.space, self.matrix, label, hermitian=self.hermitian)
        if "spectrum" in self.__dict__:
            out.__dict__["spectrum"] = self.spectrum
        return out


HermitianOperator = Operator


def commutator(a: Operator, b: Operator) -> np.ndarray:
    return a.matrix @ b.matrix - b.matrix @ a.matrix


def _lower_1d(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1)


def _embed(space: SpaceDescriptor, mode_x=None, mode_y=None, qubit=None) -> np.ndarray:
    mx = np.eye(space.dx) if mode_x is None else mode_x
    my = np.eye(space.dy) if mode_y is None else mode_y
    if qubit is not None:
        return np.kron(np.kron(mx, my), qubit)
    return _with_qubit_identity(np.kron(mx, my))


def _with_qubit_identity(mode: np.ndarray) -> np.ndarray:
    # kron(mode, eye(2)) without the dense product
    out = np.zeros((2 * mode.shape[0], 2 * mode.shape[1]), dtype=mode.dtype)
    out[0::2, 0::2] = mode
    out[1::2, 1::2] = mode
    return out


@lru_cache(maxsize=64)
def identity(space: SpaceDescriptor) -> Operator:
    return Operator(space, np.eye(space.dim), "identity", hermitian=True)


@lru_cache(maxsize=256)
def ladder(space: SpaceDescriptor, mode: str, kind: str = "lower") -> Operator:
    """
    Annihilation (``kind="lower"``) or creation (``kind="raise"``) operator
    of mode ``"x"`` or ``"y"``, truncated at the space cutoff.

    The returned carrier is flagged ``hermitian=False``.
    """
    if mode == "x":
        mat = _embed(space, mode_x=_lower_1d(space.n_max_x))
    elif mode == "y":
        mat = _embed(space, mode_y=_lower_1d(space.n_max_y))
    else:
        raise ValueError(f"mode must be 'x' or 'y', got {mode!r}")
    if kind == "raise":
        mat = mat.T.copy()
        label = f"a_{mode}^dag"
    elif kind == "lower":
        label = f"a_{mode}"
    else:
        raise ValueError(f"kind must be 'lower' or 'raise', got {kind!r}")
    return Operator(space, mat, label, hermitian=False)


# qubit basis order: (|->, |+>)
SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]])
SIGMA_MINUS = SIGMA_PLUS.T.copy()
_PAULI = {
    "x": SIGMA_PLUS + SIGMA_MINUS,
    "y": -1j * (SIGMA_PLUS - SIGMA_MINUS),
    "z": np.diag([-1.0, 1.0]),
}


@lru_cache(maxsize=128)
def pauli(space: SpaceDescriptor, axis: str) -> Operator:
    """Pauli matrix on the ion's internal levels, identity on the modes.

    With the ground level first, ``sigma_z = diag(-1, +1)`` and
    ``sigma_x sigma_y = i sigma_z``.
    """
    try:
        q = _PAULI[axis]
    except KeyError:
        raise ValueError(f"axis must be one of x, y, z; got {axis!r}") from None
    return Operator(space, _embed(space, qubit=q), f"sigma_{axis}", hermitian=True)


@lru_cache(maxsize=64)
def correlation_operator(space: SpaceDescriptor) -> Operator:
    """``C_xy = a_x^dag a_y + a_x a_y^dag``."""
    # built on the mode factors; a dense full-space product costs O(dim^3)
    ax, ay = _lower_1d(space.n_max_x), _lower_1d(space.n_max_y)
    hop = np.kron(ax.T, ay)
    return Operator(space, _with_qubit_identity(hop + hop.T), "C_xy", hermitian=True)


OBSERVABLE_KINDS = (
    "identity",
    "total_number",
    "number",
    "quadrature_position",
    "quadrature_momentum",
    "angular_momentum_z",
    "correlation",
    "correlation_squared",
)

_MODAL_KINDS = ("number", "quadrature_position", "quadrature_momentum")


@lru_cache(maxsize=256)
def observable(space: SpaceDescriptor, kind: str, mode: Optional[str] = None) -> Operator:
    """
    Hermitian vibrational observable, identity on the qubit.

    ``kind`` is one of :data:`OBSERVABLE_KINDS`. ``number`` and the two
    quadratures need ``mode`` (``"x"`` or ``"y"``). Quadratures are
    ``(a + a^dag)/sqrt(2)`` and ``i(a^dag - a)/sqrt(2)``; they do not conserve
    phonon number, so leave headroom in the cutoffs when using them.
    """
    if kind == "identity":
        return identity(space)
    if kind == "correlation":
        return correlation_operator(space)
    # everything below acts on the modes only; build there and embed once
    ax = np.kron(_lower_1d(space.n_max_x), np.eye(space.dy))
    ay = np.kron(np.eye(space.dx), _lower_1d(space.n_max_y))
    if kind in _MODAL_KINDS:
        if mode not in ("x", "y"):
            raise ValueError(f"observable {kind!r} requires mode 'x' or 'y'")
        a = ax if mode == "x" else ay
        if kind == "number":
            m, label = a.T @ a, f"n_{mode}"
        elif kind == "quadrature_position":
            m, label = (a + a.T) / np.sqrt(2), f"q_{mode}"
        else:
            m, label = 1j * (a.T - a) / np.sqrt(2), f"p_{mode}"
    elif kind == "correlation_squared":
        c = ax.T @ ay + ay.T @ ax
        m, label = c @ c, "C_xy^2"
    elif kind == "total_number":
        m, label = ax.T @ ax + ay.T @ ay, "n_x+n_y"
    elif kind == "angular_momentum_z":
        m, label = 1j * (ax @ ay.T - ax.T @ ay), "L_z"
    else:
        raise ValueError(f"unknown observable kind {kind!r}; expected one of {OBSERVABLE_KINDS}")
    return Operator(space, _with_qubit_identity(m), label, hermitian=True)


def sector_basis(space: SpaceDescriptor, N: int, s=GROUND) -> list[int]:
    """Indices of ``|n_x, N - n_x, s>`` present in the space, by ascending ``n_x``."""
    s = _qubit_index(s)
    if N < 0 or N > space.n_max_x + space.n_max_y:
        raise TruncationError(
            f"sector N={N} outside cutoffs ({space.n_max_x},{space.n_max_y})"
        )
    lo = max(0, N - space.n_max_y)
    hi = min(N, space.n_max_x)
    return [space.index(k, N - k, s) for k in range(lo, hi + 1)]


def restrict(op: Operator, indices: Sequence[int]) -> np.ndarray:
    """Principal submatrix of ``op`` on ``indices``."""
    idx = np.asarray(indices, dtype=int)
    if idx.ndim != 1:
        raise ValueError("indices must be a flat sequence")
    if len(np.unique(idx)) != len(idx):
        raise ValueError("duplicate indices")
    if idx.size and (idx.min() < 0 or idx.max() >= op.dim):
        raise IndexError(f"indices out of range for dimension {op.dim}")
    return op.matrix[np.ix_(idx, idx)]


def _qubit_blocks(op: Operator) -> np.ndarray:
    d = op.space.mode_dim
    return op.matrix.reshape(d, 2, d, 2)


def acts_trivially_on_qubit(op: Operator, atol: float = HERMITIAN_TOL) -> bool:
    """True iff ``op = O_modes (x) 1_qubit``, i.e. it commutes with every Pauli matrix."""
    b = _qubit_blocks(op)
    return bool(
        np.max(np.abs(b[:, 0, :, 1]), initial=0.0) <= atol
        and np.max(np.abs(b[:, 1, :, 0]), initial=0.0) <= atol
        and np.max(np.abs(b[:, 0, :, 0] - b[:, 1, :, 1]), initial=0.0) <= atol
    )


def mode_block(op: Operator) -> np.ndarray:
    """The vibrational factor ``O_modes`` of a qubit-trivial operator."""
    if not acts_trivially_on_qubit(op):
        raise QubitCouplingError(f"{op.label or 'operator'} acts on the qubit")
    return _qubit_blocks(op)[:, 0, :, 0]
