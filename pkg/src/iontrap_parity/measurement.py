"""Expectation values, conditional electronic collapse and the parity-effect scan."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .dynamics import ScenarioConfig, check_top_layer_leak, evolve_many, jcm_hamiltonian
from .exceptions import DimensionMismatchError, NotHermitianError, ZeroProbabilityError
from .hilbert import GROUND, Operator, _qubit_index, correlation_operator
from .states import StateVector, su2_coherent

__all__ = [
    "expectation",
    "conditional_collapse",
    "TimeSeries",
    "Extremum",
    "parity_scan",
    "conditioned_expectations",
    "locate_extremum",
    "COLLAPSE_MIN_PROBABILITY",
]

COLLAPSE_MIN_PROBABILITY = 1e-14
IMAG_TOL = 1e-10


def expectation(psi: StateVector, obs: Operator) -> float:
    """Real ``<psi|O|psi>`` of a Hermitian observable."""
    if obs.space != psi.space:
        raise DimensionMismatchError(f"{obs.space} vs {psi.space}")
    if not obs.hermitian:
        raise NotHermitianError(f"{obs.label or 'observable'} is not Hermitian")
    value = np.vdot(psi.amplitudes, obs.matrix @ psi.amplitudes)
    if abs(value.imag) > IMAG_TOL * max(1.0, abs(value.real)):
        raise ArithmeticError(f"expectation has imaginary part {value.imag:.3e}")
    return float(value.real)


def conditional_collapse(psi: StateVector, outcome="ground") -> tuple[StateVector, float]:
    """
    Project the ion's internal state onto ``outcome`` and renormalize.

    Returns the collapsed state and the outcome probability.
    """
    s = _qubit_index(outcome)
    projected = np.zeros_like(psi.amplitudes)
    projected[s::2] = psi.amplitudes[s::2]
    probability = float(np.vdot(projected, projected).real)
    if probability < COLLAPSE_MIN_PROBABILITY:
        raise ZeroProbabilityError(f"outcome {outcome!r} has probability {probability:.3e}")
    return StateVector(psi.space, projected / np.sqrt(probability)), probability


def conditioned_expectations(amplitudes: np.ndarray, obs: Operator, outcome=GROUND,
                             threshold: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """
    Vectorized collapse + expectation over a stack of states.

    Returns ``(values, probabilities)``; ``values`` is NaN where the outcome
    probability is at or below ``threshold``.
    """
    s = _qubit_index(outcome)
    amps = np.atleast_2d(amplitudes)[:, s::2]
    block = obs.matrix[s::2, s::2]
    probs = np.sum(np.abs(amps) ** 2, axis=1)
    raw = np.einsum("ti,ti->t", amps.conj(), amps @ block.T).real
    valid = probs > max(threshold, COLLAPSE_MIN_PROBABILITY)
    values = np.full(probs.shape, np.nan)
    values[valid] = raw[valid] / probs[valid]
    return values, probs


@dataclass(frozen=True)
class Extremum:
    gt: float
    value: float
    ground_probability: float
    index: int


@dataclass
class TimeSeries:
    """
    Conditioned expectation of an observable along a time grid.

    ``expectation`` holds NaN at samples whose ground probability fell below
    the validity threshold; ``valid`` flags the others.
    """

    times: np.ndarray
    expectation: np.ndarray
    ground_probability: np.ndarray
    N: int
    g: float
    label: str = "C_xy"
    threshold: float = 1e-6
    metadata: dict = field(default_factory=dict)

    @property
    def valid(self) -> np.ndarray:
        return ~np.isnan(self.expectation)

    def __len__(self):
        return len(self.times)

    def peak(self) -> Extremum:
        return self._extremum(np.nanargmax)

    def valley(self) -> Extremum:
        return self._extremum(np.nanargmin)

    def _extremum(self, arg) -> Extremum:
        i = int(arg(self.expectation))
        return Extremum(float(self.times[i]), float(self.expectation[i]),
                        float(self.ground_probability[i]), i)

    def parity_extremum(self) -> Extremum:
        """The peak for even ``N`` and the valley for odd ``N``."""
        return self.peak() if self.N % 2 == 0 else self.valley()

    def to_csv(self, path=None) -> str:
        """Write ``t,expectation,ground_probability`` rows with 12 significant digits."""
        buf = io.StringIO()
        buf.write("t,expectation,ground_probability\n")
        for t, e, p in zip(self.times, self.expectation, self.ground_probability):
            e_txt = "" if np.isnan(e) else f"{e:.12g}"
            buf.write(f"{t:.12g},{e_txt},{p:.12g}\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def parity_scan(config: ScenarioConfig) -> TimeSeries:
    """
    Evolve ``su2_coherent(N)`` under the two-mode JCM, collapse the ion to its
    ground level and record ``<C_xy>`` and the ground probability at every
    ``g*t`` of the configured grid.

    Raises :class:`ZeroProbabilityError` only if no grid point has a usable
    ground probability.
    """
    space = config.space
    psi0 = su2_coherent(space, config.N)
    H = jcm_hamiltonian(space, float(config.g))
    amps = evolve_many(H, psi0, config.times / config.g)
    check_top_layer_leak(psi0, amps)
    C = correlation_operator(space)
    values, probs = conditioned_expectations(amps, C, GROUND, config.probability_threshold)
    if not np.any(~np.isnan(values)):
        raise ZeroProbabilityError("ground outcome is negligible on every grid point")
    return TimeSeries(
        times=config.times.copy(),
        expectation=values,
        ground_probability=np.clip(probs, 0.0, 1.0),
        N=config.N,
        g=float(config.g),
        label=C.label,
        threshold=config.probability_threshold,
    )


def locate_extremum(series: TimeSeries, config: ScenarioConfig, kind: str = "parity",
                    refine: Optional[bool] = None) -> Extremum:
    """
    Grid extremum of a scan, optionally refined between its grid neighbours.

    ``kind`` is ``"peak"``, ``"valley"`` or ``"parity"`` (peak for even ``N``,
    valley for odd). Refinement runs a bounded scalar minimization of the
    conditioned expectation on ``[t_{i-1}, t_{i+1}]``.
    """
    if kind == "parity":
        kind = "peak" if series.N % 2 == 0 else "valley"
    if kind == "peak":
        ext, sign = series.peak(), -1.0
    elif kind == "valley":
        ext, sign = series.valley(), 1.0
    else:
        raise ValueError(f"kind must be 'peak', 'valley' or 'parity', got {kind!r}")
    if not (config.refine if refine is None else refine):
        return ext

    space = config.space
    psi0 = su2_coherent(space, config.N)
    H = jcm_hamiltonian(space, float(config.g))
    C = correlation_operator(space)
    times = series.times
    lo = times[max(ext.index - 1, 0)]
    hi = times[min(ext.index + 1, len(times) - 1)]
    if ext.index == 0:
        lo = 0.0

    def value(gt):
        v, p = conditioned_expectations(evolve_many(H, psi0, [gt / config.g]), C, GROUND,
                                         config.probability_threshold)
        return (sign * v[0] if not np.isnan(v[0]) else np.inf), p[0]

    res = minimize_scalar(lambda gt: value(gt)[0], bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10})
    best, prob = value(res.x)
    if not np.isfinite(best) or best > sign * ext.value:
        return ext
    return Extremum(float(res.x), float(sign * best), float(prob), ext.index)
