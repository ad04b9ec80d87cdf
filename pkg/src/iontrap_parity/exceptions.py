"""Exception types raised by the simulator."""


class TruncationError(ValueError):
    """An occupation number or sector does not fit inside the Fock cutoffs."""


class NotHermitianError(ValueError):
    """A matrix that must be Hermitian is not (within 1e-12 elementwise)."""


class DimensionMismatchError(ValueError):
    """Operator and state live on different spaces."""


class QubitCouplingError(ValueError):
    """An operator expected to act only on the vibrational modes touches the qubit."""


class ZeroProbabilityError(ValueError):
    """A conditional collapse was requested on an outcome of vanishing probability."""


class PreconditionError(ValueError):
    """A state does not have the product form an operation requires."""


class TruncationLeakError(RuntimeError):
    """Evolution pushed population onto the top Fock layer."""
