"""Two-qubit density matrices: validation, presets, spectral utilities.

Basis order is fixed package-wide as

    |1> = |up,up>   |2> = |up,down>   |3> = |down,up>   |4> = |down,down>

with qubit A the left factor and qubit B the right one, so a two-qubit
operator is ``kron(op_A, op_B)``. All functions here are pure and all types
immutable; everything is safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels

DIM = 4
BASIS_LABELS = ("|uu>", "|ud>", "|du>", "|dd>")

TOL_HERM = 1e-12    # max |m - m^dagger| accepted as Hermitian
TOL_TRACE = 1e-12   # |tr(m) - 1| accepted as unit trace
TOL_PSD = 1e-10     # eigenvalues down to -TOL_PSD accepted as nonnegative
TOL_ZERO = 1e-10    # a diagonal element at or below this counts as vanishing


class StateValidationError(ValueError):
    """A raw matrix failed one of the density-matrix invariants."""


class NotHermitianError(StateValidationError):
    def __init__(self, deviation):
        self.deviation = float(deviation)
        super().__init__(
            "not Hermitian: max |m - m^dagger| = %.3e exceeds %g"
            % (self.deviation, TOL_HERM)
        )


class TraceNotOneError(StateValidationError):
    def __init__(self, deviation):
        self.deviation = float(deviation)
        super().__init__(
            "trace differs from 1 by %.3e (tolerance %g)" % (self.deviation, TOL_TRACE)
        )


class NotPositiveError(StateValidationError):
    def __init__(self, min_eigenvalue):
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(
            "not positive semidefinite: smallest eigenvalue %.3e < -%g"
            % (self.min_eigenvalue, TOL_PSD)
        )


class UnknownPresetError(ValueError):
    def __init__(self, name):
        super().__init__(
            "unknown preset %r; expected one of %s or werner:p=<value>"
            % (name, ", ".join(sorted(_FIXED_PRESETS)))
        )


class WernerParamOutOfRangeError(ValueError):
    def __init__(self, p):
        super().__init__("werner parameter p=%r outside [0, 1]" % (p,))


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.complex128)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated 4x4 two-qubit state. Construct via ``validate`` or ``preset``."""

    data: np.ndarray

    @property
    def diag(self) -> np.ndarray:
        """Populations (real parts of the diagonal)."""
        return self.data.diagonal().real

    def purity(self) -> float:
        return float(np.vdot(self.data, self.data).real)

    def __repr__(self):
        return "DensityMatrix(diag=%s)" % np.array2string(self.diag, precision=6)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues (descending) and optional eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray | None = field(default=None)


def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.abs(m - m.conj().T).max())


def validate(m) -> DensityMatrix:
    """Check the density-matrix invariants and wrap the input unchanged.

    The returned object holds the input values as given; no normalization,
    projection, or other repair is performed, so a failing matrix always
    raises.

    Raises
    ------
    NotHermitianError, TraceNotOneError, NotPositiveError
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.shape != (DIM, DIM):
        raise StateValidationError("expected a 4x4 matrix, got shape %s" % (m.shape,))
    herm = hermiticity_defect(m)
    if herm > TOL_HERM:
        raise NotHermitianError(herm)
    trace_dev = abs(m.trace() - 1.0)
    if trace_dev > TOL_TRACE:
        raise TraceNotOneError(trace_dev)
    w, _ = _kernels.jacobi_eigh(m, compute_vectors=False)
    if w[-1] < -TOL_PSD:
        raise NotPositiveError(w[-1])
    return DensityMatrix(_freeze(m.copy()))


def eig_hermitian(m, vectors: bool = False) -> Spectrum:
    """Spectrum of a Hermitian matrix via the in-repo Jacobi solver.

    Eigenvalues come back descending; with ``vectors=True`` the unitary of
    eigenvector columns is included and ``m == V diag(w) V^dagger`` holds to
    near machine precision.
    """
    m = np.asarray(m, dtype=np.complex128)
    herm = hermiticity_defect(m)
    if herm > TOL_HERM:
        raise NotHermitianError(herm)
    w, v = _kernels.jacobi_eigh(m, compute_vectors=vectors, graded=True)
    w.flags.writeable = False
    if v is not None:
        v.flags.writeable = False
    return Spectrum(w, v)


def _bell(i: int, j: int, sign: float) -> np.ndarray:
    # (|i> + sign |j>)/sqrt(2) as an exact-entry density matrix
    m = np.zeros((DIM, DIM), dtype=np.complex128)
    m[i, i] = m[j, j] = 0.5
    m[i, j] = m[j, i] = sign * 0.5
    return m


def _ket_state(amplitudes) -> np.ndarray:
    psi = np.asarray(amplitudes, dtype=np.complex128)
    return np.outer(psi, psi.conj())


_FIXED_PRESETS = {
    "bell-phi+": _bell(0, 3, +1.0),
    "bell-phi-": _bell(0, 3, -1.0),
    "bell-psi+": _bell(1, 2, +1.0),
    "bell-psi-": _bell(1, 2, -1.0),
    "up-up": _ket_state([1, 0, 0, 0]),
    "down-down": _ket_state([0, 0, 0, 1]),
    "mixed": np.eye(4, dtype=np.complex128) / 4.0,
}

PRESET_NAMES = tuple(sorted(_FIXED_PRESETS)) + ("werner:p=<value>",)


def preset(name: str) -> DensityMatrix:
    """Named state: the four Bell states, up-up, down-down, mixed (identity/4),
    or ``werner:p=<v>`` for p |psi-><psi-| + (1-p) identity/4."""
    if name in _FIXED_PRESETS:
        return DensityMatrix(_freeze(_FIXED_PRESETS[name].copy()))
    if name.startswith("werner:p="):
        raw = name[len("werner:p="):]
        try:
            p = float(raw)
        except ValueError:
            raise WernerParamOutOfRangeError(raw) from None
        if not 0.0 <= p <= 1.0:
            raise WernerParamOutOfRangeError(p)
        m = p * _FIXED_PRESETS["bell-psi-"] + (1.0 - p) * np.eye(4) / 4.0
        return DensityMatrix(_freeze(m))
    raise UnknownPresetError(name)


def as_array(rho) -> np.ndarray:
    """Accept a DensityMatrix or a plain array; return the ndarray view."""
    if isinstance(rho, DensityMatrix):
        return rho.data
    return np.asarray(rho, dtype=np.complex128)


def to_json_dict(rho) -> dict:
    """JSON form shared with the CLI: {"matrix": 4x4 of [re, im] pairs}."""
    m = as_array(rho)
    return {
        "matrix": [
            [[float(m[i, j].real), float(m[i, j].imag)] for j in range(DIM)]
            for i in range(DIM)
        ]
    }


def from_json_dict(obj) -> DensityMatrix:
    """Parse the [re, im]-pair JSON form and validate it."""
    try:
        rows = obj["matrix"]
        m = np.array(
            [[complex(cell[0], cell[1]) for cell in row] for row in rows],
            dtype=np.complex128,
        )
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise StateValidationError("malformed density-matrix JSON: %s" % exc) from exc
    return validate(m)
