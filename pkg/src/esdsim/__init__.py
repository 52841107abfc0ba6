"""esdsim: two-qubit decoherence channels, concurrence, and the geometry of
entanglement sudden death.

The package simulates two non-interacting qubits under local amplitude
damping, local dephasing, or both at once (Kraus form and a master-equation
integrator as independent routes), computes Wootters concurrence along
trajectories, locates disentanglement times, and classifies initial states
by whether their entanglement decays asymptotically or dies abruptly.
"""

from ._kernels import get_backend
from .channels import (
    ChannelKind,
    ChannelParams,
    KrausSet,
    NoiseRates,
    apply,
    channel_at,
    check_factorization,
    check_semigroup,
    kraus_amplitude,
    kraus_composite,
    kraus_phase,
    kraus_set,
    params_at,
)
from .classify import EsdVerdict, SubspaceLabel, diag_evolution_amp, predict_esd, subspace
from .dynamics import (
    EsdTimeResult,
    Trajectory,
    esd_time,
    evolve,
    integrate_lindblad,
    lindblad_rhs,
)
from .entanglement import (
    ConcurrenceResult,
    concurrence,
    lambda_dephased_limit,
    lambda_rhoI_closed_form,
    r_matrix,
)
from .qstate import DensityMatrix, Spectrum, eig_hermitian, preset, validate
from .sampling import SamplerConfig, StateSampler, sample

__version__ = "0.1.0"

__all__ = [
    "ChannelKind",
    "ChannelParams",
    "ConcurrenceResult",
    "DensityMatrix",
    "EsdTimeResult",
    "EsdVerdict",
    "KrausSet",
    "NoiseRates",
    "SamplerConfig",
    "Spectrum",
    "StateSampler",
    "SubspaceLabel",
    "Trajectory",
    "apply",
    "channel_at",
    "check_factorization",
    "check_semigroup",
    "concurrence",
    "diag_evolution_amp",
    "eig_hermitian",
    "esd_time",
    "evolve",
    "get_backend",
    "integrate_lindblad",
    "kraus_amplitude",
    "kraus_composite",
    "kraus_phase",
    "kraus_set",
    "lambda_dephased_limit",
    "lambda_rhoI_closed_form",
    "lindblad_rhs",
    "params_at",
    "predict_esd",
    "preset",
    "r_matrix",
    "sample",
    "subspace",
    "validate",
    "__version__",
]
