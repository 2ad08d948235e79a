"""Simulation of spin-orbit X-state preparation, tomography and quantum discord."""

from .qstate import (
    InvalidStateError,
    density_from_pure,
    fidelity,
    partial_trace,
    pauli_assemble,
    pauli_expand,
    von_neumann_entropy,
)
from .states import Bell, Family, bell_like, family, is_x_state, mean_fidelity, perturb
from .discord import (
    DiscordResult,
    MinimizerConfig,
    MinimizerFailure,
    ProjectivePair,
    classical_correlation,
    conditional_entropy,
    discord,
    discord_bruteforce,
    mutual_information,
)

__version__ = "0.1.0"
