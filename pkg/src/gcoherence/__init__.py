"""G-coherence of qudit states and its factorization under genuinely incoherent operations."""

from .channels import (
    ChannelKind,
    KrausChannel,
    amplitude_decay,
    apply,
    apply_hadamard,
    classify,
    make_channel,
    permute_channel,
    qubit_paper_channel,
    qutrit_phase_damping,
    random_gio,
    transfer_matrix,
)
from .factorization import LawReport, check_elementwise, check_g_law, property_sweep
from .measures import g_coherence, l1_coherence, qubit_initial_g, qutrit_initial_g
from .qstate import (
    DensityMatrix,
    PureState,
    density_from_pure,
    mcs,
    mix,
    pure_state_from_amplitudes,
    random_density,
)

__version__ = "0.1.0"
