"""biphoton: analysis and simulation of polarization-entangled photon pairs.

Core surfaces:

* :mod:`biphoton.linalg` -- two-qubit density-matrix linear algebra
* :mod:`biphoton.jones` -- waveplate/polarizer projection states
* :mod:`biphoton.tomography` -- maximum-likelihood state reconstruction
* :mod:`biphoton.bell` -- CHSH, visibility and Freedman nonlocality tests
* :mod:`biphoton.measures` -- entanglement measures and entropies
* :mod:`biphoton.source` -- SPDC source simulation
* :mod:`biphoton.qpm` -- quasi-phase-matching for periodically poled KTP
* :mod:`biphoton.tables` -- CSV count-table schemas
* :mod:`biphoton.service` -- FastAPI app exposing the analyses
* :mod:`biphoton.cli` -- thin command-line client of the service
"""

from ._version import __version__
from .bell import (
    ChshGrid,
    FreedmanDataset,
    VisibilityTable,
    accidental_rate,
    chsh_s,
    correlation_e,
    fit_freedman_model,
    freedman_delta,
    freedman_sigma,
    visibility,
)
from .jones import (
    ProjectionState,
    WaveplateSetting,
    bell_state,
    polarizer_state,
    projection_state,
    standard_16_settings,
    two_qubit_projector,
)
from .linalg import (
    BASIS,
    eig_hermitian,
    matrix_sqrt_psd,
    partial_trace,
    partial_transpose,
    project_to_physical,
    reduced_state,
)
from .measures import (
    EntanglementReport,
    concurrence,
    entanglement_report,
    fidelity,
    linear_entropy,
    log_negativity,
    renyi2_subsystem,
    tangle_and_eof,
    von_neumann_entropy,
)
from .qpm import CrystalSpec, find_degenerate_temperature, qpm_mismatch, solve_idler
from .source import SourceModel, expected_coincidence, sample_counts, simulate_tomography_dataset
from .tables import parse_counts, parse_counts_text
from .tomography import (
    MLEConfig,
    MLEResult,
    TomographyDataset,
    TomographyRecord,
    linear_inversion,
    mle_reconstruct,
    params_to_rho,
    predicted_probability,
    rho_to_params,
)
