"""ergokit: energy extraction/charging bounds for finite quantum systems.

Core objects: validated :class:`DensityMatrix` / :class:`Hamiltonian`
carriers, CPTP channels in Kraus form with feedback presentations,
sorted-spectrum energy-gain bounds, and seeded Monte-Carlo experiments.
"""

from .bounds import (
    BoundsReport,
    compute_bounds_report,
    ergotropy_minus,
    ergotropy_plus,
    free_energy_gain,
    negative_beta_chain,
    nonunital_bounds,
    optimal_charging_unitary,
    optimal_extraction_unitary,
    second_law_rhs,
    tightness_chain,
    tightness_chain_equality,
    unital_bounds,
)
from .channels import (
    BirkhoffDecomposition,
    FeedbackForm,
    KrausChannel,
    UnitalMixture,
    birkhoff_decompose,
    sample_projective_feedback,
    sample_uhlmann_unital,
    unital_no_feedback_representation,
)
from .errors import DomainError, ErgokitError, InvariantViolation, ValidationError
from .experiments import (
    BetaGrid,
    CrossingPattern,
    CrossingReport,
    ExperimentConfig,
    ExperimentKind,
    classify_crossing_pattern,
    load_config,
    parse_config,
    run_beta_sweep,
    run_energy_entropy_diagram,
    run_entropy_gain_scatter,
)
from .linalg import (
    HermitianEigenSystem,
    PolarFactors,
    RandomStream,
    haar_unitaries,
    haar_unitary,
    hermitian_eigendecompose,
    polar_decompose,
    random_probability_vector,
)
from .policy import DEFAULT_POLICY, NumericPolicy
from .states import (
    DensityMatrix,
    EnergyEntropyPoint,
    Hamiltonian,
    PointTag,
    energy,
    equilibrium_free_energy,
    gibbs_state,
    invert_gibbs_energy,
    is_passive,
    majorizes,
    nonequilibrium_free_energy,
    relative_entropy,
    von_neumann_entropy,
)

__version__ = "0.1.0"
