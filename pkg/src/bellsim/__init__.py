"""Kolmogorov probability spaces, hidden-variable models and CHSH statistics."""

from .errors import DomainError
from .measure import (
    CompatibilityRelation,
    Event,
    ProbabilityMeasure,
    RandomQuantity,
    SampleSpace,
    SigmaAlgebra,
    generate_algebra,
    is_measurable,
    is_physically_admissible,
    join_algebras,
    preimage_event,
    verify_measure,
)
from .quantum import (
    Direction,
    chsh_value,
    quantum_correlation,
    sample_pair,
    singlet_joint_pmf,
)
from .hidden import (
    bell_sign_model,
    chsh_disjoint,
    chsh_shared,
    estimate_correlation,
    pointwise_bell_identity,
    sample_lambda,
)
from .contextuality import find_noncontextual_assignment, simulate_spin1_agreement
from .rng import RandomStream

__version__ = "0.1.0"
