"""One-inclusion graph learners, transductive-to-PAC reductions and their checks."""
from .hypothesis_space import HypothesisClass, InputError, ResourceLimitError, load_class, load_sample, vc_dimension
from .losses import ZERO_ONE, LossFn, generalized_median, validate_pseudometric
from .oig_agnostic import AgnosticOIGClassifier, RepeatedPointOIGClassifier, compute_credits, phi_full
from .oig_realizable import RealizableOIGClassifier, build_realizable_oig, transductive_error
from .rademacher import exact_rademacher, mc_rademacher
from .reduction import AgnosticReduction, RealizableReduction, k_agnostic, k_realizable, pac_budget, validation_size
from .sim import FiniteDistribution, exact_risk, planted_noise

__all__ = [
    "HypothesisClass", "InputError", "ResourceLimitError", "load_class", "load_sample", "vc_dimension",
    "ZERO_ONE", "LossFn", "generalized_median", "validate_pseudometric",
    "AgnosticOIGClassifier", "RepeatedPointOIGClassifier", "compute_credits", "phi_full",
    "RealizableOIGClassifier", "build_realizable_oig", "transductive_error",
    "exact_rademacher", "mc_rademacher",
    "AgnosticReduction", "RealizableReduction", "k_agnostic", "k_realizable", "pac_budget", "validation_size",
    "FiniteDistribution", "exact_risk", "planted_noise",
]
