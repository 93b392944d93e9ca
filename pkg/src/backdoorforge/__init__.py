# init file
# the public surface of the library, the benchmark package builds on it

from .baselines import EntnerConfig, EntnerResult, allz_ate, entner_search, marginal_ate
from .discovery import (
    DiscoveryConfig,
    DiscoveryResult,
    discover,
    discovery_view,
    gradient,
    objective,
    optimize,
    population_view,
    tune,
)
from .estimation import ate_error, backdoor_ate
from .generation import derive_seed, sample_data, sample_parameters, split_dataset
from .graph import d_separated, entner_pair_holds, is_valid_backdoor_set
from .models import Dataset, GraphSpec, Node
from .presets import (
    BlockDims,
    build_nhs_graph,
    build_simulation_graph,
    make_nhs_sem,
    make_simulation_sem,
    make_two_equation_sem,
)
from .sem import LinearSem
from .stats import CovView, fisher_z_test, partial_corr, sample_cov

__all__ = [
    "BlockDims",
    "CovView",
    "Dataset",
    "DiscoveryConfig",
    "DiscoveryResult",
    "EntnerConfig",
    "EntnerResult",
    "GraphSpec",
    "LinearSem",
    "Node",
    "allz_ate",
    "ate_error",
    "backdoor_ate",
    "build_nhs_graph",
    "build_simulation_graph",
    "d_separated",
    "derive_seed",
    "discover",
    "discovery_view",
    "entner_pair_holds",
    "entner_search",
    "fisher_z_test",
    "gradient",
    "is_valid_backdoor_set",
    "make_nhs_sem",
    "make_simulation_sem",
    "make_two_equation_sem",
    "marginal_ate",
    "objective",
    "optimize",
    "partial_corr",
    "population_view",
    "sample_cov",
    "sample_data",
    "sample_parameters",
    "split_dataset",
    "tune",
]
