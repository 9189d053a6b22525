"""Community detection by fitting blockmodels to raw interaction arrays."""

__version__ = "0.1.0"

from .arrays import InteractionArray, read_array_csv, write_array_csv
from .blockmodels import (
    BinomialParams,
    PoissonParams,
    ProfiledObjective,
    binomial_log_lik,
    binomial_mle,
    poisson_log_lik,
    poisson_mle,
    profiled_objective,
)
from .datasets import RollCall, load_karate, pair_counts
from .network import classification_report, ng_modularity, percentile_sweep, project
from .partitions import (
    ChainParams,
    Partition,
    cap_transition_log_prob,
    cap_transition_sample,
    enumerate_partitions,
    ewens_pitman_log_prob,
    ewens_pitman_sample,
    restrict,
)
from .search import SearchConfig, SearchResult, cocktail_step, global_step, label_switch_maximize, maximize
from .temporal import ClusterSequence, TemporalSeries, fit_initial, fit_next, fit_sequence
