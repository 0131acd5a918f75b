"""Design and evaluate lossless block codes for timely (low-age) streaming."""

from .code_design import (
    CodeLengths,
    CodeStats,
    HullPoint,
    PenaltyWeights,
    age_optimal_code,
    age_penalty,
    code_stats,
    example_prefix_code,
    example_source,
    huffman,
    hull_codebooks,
    min_second_moment_code,
    package_merge_linear,
    select_age_optimal,
    type_code,
)
from .errors import BlockSizeError, CodeDesignError, InfeasibleCodeError, UnstableSourceError
from .queue_analysis import (
    ChannelConfig,
    ErrorExponentModel,
    ExampleModel,
    age_upper_bound,
    appendix_a_series,
    example_age_bound,
    example_error_bound,
    example_model,
    example_stationary,
    kingman_wait_bound,
    prop1_age_bound,
    stability,
)
from .simulator import (
    ErrorEstimate,
    SimResult,
    Timing,
    delivery_times,
    deliveries,
    example_chain_sim,
    run_age_sim,
    run_error_sim,
)
from .source_model import (
    BlockDistribution,
    SourceDistribution,
    TypeClass,
    block_distribution,
    entropy,
    enumerate_types,
    sample_block,
    sample_blocks,
)

__version__ = "0.1.0"
