"""Sequential pattern mining in event-based spatio-temporal data."""

from .core import (
    EmbeddingSpace,
    EventDataset,
    EventInstance,
    NeighborhoodParams,
    NormalizationParams,
    neighborhood_volume,
    space_volume,
    st_distance,
)
from .datagen import GeneratorParams, generate, verify_planted
from .join import covered_instances, instance_neighbors, microcluster_neighbors
from .microcluster import (
    Microcluster,
    MicroclusterIndex,
    build_index,
    build_index_capped,
    compression_ratio,
    diameter,
    split,
)
from .miner import (
    MinerConfig,
    PatternResult,
    density,
    density_ratio,
    mine_baseline,
    mine_micro,
    modified_density,
    modified_density_ratio,
    sequence_index,
)

__version__ = "0.1.0"
