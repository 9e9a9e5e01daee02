from .batches import ConsistencyBatch, ImageBatch, MixedBatch
from .chains import (
    DEFAULT_POOL,
    AugChainSpec,
    augmix_views,
    chain_mix_image,
    compose_chain,
    mix_chains,
)
from .corruption import (
    CORRUPTION_KINDS,
    SEVERITIES,
    SEVERITY_TABLE,
    CorruptionSpec,
    corrupt,
    full_suite,
    load_severity_table,
)
from .mixing import cutmix, mixup, rand_bbox
from .primitives import PRIMITIVE_KINDS, posterize_levels, primitive_transform

__all__ = [
    "ConsistencyBatch", "ImageBatch", "MixedBatch",
    "DEFAULT_POOL", "AugChainSpec", "augmix_views", "chain_mix_image",
    "compose_chain", "mix_chains",
    "CORRUPTION_KINDS", "SEVERITIES", "SEVERITY_TABLE", "CorruptionSpec",
    "corrupt", "full_suite", "load_severity_table",
    "cutmix", "mixup", "rand_bbox",
    "PRIMITIVE_KINDS", "posterize_levels", "primitive_transform",
]
