from normlab.normalize.absorb import absorb_batchnorm
from normlab.normalize.layerwise import (
    FROBENIUS,
    L1_OVER_100,
    LINF,
    NormalizedNetwork,
    NormKind,
    layer_norm,
    layer_scales,
    norm_kind_from_name,
    normalize_layerwise,
    product_norm,
    scale_layers,
    verify_homogeneity,
)

__all__ = [
    "FROBENIUS",
    "L1_OVER_100",
    "LINF",
    "NormKind",
    "NormalizedNetwork",
    "absorb_batchnorm",
    "layer_norm",
    "layer_scales",
    "norm_kind_from_name",
    "normalize_layerwise",
    "product_norm",
    "scale_layers",
    "verify_homogeneity",
]
