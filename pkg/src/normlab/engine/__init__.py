from normlab.engine.layers import BatchNorm2D, Conv2D, Dense, LayerSpec, ReLU
from normlab.engine.losses import (
    classification_error,
    crossentropy_per_example,
    loss_binary_logistic,
    loss_crossentropy,
    softmax_ce_grad,
)
from normlab.engine.network import (
    ARCHITECTURES,
    Network,
    backward,
    backward_from_caches,
    build_architecture,
    forward,
    param_count,
)
from normlab.engine.optim import OptimizerState, init_gaussian, sgd_step

__all__ = [
    "ARCHITECTURES",
    "BatchNorm2D",
    "Conv2D",
    "Dense",
    "LayerSpec",
    "Network",
    "OptimizerState",
    "ReLU",
    "backward",
    "backward_from_caches",
    "build_architecture",
    "classification_error",
    "crossentropy_per_example",
    "forward",
    "init_gaussian",
    "loss_binary_logistic",
    "loss_crossentropy",
    "param_count",
    "sgd_step",
    "softmax_ce_grad",
]
