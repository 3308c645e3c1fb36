"""normlab: train small ReLU convnets, normalize them layerwise, and study
how tightly normalized training loss predicts normalized test loss."""

__version__ = "0.1.0"
