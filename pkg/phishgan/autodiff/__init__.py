"""This sub-package is a minimal reverse-mode automatic differentiation engine.

It provides a numpy-backed `Tensor` that records the operations applied to it,
the layer kinds the generator and discriminator need, and the Adam optimizer.
"""

from phishgan.autodiff.tensor import Tensor, backward, no_grad

__all__ = ["Tensor", "backward", "no_grad"]
