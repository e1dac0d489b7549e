"""
Minimal feed-forward networks over a flat parameter vector
"""
from .model_spec import (
    Activation,
    LayerSlice,
    LossKind,
    ModelSpec,
    OutputHead,
    layer_slices,
    make_spec,
    param_dim,
)
from .masking import draw_keep_bits, keep_probabilities, maskable_coordinates
from .network import (
    as_param_vector,
    forward,
    forward_cache,
    full_batch_loss,
    init_params,
    loss_and_grad,
    unpack_params,
)

__all__ = [
    'Activation',
    'LayerSlice',
    'LossKind',
    'ModelSpec',
    'OutputHead',
    'layer_slices',
    'make_spec',
    'param_dim',
    'draw_keep_bits',
    'keep_probabilities',
    'maskable_coordinates',
    'as_param_vector',
    'forward',
    'forward_cache',
    'full_batch_loss',
    'init_params',
    'loss_and_grad',
    'unpack_params',
]
