"""Differentiable-computation core: autodiff engine, parameters, Adam, Gaussians."""

from .engine import (
    EngineError,
    Node,
    NonScalarRootError,
    UnsupportedPrimitiveError,
    apply_primitive,
    backward,
    no_grad,
    reverse_mode_gradients,
)
from .gauss import DiagGaussian, GaussError, gauss_kl, gauss_nll, gauss_reparam_sample, logsumexp
from .optim import AdamState, OptimError, adam_step
from .params import ParamError, ParamStore

__all__ = [
    "AdamState",
    "DiagGaussian",
    "EngineError",
    "GaussError",
    "Node",
    "NonScalarRootError",
    "OptimError",
    "ParamError",
    "ParamStore",
    "UnsupportedPrimitiveError",
    "adam_step",
    "apply_primitive",
    "backward",
    "gauss_kl",
    "gauss_nll",
    "gauss_reparam_sample",
    "logsumexp",
    "no_grad",
    "reverse_mode_gradients",
]
