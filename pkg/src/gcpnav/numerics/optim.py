"""Bias-corrected adaptive-moment gradient descent."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ParamStore


class OptimError(ValueError):
    pass


@dataclass
class AdamState:
    """First/second moment estimates plus step counter and hyperparameters."""

    m: np.ndarray
    v: np.ndarray
    t: int = 0
    lr: float = 2e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_store(cls, store: ParamStore, lr: float = 2e-4, beta1: float = 0.9,
                  beta2: float = 0.999, eps: float = 1e-8) -> "AdamState":
        return cls(m=np.zeros(store.size), v=np.zeros(store.size),
                   lr=lr, beta1=beta1, beta2=beta2, eps=eps)


def adam_step(params: ParamStore, grads: np.ndarray, state: AdamState) -> tuple[ParamStore, AdamState]:
    """One in-place update of `params`; returns (params, state) for chaining.

    Rejects non-finite gradients, naming the parameter slice that produced
    them so training failures point at a head rather than a flat index.
    """
    grads = np.asarray(grads, dtype=np.float64)
    if grads.shape != (params.size,):
        raise OptimError(f"gradient length {grads.shape} does not match {params.size} parameters")
    if state.m.shape != grads.shape or state.v.shape != grads.shape:
        raise OptimError("optimizer state length does not match parameter vector")
    bad = ~np.isfinite(grads)
    if bad.any():
        idx = int(np.argmax(bad))
        raise OptimError(f"non-finite gradient in slice {params.slice_of_index(idx)!r} (flat index {idx})")

    state.t += 1
    state.m *= state.beta1
    state.m += (1.0 - state.beta1) * grads
    state.v *= state.beta2
    state.v += (1.0 - state.beta2) * grads * grads
    mhat = state.m / (1.0 - state.beta1 ** state.t)
    vhat = state.v / (1.0 - state.beta2 ** state.t)
    params.flat[:] = params.flat - state.lr * mhat / (np.sqrt(vhat) + state.eps)
    return params, state

