"""Diagonal Gaussian distribution utilities.

All functions accept engine Nodes or plain arrays for mean/log-variance;
outputs are Nodes so losses stay differentiable, and callers in
evaluation paths read ``.value`` (or run under ``no_grad``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import engine as en
from .engine import Node

_LOG_2PI = float(np.log(2.0 * np.pi))


class GaussError(ValueError):
    pass


@dataclass
class DiagGaussian:
    """Mean and log-variance, elementwise; shapes must match."""

    mean: object  # Node | np.ndarray
    logvar: object

    def __post_init__(self):
        if en.value_of(self.mean).shape != en.value_of(self.logvar).shape:
            raise GaussError(
                f"mean shape {en.value_of(self.mean).shape} != logvar shape "
                f"{en.value_of(self.logvar).shape}"
            )

    @property
    def mean_value(self) -> np.ndarray:
        return en.value_of(self.mean)

    @property
    def logvar_value(self) -> np.ndarray:
        return en.value_of(self.logvar)

    @property
    def dim(self) -> int:
        return en.value_of(self.mean).shape[-1]


def _check_dims(a, b, what: str):
    if en.value_of(a).shape != en.value_of(b).shape:
        raise GaussError(f"{what}: shape {en.value_of(a).shape} vs {en.value_of(b).shape}")


def gauss_kl(q: DiagGaussian, p: DiagGaussian) -> Node:
    """Closed-form KL(q || p) for diagonal Gaussians, summed over all dims.

    KL = 1/2 * sum( exp(lq - lp) + (mq - mp)^2 * exp(-lp) - 1 + lp - lq ).
    """
    _check_dims(q.mean, p.mean, "gauss_kl mean")
    _check_dims(q.logvar, p.logvar, "gauss_kl logvar")
    dlog = en.sub(p.logvar, q.logvar)
    var_ratio = en.exp(en.neg(dlog))
    dmean = en.sub(q.mean, p.mean)
    maha = en.mul(en.square(dmean), en.exp(en.neg(en.as_node(p.logvar))))
    terms = en.add(en.add(var_ratio, maha), en.sub(dlog, 1.0))
    return en.mul(en.sum_(terms), 0.5)


def gauss_nll(x, d: DiagGaussian) -> Node:
    """Negative log-density of x under d, summed over all dims."""
    _check_dims(x, d.mean, "gauss_nll")
    dx = en.sub(x, d.mean)
    maha = en.mul(en.square(dx), en.exp(en.neg(en.as_node(d.logvar))))
    terms = en.add(en.add(maha, en.as_node(d.logvar)), _LOG_2PI)
    return en.mul(en.sum_(terms), 0.5)


def gauss_nll_rows(x, d: DiagGaussian) -> Node:
    """Per-row negative log-density for 2-D inputs (one Gaussian per row)."""
    _check_dims(x, d.mean, "gauss_nll_rows")
    dx = en.sub(x, d.mean)
    maha = en.mul(en.square(dx), en.exp(en.neg(en.as_node(d.logvar))))
    terms = en.add(en.add(maha, en.as_node(d.logvar)), _LOG_2PI)
    return en.mul(en.sum_(terms, axis=-1), 0.5)


def gauss_kl_rows(q: DiagGaussian, p: DiagGaussian) -> Node:
    """Per-row KL for 2-D mean/logvar (one Gaussian per row)."""
    _check_dims(q.mean, p.mean, "gauss_kl_rows mean")
    _check_dims(q.logvar, p.logvar, "gauss_kl_rows logvar")
    dlog = en.sub(p.logvar, q.logvar)
    var_ratio = en.exp(en.neg(dlog))
    dmean = en.sub(q.mean, p.mean)
    maha = en.mul(en.square(dmean), en.exp(en.neg(en.as_node(p.logvar))))
    terms = en.add(en.add(var_ratio, maha), en.sub(dlog, 1.0))
    return en.mul(en.sum_(terms, axis=-1), 0.5)


def gauss_reparam_sample(d: DiagGaussian, noise) -> Node:
    """mean + exp(logvar/2) * noise; differentiable in mean and logvar.

    noise may carry extra leading axes (a batch of draws) as long as the
    trailing dimension matches the distribution.
    """
    nv = en.value_of(noise)
    mv = en.value_of(d.mean)
    if nv.shape[-1:] != mv.shape[-1:]:
        raise GaussError(f"gauss_reparam_sample: noise dim {nv.shape} vs mean {mv.shape}")
    try:
        np.broadcast_shapes(nv.shape, mv.shape)
    except ValueError:
        raise GaussError(f"gauss_reparam_sample: noise dim {nv.shape} vs mean {mv.shape}") from None
    std = en.exp(en.mul(en.as_node(d.logvar), 0.5))
    return en.add(d.mean, en.mul(std, noise))


def logsumexp(values) -> float:
    """Shift-stabilized log(sum(exp(values))) of a non-empty vector.

    Returns -inf when every entry is -inf; exact for a single entry.
    """
    v = np.asarray(en.value_of(values), dtype=np.float64).ravel()
    if v.size == 0:
        raise GaussError("logsumexp of empty input")
    hi = np.max(v)
    if not np.isfinite(hi):
        if hi == -np.inf:
            return float("-inf")
        return float(hi)
    return float(hi + np.log(np.exp(v - hi).sum()))
