"""Shared test oracles: central finite differences over flat parameter vectors."""

from __future__ import annotations

import numpy as np


def finite_difference_grad(f, x0: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central finite differences of scalar f at x0, one coordinate at a time."""
    x0 = np.asarray(x0, dtype=np.float64)
    g = np.zeros_like(x0)
    for i in range(x0.size):
        xp = x0.copy()
        xm = x0.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (f(xp) - f(xm)) / (2.0 * h)
    return g


def max_rel_error(got: np.ndarray, want: np.ndarray, floor: float = 1e-6) -> float:
    """Max elementwise |got-want| / max(|want|, floor)."""
    got = np.asarray(got, dtype=np.float64)
    want = np.asarray(want, dtype=np.float64)
    denom = np.maximum(np.abs(want), floor)
    return float(np.max(np.abs(got - want) / denom))


def check_store_gradients(store, loss_fn, h: float = 1e-5, tol: float = 1e-4) -> float:
    """Compare reverse-mode gradients of loss_fn(store) against finite differences.

    loss_fn builds a fresh graph from the store's current values and returns
    the scalar loss Node. Returns the max relative error; asserts under tol.
    """
    from gcpnav.numerics import reverse_mode_gradients

    loss = loss_fn(store)
    got = reverse_mode_gradients(store, loss)

    x0 = store.flat.copy()

    def eval_at(x):
        store.set_flat(x)
        val = float(loss_fn(store).value)
        return val

    try:
        want = finite_difference_grad(eval_at, x0, h=h)
    finally:
        store.set_flat(x0)
    err = max_rel_error(got, want)
    assert err < tol, f"gradient mismatch: max relative error {err:.3e} >= {tol:.1e}"
    return err
