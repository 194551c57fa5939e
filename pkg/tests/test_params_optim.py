"""ParamStore storage/serialization and the Adam update rule."""

import numpy as np
import pytest

from gcpnav.numerics import AdamState, OptimError, ParamError, ParamStore, adam_step


def make_store():
    store = ParamStore()
    store.add("a", np.arange(6.0).reshape(2, 3))
    store.add("b", np.array([9.0]))
    return store


def test_slices_disjoint_and_total_length():
    store = make_store()
    assert store.size == 7
    off_a, shape_a = store.layout("a")
    off_b, shape_b = store.layout("b")
    assert off_a == 0 and shape_a == (2, 3)
    assert off_b == 6 and shape_b == (1,)


def test_duplicate_name_rejected():
    store = make_store()
    with pytest.raises(ParamError):
        store.add("a", np.zeros(2))


def test_views_alias_flat_vector():
    store = make_store()
    store.flat[0] = 42.0
    assert store.view("a")[0, 0] == 42.0
    store.view("b")[0] = -1.0
    assert store.flat[6] == -1.0


def test_save_load_roundtrip(tmp_path):
    store = make_store()
    path = tmp_path / "params.gcpps"
    store.save(path, meta={"model": "test", "seed": 3})
    loaded, meta = ParamStore.load(path)
    assert meta == {"model": "test", "seed": 3}
    assert loaded.names() == store.names()
    assert np.array_equal(loaded.flat, store.flat)
    assert loaded.layout("a") == store.layout("a")


def test_load_rejects_truncated_blob(tmp_path):
    store = make_store()
    path = tmp_path / "params.gcpps"
    store.save(path)
    data = path.read_bytes()
    path.write_bytes(data[:-8])
    with pytest.raises(ParamError):
        ParamStore.load(path)


def test_slice_of_index():
    store = make_store()
    assert store.slice_of_index(0) == "a"
    assert store.slice_of_index(6) == "b"
    with pytest.raises(ParamError):
        store.slice_of_index(7)


# -- Adam -------------------------------------------------------------------


def test_zero_gradient_leaves_params_increments_t():
    store = make_store()
    before = store.flat.copy()
    state = AdamState.for_store(store, lr=0.1)
    adam_step(store, np.zeros(store.size), state)
    assert state.t == 1
    assert np.array_equal(store.flat, before)


def test_first_step_moves_by_minus_lr():
    # theta=0, g=1, lr=0.1: bias correction makes mhat=1, vhat=1, so the
    # first step is -lr/(1+eps) ~ -0.1.
    store = ParamStore()
    store.add("theta", np.array([0.0]))
    state = AdamState.for_store(store, lr=0.1)
    adam_step(store, np.array([1.0]), state)
    assert store.flat[0] == pytest.approx(-0.1, rel=1e-6)
    assert state.t == 1


def test_quadratic_loss_decreases_monotonically():
    # f(theta) = theta^2 from theta=1: successive Adam steps with the true
    # gradient reduce f each time at a small learning rate.
    store = ParamStore()
    store.add("theta", np.array([1.0]))
    state = AdamState.for_store(store, lr=0.05)
    losses = [store.flat[0] ** 2]
    for _ in range(10):
        g = 2.0 * store.flat.copy()
        adam_step(store, g, state)
        losses.append(store.flat[0] ** 2)
    assert all(b < a for a, b in zip(losses, losses[1:]))


def test_adam_step_deterministic():
    runs = []
    for _ in range(2):
        store = make_store()
        state = AdamState.for_store(store, lr=0.01)
        adam_step(store, np.arange(store.size, dtype=float), state)
        runs.append(store.flat.copy())
    assert np.array_equal(runs[0], runs[1])


def test_length_mismatch_and_nonfinite_grad_errors():
    store = make_store()
    state = AdamState.for_store(store)
    with pytest.raises(OptimError):
        adam_step(store, np.zeros(3), state)
    bad = np.zeros(store.size)
    bad[6] = np.nan
    with pytest.raises(OptimError, match="'b'"):
        adam_step(store, bad, state)
    assert state.v.min() >= 0.0
