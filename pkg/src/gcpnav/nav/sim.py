"""Point-agent kinematics with wall clamping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .layout import Layout, first_hit

MAX_STEP = 0.1  # default action bound, in room units
COLLISION_MARGIN = 1e-3  # stop this far before a wall contact


@dataclass
class EnvState:
    position: np.ndarray  # (2,) world coordinates
    steps: int = 0


def clip_norm(v: np.ndarray, bound: float) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if n > bound and n > 0:
        return v * (bound / n)
    return v


def step_positions(layout: Layout, positions: np.ndarray, actions: np.ndarray,
                   max_step: float = MAX_STEP, margin: float = COLLISION_MARGIN) -> np.ndarray:
    """Advance a batch of positions by clipped actions, clamping at walls.

    Motion stops `margin` short of the first wall contact; positions that
    start closer than the margin to a wall simply do not advance into it.
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=np.float64))
    actions = np.atleast_2d(np.asarray(actions, dtype=np.float64))
    norms = np.linalg.norm(actions, axis=1)
    scale = np.where(norms > max_step, np.divide(max_step, norms, out=np.ones_like(norms), where=norms > 0), 1.0)
    moves = actions * scale[:, None]
    targets = positions + moves
    t_hit = first_hit(layout, positions, targets)
    move_len = np.linalg.norm(moves, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        t_margin = np.where(move_len > 0, margin / move_len, 0.0)
    t_stop = np.where(np.isfinite(t_hit), np.maximum(t_hit - t_margin, 0.0), 1.0)
    return positions + moves * t_stop[:, None]


def env_step(layout: Layout, state: EnvState, action: np.ndarray,
             max_step: float = MAX_STEP, margin: float = COLLISION_MARGIN) -> EnvState:
    """One collision-resolved step; never raises on contact."""
    new_pos = step_positions(layout, state.position[None, :], np.asarray(action, dtype=np.float64)[None, :],
                             max_step=max_step, margin=margin)[0]
    return EnvState(position=new_pos, steps=state.steps + 1)
