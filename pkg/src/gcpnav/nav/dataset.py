"""Trajectory datasets: generation, validation and binary persistence.

File format (version GCPDS1):
    line 1: ``GCPDS1``
    line 2: JSON header ``{"version": 1, "rows", "cols", "layout_seed",
            "count", "meta": {...}}`` -- meta echoes the generation config,
            master seed and split fractions
    line 3: ``BINARY``
    then, per trajectory: ``<u32 T little-endian>``, observations as
    T*2 float64 little-endian (row-major), actions as (T-1)*2 float64
    little-endian (row-major).

Observations are positions normalized to [0, 1]^2 by the world size;
actions are world-unit displacement commands bounded by the simulator's
max step, stored exactly as issued so that replaying them through
``env_step`` reproduces every stored observation.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .layout import Layout, build_layout, on_any_wall
from .prm import GenerationError, PrmConfig, prm_generate_path
from .sim import step_positions

_MAGIC = b"GCPDS1"


class DatasetError(ValueError):
    """Malformed dataset file; message carries the byte offset."""


@dataclass
class Trajectory:
    observations: np.ndarray  # (T, 2) in [0, 1]^2
    actions: np.ndarray  # (T-1, 2), world units

    def __post_init__(self):
        self.observations = np.asarray(self.observations, dtype=np.float64)
        self.actions = np.asarray(self.actions, dtype=np.float64)
        t = len(self.observations)
        if t < 2:
            raise ValueError(f"trajectory needs at least 2 observations, got {t}")
        if self.actions.shape != (t - 1, 2):
            raise ValueError(f"actions shape {self.actions.shape} does not match T={t}")
        if self.observations.min() < -1e-12 or self.observations.max() > 1 + 1e-12:
            raise ValueError("observations leave the unit square")

    @property
    def length(self) -> int:
        return len(self.observations)


@dataclass
class Dataset:
    trajectories: list[Trajectory]
    rows: int
    cols: int
    layout_seed: int
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.trajectories)

    def layout(self) -> Layout:
        return build_layout(self.rows, self.cols, self.layout_seed)

    def split_indices(self) -> tuple[np.ndarray, np.ndarray]:
        """Deterministic train/val split from the recorded fractions and seed."""
        fr = self.meta.get("split_fractions", {"train": 0.95, "val": 0.05})
        seed = int(self.meta.get("split_seed", 0))
        perm = np.random.default_rng(seed).permutation(len(self.trajectories))
        n_val = max(1, int(round(fr.get("val", 0.05) * len(perm)))) if len(perm) > 1 else 0
        return perm[n_val:], perm[:n_val]


@dataclass
class DataGenConfig:
    rows: int = 3
    cols: int = 3
    layout_seed: int = 0
    count: int = 100
    t_max: int = 100
    policy: str = "prm"  # prm | random
    seed: int = 0
    noise: float = 0.02
    max_step: float = 0.1
    room_margin: float = 0.05
    split_fractions: dict = field(default_factory=lambda: {"train": 0.95, "val": 0.05})

    def prm_config(self) -> PrmConfig:
        return PrmConfig(max_step=self.max_step, noise=self.noise)


def sample_free_point(layout: Layout, rng: np.random.Generator, margin: float = 0.05) -> np.ndarray:
    """Uniform point in the world, kept off walls by rejection."""
    for _ in range(1000):
        p = rng.uniform([margin, margin], [layout.cols - margin, layout.rows - margin])
        frac = p - np.floor(p)
        if np.all(frac > margin) and np.all(frac < 1 - margin) and not on_any_wall(layout, p[None, :])[0]:
            return p
    raise GenerationError("could not sample a collision-free point")


def _normalize(layout: Layout, world: np.ndarray) -> np.ndarray:
    return world / layout.world_size


def denormalize(layout: Layout, obs: np.ndarray) -> np.ndarray:
    return np.asarray(obs) * layout.world_size


def random_walk_path(layout: Layout, start: np.ndarray, seed: int, t_max: int,
                     max_step: float = 0.1) -> tuple[np.ndarray, np.ndarray]:
    """Uniform-action exploration for exactly t_max observations."""
    rng = np.random.default_rng(seed)
    pos = start.copy()
    obs = [pos.copy()]
    acts = []
    for _ in range(t_max - 1):
        theta = rng.uniform(0, 2 * np.pi)
        r = max_step * np.sqrt(rng.uniform())
        a = np.array([r * np.cos(theta), r * np.sin(theta)])
        pos = step_positions(layout, pos[None, :], a[None, :], max_step=max_step)[0]
        acts.append(a)
        obs.append(pos.copy())
    return np.array(obs), np.array(acts)


def generate_trajectory(layout: Layout, cfg: DataGenConfig, seed: int) -> Trajectory:
    rng = np.random.default_rng(seed)
    start = sample_free_point(layout, rng, cfg.room_margin)
    if cfg.policy == "random":
        obs, acts = random_walk_path(layout, start, seed + 1, cfg.t_max, cfg.max_step)
    elif cfg.policy == "prm":
        goal = sample_free_point(layout, rng, cfg.room_margin)
        obs, acts, _ = prm_generate_path(layout, start, goal, seed + 1, cfg.t_max, cfg.prm_config())
    else:
        raise ValueError(f"unknown policy {cfg.policy!r}")
    return Trajectory(_normalize(layout, obs), acts)


def generate_dataset(cfg: DataGenConfig) -> Dataset:
    """Seed-derived, order-independent batch of trajectories."""
    layout = build_layout(cfg.rows, cfg.cols, cfg.layout_seed)
    seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(cfg.seed).spawn(cfg.count)]
    trajectories = []
    for i, s in enumerate(seeds):
        try:
            trajectories.append(generate_trajectory(layout, cfg, s))
        except GenerationError as e:
            raise GenerationError(f"trajectory {i}: {e}") from e
    meta = {
        "policy": cfg.policy,
        "t_max": cfg.t_max,
        "noise": cfg.noise,
        "max_step": cfg.max_step,
        "master_seed": cfg.seed,
        "split_fractions": dict(cfg.split_fractions),
        "split_seed": cfg.seed,
    }
    return Dataset(trajectories, cfg.rows, cfg.cols, cfg.layout_seed, meta)


def replay_error(dataset_or_layout, traj: Trajectory) -> float:
    """Max deviation between stored observations and an action replay."""
    layout = dataset_or_layout if isinstance(dataset_or_layout, Layout) else dataset_or_layout.layout()
    world = denormalize(layout, traj.observations)
    pos = world[0]
    worst = 0.0
    for t, a in enumerate(traj.actions):
        pos = step_positions(layout, pos[None, :], a[None, :])[0]
        worst = max(worst, float(np.linalg.norm(pos - world[t + 1])))
    return worst


# -- persistence --------------------------------------------------------------


def save_dataset(path, ds: Dataset) -> None:
    header = {
        "version": 1,
        "rows": ds.rows,
        "cols": ds.cols,
        "layout_seed": ds.layout_seed,
        "count": len(ds.trajectories),
        "meta": ds.meta,
    }
    with open(path, "wb") as f:
        f.write(_MAGIC + b"\n")
        f.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        f.write(b"BINARY\n")
        for tr in ds.trajectories:
            f.write(struct.pack("<I", tr.length))
            f.write(tr.observations.astype("<f8").tobytes())
            f.write(tr.actions.astype("<f8").tobytes())


def load_dataset(path) -> Dataset:
    with open(path, "rb") as f:
        magic = f.readline()
        if magic.strip() != _MAGIC:
            raise DatasetError(f"bad magic at byte 0: {magic[:16]!r}")
        header_line = f.readline()
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as e:
            raise DatasetError(f"bad JSON header at byte {len(magic) + 1}: {e}") from e
        tag = f.readline()
        if tag.strip() != b"BINARY":
            raise DatasetError(f"missing BINARY separator at byte {len(magic) + len(header_line)}")
        trajectories = []
        for i in range(header["count"]):
            off = f.tell()
            raw = f.read(4)
            if len(raw) != 4:
                raise DatasetError(f"truncated at byte {off}: trajectory {i} length missing")
            (t,) = struct.unpack("<I", raw)
            if t < 2:
                raise DatasetError(f"invalid length {t} for trajectory {i} at byte {off}")
            need = t * 2 * 8 + (t - 1) * 2 * 8
            blob = f.read(need)
            if len(blob) != need:
                raise DatasetError(f"truncated at byte {off + 4}: trajectory {i} payload")
            obs = np.frombuffer(blob[: t * 16], dtype="<f8").reshape(t, 2).copy()
            acts = np.frombuffer(blob[t * 16 :], dtype="<f8").reshape(t - 1, 2).copy()
            trajectories.append(Trajectory(obs, acts))
        trailing = f.read(1)
        if trailing:
            raise DatasetError(f"unexpected trailing bytes at {f.tell() - 1}")
    return Dataset(trajectories, header["rows"], header["cols"], header["layout_seed"], header.get("meta", {}))
