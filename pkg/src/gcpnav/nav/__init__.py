"""Multi-room navigation world: layout, simulator, data generation."""

from .dataset import (
    DataGenConfig,
    Dataset,
    DatasetError,
    Trajectory,
    denormalize,
    generate_dataset,
    load_dataset,
    replay_error,
    sample_free_point,
    save_dataset,
)
from .layout import Door, Layout, build_layout, flood_fill_rooms
from .prm import GenerationError, PrmConfig, enumerate_room_paths, prm_generate_path
from .sim import EnvState, clip_norm, env_step, step_positions

__all__ = [
    "DataGenConfig",
    "Dataset",
    "DatasetError",
    "Door",
    "EnvState",
    "GenerationError",
    "Layout",
    "PrmConfig",
    "Trajectory",
    "build_layout",
    "clip_norm",
    "denormalize",
    "enumerate_room_paths",
    "env_step",
    "flood_fill_rooms",
    "generate_dataset",
    "load_dataset",
    "prm_generate_path",
    "replay_error",
    "sample_free_point",
    "save_dataset",
    "step_positions",
]
