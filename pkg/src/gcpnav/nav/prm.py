"""Suboptimal goal-reaching trajectory generation via probabilistic roadmaps.

Each trajectory commits to a uniformly sampled loop-free room sequence,
builds a roadmap restricted to that corridor, walks the shortest roadmap
path with noisy bounded steps, and subsamples to the length cap when the
raw walk is too long.  Rooms are convex, so roadmap edges that stay
within a room (or cross a door midpoint between consecutive corridor
rooms) are collision-free by construction; the roadmap graph is layered
and directed forward along the corridor, which is what guarantees the
no-repeated-room property of the realized paths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra
from scipy.spatial.distance import cdist

from .layout import Layout
from .sim import clip_norm, step_positions

ROOM_SEQ_CAP = 12  # max rooms per sampled corridor
ROOM_DETOUR = 2  # corridors may exceed the shortest room path by this many rooms
PRM_NODES = 200  # roadmap nodes per corridor (before per-room minimum)
PRM_MIN_NODES_PER_ROOM = 40
PRM_RADIUS = 0.4  # connection radius, room units
WAYPOINT_NOISE = 0.02  # per-step Gaussian action noise, room units
REACH_TOL = 0.05  # waypoint switch distance; also the goal tolerance
ROOM_MARGIN = 0.05  # roadmap samples stay this far inside room walls


class GenerationError(RuntimeError):
    """Raised when trajectory generation exhausts its retry budget."""


@dataclass
class PrmConfig:
    max_step: float = 0.1
    room_seq_cap: int = ROOM_SEQ_CAP
    room_detour: int = ROOM_DETOUR
    nodes: int = PRM_NODES
    min_nodes_per_room: int = PRM_MIN_NODES_PER_ROOM
    radius: float = PRM_RADIUS
    noise: float = WAYPOINT_NOISE
    reach_tol: float = REACH_TOL
    retries: int = 8


_room_path_cache: dict = {}


def enumerate_room_paths(rows: int, cols: int, start, goal, cap: int = ROOM_SEQ_CAP) -> list[tuple]:
    """All simple room paths from start to goal with at most `cap` rooms.

    Depth-first with a Manhattan-distance bound; results are cached per
    (grid shape, endpoints, cap) since adjacency depends only on the grid.
    """
    start, goal = tuple(start), tuple(goal)
    key = (rows, cols, start, goal, cap)
    if key in _room_path_cache:
        return _room_path_cache[key]

    def neighbors(room):
        r, c = room
        for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            rr, cc = r + dr, c + dc
            if 0 <= rr < rows and 0 <= cc < cols:
                yield (rr, cc)

    paths: list[tuple] = []
    path = [start]
    onpath = {start}

    def dfs(room):
        if room == goal:
            paths.append(tuple(path))
            return
        remaining = cap - len(path)
        for nxt in neighbors(room):
            if nxt in onpath:
                continue
            dist = abs(nxt[0] - goal[0]) + abs(nxt[1] - goal[1])
            if dist + 1 > remaining:
                continue
            path.append(nxt)
            onpath.add(nxt)
            dfs(nxt)
            path.pop()
            onpath.discard(nxt)

    dfs(start)
    _room_path_cache[key] = paths
    return paths


def sample_room_sequence(layout: Layout, start_room, goal_room, rng: np.random.Generator,
                         cap: int = ROOM_SEQ_CAP, detour: int = ROOM_DETOUR) -> tuple:
    """Uniform draw among simple room paths within `detour` rooms of the shortest.

    The detour budget keeps corridors representable within the trajectory
    length cap while still yielding several distinct sequences per endpoint
    pair (the source of multimodality in the data).
    """
    paths = enumerate_room_paths(layout.rows, layout.cols, start_room, goal_room, cap)
    if not paths:
        raise GenerationError(f"no room path from {start_room} to {goal_room} within {cap} rooms")
    shortest = min(len(p) for p in paths)
    pool = [p for p in paths if len(p) <= shortest + detour]
    return pool[int(rng.integers(len(pool)))]


def _sample_in_room(room, n: int, rng: np.random.Generator, margin: float = ROOM_MARGIN) -> np.ndarray:
    r, c = room
    xs = rng.uniform(c + margin, c + 1 - margin, n)
    ys = rng.uniform(r + margin, r + 1 - margin, n)
    return np.column_stack([xs, ys])


def _door_offset_points(layout: Layout, room_a, room_b, offset: float = 0.08):
    """Door midpoint plus one helper point nudged into each room."""
    door = layout.door_between(room_a, room_b)
    mid = np.array(door.midpoint)
    if door.orientation == "v":
        step = np.array([offset, 0.0])
    else:
        step = np.array([0.0, offset])
    sign = 1.0 if (room_b[1] - room_a[1] + room_b[0] - room_a[0]) > 0 else -1.0
    into_b = mid + sign * step
    into_a = mid - sign * step
    if layout.room_of(into_a) != tuple(room_a):
        into_a, into_b = into_b, into_a
    return mid, into_a, into_b


def plan_waypoints(layout: Layout, start: np.ndarray, goal: np.ndarray, corridor: tuple,
                   rng: np.random.Generator, cfg: PrmConfig) -> np.ndarray:
    """Shortest path on a corridor-restricted layered roadmap.

    Layer k holds samples in corridor room k; door nodes sit between
    layers and cross-layer edges point forward only, so any graph path
    visits the corridor rooms in order.
    """
    n_rooms = len(corridor)
    total = max(cfg.nodes, cfg.min_nodes_per_room * n_rooms)
    per_room = int(np.ceil(total / n_rooms))

    points = [start[None, :]]
    layers = [np.array([0])]
    for k, room in enumerate(corridor):
        pts = _sample_in_room(room, per_room, rng)
        points.append(pts)
        layers.append(np.full(len(pts), k))
    # door nodes live between layers k and k+1; helpers join each side's layer
    door_layer = []
    for k in range(n_rooms - 1):
        mid, into_a, into_b = _door_offset_points(layout, corridor[k], corridor[k + 1])
        points.append(np.array([into_a]))
        layers.append(np.array([k]))
        points.append(np.array([into_b]))
        layers.append(np.array([k + 1]))
        door_layer.append(mid)
    if door_layer:
        points.append(np.array(door_layer))
        layers.append(np.full(len(door_layer), -1))  # placeholder, handled below
    points.append(goal[None, :])
    layers.append(np.array([n_rooms - 1]))

    pts = np.vstack(points)
    layer = np.concatenate(layers)
    n = len(pts)
    goal_idx = n - 1
    door_idx_start = n - 1 - (n_rooms - 1)
    door_of = {door_idx_start + k: k for k in range(n_rooms - 1)}  # node index -> boundary k

    dist = cdist(pts, pts)
    rows_e: list[int] = []
    cols_e: list[int] = []
    weights: list[float] = []
    within = dist <= cfg.radius
    np.fill_diagonal(within, False)
    ii, jj = np.nonzero(within)
    for i, j in zip(ii.tolist(), jj.tolist()):
        li = door_of.get(i)
        lj = door_of.get(j)
        if li is not None and lj is not None:
            keep = lj == li + 1  # straight through the shared room
        elif li is not None:
            keep = layer[j] == li + 1  # door -> next room
        elif lj is not None:
            keep = layer[i] == lj  # this room -> its exit door
        else:
            keep = layer[i] == layer[j]  # same room; (j, i) adds the reverse
        if keep:
            rows_e.append(i)
            cols_e.append(j)
            weights.append(dist[i, j])

    graph = coo_matrix((weights, (rows_e, cols_e)), shape=(n, n)).tocsr()
    costs, pred = dijkstra(graph, directed=True, indices=0, return_predecessors=True)
    if not np.isfinite(costs[goal_idx]):
        raise GenerationError("roadmap did not connect start to goal")
    order = [goal_idx]
    while order[-1] != 0:
        prev = pred[order[-1]]
        if prev < 0:
            raise GenerationError("roadmap predecessor chain broken")
        order.append(int(prev))
    return pts[order[::-1]]


def _walk_waypoints(layout: Layout, waypoints: np.ndarray, rng: np.random.Generator,
                    cfg: PrmConfig, hard_cap: int) -> tuple[np.ndarray, np.ndarray] | None:
    """Follow waypoints with noisy bounded steps; None on stall/overrun."""
    pos = waypoints[0].copy()
    obs = [pos.copy()]
    acts = []
    for w in waypoints[1:]:
        stall = 0
        while float(np.linalg.norm(w - pos)) > cfg.reach_tol:
            a = clip_norm(w - pos, cfg.max_step)
            if cfg.noise > 0:
                a = clip_norm(a + rng.normal(0.0, cfg.noise, 2), cfg.max_step)
            new_pos = step_positions(layout, pos[None, :], a[None, :], max_step=cfg.max_step)[0]
            moved = float(np.linalg.norm(new_pos - pos))
            acts.append(a)
            obs.append(new_pos.copy())
            pos = new_pos
            if len(obs) > hard_cap:
                return None
            stall = stall + 1 if moved < 1e-4 else 0
            if stall >= 10:
                return None
    return np.array(obs), np.array(acts) if acts else np.zeros((0, 2))


def _arc_length_resample(path: np.ndarray, n: int) -> np.ndarray:
    """n points linearly interpolated along the polyline at even arc length."""
    seg = np.linalg.norm(np.diff(path, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.linspace(0.0, s[-1], n)
    out = np.empty((n, 2))
    out[:, 0] = np.interp(targets, s, path[:, 0])
    out[:, 1] = np.interp(targets, s, path[:, 1])
    return out


def _reexecute(layout: Layout, targets: np.ndarray, cfg: PrmConfig) -> tuple[np.ndarray, np.ndarray]:
    """Noise-free pass chasing a fixed target schedule; one action per target."""
    pos = targets[0].copy()
    obs = [pos.copy()]
    acts = []
    for tgt in targets[1:]:
        a = clip_norm(tgt - pos, cfg.max_step)
        pos = step_positions(layout, pos[None, :], a[None, :], max_step=cfg.max_step)[0]
        acts.append(a)
        obs.append(pos.copy())
    return np.array(obs), np.array(acts)


def prm_generate_path(layout: Layout, start: np.ndarray, goal: np.ndarray, seed: int,
                      t_max: int, cfg: PrmConfig | None = None) -> tuple[np.ndarray, np.ndarray, tuple]:
    """World-coordinate observations/actions of one suboptimal goal-reaching walk.

    Returns (observations (T,2), actions (T-1,2), room_sequence); T <= t_max
    and the final observation lands within the reach tolerance of the goal.
    Raises GenerationError when the retry budget is exhausted.
    """
    cfg = cfg or PrmConfig()
    start = np.asarray(start, dtype=np.float64)
    goal = np.asarray(goal, dtype=np.float64)
    rng = np.random.default_rng(seed)

    if float(np.linalg.norm(goal - start)) <= cfg.reach_tol:
        obs = np.vstack([start, start])
        return obs, np.zeros((1, 2)), (layout.room_of(start),)

    start_room = layout.room_of(start)
    goal_room = layout.room_of(goal)
    hard_cap = max(4 * t_max, 400)
    last_err = "no attempt"
    for attempt in range(cfg.retries):
        try:
            corridor = sample_room_sequence(layout, start_room, goal_room, rng,
                                            cfg.room_seq_cap, cfg.room_detour)
            waypoints = plan_waypoints(layout, start, goal, corridor, rng, cfg)
        except GenerationError as e:
            last_err = str(e)
            continue
        walked = _walk_waypoints(layout, waypoints, rng, cfg, hard_cap)
        if walked is None:
            last_err = "walk stalled or exceeded the hard step cap"
            continue
        obs, acts = walked
        if len(obs) > t_max:
            total_len = float(np.linalg.norm(np.diff(obs, axis=0), axis=1).sum())
            if total_len > 0.95 * cfg.max_step * (t_max - 1):
                last_err = f"path length {total_len:.2f} cannot fit in {t_max} bounded steps"
                continue
            targets = _arc_length_resample(obs, t_max)
            obs, acts = _reexecute(layout, targets, cfg)
            if float(np.linalg.norm(obs[-1] - goal)) > cfg.reach_tol:
                last_err = "resampled path failed to reach the goal"
                continue
        if len(obs) < 2:
            obs = np.vstack([obs[0], obs[0]])
            acts = np.zeros((1, 2))
        return obs, acts, corridor
    raise GenerationError(
        f"PRM generation failed after {cfg.retries} attempts "
        f"({start_room} -> {goal_room}): {last_err}"
    )
