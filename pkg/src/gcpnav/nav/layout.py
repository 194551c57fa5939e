"""Multi-room grid world geometry.

Rooms are unit squares on an R x C grid; world coordinates span
[0, C] x [0, R] with x along columns and y along rows.  Every shared wall
between adjacent rooms carries exactly one door gap at a seeded-random
position, so the room graph is connected by construction (and verified by
flood fill anyway).  Walls are zero-thickness axis-aligned segments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DOOR_WIDTH = 0.30
DOOR_EDGE_MARGIN = 0.10  # gap kept this far from wall ends

_EPS = 1e-12


@dataclass(frozen=True)
class Door:
    room_a: tuple[int, int]  # (row, col)
    room_b: tuple[int, int]
    orientation: str  # "v" for a vertical shared wall, "h" for horizontal
    center: float  # position of the gap center along the wall
    width: float
    midpoint: tuple[float, float]


@dataclass
class Layout:
    rows: int
    cols: int
    seed: int
    door_width: float
    # vertical walls: (x, y_lo, y_hi); horizontal walls: (y, x_lo, x_hi)
    vwalls: np.ndarray = field(repr=False)
    hwalls: np.ndarray = field(repr=False)
    doors: list[Door] = field(repr=False)

    @property
    def world_size(self) -> np.ndarray:
        return np.array([self.cols, self.rows], dtype=np.float64)

    @property
    def n_rooms(self) -> int:
        return self.rows * self.cols

    def room_of(self, point) -> tuple[int, int]:
        x, y = float(point[0]), float(point[1])
        c = min(max(int(np.floor(x)), 0), self.cols - 1)
        r = min(max(int(np.floor(y)), 0), self.rows - 1)
        return r, c

    def door_between(self, room_a, room_b) -> Door:
        key = frozenset((tuple(room_a), tuple(room_b)))
        for d in self.doors:
            if frozenset((d.room_a, d.room_b)) == key:
                return d
        raise KeyError(f"no door between {room_a} and {room_b}")

    def segments(self) -> np.ndarray:
        """All wall segments as (x1, y1, x2, y2) rows."""
        v = np.column_stack([self.vwalls[:, 0], self.vwalls[:, 1], self.vwalls[:, 0], self.vwalls[:, 2]])
        h = np.column_stack([self.hwalls[:, 1], self.hwalls[:, 0], self.hwalls[:, 2], self.hwalls[:, 0]])
        return np.vstack([v, h]) if len(v) or len(h) else np.zeros((0, 4))

    def room_neighbors(self, room) -> list[tuple[int, int]]:
        r, c = room
        out = []
        for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            rr, cc = r + dr, c + dc
            if 0 <= rr < self.rows and 0 <= cc < self.cols:
                out.append((rr, cc))
        return out


def _split_wall(lo: float, hi: float, gap_center: float, gap_width: float) -> list[tuple[float, float]]:
    a, b = gap_center - gap_width / 2, gap_center + gap_width / 2
    pieces = []
    if a - lo > _EPS:
        pieces.append((lo, a))
    if hi - b > _EPS:
        pieces.append((b, hi))
    return pieces


def build_layout(rows: int, cols: int, seed: int, door_width: float = DOOR_WIDTH) -> Layout:
    """Deterministic layout for the given grid shape and seed."""
    if rows < 1 or cols < 1:
        raise ValueError(f"grid must be at least 1x1, got {rows}x{cols}")
    rng = np.random.default_rng([rows, cols, seed])

    vwalls: list[tuple[float, float, float]] = [(0.0, 0.0, float(rows)), (float(cols), 0.0, float(rows))]
    hwalls: list[tuple[float, float, float]] = [(0.0, 0.0, float(cols)), (float(rows), 0.0, float(cols))]
    doors: list[Door] = []

    margin = DOOR_EDGE_MARGIN + door_width / 2
    # vertical shared walls between (r, c) and (r, c+1)
    for r in range(rows):
        for c in range(cols - 1):
            x = float(c + 1)
            center = float(rng.uniform(r + margin, r + 1 - margin))
            for lo, hi in _split_wall(r, r + 1, center, door_width):
                vwalls.append((x, lo, hi))
            doors.append(Door((r, c), (r, c + 1), "v", center, door_width, (x, center)))
    # horizontal shared walls between (r, c) and (r+1, c)
    for r in range(rows - 1):
        for c in range(cols):
            y = float(r + 1)
            center = float(rng.uniform(c + margin, c + 1 - margin))
            for lo, hi in _split_wall(c, c + 1, center, door_width):
                hwalls.append((y, lo, hi))
            doors.append(Door((r, c), (r + 1, c), "h", center, door_width, (center, y)))

    layout = Layout(
        rows=rows,
        cols=cols,
        seed=seed,
        door_width=door_width,
        vwalls=np.array(vwalls, dtype=np.float64).reshape(-1, 3),
        hwalls=np.array(hwalls, dtype=np.float64).reshape(-1, 3),
        doors=doors,
    )
    reached = flood_fill_rooms(layout)
    if len(reached) != rows * cols:
        raise AssertionError(f"layout not connected: reached {len(reached)} of {rows * cols} rooms")
    return layout


def flood_fill_rooms(layout: Layout, start=(0, 0)) -> set:
    """Rooms reachable from `start` over the door graph."""
    adj: dict[tuple[int, int], set] = {}
    for d in layout.doors:
        adj.setdefault(d.room_a, set()).add(d.room_b)
        adj.setdefault(d.room_b, set()).add(d.room_a)
    seen = {start}
    frontier = [start]
    while frontier:
        room = frontier.pop()
        for nxt in adj.get(room, ()):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def first_hit(layout: Layout, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Earliest crossing parameter t in (0, 1] for motions p->q vs any wall.

    p, q are (N, 2). Returns (N,) with inf where the motion is clear.
    Walls are axis-aligned so crossings reduce to sign straddles.
    """
    p = np.atleast_2d(p)
    q = np.atleast_2d(q)
    n = p.shape[0]
    t_best = np.full(n, np.inf)

    with np.errstate(divide="ignore", invalid="ignore"):
        if len(layout.vwalls):
            x, lo, hi = layout.vwalls[:, 0], layout.vwalls[:, 1], layout.vwalls[:, 2]
            fp = p[:, 0][:, None] - x[None, :]
            fq = q[:, 0][:, None] - x[None, :]
            crossing = ((fp > 0) & (fq <= 0)) | ((fp < 0) & (fq >= 0))
            t = fp / (fp - fq)
            y_at = p[:, 1][:, None] + t * (q[:, 1] - p[:, 1])[:, None]
            valid = crossing & (y_at >= lo[None, :] - _EPS) & (y_at <= hi[None, :] + _EPS)
            t = np.where(valid, t, np.inf)
            t_best = np.minimum(t_best, t.min(axis=1))

        if len(layout.hwalls):
            y, lo, hi = layout.hwalls[:, 0], layout.hwalls[:, 1], layout.hwalls[:, 2]
            fp = p[:, 1][:, None] - y[None, :]
            fq = q[:, 1][:, None] - y[None, :]
            crossing = ((fp > 0) & (fq <= 0)) | ((fp < 0) & (fq >= 0))
            t = fp / (fp - fq)
            x_at = p[:, 0][:, None] + t * (q[:, 0] - p[:, 0])[:, None]
            valid = crossing & (x_at >= lo[None, :] - _EPS) & (x_at <= hi[None, :] + _EPS)
            t = np.where(valid, t, np.inf)
            t_best = np.minimum(t_best, t.min(axis=1))

    return t_best


def on_any_wall(layout: Layout, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Boolean mask: point lies on a wall segment (within tol)."""
    points = np.atleast_2d(points)
    hit = np.zeros(points.shape[0], dtype=bool)
    if len(layout.vwalls):
        x, lo, hi = layout.vwalls[:, 0], layout.vwalls[:, 1], layout.vwalls[:, 2]
        near = (np.abs(points[:, 0][:, None] - x[None, :]) <= tol) & \
            (points[:, 1][:, None] >= lo[None, :] - tol) & (points[:, 1][:, None] <= hi[None, :] + tol)
        hit |= near.any(axis=1)
    if len(layout.hwalls):
        y, lo, hi = layout.hwalls[:, 0], layout.hwalls[:, 1], layout.hwalls[:, 2]
        near = (np.abs(points[:, 1][:, None] - y[None, :]) <= tol) & \
            (points[:, 0][:, None] >= lo[None, :] - tol) & (points[:, 0][:, None] <= hi[None, :] + tol)
        hit |= near.any(axis=1)
    return hit
