"""Seeded Minesweeper mechanics: lazy safe-first-click mine placement, flood fill, flags."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

# Observable tile codes. The total order OOB < exposed 0..8 < covered < flagged
# is what canonicalization compares by, so these values must not be reshuffled.
TILE_OOB = 0
TILE_COVERED = 10
TILE_FLAGGED = 11
TILE_CHARS = "X012345678CF"

IN_PROGRESS = "in_progress"
WON = "won"
LOST = "lost"

_NEIGHBOR_OFFSETS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


def exposed_code(count: int) -> int:
    """Tile code for an exposed tile showing `count` adjacent mines."""
    return count + 1


def exposed_count(code: int) -> int:
    """Adjacent-mine count shown by an exposed tile code."""
    return code - 1


@dataclass(frozen=True)
class GameConfig:
    """A game setting: board dimensions, mine count and the RNG seed for mine placement."""

    rows: int
    cols: int
    mines: int
    seed: int = 0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("board must be at least 1x1")
        if self.mines < 0:
            raise ValueError("mine count must be non-negative")
        if self.mines > self.rows * self.cols - 1:
            raise ValueError("mines must leave a safe tile for the first click")


class GameState:
    """Mutable state of one game.

    `view` is the observable board with a one-tile TILE_OOB border, so the
    3x3 window around any in-board tile can be sliced without bounds checks.
    `mine` and `adj` stay None until the first reveal places the mines.
    """

    def __init__(self, config: GameConfig, rng: np.random.Generator):
        self.config = config
        self.rng = rng
        self.view = np.zeros((config.rows + 2, config.cols + 2), dtype=np.int8)
        self.view[1:-1, 1:-1] = TILE_COVERED
        self.mine: np.ndarray | None = None
        self.adj: np.ndarray | None = None
        self.status = IN_PROGRESS
        self.plays_made = 0
        self.flags_placed = 0
        self._safe_covered = config.rows * config.cols - config.mines

    def in_bounds(self, r: int, c: int) -> bool:
        return 0 <= r < self.config.rows and 0 <= c < self.config.cols

    def tile_view(self, r: int, c: int) -> int:
        """Observable code at (r, c); TILE_OOB for coordinates outside the board."""
        if not self.in_bounds(r, c):
            return TILE_OOB
        return int(self.view[r + 1, c + 1])

    def is_mined(self, r: int, c: int) -> bool:
        if self.mine is None:
            raise ValueError("mines are not placed before the first reveal")
        return bool(self.mine[r, c])

    def covered_coords(self) -> list[tuple[int, int]]:
        """Coordinates of covered, unflagged tiles."""
        rr, cc = np.nonzero(self.view[1:-1, 1:-1] == TILE_COVERED)
        return list(zip(rr.tolist(), cc.tolist()))


def new_game(config: GameConfig, seed: int | None = None) -> GameState:
    """Start a game with all tiles covered; mines are placed on the first reveal."""
    return GameState(config, np.random.default_rng(config.seed if seed is None else seed))


def game_with_mines(config: GameConfig, mine_coords) -> GameState:
    """Start a game with an explicit mine layout (replay and test tooling).

    Bypasses first-click safety: the caller controls where mines sit.
    """
    coords = list(mine_coords)
    if len(coords) != len(set(coords)):
        raise ValueError("duplicate mine coordinates")
    if len(coords) != config.mines:
        raise ValueError("mine layout does not match config.mines")
    state = GameState(config, np.random.default_rng(config.seed))
    mine = np.zeros((config.rows, config.cols), dtype=bool)
    for r, c in coords:
        if not state.in_bounds(r, c):
            raise ValueError(f"mine coordinate {(r, c)} outside the board")
        mine[r, c] = True
    _install_mines(state, mine)
    return state


def _install_mines(state: GameState, mine: np.ndarray) -> None:
    state.mine = mine
    padded = np.zeros((state.config.rows + 2, state.config.cols + 2), dtype=np.int8)
    padded[1:-1, 1:-1] = mine
    adj = np.zeros((state.config.rows, state.config.cols), dtype=np.int8)
    for dr, dc in _NEIGHBOR_OFFSETS:
        adj += padded[1 + dr : state.config.rows + 1 + dr, 1 + dc : state.config.cols + 1 + dc]
    state.adj = adj


def _place_mines(state: GameState, safe_r: int, safe_c: int) -> None:
    # Uniform sample without replacement over all tiles except the clicked one.
    rows, cols, k = state.config.rows, state.config.cols, state.config.mines
    n = rows * cols
    safe_flat = safe_r * cols + safe_c
    picks = state.rng.choice(n - 1, size=k, replace=False)
    picks = picks + (picks >= safe_flat)
    mine = np.zeros(n, dtype=bool)
    mine[picks] = True
    _install_mines(state, mine.reshape(rows, cols))


def reveal(state: GameState, r: int, c: int) -> bool:
    """Uncover a covered tile. Returns True when a mine was hit (game lost).

    A zero-count tile flood fills its 8-neighborhood recursively; the fill
    never opens flagged tiles and never removes flags.
    """
    if state.status != IN_PROGRESS:
        raise ValueError("cannot reveal on a finished game")
    if not state.in_bounds(r, c):
        raise ValueError(f"reveal outside the board: {(r, c)}")
    code = state.view[r + 1, c + 1]
    if code != TILE_COVERED:
        what = "flagged" if code == TILE_FLAGGED else "exposed"
        raise ValueError(f"cannot reveal {what} tile {(r, c)}")
    if state.mine is None:
        _place_mines(state, r, c)
    state.plays_made += 1

    view, adj = state.view, state.adj
    if state.mine[r, c]:
        view[r + 1, c + 1] = exposed_code(int(adj[r, c]))
        state.status = LOST
        return True

    view[r + 1, c + 1] = exposed_code(int(adj[r, c]))
    state._safe_covered -= 1
    if adj[r, c] == 0:
        queue = deque(((r, c),))
        rows, cols = state.config.rows, state.config.cols
        while queue:
            qr, qc = queue.popleft()
            for dr, dc in _NEIGHBOR_OFFSETS:
                nr, nc = qr + dr, qc + dc
                if 0 <= nr < rows and 0 <= nc < cols and view[nr + 1, nc + 1] == TILE_COVERED:
                    view[nr + 1, nc + 1] = exposed_code(int(adj[nr, nc]))
                    state._safe_covered -= 1
                    if adj[nr, nc] == 0:
                        queue.append((nr, nc))
    if state._safe_covered == 0:
        state.status = WON
    return False


def toggle_flag(state: GameState, r: int, c: int) -> None:
    """Flag a covered tile or remove an existing flag."""
    if state.status != IN_PROGRESS:
        raise ValueError("cannot flag on a finished game")
    if not state.in_bounds(r, c):
        raise ValueError(f"flag outside the board: {(r, c)}")
    code = state.view[r + 1, c + 1]
    if code == TILE_COVERED:
        state.view[r + 1, c + 1] = TILE_FLAGGED
        state.flags_placed += 1
    elif code == TILE_FLAGGED:
        state.view[r + 1, c + 1] = TILE_COVERED
        state.flags_placed -= 1
    else:
        raise ValueError(f"cannot flag exposed tile {(r, c)}")
    state.plays_made += 1


def adjacency(state: GameState, r: int, c: int) -> int:
    """Number of mines among the up-to-8 in-board neighbors of (r, c)."""
    if state.adj is None:
        raise ValueError("mines are not placed before the first reveal")
    if not state.in_bounds(r, c):
        raise ValueError(f"coordinate outside the board: {(r, c)}")
    return int(state.adj[r, c])


def render(state: GameState) -> str:
    """ASCII board view, one character per tile."""
    rows = []
    for r in range(state.config.rows):
        rows.append(" ".join(TILE_CHARS[state.view[r + 1, c + 1]] for c in range(state.config.cols)))
    return "\n".join(rows)
