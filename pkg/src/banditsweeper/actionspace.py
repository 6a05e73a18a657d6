"""3x3 action windows: enumeration, dihedral canonicalization and a text codec.

An action is identified by the 9 observable tile codes of the window around a
center tile plus the direction of the covered target tile within it (10 values
in total). Two actions that differ only by a rotation or mirror of the square
are the same arm, so keys are canonicalized by taking the minimum over the 8
dihedral transforms of a packed integer encoding: 9 base-16 nibbles for the
window slots in row-major order followed by 3 bits of direction. Because tile
codes and directions are compared in one fixed order, the numeric minimum of
the packed value is exactly the lexicographic minimum of the 10-tuple.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .engine import TILE_CHARS, TILE_COVERED, TILE_FLAGGED, TILE_OOB, GameState, IN_PROGRESS

DIR_NAMES = ("N", "NE", "E", "SE", "S", "SW", "W", "NW")
N, NE, E, SE, S, SW, W, NW = range(8)
DIR_OFFSETS = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))
CARDINAL_DIRS = frozenset((N, E, S, W))
DIAGONAL_DIRS = frozenset((NE, SE, SW, NW))

# Window slot (row-major, center = 4) holding each direction's target tile.
TARGET_SLOT = (1, 2, 5, 8, 7, 6, 3, 0)
_SLOT_TO_DIR = {slot: d for d, slot in enumerate(TARGET_SLOT)}

CENTER_SLOT = 4


def _build_transforms():
    """The 8 dihedral transforms as window-slot source permutations.

    PERMS[t][j] is the old slot whose content lands in slot j; rotating a grid
    of slot labels shows exactly that. DIR_MAPS[t][d] is where direction d's
    target ends up.
    """
    base = [[0, 1, 2], [3, 4, 5], [6, 7, 8]]
    rot_cw = lambda m: [list(row) for row in zip(*m[::-1])]
    flip_lr = lambda m: [row[::-1] for row in m]
    perms = []
    grid = base
    for _ in range(4):
        perms.append(tuple(v for row in grid for v in row))
        perms.append(tuple(v for row in flip_lr(grid) for v in row))
        grid = rot_cw(grid)
    dir_maps = []
    for perm in perms:
        inverse = [0] * 9
        for j, src in enumerate(perm):
            inverse[src] = j
        assert perm[CENTER_SLOT] == CENTER_SLOT
        dir_maps.append(tuple(_SLOT_TO_DIR[inverse[TARGET_SLOT[d]]] for d in range(8)))
    return tuple(perms), tuple(dir_maps)


PERMS, DIR_MAPS = _build_transforms()
TRANSFORM_COUNT = len(PERMS)

# Packed-key slot weights: slot i occupies nibble 8-i, above the 3 direction bits.
_SLOT_WEIGHT = tuple(1 << (4 * (8 - i) + 3) for i in range(9))

# _PACK_MATRIX[:, t] turns a window row-vector into transform t's packed window part.
_PACK_MATRIX = np.zeros((9, TRANSFORM_COUNT), dtype=np.int64)
for _t, _perm in enumerate(PERMS):
    for _j, _src in enumerate(_perm):
        _PACK_MATRIX[_src, _t] = _SLOT_WEIGHT[_j]
_DIR_MAP_ARR = np.array(DIR_MAPS, dtype=np.int64)
_DIR_DR = np.array([o[0] for o in DIR_OFFSETS], dtype=np.int64)
_DIR_DC = np.array([o[1] for o in DIR_OFFSETS], dtype=np.int64)


@dataclass(frozen=True)
class RawAction:
    """One concrete playable action: a window, the target direction and where it sits."""

    window: tuple
    direction: int
    center: tuple

    @property
    def target(self) -> tuple:
        dr, dc = DIR_OFFSETS[self.direction]
        return (self.center[0] + dr, self.center[1] + dc)


class Candidates(NamedTuple):
    """Array form of every playable action in a state (one row per action)."""

    keys: np.ndarray
    target_rows: np.ndarray
    target_cols: np.ndarray
    center_rows: np.ndarray
    center_cols: np.ndarray
    dirs: np.ndarray

    def __len__(self) -> int:
        return self.keys.shape[0]


def pack_action(window, direction: int) -> int:
    """Packed integer encoding of a raw (window, direction) pair."""
    value = direction
    for i in range(9):
        value += window[i] * _SLOT_WEIGHT[i]
    return value


def unpack_key(key: int) -> tuple[tuple, int]:
    """Inverse of pack_action: (window tuple, direction)."""
    direction = key & 7
    rest = key >> 3
    window = [0] * 9
    for i in range(8, -1, -1):
        window[i] = rest & 15
        rest >>= 4
    if rest or direction > 7 or any(v > TILE_FLAGGED for v in window):
        raise ValueError(f"not a packed action key: {key}")
    return tuple(window), direction


def transform_action(window, direction: int, t: int) -> tuple[tuple, int]:
    """Apply dihedral transform t to a (window, direction) pair."""
    perm = PERMS[t]
    return tuple(window[perm[j]] for j in range(9)), DIR_MAPS[t][direction]


def canonical_key(window, direction: int, symmetry: bool = True) -> int:
    """Minimal packed encoding over the applicable transform group.

    With symmetry disabled the raw encoding itself is the key, which keeps the
    no-symmetries ablation on the same code path.
    """
    if not symmetry:
        return pack_action(window, direction)
    return min(
        pack_action(*transform_action(window, direction, t)) for t in range(TRANSFORM_COUNT)
    )


def canonicalize(action: RawAction, symmetry: bool = True) -> int:
    """Canonical key of a raw action."""
    return canonical_key(action.window, action.direction, symmetry)


def canonical_keys_batch(windows: np.ndarray, dirs: np.ndarray, symmetry: bool = True) -> np.ndarray:
    """Canonical keys for n windows (n x 9 int array) with their directions."""
    windows = np.asarray(windows, dtype=np.int64)
    dirs = np.asarray(dirs, dtype=np.int64)
    count = TRANSFORM_COUNT if symmetry else 1
    parts = windows @ _PACK_MATRIX[:, :count]
    keys = parts + _DIR_MAP_ARR[:count, dirs].T
    return keys.min(axis=1)


def candidates(state: GameState, symmetry: bool = True) -> Candidates:
    """Every (center, direction) pair whose directed neighbor is covered and unflagged.

    The heavy lifting is vectorized: windows for all board cells come from one
    sliding-window view of the padded board and the 8-transform minimum is a
    single matrix product against _PACK_MATRIX.
    """
    rows, cols = state.config.rows, state.config.cols
    covered = state.view == TILE_COVERED
    target_ok = np.empty((8, rows, cols), dtype=bool)
    for d in range(8):
        dr, dc = DIR_OFFSETS[d]
        target_ok[d] = covered[1 + dr : 1 + dr + rows, 1 + dc : 1 + dc + cols]
    d_idx, r_idx, c_idx = np.nonzero(target_ok)

    count = TRANSFORM_COUNT if symmetry else 1
    windows = sliding_window_view(state.view, (3, 3)).reshape(rows * cols, 9)
    parts = windows.astype(np.int64) @ _PACK_MATRIX[:, :count]
    cand_parts = parts[r_idx * cols + c_idx]
    keys = (cand_parts + _DIR_MAP_ARR[:count, d_idx].T).min(axis=1)

    return Candidates(
        keys=keys,
        target_rows=r_idx + _DIR_DR[d_idx],
        target_cols=c_idx + _DIR_DC[d_idx],
        center_rows=r_idx,
        center_cols=c_idx,
        dirs=d_idx,
    )


def window_at(state: GameState, r: int, c: int) -> tuple:
    """The 9 observable codes of the 3x3 window centered on in-board tile (r, c)."""
    if not state.in_bounds(r, c):
        raise ValueError(f"window center outside the board: {(r, c)}")
    return tuple(state.view[r : r + 3, c : c + 3].ravel().tolist())


def enumerate_actions(state: GameState) -> list[RawAction]:
    """All playable actions of a state as RawAction objects."""
    if state.status != IN_PROGRESS:
        raise ValueError("cannot enumerate actions on a finished game")
    found = candidates(state)
    actions = []
    for i in range(len(found)):
        r = int(found.center_rows[i])
        c = int(found.center_cols[i])
        actions.append(RawAction(window_at(state, r, c), int(found.dirs[i]), (r, c)))
    return actions


def encode_key(key: int) -> str:
    """Text form of a packed key: 9 window characters, '|', direction name."""
    window, direction = unpack_key(key)
    return "".join(TILE_CHARS[v] for v in window) + "|" + DIR_NAMES[direction]


def decode_key(text: str) -> int:
    """Parse the text form back into a packed key, validating action invariants."""
    head, sep, dir_name = text.partition("|")
    if not sep or dir_name not in DIR_NAMES:
        raise ValueError(f"malformed action key: {text!r}")
    if len(head) != 9 or any(ch not in TILE_CHARS for ch in head):
        raise ValueError(f"malformed action window: {text!r}")
    window = tuple(TILE_CHARS.index(ch) for ch in head)
    direction = DIR_NAMES.index(dir_name)
    if window[TARGET_SLOT[direction]] != TILE_COVERED:
        raise ValueError(f"action target must be a covered tile: {text!r}")
    if window[CENTER_SLOT] == TILE_OOB:
        raise ValueError(f"action center must be on the board: {text!r}")
    return pack_action(window, direction)


def render_key(key: int) -> str:
    """Three-line ASCII motif of a key with the target slot bracketed."""
    window, direction = unpack_key(key)
    target = TARGET_SLOT[direction]
    lines = []
    for row in range(3):
        cells = []
        for col in range(3):
            slot = 3 * row + col
            ch = TILE_CHARS[window[slot]]
            cells.append(f"[{ch}]" if slot == target else f" {ch} ")
        lines.append("".join(cells))
    return "\n".join(lines)
