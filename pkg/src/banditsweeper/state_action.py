"""Full-board state-action greedy baseline for small boards.

Values are keyed by (observable board, tile) instead of canonical window
actions. The agent plays flagless greedy uncovers with the same optimistic
initialization and incremental-mean update as the bandit; there is no
end-of-game settlement.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from . import engine
from .harness import _TRAIN_STREAM, RunSpec, WindowStat, derived_seeds


def state_key(state: engine.GameState) -> bytes:
    """Serialized observable board: dimensions plus row-major tile codes."""
    return struct.pack("<HH", state.config.rows, state.config.cols) + state.view[1:-1, 1:-1].tobytes()


class SAAgent:
    """Tabular Q over (state, tile) pairs."""

    def __init__(self, seed: int = 0, learning_enabled: bool = True):
        self.table: dict[bytes, dict[int, list]] = {}  # state -> flat tile -> [q, n]
        self.pairs_recorded = 0
        self.total_updates = 0
        self.learning_enabled = learning_enabled
        self.rng = np.random.default_rng(seed)

    def stats(self, skey: bytes, flat: int) -> tuple[float, int]:
        entry = self.table.get(skey, {}).get(flat)
        return (entry[0], entry[1]) if entry else (-1.0, 0)


def sa_update(agent: SAAgent, skey: bytes, flat: int, reward: int) -> None:
    """Same incremental-mean rule as the bandit, keyed by (state, tile)."""
    per_state = agent.table.get(skey)
    if per_state is None:
        per_state = agent.table[skey] = {}
    entry = per_state.get(flat)
    if entry is None:
        per_state[flat] = [float(reward), 1]
        agent.pairs_recorded += 1
    else:
        n = entry[1] + 1
        entry[0] += (reward - entry[0]) / n
        entry[1] = n
    agent.total_updates += 1


def sa_choose(state: engine.GameState, agent: SAAgent) -> tuple[int, int]:
    """Covered tile with the lowest Q(s, a); ties to larger N, then a seeded draw."""
    rows = state.view[1:-1, 1:-1]
    rr, cc = np.nonzero(rows == engine.TILE_COVERED)
    flats = rr * state.config.cols + cc
    per_state = agent.table.get(state_key(state))
    if not per_state:
        i = int(agent.rng.integers(len(flats)))
        return int(rr[i]), int(cc[i])
    get = per_state.get
    pairs = [get(f) for f in flats.tolist()]
    qs = np.fromiter((p[0] if p else -1.0 for p in pairs), dtype=np.float64, count=len(pairs))
    ns = np.fromiter((p[1] if p else 0 for p in pairs), dtype=np.int64, count=len(pairs))
    best = np.flatnonzero(qs == qs.min())
    if len(best) > 1:
        best_ns = ns[best]
        best = best[best_ns == best_ns.max()]
    i = int(best[agent.rng.integers(len(best))]) if len(best) > 1 else int(best[0])
    return int(rr[i]), int(cc[i])


def play_episode_sa(config: engine.GameConfig, agent: SAAgent, game_seed: int | None = None) -> bool:
    """One flagless greedy game; immediate updates only. Returns whether it was won."""
    state = engine.new_game(config, game_seed)
    while state.status == engine.IN_PROGRESS:
        skey = state_key(state)
        r, c = sa_choose(state, agent)
        hit = engine.reveal(state, r, c)
        if agent.learning_enabled:
            sa_update(agent, skey, r * config.cols + c, 1 if hit else -1)
    return state.status == engine.WON


@dataclass(frozen=True)
class SAReport:
    episodes: int
    wins: int
    windows: tuple
    pairs_recorded: int

    @property
    def final_win_rate(self) -> float | None:
        return self.wins / self.episodes if self.episodes else None


def train_sa(spec: RunSpec, agent: SAAgent | None = None) -> tuple[SAReport, SAAgent]:
    """Sequential SA training over the spec's stages (policy kind must be greedy)."""
    if spec.policy.kind != "greedy":
        raise ValueError("the state-action baseline only plays greedy")
    if agent is None:
        agent = SAAgent(seed=spec.policy.seed, learning_enabled=spec.learning_enabled)
    windows = []
    wins = 0
    window_wins = 0
    episode = 0
    for stage_index, (config, count) in enumerate(spec.stages):
        seeds = derived_seeds(config.seed, (_TRAIN_STREAM, stage_index), count) if count else ()
        for i in range(count):
            if play_episode_sa(config, agent, int(seeds[i])):
                wins += 1
                window_wins += 1
            episode += 1
            if episode % spec.cadence == 0:
                windows.append(
                    WindowStat(episode, window_wins, window_wins / spec.cadence, agent.pairs_recorded, 0)
                )
                window_wins = 0
    return SAReport(spec.episodes, wins, tuple(windows), agent.pairs_recorded), agent


def evaluate_sa(agent: SAAgent, config: engine.GameConfig, episodes: int) -> float:
    """Win rate of a frozen SA agent; leaves the agent unchanged."""
    if agent.learning_enabled:
        raise ValueError("evaluation requires a frozen agent (learning_enabled=False)")
    saved_rng = agent.rng
    agent.rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(1,)))
    try:
        seeds = derived_seeds(config.seed, (1, 0), episodes) if episodes else ()
        wins = sum(play_episode_sa(config, agent, int(seeds[i])) for i in range(episodes))
    finally:
        agent.rng = saved_rng
    return wins / episodes if episodes else 1.0
