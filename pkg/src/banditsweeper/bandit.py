"""Tabular bandit agent over canonical window actions.

Rewards are +1 for revealing a mine and -1 for a safe tile, so low Q means
"safe to uncover" and high Q means "probably a mine, worth flagging". Unseen
actions start optimistically safe at Q = -1 with N = 0; each update moves Q to
the running mean of the rewards seen so far.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import engine
from .actionspace import Candidates, candidates


@dataclass(frozen=True)
class ActionStats:
    """Value estimate and play count of one canonical action."""

    q: float = -1.0
    n: int = 0


@dataclass(frozen=True)
class PolicyConfig:
    """Selection policy: greedy, egreedy (explore with probability epsilon) or ucb."""

    kind: str = "greedy"
    epsilon: float = 0.01
    c: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("greedy", "egreedy", "ucb"):
            raise ValueError(f"unknown policy kind: {self.kind!r}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must be in [0, 1]")
        if self.c < 0.0:
            raise ValueError("exploration coefficient c must be non-negative")


@dataclass(frozen=True)
class PendingFlag:
    """A placed flag waiting for its end-of-game (or forced-unveil) reward."""

    key: int
    coord: tuple


class Move(NamedTuple):
    place_flag: bool
    key: int
    target: tuple
    index: int  # row in the Candidates this move was chosen from


class Step(NamedTuple):
    move: Move
    hit_mine: bool | None  # None when the move placed a flag without a forced unveil
    forced_unveils: int


def q_update(stats: ActionStats, reward: int) -> ActionStats:
    """Incremental-mean update: N += 1 first, then Q += (R - Q) / N."""
    n = stats.n + 1
    return ActionStats(stats.q + (reward - stats.q) / n, n)


def reward_of(hit_mine: bool) -> int:
    """Reveal outcome to reward: mine +1, safe -1."""
    return 1 if hit_mine else -1


def score(stats: ActionStats, t: int, policy: PolicyConfig) -> float:
    """Selection score; lower is more attractive to uncover.

    UCB subtracts the exploration bonus (this is minimization), with unvisited
    actions ranking strictly first. c = 0 degenerates to the greedy score so
    both policies walk identical move sequences.
    """
    if policy.kind == "ucb" and policy.c > 0.0:
        if stats.n == 0:
            return -math.inf
        return stats.q - policy.c * math.sqrt(math.log(t + 1.0) / stats.n)
    return stats.q


class AgentState:
    """Q-table plus the episode bookkeeping the flag rules need."""

    def __init__(
        self,
        policy: PolicyConfig | None = None,
        flags_enabled: bool = True,
        symmetry_enabled: bool = True,
        learning_enabled: bool = True,
    ):
        self.policy = policy or PolicyConfig()
        self.flags_enabled = flags_enabled
        self.symmetry_enabled = symmetry_enabled
        self.learning_enabled = learning_enabled
        self.table: dict[int, list] = {}  # key -> [q, n]
        self.total_selections = 0
        self.pending: list[PendingFlag] = []
        self.perfect_count = 0
        self.rng = np.random.default_rng(self.policy.seed)
        self.update_log: list | None = None  # (key, reward) pairs when tracing

    def stats(self, key: int) -> ActionStats:
        entry = self.table.get(key)
        return ActionStats(entry[0], entry[1]) if entry else ActionStats()

    def record_reward(self, key: int, reward: int) -> None:
        """Apply one reward to a key, maintaining the perfect-action counter."""
        entry = self.table.get(key)
        if entry is None:
            self.table[key] = [float(reward), 1]
            self.perfect_count += 1  # a single +-1 reward is a perfect value
        else:
            was_perfect = entry[0] == 1.0 or entry[0] == -1.0
            n = entry[1] + 1
            entry[0] += (reward - entry[0]) / n
            entry[1] = n
            if (entry[0] == 1.0 or entry[0] == -1.0) != was_perfect:
                self.perfect_count += -1 if was_perfect else 1
        if self.update_log is not None:
            self.update_log.append((key, reward))

    def begin_episode(self) -> None:
        self.pending.clear()


def _lookup(table: dict, keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    get = table.get
    pairs = [get(k) for k in keys.tolist()]
    n = len(pairs)
    qs = np.fromiter((p[0] if p else -1.0 for p in pairs), dtype=np.float64, count=n)
    ns = np.fromiter((p[1] if p else 0 for p in pairs), dtype=np.int64, count=n)
    return qs, ns


def _argbest(values: np.ndarray, ns: np.ndarray, rng, minimize: bool) -> int:
    """Index of the best value; ties go to the larger N, then a seeded draw."""
    best = values.min() if minimize else values.max()
    tied = np.flatnonzero(values == best)
    if len(tied) > 1:
        tied_ns = ns[tied]
        tied = tied[tied_ns == tied_ns.max()]
        if len(tied) > 1:
            return int(tied[rng.integers(len(tied))])
    return int(tied[0])


def choose_move(state: engine.GameState, agent: AgentState, cand: Candidates | None = None) -> Move | None:
    """Pick the next move, or None when the state offers no playable action.

    Uncovers the candidate with the lowest selection score; when flags are
    enabled and the highest raw Q beats that candidate's |Q|, places a flag on
    the highest-Q target instead. Under egreedy the whole decision is replaced
    by a uniform random uncover with probability epsilon.
    """
    if cand is None:
        cand = candidates(state, agent.symmetry_enabled)
    n = len(cand)
    if n == 0:
        return None
    policy = agent.policy
    if policy.kind == "egreedy" and agent.rng.random() < policy.epsilon:
        i = int(agent.rng.integers(n))
        return Move(False, int(cand.keys[i]), (int(cand.target_rows[i]), int(cand.target_cols[i])), i)

    qs, ns = _lookup(agent.table, cand.keys)
    if policy.kind == "ucb" and policy.c > 0.0:
        scores = np.full(n, -np.inf)
        seen = ns > 0
        scores[seen] = qs[seen] - policy.c * np.sqrt(np.log(agent.total_selections + 1.0) / ns[seen])
    else:
        scores = qs
    i_min = _argbest(scores, ns, agent.rng, minimize=True)
    if agent.flags_enabled:
        i_max = _argbest(qs, ns, agent.rng, minimize=False)
        if abs(qs[i_max]) > abs(qs[i_min]):
            return Move(
                True, int(cand.keys[i_max]), (int(cand.target_rows[i_max]), int(cand.target_cols[i_max])), i_max
            )
    return Move(False, int(cand.keys[i_min]), (int(cand.target_rows[i_min]), int(cand.target_cols[i_min])), i_min)


def _force_unveil(state: engine.GameState, agent: AgentState) -> int:
    """Unveil pending flags (lowest current Q first) until flags fit the mine count.

    The unveiled flag's key settles immediately with the observed reward; the
    forced reveal is not a policy selection.
    """
    unveiled = 0
    while state.flags_placed > state.config.mines and state.status == engine.IN_PROGRESS:
        lowest = min(range(len(agent.pending)), key=lambda i: agent.stats(agent.pending[i].key).q)
        pf = agent.pending.pop(lowest)
        engine.toggle_flag(state, pf.coord[0], pf.coord[1])
        hit = engine.reveal(state, pf.coord[0], pf.coord[1])
        if agent.learning_enabled:
            agent.record_reward(pf.key, reward_of(hit))
        unveiled += 1
    return unveiled


def apply_move(state: engine.GameState, agent: AgentState, move: Move) -> Step:
    """Execute a chosen move, learning immediately from uncover outcomes."""
    agent.total_selections += 1
    if move.place_flag:
        engine.toggle_flag(state, move.target[0], move.target[1])
        agent.pending.append(PendingFlag(move.key, move.target))
        forced = 0
        if state.flags_placed > state.config.mines:
            forced = _force_unveil(state, agent)
        return Step(move, None, forced)
    hit = engine.reveal(state, move.target[0], move.target[1])
    if agent.learning_enabled:
        agent.record_reward(move.key, reward_of(hit))
    return Step(move, hit, 0)


def settle_end_of_game(
    state: engine.GameState,
    agent: AgentState,
    final_candidates: Candidates | None,
    chosen_index: int = -1,
) -> int:
    """Delayed learning once the mine layout is known.

    Every still-pending flag settles against its tile, and every candidate of
    the final turn except the chosen one is rewarded as if it had been played.
    Returns the number of updates applied.
    """
    if state.status == engine.IN_PROGRESS:
        raise ValueError("cannot settle an unfinished game")
    updates = 0
    if agent.learning_enabled:
        mine = state.mine
        for pf in agent.pending:
            agent.record_reward(pf.key, 1 if mine[pf.coord] else -1)
            updates += 1
        if final_candidates is not None and len(final_candidates) > 0:
            rewards = np.where(
                mine[final_candidates.target_rows, final_candidates.target_cols], 1, -1
            ).tolist()
            keys = final_candidates.keys.tolist()
            record = agent.record_reward
            for i, (key, r) in enumerate(zip(keys, rewards)):
                if i != chosen_index:
                    record(key, r)
                    updates += 1
    agent.pending.clear()
    return updates
