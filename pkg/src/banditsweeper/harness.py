"""Episode loop, training and evaluation orchestration, sweeps and report stats."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import bandit, engine
from .actionspace import candidates, encode_key

# Spawn-key stream tags: game seeds during training, during evaluation, and
# per sweep cell. Keeping the streams apart means reporting cadence or extra
# evaluations never perturb game randomness.
_TRAIN_STREAM = 0
_EVAL_STREAM = 1
_SWEEP_STREAM = 2


def derived_seeds(master_seed: int, stream: tuple, count: int) -> np.ndarray:
    """A batch of independent 64-bit child seeds for one stream of a run."""
    ss = np.random.SeedSequence(master_seed, spawn_key=stream)
    return ss.generate_state(count, np.uint64)


@dataclass(frozen=True)
class RunSpec:
    """A training run: one or more (game, episode-count) stages plus the policy.

    Game seeds are derived per stage and episode from each stage's config seed,
    so the seed stored in a stage's GameConfig acts as that stage's master.
    """

    stages: tuple
    policy: bandit.PolicyConfig = field(default_factory=bandit.PolicyConfig)
    flags_enabled: bool = True
    symmetry_enabled: bool = True
    learning_enabled: bool = True
    cadence: int = 10_000

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple((cfg, int(n)) for cfg, n in self.stages))
        if any(n < 0 for _, n in self.stages):
            raise ValueError("stage episode counts must be non-negative")
        if self.cadence < 1:
            raise ValueError("report cadence must be positive")
        if self.episodes and self.episodes % self.cadence:
            raise ValueError("report cadence must divide the total episode count")

    @property
    def episodes(self) -> int:
        return sum(n for _, n in self.stages)


def run_spec(config: engine.GameConfig, episodes: int, **kwargs) -> RunSpec:
    """Single-stage RunSpec shorthand."""
    return RunSpec(stages=((config, episodes),), **kwargs)


@dataclass(frozen=True)
class EpisodeResult:
    won: bool
    plays: int
    flags_used: int
    table_size_after: int
    perfect_count_after: int


@dataclass(frozen=True)
class WindowStat:
    episode: int
    wins: int
    win_rate: float
    table_size: int
    perfect_count: int


@dataclass(frozen=True)
class TrainingReport:
    """Outcome of a training run plus the final-table statistics."""

    episodes: int
    wins: int
    windows: tuple
    action_records: tuple  # (key, q, n) per recorded action
    total_selections: int
    meta: dict

    @property
    def final_win_rate(self) -> float | None:
        return self.wins / self.episodes if self.episodes else None

    @property
    def distinct_actions(self) -> int:
        return len(self.action_records)

    @property
    def perfect_actions(self) -> int:
        return sum(1 for _, q, _ in self.action_records if q == 1.0 or q == -1.0)

    def mean_counts(self) -> tuple[float | None, float | None, float | None]:
        """Mean N over perfect keys, non-perfect keys and all keys."""
        perfect = [n for _, q, n in self.action_records if q == 1.0 or q == -1.0]
        other = [n for _, q, n in self.action_records if not (q == 1.0 or q == -1.0)]
        mean = lambda xs: sum(xs) / len(xs) if xs else None
        return mean(perfect), mean(other), mean([n for _, _, n in self.action_records])

    def ecdf_points(self) -> list[tuple[float, float]]:
        """Empirical CDF of the recorded action values as (q, fraction) steps."""
        qs = sorted(q for _, q, _ in self.action_records)
        total = len(qs)
        points = []
        for i, q in enumerate(qs):
            if i + 1 == total or qs[i + 1] != q:
                points.append((q, (i + 1) / total))
        return points


def _blind_reveal(state: engine.GameState, rng) -> None:
    # Boards with no adjacent tile pairs (1x1) offer no window actions at all;
    # fall back to revealing a random covered tile with no arm to credit.
    covered = state.covered_coords()
    r, c = covered[rng.integers(len(covered))]
    engine.reveal(state, int(r), int(c))


def play_episode(
    config: engine.GameConfig, agent: bandit.AgentState, game_seed: int | None = None
) -> EpisodeResult:
    """One complete game: choose/apply until terminal, then delayed settlement."""
    state = engine.new_game(config, game_seed)
    agent.begin_episode()
    final_cand = None
    chosen = -1
    flags_used = 0
    while state.status == engine.IN_PROGRESS:
        cand = candidates(state, agent.symmetry_enabled)
        if len(cand) == 0:
            _blind_reveal(state, agent.rng)
            final_cand, chosen = None, -1
            continue
        move = bandit.choose_move(state, agent, cand)
        final_cand, chosen = cand, move.index
        bandit.apply_move(state, agent, move)
        if move.place_flag:
            flags_used += 1
    bandit.settle_end_of_game(state, agent, final_cand, chosen)
    return EpisodeResult(
        won=state.status == engine.WON,
        plays=state.plays_made,
        flags_used=flags_used,
        table_size_after=len(agent.table),
        perfect_count_after=agent.perfect_count,
    )


def build_report(spec_episodes: int, wins: int, windows, agent: bandit.AgentState, meta: dict) -> TrainingReport:
    records = tuple((key, entry[0], entry[1]) for key, entry in agent.table.items())
    return TrainingReport(
        episodes=spec_episodes,
        wins=wins,
        windows=tuple(windows),
        action_records=records,
        total_selections=agent.total_selections,
        meta=meta,
    )


def train(spec: RunSpec, agent: bandit.AgentState | None = None) -> tuple[TrainingReport, bandit.AgentState]:
    """Run the stages of a spec sequentially, recording a win-rate window per cadence."""
    if agent is None:
        agent = bandit.AgentState(
            policy=spec.policy,
            flags_enabled=spec.flags_enabled,
            symmetry_enabled=spec.symmetry_enabled,
            learning_enabled=spec.learning_enabled,
        )
    windows = []
    wins = 0
    window_wins = 0
    episode = 0
    for stage_index, (config, count) in enumerate(spec.stages):
        seeds = derived_seeds(config.seed, (_TRAIN_STREAM, stage_index), count) if count else ()
        for i in range(count):
            result = play_episode(config, agent, int(seeds[i]))
            episode += 1
            if result.won:
                wins += 1
                window_wins += 1
            if episode % spec.cadence == 0:
                windows.append(
                    WindowStat(
                        episode=episode,
                        wins=window_wins,
                        win_rate=window_wins / spec.cadence,
                        table_size=len(agent.table),
                        perfect_count=agent.perfect_count,
                    )
                )
                window_wins = 0
    meta = {
        "stages": ";".join(f"{c.rows}x{c.cols}x{c.mines}:{n}" for c, n in spec.stages),
        "policy": spec.policy.kind,
        "epsilon": spec.policy.epsilon,
        "c": spec.policy.c,
        "seed": spec.stages[0][0].seed if spec.stages else 0,
        "flags": int(spec.flags_enabled),
        "symmetry": int(spec.symmetry_enabled),
    }
    return build_report(spec.episodes, wins, windows, agent, meta), agent


def evaluate(agent: bandit.AgentState, config: engine.GameConfig, episodes: int) -> float:
    """Win rate of a frozen agent over fresh games; leaves the agent unchanged."""
    if agent.learning_enabled:
        raise ValueError("evaluation requires a frozen agent (learning_enabled=False)")
    saved_rng, saved_selections = agent.rng, agent.total_selections
    agent.rng = np.random.default_rng(
        np.random.SeedSequence(config.seed, spawn_key=(_EVAL_STREAM,))
    )
    try:
        seeds = derived_seeds(config.seed, (_EVAL_STREAM, 0), episodes) if episodes else ()
        wins = 0
        for i in range(episodes):
            if play_episode(config, agent, int(seeds[i])).won:
                wins += 1
    finally:
        agent.rng, agent.total_selections = saved_rng, saved_selections
        agent.pending.clear()
    return wins / episodes if episodes else 1.0


def mines_for_density(rows: int, cols: int, density: float) -> int:
    """Mine count for a board at a target density, kept playable."""
    tiles = rows * cols
    mines = round(tiles * density)
    if tiles > 1:
        mines = max(1, min(mines, tiles - 1))
    else:
        mines = 0
    return mines


@dataclass(frozen=True)
class SweepResult:
    row_values: tuple
    col_values: tuple
    row_label: str
    col_label: str
    grid: np.ndarray  # win rate per (row value, col value)
    mines_grid: np.ndarray


def _sweep(row_values, col_values, row_label, col_label, cell, master_seed, episodes, policy_kind):
    grid = np.zeros((len(row_values), len(col_values)))
    mines_grid = np.zeros((len(row_values), len(col_values)), dtype=int)
    for i, rv in enumerate(row_values):
        for j, cv in enumerate(col_values):
            rows, cols, mines = cell(rv, cv)
            seed = int(derived_seeds(master_seed, (_SWEEP_STREAM, i, j), 1)[0])
            config = engine.GameConfig(rows, cols, mines, seed)
            spec = run_spec(
                config,
                episodes,
                policy=bandit.PolicyConfig(kind=policy_kind, seed=seed),
                cadence=max(1, episodes),
            )
            report, _ = train(spec)
            grid[i, j] = report.final_win_rate if report.final_win_rate is not None else 1.0
            mines_grid[i, j] = mines
    return SweepResult(tuple(row_values), tuple(col_values), row_label, col_label, grid, mines_grid)


def sweep_dimensions(
    rows_range, cols_range, density: float, episodes: int, master_seed: int = 0, policy_kind: str = "greedy"
) -> SweepResult:
    """Win-rate grid over board dimensions at a fixed mine density."""
    return _sweep(
        list(rows_range),
        list(cols_range),
        "rows",
        "cols",
        lambda r, c: (r, c, mines_for_density(r, c, density)),
        master_seed,
        episodes,
        policy_kind,
    )


def sweep_density(
    heights_range, densities, width: int = 10, episodes: int = 10_000, master_seed: int = 0, policy_kind: str = "greedy"
) -> SweepResult:
    """Win-rate grid over board height and mine density at a fixed width."""
    return _sweep(
        list(heights_range),
        [round(d, 6) for d in densities],
        "rows",
        "density",
        lambda h, d: (h, width, mines_for_density(h, width, d)),
        master_seed,
        episodes,
        policy_kind,
    )


def export_stats(report: TrainingReport) -> dict:
    """Tabular records of a report, keyed by record kind.

    Each value is (column names, rows); empty reports give header-only tables.
    """
    summary_cols = [
        "episodes",
        "wins",
        "win_rate",
        "distinct_actions",
        "perfect_actions",
        "mean_n_perfect",
        "mean_n_nonperfect",
        "mean_n_all",
        "total_selections",
    ]
    mean_p, mean_np, mean_all = report.mean_counts()
    fmt = lambda v: "" if v is None else repr(round(v, 6)) if isinstance(v, float) else v
    summary_rows = [
        [
            report.episodes,
            report.wins,
            fmt(report.final_win_rate),
            report.distinct_actions,
            report.perfect_actions,
            fmt(mean_p),
            fmt(mean_np),
            fmt(mean_all),
            report.total_selections,
        ]
    ]
    window_rows = [
        [w.episode, w.wins, repr(w.win_rate), w.table_size, w.perfect_count] for w in report.windows
    ]
    ecdf_rows = [[repr(q), repr(frac)] for q, frac in report.ecdf_points()]
    action_rows = sorted(
        [encode_key(key), repr(q), n] for key, q, n in report.action_records
    )
    return {
        "summary": (summary_cols, summary_rows),
        "windows": (["episode", "wins", "win_rate", "table_size", "perfect_count"], window_rows),
        "ecdf": (["q", "fraction"], ecdf_rows),
        "actions": (["key", "q", "n"], action_rows),
    }
