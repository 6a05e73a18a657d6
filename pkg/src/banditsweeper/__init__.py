"""Minesweeper engine plus tabular multi-armed-bandit agents."""

from .engine import GameConfig, GameState, game_with_mines, new_game, reveal, toggle_flag
from .actionspace import RawAction, canonicalize, decode_key, encode_key, enumerate_actions
from .bandit import ActionStats, AgentState, PolicyConfig, q_update, reward_of
from .harness import RunSpec, TrainingReport, evaluate, play_episode, run_spec, train

__version__ = "0.1.0"

__all__ = [
    "GameConfig",
    "GameState",
    "game_with_mines",
    "new_game",
    "reveal",
    "toggle_flag",
    "RawAction",
    "canonicalize",
    "decode_key",
    "encode_key",
    "enumerate_actions",
    "ActionStats",
    "AgentState",
    "PolicyConfig",
    "q_update",
    "reward_of",
    "RunSpec",
    "TrainingReport",
    "evaluate",
    "play_episode",
    "run_spec",
    "train",
    "__version__",
]
