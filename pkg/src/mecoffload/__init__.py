"""Mobile-edge-computing offloading simulator with a from-scratch DQN agent."""
from .agent import AgentConfig, EnvOptions, ReplayBuffer, Transition, TrainResult, train
from .bandwidth import BandwidthPolicy, allocate_by_length, allocate_by_ratio, allocate_equal
from .baselines import OracleResult, all_cap, all_local, grid_search
from .capselect import CapChoice, random_cap, select_cap
from .channel import ChannelSampler
from .config import SystemConfig
from .env import EnvState, OffloadEnv, StepOutcome
from .estimators import AllCap, AllLocal, DQNOffloader, GridSearchOracle
from .model import CostBreakdown, evaluate, transmission_rate
from .nn import Mlp

__version__ = "0.1.0"

__all__ = [
    "AgentConfig", "AllCap", "AllLocal", "BandwidthPolicy", "CapChoice", "ChannelSampler",
    "CostBreakdown", "DQNOffloader", "EnvOptions", "EnvState", "GridSearchOracle", "Mlp",
    "OffloadEnv", "OracleResult", "ReplayBuffer", "StepOutcome", "SystemConfig", "TrainResult",
    "Transition", "all_cap", "all_local", "allocate_by_length", "allocate_by_ratio",
    "allocate_equal", "evaluate", "grid_search", "random_cap", "select_cap", "train",
    "transmission_rate",
]
