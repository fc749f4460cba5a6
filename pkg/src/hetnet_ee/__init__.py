"""Joint user-association and transmit-power optimization for energy
efficiency in a two-tier heterogeneous downlink network."""

from . import baselines, channel, dinkelbach, kernels, model, pc_solver, ua_solver

__version__ = "0.1.0"

__all__ = [
    "baselines",
    "channel",
    "dinkelbach",
    "kernels",
    "model",
    "pc_solver",
    "ua_solver",
]
