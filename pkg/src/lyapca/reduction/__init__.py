"""Constructions turning tiling and immortality questions into exponent questions."""

from .arrows import ImmortalityBundle, build_immortality_ca
from .belt import BeltBundle, build_conveyor_F
from .experiment import SpeedReport, speed_experiment
from .particle import PARTICLE_ALPHABET, make_S
from .sofic import SoficBundle, build_sofic_F, smallest_empty_C

__all__ = [
    "BeltBundle",
    "ImmortalityBundle",
    "PARTICLE_ALPHABET",
    "SoficBundle",
    "SpeedReport",
    "build_conveyor_F",
    "build_immortality_ca",
    "build_sofic_F",
    "make_S",
    "smallest_empty_C",
    "speed_experiment",
]
