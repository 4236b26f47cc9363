"""Stixel-World ground truth from LiDAR, heat-map codec, losses and evaluation."""

from ._stixelforge import *  # noqa: F401,F403
from ._stixelforge import StixelforgeError  # noqa: F401
