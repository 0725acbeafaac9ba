"""Python bindings for the eitlab C++ core. Frequencies are in rad/s."""

from ._eitlab import *  # noqa: F401,F403
from ._eitlab import __version__

TWO_PI = 6.283185307179586


def hz(rad_per_s):
    return rad_per_s / TWO_PI


def rad(hz_value):
    return hz_value * TWO_PI
