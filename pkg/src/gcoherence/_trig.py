"""Degree-based trig with exact zeros at multiples of 90 degrees.

Wave-plate angles such as 45 deg map to cos(90 deg); ``np.cos(np.pi / 2)``
is 6e-17, which would leave a spurious nonzero coherence behind.
"""

import math


def sind(angle: float) -> float:
    if angle % 180.0 == 0.0:
        return 0.0
    return math.sin(math.radians(angle))


def cosd(angle: float) -> float:
    if (angle - 90.0) % 180.0 == 0.0:
        return 0.0
    return math.cos(math.radians(angle))
