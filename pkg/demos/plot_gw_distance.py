"""
Comparing ellipses with the Gaussian Wasserstein distance
=========================================================

The score treats each ellipse as a Gaussian (centre, spread matrix). The
squared distance splits into a centre term (squared offset) and an extent
term that depends on size, shape and orientation.
"""

import math

import numpy as np

from vbett import gw_distance
from vbett.metrics import heading_rmse
from vbett.rotation import rotation

X = np.diag([600.0, 50.0])

###############################################################################
# Shifting the ellipse only changes the centre term.

print(gw_distance((0, 0), X, (3, 4), X))

###############################################################################
# Rotating it only changes the extent term. The term is largest at 90 degrees
# and returns to zero at 180, because an ellipse is symmetric under a half turn.

for deg in (0, 30, 60, 90, 120, 180):
    T = rotation(math.radians(deg))
    br = gw_distance((0, 0), X, (0, 0), T @ X @ T.T)
    print(f"{deg:4d} deg: extent term {br.extent_term:8.2f}")

###############################################################################
# Heading errors follow the same symmetry: an estimate that is off by 180
# degrees is scored as exact unless ``wrap=False`` is set.

print(heading_rmse([0.1], [0.1 + math.pi]), heading_rmse([0.1], [0.1 + math.pi], wrap=False))
