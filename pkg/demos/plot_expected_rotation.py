"""
Averaging a rotated matrix over an uncertain heading
====================================================

The tracker never knows the heading exactly. Whenever it needs
``T(theta) M T(theta)^T`` it uses the average over a Gaussian heading
``theta ~ N(mean, var)``. That average has a closed form. This script checks it
against brute-force sampling and shows how it fades towards an isotropic
matrix as the heading variance grows.
"""

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from vbett import expected_rotated_inverse, expected_rotated_inverse_diag, rotation

rng = np.random.default_rng(0)
out = Path("demo_output")
out.mkdir(exist_ok=True)

###############################################################################
# A long thin ellipse, pointed at 30 degrees, with a heading variance of 0.2 rad^2.

M = np.diag([9.0, 1.0])
mean, var = math.radians(30), 0.2

closed = expected_rotated_inverse(M, mean, var)
th = mean + math.sqrt(var) * rng.standard_normal(200_000)
sampled = np.mean([rotation(t) @ M @ rotation(t).T for t in th[:20_000]], axis=0)
print("closed form:\n", closed)
print("sampled (20k draws):\n", sampled)

###############################################################################
# For diagonal input the shortcut form mixes the exactly rotated matrix with
# an isotropic one, weighted by exp(-2 var). It agrees with the general form.

print("diagonal shortcut agrees:", np.allclose(expected_rotated_inverse_diag([9.0, 1.0], mean, var), closed))

###############################################################################
# As the variance grows the averaged matrix loses its orientation. Its
# eigenvalues converge to half the trace while the trace itself is preserved.

variances = np.linspace(0, 2, 50)
eig = np.array([np.linalg.eigvalsh(expected_rotated_inverse(M, mean, v)) for v in variances])
fig, ax = plt.subplots(figsize=(6, 3.5))
ax.plot(variances, eig[:, 1], label="larger eigenvalue")
ax.plot(variances, eig[:, 0], label="smaller eigenvalue")
ax.axhline(np.trace(M) / 2, color="k", lw=0.8, ls=":", label="trace / 2")
ax.set_xlabel("heading variance [rad$^2$]")
ax.legend()
fig.tight_layout()
fig.savefig(out / "expected_rotation.svg")
print("wrote", out / "expected_rotation.svg")
