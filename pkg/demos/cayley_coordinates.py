"""Cayley coordinates of Stiefel points: round trips, centers and mobility."""

import numpy as np

from alcp import CenterPoint, choose_center, forward, inverse, mobility, random_stiefel
from alcp.manifold import spectral_norm

N, p = 50, 4
u = random_stiefel(N, p, seed=0)
print("point on St(4, 50), residual ||I - U^T U||_F =", np.linalg.norm(np.eye(p) - u.data.T @ u.data))

# With the identity center the coordinates of a random point can be large.
identity = CenterPoint.identity(N, p)
v = forward(identity, u)
print("identity center:  ||V||_2 =", round(spectral_norm(v), 3), " mobility =", round(mobility(v), 4))

# Re-centering at the point puts it inside the unit ball, A-block zero.
center = choose_center(u)
w = forward(center, u)
print("chosen center:    ||V||_2 =", round(spectral_norm(w), 3), " ||A||_F =", np.linalg.norm(w.a))

# The inverse map brings the coordinates back to the same point.
back = inverse(center, w)
print("round-trip error:", np.linalg.norm(back.data - u.data))

# Moving away from the origin: the map slows down (mobility drops).
for scale in (0.1, 1.0, 10.0, 100.0):
    print(f"  scale {scale:6.1f}: mobility {mobility(scale * w):.3e}")
