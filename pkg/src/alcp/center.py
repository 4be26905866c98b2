"""Choice of a center point that puts a given Stiefel point near the origin."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cayley import forward, singular_factor
from .manifold import CenterPoint, as_array, block_norms


def choose_center(u) -> CenterPoint:
    """Center ``S = diag(Q1 Q2^T, I)`` from the SVD ``U_up = Q1 Sigma Q2^T``.

    The resulting coordinates of ``U`` have a zero A-block and
    ``||B||_2 <= 1``, and ``det(I_p + t^T U_up) >= 1``.

    When ``U_up`` is rank deficient the polar factor is not unique; whatever
    the SVD routine returns is accepted, since the guarantees above hold for
    any valid SVD.
    """
    u = as_array(u)
    N, p = u.shape
    q1, _, q2t = np.linalg.svd(u[:p])
    return CenterPoint(q1 @ q2t, N)


@dataclass(frozen=True)
class CenterDiagnostics:
    det: float
    det_lower_ok: bool
    a_block_norm: float
    b_block_norm: float


def verify_center(center: CenterPoint, u) -> CenterDiagnostics:
    """Report the determinant and block norms of ``forward(center, u)``.

    Propagates :class:`~alcp.cayley.SingularPoint`.
    """
    v = forward(center, u)
    det = float(np.linalg.det(singular_factor(center, u)))
    _, nb = block_norms(v)
    return CenterDiagnostics(
        det=det,
        det_lower_ok=det >= 1.0 - 1e-9,
        a_block_norm=float(np.linalg.norm(v.a)),
        b_block_norm=nb,
    )
