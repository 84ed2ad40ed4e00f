"""Independent reference computations used to cross-check the fast paths.

Nothing here reuses the realignment/SVD machinery in :mod:`spevents.opclass`.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import least_squares

_I2 = np.eye(2)


def _unpack(p):
    a = (p[0:4] + 1j * p[4:8]).reshape(2, 2)
    b = (p[8:12] + 1j * p[12:16]).reshape(2, 2)
    return a, b


def _kron(a, b):
    return np.einsum("ij,kl->ikjl", a, b).reshape(4, 4)


def _residual(p, target):
    a, b = _unpack(p)
    r = (_kron(a, b) - target).ravel()
    return np.concatenate([r.real, r.imag])


def _jacobian(p, target):
    a, b = _unpack(p)
    # column (i, j) of da is E_ij (x) b, column (k, l) of db is a (x) E_kl
    da = np.einsum("ip,jq,kl->ikjlpq", _I2, _I2, b).reshape(16, 4)
    db = np.einsum("ij,kp,lq->ikjlpq", a, _I2, _I2).reshape(16, 4)
    jc = np.concatenate([da, 1j * da, db, 1j * db], axis=1)
    return np.concatenate([jc.real, jc.imag], axis=0)


def kron_fit_residual(matrix, rng: np.random.Generator, starts: int = 3, max_nfev: int = 60) -> float:
    """Smallest relative residual ``||A (x) B - M|| / ||M||`` found by multi-start LM.

    ``M`` must be 4x4; ``A`` and ``B`` are 2x2 complex. The best Kronecker
    fit has no spurious local minima, so a start that converges is final;
    further starts only follow runs that hit ``max_nfev``.
    """
    m = np.asarray(matrix, dtype=complex)
    scale = np.linalg.norm(m)
    if scale == 0:
        return 0.0
    target = m / scale
    best = np.inf
    for _ in range(starts):
        fit = least_squares(
            _residual,
            rng.standard_normal(16),
            jac=_jacobian,
            args=(target,),
            method="lm",
            xtol=1e-12,
            ftol=1e-12,
            gtol=1e-12,
            max_nfev=max_nfev,
        )
        best = min(best, float(np.linalg.norm(fit.fun)))
        if best < 1e-9 or fit.status > 0:
            break
    return best


def brute_force_is_local(matrix, rng: np.random.Generator, threshold: float = 1e-6) -> bool:
    m = np.asarray(matrix, dtype=complex)
    if not np.any(m):
        return False
    return kron_fit_residual(m, rng) < threshold
