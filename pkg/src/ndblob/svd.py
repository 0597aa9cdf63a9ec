"""Reference singular value decomposition: one-sided Jacobi.

Plane rotations orthogonalize the columns of a working copy of the
matrix; at convergence the column norms are the singular values, the
normalized columns are the left vectors and the accumulated rotations
give the right vectors. Accurate at small scale, which is all the
reference backend promises; plug a LAPACK-backed implementation into
the backend registry for speed.
"""

from __future__ import annotations

import numpy as np

from .errors import NonConvergenceError

__all__ = ["jacobi_svd", "MAX_SWEEPS"]

MAX_SWEEPS = 30
_TOL = 32 * np.finfo(np.float64).eps


def jacobi_svd(a: np.ndarray, full: bool = False):
    """Decompose a real matrix as u @ diag(s) @ vt.

    Returns (u, s, vt) with s descending and nonnegative. `full` pads u
    and vt to square orthogonal matrices; otherwise both are trimmed to
    k = min(m, n) columns and rows.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("jacobi_svd expects a 2-d array")
    m, n = a.shape
    if m == 0 or n == 0:
        k = min(m, n)
        u = np.eye(m, m if full else k)
        vt = np.eye(n, n) if full else np.eye(k, n)
        return u, np.zeros(k), vt
    if m < n:
        ut, s, vtt = jacobi_svd(a.T, full=full)
        return vtt.T, s, ut.T

    w = np.array(a, dtype=np.float64, order="F")
    v = np.eye(n, order="F")
    for _ in range(MAX_SWEEPS):
        # squared column norms, refreshed per sweep and patched per rotation
        norms2 = np.einsum("ij,ij->j", w, w)
        worst = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha, beta = norms2[i], norms2[j]
                # the incremental updates can drift a hair below zero
                if alpha <= 0.0 or beta <= 0.0:
                    continue
                wi, wj = w[:, i], w[:, j]
                gamma = wi @ wj
                rel = abs(gamma) / np.sqrt(alpha * beta)
                worst = max(worst, rel)
                if rel <= _TOL:
                    continue
                zeta = (beta - alpha) / (2.0 * gamma)
                if zeta == 0.0:
                    t = 1.0
                else:
                    t = np.sign(zeta) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.hypot(1.0, t)
                s_ = c * t
                gi = c * wi - s_ * wj
                gj = s_ * wi + c * wj
                w[:, i], w[:, j] = gi, gj
                vi, vj = v[:, i], v[:, j]
                v[:, i], v[:, j] = c * vi - s_ * vj, s_ * vi + c * vj
                cs = 2.0 * c * s_ * gamma
                norms2[i] = c * c * alpha - cs + s_ * s_ * beta
                norms2[j] = s_ * s_ * alpha + cs + c * c * beta
        if worst <= _TOL:
            break
    else:
        raise NonConvergenceError(
            f"one-sided Jacobi did not converge in {MAX_SWEEPS} sweeps")

    norms = np.sqrt(np.einsum("ij,ij->j", w, w))
    order = np.argsort(norms)[::-1]
    s = norms[order]
    w = w[:, order]
    v = v[:, order]

    k = n  # tall case, so k == min(m, n)
    u = np.zeros((m, m if full else k), order="F")
    deficient = []
    for j in range(k):
        if s[j] > 0.0:
            u[:, j] = w[:, j] / s[j]
        else:
            deficient.append(j)
    fill = deficient + (list(range(k, m)) if full else [])
    if fill:
        _fill_orthonormal(u, fill)
    return u, s, v.T


def _fill_orthonormal(u: np.ndarray, columns: list[int]) -> None:
    """Complete `u` in place: the listed columns become unit vectors
    orthogonal to every other column (pivoted Gram-Schmidt over the
    identity, re-orthogonalized for stability)."""
    m = u.shape[0]
    done = [j for j in range(u.shape[1]) if j not in columns]
    cand = np.eye(m)
    for _ in range(2):
        for j in done:
            cand -= np.outer(u[:, j], u[:, j] @ cand)
    for col in columns:
        norms = np.einsum("ij,ij->j", cand, cand)
        pick = int(np.argmax(norms))
        q = cand[:, pick] / np.sqrt(norms[pick])
        for j in done:
            q -= u[:, j] * (u[:, j] @ q)
        q /= np.sqrt(q @ q)
        u[:, col] = q
        done.append(col)
        cand -= np.outer(q, q @ cand)
