"""Dense complex-matrix kernels used by every other module.

All routines are pure functions of their inputs.  Rank decisions use a
relative singular-value cutoff (``tol`` times the largest singular value) so
that tolerance-thresholded pseudo-inverses behave consistently on non-square
and rank-deficient blocks.  Singular vectors are phase-normalized (first
nonzero entry of each left singular vector real and nonnegative) so repeated
runs produce identical matrices.
"""

from __future__ import annotations

import numpy as np

DEFAULT_TOL = 1e-10


def as_matrix(a) -> np.ndarray:
    """Validate and return ``a`` as a nonempty finite complex 2-D array."""
    m = np.asarray(a)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"expected a nonempty 2-D matrix, got shape {m.shape!r}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(np.imag(m)))):
        raise ValueError("matrix entries must be finite")
    return np.ascontiguousarray(m, dtype=np.complex128)


def _fix_phases(u: np.ndarray, vh: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Make the first nonzero entry of each left singular vector real >= 0.

    Columns of ``u`` and rows of ``vh`` are rotated in matched pairs so the
    product U @ S @ Vh is unchanged.  Leftover rows/columns (beyond the
    min(m, n) matched pairs) get the same convention applied independently.
    """
    u = u.copy()
    vh = vh.copy()

    def leading_phase(vec):
        mags = np.abs(vec)
        top = mags.max(initial=0.0)
        if top == 0.0:
            return None
        idx = int(np.argmax(mags > 1e-12 * top))
        return vec[idx] / mags[idx]

    paired = min(u.shape[1], vh.shape[0])
    for j in range(u.shape[1]):
        ph = leading_phase(u[:, j])
        if ph is None:
            continue
        u[:, j] *= np.conj(ph)
        if j < paired:
            vh[j, :] *= ph
    for j in range(paired, vh.shape[0]):
        ph = leading_phase(vh[j, :])
        if ph is not None:
            vh[j, :] *= np.conj(ph)
    return u, vh


def svd_partition(a, tol: float = DEFAULT_TOL):
    """Full SVD of ``a`` split at the rank cutoff.

    Returns ``(u, s, v1, v0)`` with ``a = u @ diag(s) @ vstack([v1, v0])``
    (up to zero padding of the singular values).  Rows of ``v1`` span the row
    space (singular value above ``tol * s_max``), rows of ``v0`` span the
    null space; callers that need a column basis take the conjugate
    transpose.
    """
    a = as_matrix(a)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    u, s, vh = np.linalg.svd(a, full_matrices=True)
    u, vh = _fix_phases(u, vh)
    smax = s[0] if s.size else 0.0
    rank = int(np.count_nonzero(s > tol * smax)) if smax > 0 else 0
    return u, s, vh[:rank], vh[rank:]


def effective_rank(a, tol: float = DEFAULT_TOL) -> int:
    """Number of singular values above ``tol`` times the largest one."""
    a = as_matrix(a)
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def pinv(a, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse with relative cutoff ``tol``."""
    a = as_matrix(a)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return np.zeros((a.shape[1], a.shape[0]), dtype=np.complex128)
    inv = np.where(s > tol * smax, 1.0 / np.where(s > 0, s, 1.0), 0.0)
    return (vh.conj().T * inv) @ u.conj().T


def null_projector(a, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projector onto the null space of ``a``.

    The result ``N`` is square of size ``a.shape[1]`` with ``a @ N ~ 0``,
    ``N = N^H`` and ``N @ N = N``.  Rank-deficient rows of ``a`` are absorbed
    by the singular-value cutoff.
    """
    a = as_matrix(a)
    if a.shape[1] < 1:
        raise ValueError("matrix must have at least one column")
    _, _, v1, _ = svd_partition(a, tol)
    n = np.eye(a.shape[1], dtype=np.complex128) - v1.conj().T @ v1
    return 0.5 * (n + n.conj().T)
