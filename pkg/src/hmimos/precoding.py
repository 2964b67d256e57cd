"""Interference elimination for multi-user tri-polarized links.

Two schemes:

* user clustering: users are dealt round-robin (by distance) onto the three
  polarizations; 0/1 selection matrices restrict each user to its own
  co-polarized sub-channel.
* two-layer precoding: an elimination layer places the transmit matrix in
  the null space of the cross-polarized system, then block diagonalization
  over the (polarization, user) groups removes inter-user and residual
  cross-polarization coupling.

Rank decisions use the tolerance-thresholded SVD; channel blocks whose
largest singular value collapses raise :class:`PrecoderDegeneracyError`
naming the block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import POLS, PolarizedChannel
from .errors import CapacityExceededError, ConfigError, PrecoderDegeneracyError
from .numerics import DEFAULT_TOL, svd_partition


@dataclass(frozen=True)
class ClusterAssignment:
    """Distance-ranked round-robin split of users onto the polarizations."""

    subsets: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
    selection: tuple[np.ndarray, np.ndarray, np.ndarray]  # 0/1 diagonal, N_r x N_r

    def subset(self, pol: str) -> tuple[int, ...]:
        return self.subsets[POLS.index(pol)]


def cluster_users(distances, nr_bar: int = 1) -> ClusterAssignment:
    """Assign each user to one polarization by sorted distance.

    Users sorted ascending by distance are dealt round-robin: ranks 1, 4, ...
    to x, ranks 2, 5, ... to y, ranks 3, 6, ... to z.  Requires the user
    count to be divisible by 3.  Ties keep the lower user index first
    (stable sort), so permuted inputs give the same assignment.
    """
    d = np.asarray(distances, dtype=float)
    k = d.size
    if k == 0 or k % 3 != 0:
        raise ConfigError("K must be divisible by 3 for user-cluster precoding")
    order = np.argsort(d, kind="stable")
    subsets = tuple(tuple(int(u) for u in order[i::3]) for i in range(3))

    n_r = k * nr_bar
    selection = []
    for members in subsets:
        diag = np.zeros(n_r)
        for u in members:
            diag[u * nr_bar : (u + 1) * nr_bar] = 1.0
        selection.append(np.diag(diag))
    return ClusterAssignment(subsets=subsets, selection=tuple(selection))


def cluster_subchannels(channel: PolarizedChannel, assignment: ClusterAssignment):
    """Per-polarization sub-channels stacking the rows of the assigned users.

    Each returned matrix has shape (K * N̄_r / 3, N_s) and contains the
    co-polarized rows of the users in that polarization's subset, in
    distance-rank order.
    """
    out = []
    for pol, members in zip(POLS, assignment.subsets):
        h_qq = channel.block(pol, pol)
        rows = [h_qq[channel.user_rows(u)] for u in members]
        out.append(np.vstack(rows))
    return tuple(out)


def _require_nonvanishing(name: str, mat: np.ndarray, scale: float, tol: float) -> None:
    top = float(np.linalg.norm(mat, 2)) if np.any(mat) else 0.0
    if top <= tol * scale:
        raise PrecoderDegeneracyError(name, f"largest singular value {top:.3e} below {tol:g} of channel scale")


def cross_polar_system(channel: PolarizedChannel) -> np.ndarray:
    """The 3 N_r x 3 N_s system collecting only the cross-polarized blocks."""
    zero = np.zeros_like(channel.block("x", "x"))
    return np.vstack(
        [
            np.hstack([zero, channel.block("x", "y"), channel.block("x", "z")]),
            np.hstack([channel.block("y", "x"), zero, channel.block("y", "z")]),
            np.hstack([channel.block("z", "x"), channel.block("z", "y"), zero]),
        ]
    )


def gaussian_elim_precoder(channel: PolarizedChannel, tol: float = DEFAULT_TOL):
    """First-layer precoders (P_x, P_y, P_z) nulling the cross-polarized sums.

    Eliminating the cross-polarization system leaves its null space; the
    returned matrices are the three per-polarization row blocks of an
    orthonormal null-space basis of that system, so for every receive
    polarization the two cross-polarized contributions cancel
    (H_xy P_y + H_xz P_z = 0 and cyclically).  The shared column space keeps
    all three co-polarized channels alive; separating the per-polarization
    data is the second (block-diagonalization) layer's job.

    A cross block whose largest singular value collapses below ``tol`` of the
    channel scale (boresight-aligned geometries zero them exactly) raises,
    naming the block.
    """
    scale = max(float(np.linalg.norm(channel.block(p, q), 2)) for p in POLS for q in POLS)
    for q in POLS:
        for p in POLS:
            if p != q:
                _require_nonvanishing(f"H_{p}{q}", channel.block(p, q), scale, tol)

    system = cross_polar_system(channel)
    _, _, _, v0 = svd_partition(system, tol)
    if v0.shape[0] < 1:
        raise PrecoderDegeneracyError("H_XP", "cross-polarization system has no null space")
    basis = v0.conj().T  # 3 N_s x d, orthonormal columns
    n_s = channel.n_tx
    return basis[:n_s], basis[n_s : 2 * n_s], basis[2 * n_s :]


def bd_precoder(user_blocks, tol: float = DEFAULT_TOL):
    """Block-diagonalization precoder for one co-polarized channel.

    ``user_blocks`` is the per-user list of N̄_r x N_s effective channels.
    For each user the other users' blocks are stacked into an interference
    matrix; the user's precoder lives in its null space, restricted to the
    row space of the user's own projected channel.  Returns the
    column-concatenated precoder and the per-user column slices.
    """
    k = len(user_blocks)
    n_s = user_blocks[0].shape[1]
    columns = []
    slices = []
    offset = 0
    for i in range(k):
        others = [user_blocks[j] for j in range(k) if j != i]
        if others:
            t_bar = np.vstack(others)
            _, _, _, v0 = svd_partition(t_bar, tol)
            if v0.shape[0] < 1:
                raise CapacityExceededError(
                    f"block {i + 1}: interference of the other {k - 1} blocks fills the "
                    f"{n_s}-dimensional input space"
                )
            basis = v0.conj().T  # N_s x d
        else:
            basis = np.eye(n_s, dtype=np.complex128)
        projected = user_blocks[i] @ basis
        _, _, v1, _ = svd_partition(projected, tol)
        n_streams = min(v1.shape[0], user_blocks[i].shape[0])
        f_i = basis @ v1[:n_streams].conj().T
        columns.append(f_i)
        slices.append(slice(offset, offset + f_i.shape[1]))
        offset += f_i.shape[1]
    return np.hstack(columns), tuple(slices)


@dataclass(frozen=True)
class PrecoderSet:
    """First-layer matrices, per-polarization BD precoders and the effective
    co-polarized channels they produce."""

    first_layer: tuple[np.ndarray, np.ndarray, np.ndarray]  # P_x, P_y, P_z
    second_layer: tuple[np.ndarray, np.ndarray, np.ndarray]  # F_xx, F_yy, F_zz
    effective: tuple[np.ndarray, np.ndarray, np.ndarray]  # H_xx^F, H_yy^F, H_zz^F
    row_slices: tuple[slice, ...]  # receive rows per user (within one block)
    col_slices: tuple[tuple[slice, ...], ...]  # per pol, per user stream columns

    @property
    def n_users(self) -> int:
        return len(self.row_slices)

    def effective_block(self, pol: str) -> np.ndarray:
        return self.effective[POLS.index(pol)]

    def user_gain_block(self, pol: str, k: int) -> np.ndarray:
        i = POLS.index(pol)
        return self.effective[i][self.row_slices[k], self.col_slices[i][k]]

    def leakage_block(self, pol: str, k_rx: int, k_tx: int) -> np.ndarray:
        i = POLS.index(pol)
        return self.effective[i][self.row_slices[k_rx], self.col_slices[i][k_tx]]

    def user_singulars(self, pol: str, k: int) -> np.ndarray:
        return np.linalg.svd(self.user_gain_block(pol, k), compute_uv=False)

    def pooled_singulars(self, pol: str) -> np.ndarray:
        """All users' effective singular values, user-major order."""
        vals = [self.user_singulars(pol, k) for k in range(self.n_users)]
        return np.concatenate(vals) if vals else np.zeros(0)

    def export_rows(self):
        """Long-format rows (pol, layer, row, col, re, im) for CSV export."""
        rows = []
        for i, pol in enumerate(POLS):
            for layer, mat in (("P", self.first_layer[i]), ("F", self.second_layer[i])):
                for r in range(mat.shape[0]):
                    for c in range(mat.shape[1]):
                        v = mat[r, c]
                        rows.append((pol, layer, r + 1, c + 1, float(v.real), float(v.imag)))
        return rows


def two_layer_precoder(channel: PolarizedChannel, tol: float = DEFAULT_TOL) -> PrecoderSet:
    """Run both layers and return the full precoder set.

    The second layer diagonalizes jointly over the 3 K (polarization, user)
    groups of the first-layer effective channel, so each user's streams in
    one polarization are free of both inter-user and residual
    cross-polarization coupling.
    """
    p_mats = gaussian_elim_precoder(channel, tol)
    k = channel.n_users
    row_slices = tuple(channel.user_rows(u) for u in range(k))

    h_p = [channel.block(pol, pol) @ p_q for pol, p_q in zip(POLS, p_mats)]
    groups = [h_p[i][rs] for i in range(3) for rs in row_slices]
    f_all, group_slices = bd_precoder(groups, tol)

    second = []
    effective = []
    col_slices = []
    for i in range(3):
        pol_groups = group_slices[i * k : (i + 1) * k]
        start = pol_groups[0].start
        f_q = f_all[:, start : pol_groups[-1].stop]
        second.append(f_q)
        effective.append(h_p[i] @ f_q)
        col_slices.append(tuple(slice(s.start - start, s.stop - start) for s in pol_groups))
    return PrecoderSet(
        first_layer=tuple(p_mats),
        second_layer=tuple(second),
        effective=tuple(effective),
        row_slices=row_slices,
        col_slices=tuple(col_slices),
    )


def effective_channel(channel: PolarizedChannel, pre: PrecoderSet) -> np.ndarray:
    """Block-diagonal spatially precoded channel (x, y, z blocks)."""
    blocks = [
        channel.block(pol, pol) @ pre.first_layer[i] @ pre.second_layer[i]
        for i, pol in enumerate(POLS)
    ]
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols), dtype=np.complex128)
    r = c = 0
    for b in blocks:
        out[r : r + b.shape[0], c : c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def cross_polar_residual(channel: PolarizedChannel, p_mats) -> float:
    """Relative cancellation residual ||H_XP P|| / (||H_XP|| ||P||)."""
    h_xp = cross_polar_system(channel)
    p = np.vstack(p_mats)
    denom = np.linalg.norm(h_xp) * np.linalg.norm(p)
    if denom == 0.0:
        return 0.0
    return float(np.linalg.norm(h_xp @ p) / denom)
