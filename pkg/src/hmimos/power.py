"""Power allocation across polarizations and streams.

Three schemes:

* PA1 selects the polarization with the largest effective Frobenius norm and
  water-fills its streams.
* PA2 splits the budget equally over the three polarizations and uniformly
  over streams.
* PA3 water-fills twice: first over the per-polarization Frobenius gains,
  then over the singular values pooled within each polarization.

A :class:`PowerAllocation` stores the per-polarization watts ``q`` and
per-stream shares ``g`` (each polarization's shares sum to one), so the
physical power of stream i of polarization p is ``q[p] * g[p][i]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def water_fill(gains, budget: float, sigma2: float):
    """Exact water filling: powers_i = (eps - sigma2 / gains_i)^+.

    The water level ``eps`` is found by the exact active-set method: sort the
    gains descending and keep the largest active set whose weakest channel
    still receives positive power.  Channels with nonpositive gain get
    nothing; at least one gain must be positive.

    Returns ``(powers, eps)`` with ``powers`` in the input order summing to
    ``budget``.
    """
    g = np.asarray(gains, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ValueError("gains must be a nonempty 1-D sequence")
    if budget <= 0 or sigma2 <= 0:
        raise ValueError("budget and noise power must be positive")
    positive = g > 0
    if not np.any(positive):
        raise ValueError("water filling needs at least one positive gain")

    idx = np.flatnonzero(positive)
    order = idx[np.argsort(-g[idx], kind="stable")]
    inv = sigma2 / g[order]
    csum = np.cumsum(inv)
    powers = np.zeros_like(g)
    eps = 0.0
    for m in range(order.size, 0, -1):
        eps = (budget + csum[m - 1]) / m
        if eps - inv[m - 1] > 0:
            active = order[:m]
            powers[active] = eps - inv[:m]
            break
    return powers, float(eps)


@dataclass(frozen=True)
class PowerAllocation:
    """Per-polarization watts and per-stream shares for one scheme."""

    scheme: str
    q: np.ndarray  # (3,) watts, sums to the budget
    g: tuple[np.ndarray, np.ndarray, np.ndarray]  # shares, each sums to 1 (or all 0)
    water_level: float | None = None
    stream_water_levels: tuple = (None, None, None)

    def stream_powers(self, pol_index: int) -> np.ndarray:
        return self.q[pol_index] * self.g[pol_index]

    @property
    def total(self) -> float:
        return float(np.sum(self.q))

    def export_rows(self):
        """Long-format rows (pol, stream, q, share, power) for CSV export."""
        rows = []
        for i, pol in enumerate(("x", "y", "z")):
            powers = self.stream_powers(i)
            for j in range(self.g[i].size):
                rows.append((pol, j + 1, float(self.q[i]), float(self.g[i][j]), float(powers[j])))
        return rows


def _pol_spectra(effective) -> list[np.ndarray]:
    """Squared singular values per polarization from matrices or 1-D arrays."""
    out = []
    for item in effective:
        arr = np.asarray(item)
        if arr.ndim == 2:
            s = np.linalg.svd(arr, compute_uv=False)
            out.append(s**2)
        else:
            out.append(np.asarray(arr, dtype=float))
    return out


def _waterfill_shares(gains: np.ndarray, budget: float, sigma2: float):
    """Water-fill a polarization's streams, returned as unit shares."""
    if budget <= 0 or gains.size == 0 or not np.any(gains > 0):
        return np.zeros(gains.size), None
    powers, eps = water_fill(gains, budget, sigma2)
    return powers / budget, eps


def pa1_select(effective, budget: float = 1.0, sigma2: float = 1.0) -> PowerAllocation:
    """Polarization selection: the whole budget on the strongest polarization.

    ``effective`` holds the three effective co-polarized channels (matrices,
    or precomputed squared singular values).  The polarization with the
    largest squared Frobenius norm wins; ties go to the lowest index (x
    before y before z).  Its streams are water-filled.
    """
    spectra = _pol_spectra(effective)
    norms = np.array([float(np.sum(s)) for s in spectra])
    if not np.any(norms > 0):
        raise ValueError("all effective channels are zero")
    sel = int(np.argmax(norms))
    q = np.zeros(3)
    q[sel] = budget
    g = []
    levels = []
    for i, spec in enumerate(spectra):
        if i == sel:
            shares, eps = _waterfill_shares(spec, budget, sigma2)
        else:
            shares, eps = np.zeros(spec.size), None
        g.append(shares)
        levels.append(eps)
    return PowerAllocation(scheme="pa1", q=q, g=tuple(g), stream_water_levels=tuple(levels))


def pa2_equal(n_users: int, nr_bar: int, budget: float = 1.0, stream_counts=None) -> PowerAllocation:
    """Equal split: budget / 3 per polarization, uniform over streams.

    By default each polarization carries ``n_users * nr_bar`` stream slots;
    ``stream_counts`` overrides the per-polarization counts when the
    effective channels carry fewer streams.
    """
    if n_users < 1 or nr_bar < 1:
        raise ValueError("user and stream counts must be positive")
    counts = tuple(stream_counts) if stream_counts is not None else (n_users * nr_bar,) * 3
    q = np.full(3, budget / 3.0)
    g = tuple(np.full(c, 1.0 / c) if c > 0 else np.zeros(0) for c in counts)
    return PowerAllocation(scheme="pa2", q=q, g=g)


def pa3_two_layer(
    effective,
    budget: float = 1.0,
    sigma2: float = 1.0,
    per_user_slices=None,
) -> PowerAllocation:
    """Two-layer allocation: water filling over polarizations, then streams.

    The first layer water-fills the squared Frobenius norms of the three
    effective channels.  The second layer water-fills each polarization's
    pooled singular values under that polarization's budget (one water level
    per polarization).  Pass ``per_user_slices`` (per polarization, per user
    column slices into the pooled spectrum) to run the second layer per user
    instead, splitting the polarization budget equally between its users.
    """
    spectra = _pol_spectra(effective)
    norms = np.array([float(np.sum(s)) for s in spectra])
    if not np.any(norms > 0):
        raise ValueError("all effective channels are zero")
    q, eps_q = water_fill(norms, budget, sigma2)

    g = []
    levels = []
    for i, spec in enumerate(spectra):
        if per_user_slices is None:
            shares, eps = _waterfill_shares(spec, q[i], sigma2)
        else:
            shares = np.zeros(spec.size)
            eps = None
            users = per_user_slices[i]
            if q[i] > 0 and users:
                share_budget = q[i] / len(users)
                for sl in users:
                    part, eps = _waterfill_shares(spec[sl], share_budget, sigma2)
                    shares[sl] = part * (share_budget / q[i])
        g.append(shares)
        levels.append(eps)
    return PowerAllocation(
        scheme="pa3", q=q, g=tuple(g), water_level=eps_q, stream_water_levels=tuple(levels)
    )
