"""Polarization-ellipse descriptors of a single tri-polarized patch.

A patch excites three field components with independent amplitudes and
phases; together they trace an elliptical polarization whose plane normal,
spectral density tensor and pseudovector are computed here.  The analog
phase-configuration matrix is carried as data only (nothing in the pipeline
optimizes it).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PolarizedExcitation:
    """Amplitudes in [0, 1] and phases (wrapped to [0, 2*pi)) per axis."""

    amplitudes: tuple[float, float, float]
    phases: tuple[float, float, float]

    def __post_init__(self):
        amps = tuple(float(a) for a in self.amplitudes)
        if any(a < 0 or a > 1 for a in amps):
            raise ValueError("amplitudes must lie in [0, 1]")
        phases = tuple(float(p) % TWO_PI for p in self.phases)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "phases", phases)

    def complex_field(self) -> np.ndarray:
        """Complex field vector (E_x e^{i theta_x}, E_y ..., E_z ...)."""
        a = np.asarray(self.amplitudes)
        p = np.asarray(self.phases)
        return a * np.exp(1j * p)


class PhaseConfig:
    """Per-patch diagonal 3x3 reflection blocks with |entry| <= 1.

    Stored as an (N, 3) complex array of diagonal entries; off-diagonals are
    structurally zero.
    """

    def __init__(self, diagonals):
        diag = np.asarray(diagonals, dtype=np.complex128)
        if diag.ndim != 2 or diag.shape[1] != 3:
            raise ValueError("expected an (N, 3) array of diagonal entries")
        if np.any(np.abs(diag) > 1.0 + 1e-12):
            raise ValueError("reflection coefficients must have magnitude <= 1")
        self.diagonals = diag

    @classmethod
    def from_excitations(cls, excitations) -> "PhaseConfig":
        rows = [exc.complex_field() for exc in excitations]
        return cls(np.asarray(rows))

    @property
    def n_patches(self) -> int:
        return self.diagonals.shape[0]

    def block(self, n: int) -> np.ndarray:
        return np.diag(self.diagonals[n])

    def full(self) -> np.ndarray:
        """3N x 3N block-diagonal configuration matrix."""
        n = self.n_patches
        out = np.zeros((3 * n, 3 * n), dtype=np.complex128)
        for i in range(n):
            out[3 * i : 3 * i + 3, 3 * i : 3 * i + 3] = self.block(i)
        return out


def polarization_descriptors(exc: PolarizedExcitation):
    """Normal vector, spectral density tensor and pseudovector of the ellipse.

    Returns ``(w_normal, s_density, pseudovector)``.  The pseudovector is
    computed from the complex field components and coincides with the normal
    vector for every excitation (both reduce to the same sine expressions).
    """
    ex, ey, ez = exc.amplitudes
    tx, ty, tz = exc.phases

    w = np.array(
        [
            -2.0 * ey * ez * math.sin(ty - tz),
            -2.0 * ez * ex * math.sin(tz - tx),
            -2.0 * ex * ey * math.sin(tx - ty),
        ]
    )

    def cross(ai, aj, ti, tj):
        return ai * aj * np.exp(1j * (ti - tj))

    s = np.array(
        [
            [ex * ex, cross(ex, ey, tx, ty), cross(ex, ez, tx, tz)],
            [cross(ey, ex, ty, tx), ey * ey, cross(ey, ez, ty, tz)],
            [cross(ez, ex, tz, tx), cross(ez, ey, tz, ty), ez * ez],
        ],
        dtype=np.complex128,
    )

    field = exc.complex_field()
    lam7 = -2.0 * np.imag(field[1] * np.conj(field[2]))
    lam5 = -2.0 * np.imag(field[0] * np.conj(field[2]))
    lam2 = -2.0 * np.imag(field[0] * np.conj(field[1]))
    v = np.array([lam7, -lam5, lam2])
    return w, s, v
