"""Shared builders for randomized near-field test scenarios."""

import numpy as np

from hmimos.geometry import Scenario, SurfaceSpec, UserPlacement


def random_nf_scenario(rng, ns_choices=(9, 16, 25), k_choices=(1, 2, 3)):
    """Random non-boresight scenario with single-patch users."""
    ns = int(rng.choice(ns_choices))
    k = int(rng.choice(k_choices))
    n_side = int(np.sqrt(ns))
    tx = SurfaceSpec.grid(n_side, n_side, 0.4)
    users = []
    for _ in range(k):
        z = float(rng.uniform(0.5, 3.0))
        cx, cy = rng.uniform(0.3, 1.5, size=2) * rng.choice([-1.0, 1.0], size=2)
        rx = SurfaceSpec.grid(1, 1, 0.4, center=(float(cx), float(cy), z), role="receive")
        users.append(UserPlacement(rx, z))
    return Scenario(wavelength=1.0, transmit=tx, users=tuple(users))


def two_user_scenario(n_side=4, nr_grid=(2, 2), spacing=0.4):
    """Deterministic small 2-user scenario with lateral offsets."""
    tx = SurfaceSpec.grid(n_side, n_side, spacing)
    users = (
        UserPlacement(
            SurfaceSpec.grid(*nr_grid, spacing, center=(0.5, 0.3, 0.9), role="receive"), 0.9
        ),
        UserPlacement(
            SurfaceSpec.grid(*nr_grid, spacing, center=(-0.6, 0.4, 1.4), role="receive"), 1.4
        ),
    )
    return Scenario(wavelength=1.0, transmit=tx, users=users)
