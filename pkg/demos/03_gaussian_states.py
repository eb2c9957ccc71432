"""Gaussian states: covariances, fidelity, and the block approximation.

Squeezed vacuum through a passive circuit stays Gaussian, so the whole
state is one covariance matrix.  Discarding correlations between
sublattices gives the block-diagonal approximate state the fast sampler
draws from; the Frobenius distance between the two covariances is the
single number the error analysis runs on.
"""

import math

import numpy as np

from blsampler import (
    block_approx_covariance,
    build_lattice,
    fidelity,
    frobenius_diff,
    infidelity_bound,
    sample_random_circuit,
    state_covariance,
    tvd_bound,
    x_norm_bound,
)

lat = build_lattice(1, 1, 1)
idle = sample_random_circuit(lat, 0, np.random.default_rng(0))

print("== single-mode closed form ==")
vacuum = state_covariance(idle, lat, 0.0)
for r in (0.2, 0.5, 1.0):
    squeezed = state_covariance(idle, lat, r)
    print(
        f"r={r}: fidelity(vacuum, squeezed) = {fidelity(vacuum, squeezed):.12f}"
        f"   1/cosh r = {1.0 / math.cosh(r):.12f}"
    )

print()
print("== block approximation error vs depth ==")
lat = build_lattice(1, 2, 4)
rng = np.random.default_rng(42)
r = 0.5
for depth in (1, 2, 3, 4, 6):
    circ = sample_random_circuit(lat, depth, rng)
    v = state_covariance(circ, lat, r)
    blocks = block_approx_covariance(circ, lat, r)
    x = frobenius_diff(v, blocks.assemble())
    line = f"D={depth}: ||X||_F = {x:.3e}"
    if x > 0:
        line += (
            f"   infidelity <= {infidelity_bound(x, 2, r):.3e}"
            f"   distance bound {tvd_bound(x, 2, r):.3f}"
        )
    print(line)
print("(depths 1-2 are exact: every correlation still lives inside one block)")

print()
print("== the X bound needs only the leakage rate ==")
for eta in (1e-6, 1e-4, 1e-2):
    print(f"eta = {eta:.0e}: ||X|| <= {x_norm_bound(eta, 2, r):.4f}")
