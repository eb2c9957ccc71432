"""Gaussian-moment tables for products of linear forms (internal).

For a thin factor ``G`` (n rows, R columns) the hafnian of ``G @ G.T``
equals the standard-normal expectation ``E[prod_i (G z)_i]``.  Expanding
the product of linear forms over monomials ``z^m`` reduces that to a sum
of monomial coefficients weighted by ``prod_r (m_r - 1)!!`` over the
all-even exponent vectors.  This module maintains, per variable count,
degree-indexed tables that make (a) multiplying a homogeneous polynomial
by a linear form and (b) extracting the Gaussian moment both single
vectorized gathers.

Exponent vectors of degree ``g`` are kept in lexicographic order; only
the index maps (``comp - e_r`` per variable) and the moment weights are
retained after construction.  Tables grow on demand and are cached per
variable count for the lifetime of the process.
"""

from __future__ import annotations

import threading

import numpy as np

_MAX_DEGREE = 512  # packing limit; far beyond any reachable budget

# Double factorials of odd numbers: _ODD_DFACT[k] = (2k - 1)!!.  Capped at
# 128 entries: 253!! is still finite in float64, and no supported photon
# budget comes near exponent 254 on a single variable (an IndexError here
# beats a silent inf).
_ODD_DFACT = np.cumprod(np.concatenate(([1.0], np.arange(1, 256, 2, dtype=float))))


def even_moment_weights(degree: int) -> np.ndarray:
    """Weights ``(i-1)!! (g-i-1)!!`` over two variables, zero on odd splits."""
    w = np.zeros(degree + 1)
    if degree % 2 == 0:
        i = np.arange(0, degree + 1, 2)
        w[i] = _ODD_DFACT[i // 2] * _ODD_DFACT[(degree - i) // 2]
    return w


def _compositions(degree: int, n_vars: int) -> np.ndarray:
    """All exponent vectors of the given total degree, lexicographic."""
    if n_vars == 1:
        return np.array([[degree]], dtype=np.int64)
    parts = []
    for first in range(degree + 1):
        rest = _compositions(degree - first, n_vars - 1)
        block = np.empty((rest.shape[0], n_vars), dtype=np.int64)
        block[:, 0] = first
        block[:, 1:] = rest
        parts.append(block)
    return np.vstack(parts)


class MomentTables:
    """Degree-indexed shift maps and moment weights for ``n_vars`` variables."""

    def __init__(self, n_vars: int):
        if n_vars < 1:
            raise ValueError(f"n_vars must be >= 1, got {n_vars}")
        self.n_vars = n_vars
        self._keys: list[np.ndarray] = []
        self._shift: list[tuple[np.ndarray, ...]] = []
        self._weights: list[np.ndarray] = []
        self._grow_lock = threading.Lock()
        self.ensure(0)

    def _pack(self, comps: np.ndarray) -> np.ndarray:
        keys = np.zeros(comps.shape[0], dtype=np.int64)
        for r in range(self.n_vars):
            keys = keys * _MAX_DEGREE + comps[:, r]
        return keys

    def ensure(self, degree: int) -> None:
        """Extend tables so all degrees up to ``degree`` are available.

        Growth is serialized: published degrees are append-only and never
        mutated, so readers need no lock.
        """
        if len(self._keys) > degree:
            return
        with self._grow_lock:
            self._grow(degree)

    def _grow(self, degree: int) -> None:
        while len(self._keys) <= degree:
            g = len(self._keys)
            comps = _compositions(g, self.n_vars)
            keys = self._pack(comps)  # lexicographic comps => ascending keys
            if g == 0:
                shift = tuple(
                    np.full(1, -1, dtype=np.int64) for _ in range(self.n_vars)
                )
            else:
                prev = self._keys[g - 1]
                maps = []
                stride = 1
                for r in range(self.n_vars - 1, -1, -1):
                    valid = comps[:, r] >= 1
                    target = keys - stride
                    pos = np.searchsorted(prev, target)
                    pos[~valid] = -1
                    maps.append(pos)
                    stride *= _MAX_DEGREE
                maps.reverse()
                shift = tuple(maps)
            even = (comps % 2 == 0).all(axis=1)
            weights = np.zeros(comps.shape[0])
            if even.any():
                weights[even] = np.prod(_ODD_DFACT[comps[even] // 2], axis=1)
            # readers gate on len(_keys): publish it last
            self._shift.append(shift)
            self._weights.append(weights)
            self._keys.append(keys)

    def size(self, degree: int) -> int:
        self.ensure(degree)
        return self._keys[degree].shape[0]

    def multiply_linear(
        self, coeffs: np.ndarray, degree: int, form: np.ndarray
    ) -> np.ndarray:
        """Coefficients of ``poly * sum_r form[r] z_r`` (degree rises by one).

        ``coeffs`` may carry leading batch axes; the coefficient axis is
        always the last one.
        """
        self.ensure(degree + 1)
        coeffs = np.asarray(coeffs)
        out_size = self._keys[degree + 1].shape[0]
        out = np.zeros(coeffs.shape[:-1] + (out_size,), dtype=complex)
        for r in range(self.n_vars):
            if form[r] == 0:
                continue
            src = self._shift[degree + 1][r]
            valid = src >= 0
            out[..., valid] += form[r] * coeffs[..., src[valid]]
        return out

    def multiply_linear_adjoint(
        self, w: np.ndarray, degree: int, form: np.ndarray
    ) -> np.ndarray:
        """Adjoint of :meth:`multiply_linear`: pulls a weight vector at
        ``degree`` back to ``degree - 1`` so that
        ``w . (poly * form) == adjoint(w) . poly``.  For each variable the
        index map is injective, so plain fancy-index accumulation is safe.
        """
        if degree < 1:
            raise ValueError("adjoint needs degree >= 1")
        self.ensure(degree)
        out = np.zeros(self._keys[degree - 1].shape[0], dtype=complex)
        for r in range(self.n_vars):
            if form[r] == 0:
                continue
            src = self._shift[degree][r]
            valid = src >= 0
            out[src[valid]] += form[r] * w[valid]
        return out

    def weights(self, degree: int) -> np.ndarray:
        """Gaussian-moment weight vector for homogeneous ``degree`` (view)."""
        self.ensure(degree)
        return self._weights[degree]

    def moment(self, coeffs: np.ndarray, degree: int) -> complex:
        """Standard-normal expectation of the homogeneous polynomial."""
        if degree % 2:
            return 0j
        self.ensure(degree)
        return complex(np.dot(coeffs, self._weights[degree]))


_TABLES: dict[int, MomentTables] = {}
_TABLES_LOCK = threading.Lock()


def tables(n_vars: int) -> MomentTables:
    """Process-wide table cache, one entry per variable count."""
    tab = _TABLES.get(n_vars)
    if tab is None:
        with _TABLES_LOCK:
            tab = _TABLES.setdefault(n_vars, MomentTables(n_vars))
    return tab
