"""Gaussian-state machinery for squeezed-input beam-splitter lattices.

Quadrature covariances use the interleaved ordering
``(x_0, p_0, x_1, p_1, ...)`` with vacuum ``V = I/2`` (hbar = 1 units).
Complex covariances use the ordering ``(a_0..a_{M-1}, a_0^+..a_{M-1}^+)``
and are related to quadrature ones by the unitary basis change
:func:`quad_to_complex`; vacuum again has ``Sigma = I/2``.

The sampling-facing objects are the ``A`` matrices: ``A = Y (I - Q^{-1})``
with ``Q = Sigma + I/2`` and ``Y`` the block swap, whose hafnians give
photon-number probabilities.  For circuits acting on squeezed vacuum the
state is pure and ``A = B (+) conj(B)`` with the low-rank
``B = K tanh(r) K^T``; note ``K`` here is the mode transfer matrix in the
creation-operator convention, the elementwise conjugate of
:func:`~blsampler.lattice.accumulate_unitary`'s output.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError
from .lattice import Circuit, LatticeSpec, accumulate_unitary

__all__ = [
    "QuadCovariance",
    "ComplexCovariance",
    "AMatrix",
    "BlockApproxCovariance",
    "symplectic_form",
    "input_covariance",
    "beam_splitter_symplectic",
    "circuit_symplectic",
    "state_covariance",
    "quad_to_complex",
    "complex_to_quad",
    "reduce_quad",
    "reduce_complex",
    "a_matrix",
    "b_matrix",
    "circuit_pure_a",
    "block_approx_covariance",
    "purity_defect",
    "fidelity",
    "frobenius_diff",
    "infidelity_bound",
    "x_norm_bound",
    "tvd_bound",
    "symplectic_eigenvalues",
    "save_covariance",
    "load_covariance",
    "covariance_to_json",
    "covariance_from_json",
    "SMALL_X_THRESHOLD",
]

#: Largest deviation norm ||X|| for which the leading-order infidelity
#: bound is considered reliable; reports flag anything above it.
SMALL_X_THRESHOLD = 0.1


@dataclass(frozen=True)
class QuadCovariance:
    """Quadrature covariance matrix, interleaved (x, p) ordering."""

    matrix: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def validate(self, atol: float = 1e-10) -> None:
        v = self.matrix
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] % 2:
            raise ConditioningError(f"covariance shape {v.shape} is not 2Mx2M")
        if np.abs(v - v.T).max() > atol:
            raise ConditioningError("covariance is not symmetric")


@dataclass(frozen=True)
class ComplexCovariance:
    """Covariance in the (annihilation, creation) operator basis."""

    matrix: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2


@dataclass(frozen=True)
class AMatrix:
    """Symmetric matrix whose hafnians give photon-number probabilities.

    ``factor`` (when present) is a thin complex matrix ``G`` with
    ``G @ G.T == matrix``; its column count bounds the state's effective
    squeezed-mode rank and unlocks the low-rank hafnian kernels.
    """

    matrix: np.ndarray
    factor: np.ndarray | None = None

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    @property
    def rank(self) -> int | None:
        return None if self.factor is None else self.factor.shape[1]


@dataclass(frozen=True)
class BlockApproxCovariance:
    """Block-diagonal covariance: each sublattice sees only its own source."""

    lattice: LatticeSpec
    blocks: tuple[QuadCovariance, ...]

    def assemble(self) -> QuadCovariance:
        """Full 2Mx2M block-diagonal matrix (vacuum off the blocks)."""
        m = self.lattice.n_modes
        v = np.eye(2 * m) / 2.0
        for modes, block in zip(self.lattice.sublattices, self.blocks):
            qidx = _quad_indices(modes)
            v[np.ix_(qidx, qidx)] = block.matrix
        return QuadCovariance(v)


def _quad_indices(modes) -> np.ndarray:
    modes = np.asarray(modes, dtype=int)
    return np.stack([2 * modes, 2 * modes + 1], axis=1).ravel()


def symplectic_form(n_modes: int) -> np.ndarray:
    """Interleaved symplectic form: blockdiag of [[0, 1], [-1, 0]]."""
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for j in range(n_modes):
        omega[2 * j, 2 * j + 1] = 1.0
        omega[2 * j + 1, 2 * j] = -1.0
    return omega


def input_covariance(lattice: LatticeSpec, squeezing: float) -> QuadCovariance:
    """Product input state: momentum-squeezed vacuum at each source.

    Source modes get ``diag(e^{2r}, e^{-2r}) / 2`` (position anti-squeezed,
    momentum squeezed); every other mode is vacuum ``I/2``.
    """
    if squeezing < 0:
        raise ValueError(f"squeezing must be >= 0, got {squeezing}")
    diag = np.full(2 * lattice.n_modes, 0.5)
    for s in lattice.sources:
        diag[2 * s] = math.exp(2 * squeezing) / 2.0
        diag[2 * s + 1] = math.exp(-2 * squeezing) / 2.0
    return QuadCovariance(np.diag(diag))


def beam_splitter_symplectic(theta: float, phi: float) -> np.ndarray:
    """4x4 quadrature representation of the beam-splitter gate.

    Equals the elementwise realification of the 2x2 mode unitary: each
    complex entry ``u`` becomes ``[[Re u, -Im u], [Im u, Re u]]``.  At
    ``phi = 0`` this reduces to ``[[cos, sin], [-sin, cos]] (x) I_2``.
    """
    c, s = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(phi), math.sin(phi)
    out = np.zeros((4, 4))
    out[0:2, 0:2] = [[c, 0.0], [0.0, c]]
    out[0:2, 2:4] = [[s * cp, -s * sp], [s * sp, s * cp]]
    out[2:4, 0:2] = [[-s * cp, -s * sp], [s * sp, -s * cp]]
    out[2:4, 2:4] = [[c, 0.0], [0.0, c]]
    return out


def circuit_symplectic(circuit: Circuit) -> np.ndarray:
    """Quadrature symplectic of the whole circuit (first layer first).

    The output covariance of input ``V`` is ``S V S^T``.
    """
    circuit.validate()
    m = circuit.n_modes
    s_tot = np.eye(2 * m)
    for layer in circuit.layers:
        for gate in layer:
            i, j = gate.modes
            blk = beam_splitter_symplectic(gate.theta, gate.phi)
            rows = np.array([2 * i, 2 * i + 1, 2 * j, 2 * j + 1])
            s_tot[rows] = blk @ s_tot[rows]
    return s_tot


def state_covariance(
    circuit: Circuit, lattice: LatticeSpec, squeezing: float
) -> QuadCovariance:
    """Output covariance of the circuit on the squeezed-source input."""
    s = circuit_symplectic(circuit)
    v_in = input_covariance(lattice, squeezing).matrix
    return QuadCovariance(s @ v_in @ s.T)


_T_CACHE: dict[int, np.ndarray] = {}


def _t_matrix(n_modes: int) -> np.ndarray:
    """Unitary mapping interleaved quadratures to (a, a^+) operators."""
    t = _T_CACHE.get(n_modes)
    if t is None:
        t = np.zeros((2 * n_modes, 2 * n_modes), dtype=complex)
        inv_sqrt2 = 1.0 / math.sqrt(2.0)
        for j in range(n_modes):
            t[j, 2 * j] = inv_sqrt2
            t[j, 2 * j + 1] = 1j * inv_sqrt2
            t[j + n_modes, 2 * j] = inv_sqrt2
            t[j + n_modes, 2 * j + 1] = -1j * inv_sqrt2
        t.setflags(write=False)
        _T_CACHE[n_modes] = t
    return t


def quad_to_complex(cov: QuadCovariance) -> ComplexCovariance:
    """Change of basis ``Sigma = T V T^+``; vacuum maps to ``I/2``."""
    t = _t_matrix(cov.n_modes)
    return ComplexCovariance(t @ cov.matrix @ t.conj().T)


def complex_to_quad(cov: ComplexCovariance) -> QuadCovariance:
    """Inverse of :func:`quad_to_complex` (discards roundoff imaginary part)."""
    t = _t_matrix(cov.n_modes)
    v = t.conj().T @ cov.matrix @ t
    return QuadCovariance(v.real.copy())


def reduce_quad(cov: QuadCovariance, modes) -> QuadCovariance:
    """Restrict to a mode subset (partial trace of the rest)."""
    qidx = _quad_indices(modes)
    return QuadCovariance(cov.matrix[np.ix_(qidx, qidx)])


def reduce_complex(cov: ComplexCovariance, modes) -> ComplexCovariance:
    """Restrict a complex covariance to a mode subset."""
    modes = np.asarray(modes, dtype=int)
    m = cov.n_modes
    idx = np.concatenate([modes, modes + m])
    return ComplexCovariance(cov.matrix[np.ix_(idx, idx)])


def a_matrix(cov: ComplexCovariance, min_eig: float = 1e-12) -> AMatrix:
    """Hafnian matrix ``A = Y (I - Q^{-1})`` with ``Q = Sigma + I/2``.

    ``Q`` is inverted through a Cholesky factorization after verifying it
    is positive definite; ill-conditioned states raise
    :class:`ConditioningError`.  The result is symmetrized to remove
    roundoff asymmetry (the exact ``A`` is complex symmetric).
    """
    m = cov.n_modes
    q = cov.matrix + np.eye(2 * m) / 2.0
    q = (q + q.conj().T) / 2.0
    eigs = np.linalg.eigvalsh(q)
    if eigs.min() < min_eig:
        raise ConditioningError(
            f"Q = Sigma + I/2 has eigenvalue {eigs.min():.3e} below {min_eig:.1e}"
        )
    chol = np.linalg.cholesky(q)
    inv_chol = np.linalg.inv(chol)
    q_inv = inv_chol.conj().T @ inv_chol
    body = np.eye(2 * m) - q_inv
    a = np.empty_like(body)
    a[:m] = body[m:]
    a[m:] = body[:m]
    return AMatrix((a + a.T) / 2.0)


def b_matrix(transfer: np.ndarray, r_vector: np.ndarray) -> AMatrix:
    """Pure-state hafnian matrix from the circuit transfer matrix.

    Parameters
    ----------
    transfer : ndarray
        Mode transfer matrix ``K`` in the creation-operator convention;
        for a circuit built here that is
        ``conj(accumulate_unitary(circuit))``.
    r_vector : ndarray
        Per-mode squeezing parameters (zeros for non-sources).

    Returns
    -------
    AMatrix
        ``A = B (+) conj(B)`` with ``B = K diag(tanh r) K^T``, carrying the
        rank-``2 * n_sources`` factor built from the squeezed columns.
    """
    r_vector = np.asarray(r_vector, dtype=float)
    m = transfer.shape[0]
    active = np.flatnonzero(r_vector != 0.0)
    gb = transfer[:, active] * np.sqrt(np.tanh(r_vector[active]))
    b = gb @ gb.T
    a = np.zeros((2 * m, 2 * m), dtype=complex)
    a[:m, :m] = b
    a[m:, m:] = b.conj()
    factor = np.zeros((2 * m, 2 * len(active)), dtype=complex)
    factor[:m, : len(active)] = gb
    factor[m:, len(active) :] = gb.conj()
    return AMatrix(a, factor=factor)


def circuit_pure_a(circuit: Circuit, lattice: LatticeSpec, squeezing: float) -> AMatrix:
    """Pure-state ``A`` of the circuit acting on the squeezed sources."""
    r_vector = np.zeros(lattice.n_modes)
    r_vector[list(lattice.sources)] = squeezing
    return b_matrix(accumulate_unitary(circuit).conj(), r_vector)


def block_approx_covariance(
    circuit: Circuit, lattice: LatticeSpec, squeezing: float
) -> BlockApproxCovariance:
    """Single-source-per-block approximation of the output covariance.

    For each sublattice the circuit is (implicitly) run with only that
    block's source squeezed and the resulting covariance is restricted to
    the block.  Implemented as a rank-2 update of vacuum: with ``u, w``
    the symplectic columns at the source's ``x`` and ``p`` rows,
    ``V_alpha = I/2 + (e^{2r}-1)/2 u u^T + (e^{-2r}-1)/2 w w^T``.
    """
    s = circuit_symplectic(circuit)
    cx = (math.exp(2 * squeezing) - 1.0) / 2.0
    cp = (math.exp(-2 * squeezing) - 1.0) / 2.0
    blocks = []
    for modes, src in zip(lattice.sublattices, lattice.sources):
        qidx = _quad_indices(modes)
        u = s[qidx, 2 * src]
        w = s[qidx, 2 * src + 1]
        v = np.eye(len(qidx)) / 2.0 + cx * np.outer(u, u) + cp * np.outer(w, w)
        blocks.append(QuadCovariance(v))
    return BlockApproxCovariance(lattice=lattice, blocks=tuple(blocks))


def purity_defect(cov: QuadCovariance) -> float:
    """``|det(2V) - 1|``; zero for pure Gaussian states."""
    sign, logdet = np.linalg.slogdet(2.0 * cov.matrix)
    if sign <= 0:
        return math.inf
    return abs(math.expm1(logdet))


def fidelity(pure: QuadCovariance, other: QuadCovariance, purity_tol: float = 1e-6) -> float:
    """Fidelity ``1 / sqrt(det(V1 + V2))`` for pure ``V1``.

    Raises :class:`ConditioningError` if ``V1`` fails the purity check
    ``|det(2 V1) - 1| <= purity_tol`` or the sum matrix is singular.
    """
    defect = purity_defect(pure)
    if not defect <= purity_tol:
        raise ConditioningError(f"first state is not pure: |det(2V)-1| = {defect:.3e}")
    sign, logdet = np.linalg.slogdet(pure.matrix + other.matrix)
    if sign <= 0:
        raise ConditioningError("V1 + V2 has non-positive determinant")
    return math.exp(-0.5 * logdet)


def frobenius_diff(v1: QuadCovariance, v2: QuadCovariance) -> float:
    """Frobenius norm of the covariance deviation ``||V1 - V2||_F``."""
    return float(np.linalg.norm(v1.matrix - v2.matrix, "fro"))


def infidelity_bound(norm_x: float, n_sources: int, squeezing: float) -> float:
    """Leading-order infidelity bound ``(1/2) ||X|| sqrt(2 N cosh 4r)``.

    Reliable for ``norm_x <= SMALL_X_THRESHOLD``; report objects carry a
    validity flag for larger deviations.
    """
    return 0.5 * norm_x * math.sqrt(2.0 * n_sources * math.cosh(4.0 * squeezing))


def x_norm_bound(eta_max: float, n_sources: int, squeezing: float) -> float:
    """Covariance-deviation bound from the worst per-source leakage rate.

    ``||X|| <= e^{2r} N^2 (eta + 2 sqrt(eta))``.
    """
    if eta_max < 0:
        raise ValueError(f"eta_max must be >= 0, got {eta_max}")
    return math.exp(2.0 * squeezing) * n_sources**2 * (eta_max + 2.0 * math.sqrt(eta_max))


def tvd_bound(norm_x: float, n_sources: int, squeezing: float) -> float:
    """Distribution-distance bound ``(N cosh(4r) ||X||^2 / 2)^{1/4}``."""
    return (n_sources * math.cosh(4.0 * squeezing) * norm_x**2 / 2.0) ** 0.25


def symplectic_eigenvalues(cov: QuadCovariance) -> np.ndarray:
    """Williamson spectrum, descending; vacuum modes give 1/2."""
    omega = symplectic_form(cov.n_modes)
    evals = np.linalg.eigvals(omega @ cov.matrix)
    nus = np.sort(np.abs(evals))[::-1]
    return nus[::2]  # each value appears twice (+/- i nu pairs)


_COV_MAGIC = b"BV"
_COV_ORDERING_TAG = 1  # interleaved (x_0, p_0, x_1, p_1, ...)


def save_covariance(path, cov: QuadCovariance) -> None:
    """Write a covariance as little-endian float64 with an 8-byte header.

    Header layout: 2-byte magic ``BV``, uint32 mode count, uint16 ordering
    tag (1 = interleaved quadratures); then the 2Mx2M matrix row-major.
    """
    header = struct.pack("<2sIH", _COV_MAGIC, cov.n_modes, _COV_ORDERING_TAG)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(cov.matrix, dtype="<f8").tobytes())


def load_covariance(path) -> QuadCovariance:
    """Read back :func:`save_covariance` output, verifying the header."""
    with open(path, "rb") as fh:
        header = fh.read(8)
        magic, n_modes, tag = struct.unpack("<2sIH", header)
        if magic != _COV_MAGIC:
            raise ValueError(f"bad covariance magic {magic!r}")
        if tag != _COV_ORDERING_TAG:
            raise ValueError(f"unsupported ordering tag {tag}")
        data = np.frombuffer(fh.read(), dtype="<f8")
    side = 2 * n_modes
    if data.size != side * side:
        raise ValueError(f"expected {side * side} entries, found {data.size}")
    return QuadCovariance(data.reshape(side, side).astype(float))


def covariance_to_json(cov: QuadCovariance) -> str:
    """Small-matrix JSON form with 17-significant-digit entries."""
    rows = [
        "[" + ",".join(format(x, ".17g") for x in row) + "]" for row in cov.matrix
    ]
    return (
        '{"format":"bls-covariance","version":1,'
        f'"n_modes":{cov.n_modes},"ordering":"xpxp",'
        '"matrix":[' + ",".join(rows) + "]}"
    )


def covariance_from_json(text: str) -> QuadCovariance:
    import json

    doc = json.loads(text)
    if doc.get("format") != "bls-covariance":
        raise ValueError(f"unrecognized covariance format {doc.get('format')!r}")
    if doc.get("ordering") != "xpxp":
        raise ValueError(f"unsupported ordering {doc.get('ordering')!r}")
    return QuadCovariance(np.array(doc["matrix"], dtype=float))
