"""Photon-number samplers for Gaussian and distinguishable-photon inputs.

Three samplers live here:

* :class:`ChainRuleEngine` / :func:`gbs_exact_sample` — exact
  photon-number sampling of an arbitrary zero-mean Gaussian state by the
  chain rule: mode k is drawn from ``P(n_k | n_1..n_{k-1}) =
  P(n_1..n_k) / P(n_1..n_{k-1})``, with every prefix probability given by
  the hafnian formula ``P(n) = Haf(A_n) / (prod n_j! sqrt(det(Sigma +
  I/2)))`` on the reduced covariance of the first k modes.
* :class:`BlockApproxSampler` / :func:`approx_sublattice_sample` — the
  efficient sampler: each sublattice block of the block-diagonal
  approximate covariance is sampled independently with its own chain-rule
  engine (rank <= 2 per block, so every hafnian is polynomial).
* :func:`distinguishable_fock_sample` — photons tracked one at a time
  through ``|U|^2`` columns; binning the independently drawn output modes
  realizes the permutation-symmetrized distinguishable distribution
  without computing any permanent.

Conditional distributions are truncated by a :class:`TruncationPolicy`
and renormalized over the allowed window.  Inside a window the sweep
stops early once the residual mass ``P(prefix) - sum_n P(prefix, n)``
drops below ``1e-12 * P(prefix)`` — the chain-rule identity makes the
residual available exactly, so the stop point is deterministic.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _moments
from .errors import SamplingError, SizeCapError, UnsupportedRankError
from .gaussian import (
    BlockApproxCovariance,
    ComplexCovariance,
    a_matrix,
    block_approx_covariance,
    quad_to_complex,
    reduce_complex,
)
from .kernels import HAFNIAN_DIM_CAP, LOW_RANK_COLUMN_CAP, hafnian_general, takagi_factor
from .lattice import Circuit, LatticeSpec

__all__ = [
    "TruncationPolicy",
    "truncation_threshold",
    "marginal_prob",
    "ChainRuleEngine",
    "gbs_exact_sample",
    "BlockApproxSampler",
    "approx_sublattice_sample",
    "distinguishable_fock_sample",
    "threshold_coarse_grain",
]

logger = logging.getLogger(__name__)

# Residual mass (relative to the prefix probability) below which a
# conditional sweep stops extending; also the mass ignored by sampling.
SWEEP_RESIDUAL_RTOL = 1e-12

# Conditional totals below this are treated as floating-point underflow
# of the prefix probability, triggering a fresh-randomness restart.
DEGENERATE_PROB = 1e-300

MAX_SAMPLE_RESTARTS = 5


@dataclass(frozen=True)
class TruncationPolicy:
    """Photon budget: total cap, per-mode cap, and the target tail mass."""

    epsilon: float
    n_total_max: int
    n_mode_max: int

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if not (self.n_total_max >= self.n_mode_max >= 0):
            raise ValueError(
                f"need n_total_max >= n_mode_max >= 0, got "
                f"{self.n_total_max}, {self.n_mode_max}"
            )


def truncation_threshold(
    n_sources: int, squeezing: float, epsilon: float = 1e-6
) -> TruncationPolicy:
    """Photon budget from the negative-binomial pair-number tail.

    The number of photon *pairs* emitted by the squeezers is capped at
    ``ceil(max(2 sech^2(r) ln(1/eps), 4 N sech^2(r)))``; the second term
    is a floor guard keeping the cap above the distribution's bulk even
    when ``eps`` is large.  Both the total budget and the per-mode cap
    are twice the pair budget.
    """
    if n_sources < 1:
        raise ValueError(f"n_sources must be >= 1, got {n_sources}")
    if squeezing < 0:
        raise ValueError(f"squeezing must be >= 0, got {squeezing}")
    if not (0.0 < epsilon < 1.0):
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    sech2 = 1.0 / math.cosh(squeezing) ** 2
    pairs = math.ceil(
        max(2.0 * sech2 * math.log(1.0 / epsilon), 4.0 * n_sources * sech2)
    )
    n_total = 2 * pairs
    return TruncationPolicy(epsilon=epsilon, n_total_max=n_total, n_mode_max=n_total)


def _logdet_q(sigma: np.ndarray) -> float:
    """``log det(Sigma + I/2)`` for a Hermitian positive-definite Q."""
    q = sigma + np.eye(sigma.shape[0]) / 2.0
    sign, logdet = np.linalg.slogdet(q)
    return float(logdet)


def _moment_prob(
    factor: np.ndarray, counts: np.ndarray, norm: float
) -> float:
    """``Haf(A_n) * norm / prod(n_j!)`` through the moment expansion."""
    n_modes = counts.shape[0]
    tabs = _moments.tables(factor.shape[1])
    coeffs = np.ones(1, dtype=complex)
    degree = 0
    for j in range(n_modes):
        for _ in range(int(counts[j])):
            coeffs = tabs.multiply_linear(coeffs, degree, factor[j])
            coeffs = tabs.multiply_linear(coeffs, degree + 1, factor[n_modes + j])
            degree += 2
    haf = tabs.moment(coeffs, degree).real
    fact = 1.0
    for c in counts:
        fact *= math.factorial(int(c))
    return max(haf, 0.0) * norm / fact


def _general_prob(a: np.ndarray, counts: np.ndarray, norm: float) -> float:
    """Same probability through the reference hafnian (no rank limit)."""
    n_modes = counts.shape[0]
    single = np.repeat(np.arange(n_modes), counts.astype(int))
    idx = np.concatenate([single, single + n_modes])
    if idx.shape[0] > HAFNIAN_DIM_CAP:
        raise SizeCapError(
            f"outcome needs a {idx.shape[0]}-dim hafnian, cap is {HAFNIAN_DIM_CAP}"
        )
    haf = hafnian_general(a[np.ix_(idx, idx)]).real
    fact = 1.0
    for c in counts:
        fact *= math.factorial(int(c))
    return max(haf, 0.0) * norm / fact


def marginal_prob(sigma: ComplexCovariance, counts) -> float:
    """Probability of the outcome ``counts`` on the state ``sigma``.

    ``sigma`` must already be reduced to exactly the modes that
    ``counts`` describes.  Uses the low-rank moment expansion whenever
    the state's hafnian matrix has at most ``LOW_RANK_COLUMN_CAP``
    columns, and the reference hafnian (dimension-capped) otherwise.
    """
    counts = np.asarray(counts, dtype=int)
    if counts.ndim != 1 or counts.shape[0] != sigma.n_modes:
        raise ValueError(
            f"counts length {counts.shape} does not match {sigma.n_modes} modes"
        )
    if (counts < 0).any():
        raise ValueError("counts must be non-negative")
    am = a_matrix(sigma)
    norm = math.exp(-0.5 * _logdet_q(sigma.matrix))
    factor = takagi_factor(am.matrix)
    if factor.shape[1] == 0:
        return norm if counts.sum() == 0 else 0.0
    if factor.shape[1] <= LOW_RANK_COLUMN_CAP:
        return _moment_prob(factor, counts, norm)
    return _general_prob(am.matrix, counts, norm)


class ChainRuleEngine:
    """Mode-by-mode conditional sampler for one Gaussian state.

    Precomputes, per prefix length k, the reduced covariance's hafnian
    matrix, its thin symmetric factor, and the normalization
    ``1/sqrt(det(Sigma^(k) + I/2))``.  Joint-probability sweeps
    ``P(prefix, n)`` for ``n = 0, 1, ...`` are cached per prefix, so
    repeated samples from the same state reuse every conditional they
    have in common.

    States whose factor exceeds ``LOW_RANK_COLUMN_CAP`` columns (more
    than two effective squeezed modes) fall back to the reference
    hafnian per entry, with its dimension cap; beyond that the sweep
    raises rather than silently truncating.
    """

    def __init__(self, sigma: ComplexCovariance, policy: TruncationPolicy):
        self.policy = policy
        self.n_modes = sigma.n_modes
        self._factors: list[np.ndarray | None] = [None]  # index by k
        self._amats: list[np.ndarray | None] = [None]
        self._norms: list[float] = [1.0]
        all_modes = np.arange(self.n_modes)
        for k in range(1, self.n_modes + 1):
            red = reduce_complex(sigma, all_modes[:k])
            am = a_matrix(red)
            factor = takagi_factor(am.matrix)
            self._factors.append(factor)
            self._amats.append(am.matrix)
            self._norms.append(math.exp(-0.5 * _logdet_q(red.matrix)))
        self._cache: dict[tuple[int, ...], np.ndarray] = {}
        max_rank = max(f.shape[1] for f in self._factors[1:]) if self.n_modes else 0
        logger.debug(
            "chain-rule engine: %d modes, max factor rank %d, budget %d",
            self.n_modes,
            max_rank,
            policy.n_total_max,
        )

    def conditional_joints(
        self, prefix: tuple[int, ...], prefix_prob: float | None
    ) -> np.ndarray:
        """Joint probabilities ``P(prefix, n)`` for ``n = 0..window``.

        The window is ``min(n_mode_max, n_total_max - sum(prefix))``;
        when ``prefix_prob`` is given the sweep stops as soon as the
        exactly-known residual mass falls below
        ``SWEEP_RESIDUAL_RTOL * prefix_prob``.  Results are cached by
        prefix (the stop point is a deterministic function of the
        prefix, so cached sweeps are exact reruns).
        """
        cached = self._cache.get(prefix)
        if cached is not None:
            return cached
        k = len(prefix) + 1
        if k > self.n_modes:
            raise ValueError("prefix already covers every mode")
        placed = int(sum(prefix))
        window = min(self.policy.n_mode_max, self.policy.n_total_max - placed)
        factor = self._factors[k]
        norm = self._norms[k]
        if factor.shape[1] == 0:
            # Zero hafnian matrix: the reduced state is vacuum, so the
            # conditional is a point mass on zero photons.
            joints = np.array([norm if placed == 0 else 0.0])
        elif factor.shape[1] <= LOW_RANK_COLUMN_CAP:
            joints = self._sweep_moments(k, prefix, factor, norm, window, prefix_prob)
        else:
            joints = self._sweep_general(k, prefix, norm, window, prefix_prob)
        joints.setflags(write=False)
        self._cache[prefix] = joints
        return joints

    def _sweep_moments(
        self,
        k: int,
        prefix: tuple[int, ...],
        factor: np.ndarray,
        norm: float,
        window: int,
        prefix_prob: float | None,
    ) -> np.ndarray:
        tabs = _moments.tables(factor.shape[1])
        coeffs = np.ones(1, dtype=complex)
        degree = 0
        pfact = 1.0
        for j, nj in enumerate(prefix):
            pfact *= math.factorial(int(nj))
            for _ in range(int(nj)):
                coeffs = tabs.multiply_linear(coeffs, degree, factor[j])
                coeffs = tabs.multiply_linear(coeffs, degree + 1, factor[k + j])
                degree += 2
        joints = []
        fact = 1.0
        cum = 0.0
        for n in range(window + 1):
            if n > 0:
                coeffs = tabs.multiply_linear(coeffs, degree, factor[k - 1])
                coeffs = tabs.multiply_linear(coeffs, degree + 1, factor[2 * k - 1])
                degree += 2
                fact *= n
            haf = tabs.moment(coeffs, degree).real
            p = max(haf, 0.0) * norm / (pfact * fact)
            joints.append(p)
            cum += p
            if prefix_prob is not None and (
                prefix_prob - cum <= SWEEP_RESIDUAL_RTOL * prefix_prob
            ):
                break
        return np.array(joints)

    def _sweep_general(
        self,
        k: int,
        prefix: tuple[int, ...],
        norm: float,
        window: int,
        prefix_prob: float | None,
    ) -> np.ndarray:
        a = self._amats[k]
        placed = int(sum(prefix))
        joints = []
        cum = 0.0
        for n in range(window + 1):
            if 2 * (placed + n) > HAFNIAN_DIM_CAP:
                if prefix_prob is not None and (
                    prefix_prob - cum <= 1e-9 * prefix_prob
                ):
                    break
                raise SizeCapError(
                    "conditional sweep needs hafnians beyond the reference cap; "
                    "state rank exceeds the low-rank path "
                    f"({2 * (placed + n)} > {HAFNIAN_DIM_CAP})"
                )
            counts = np.array(list(prefix) + [n], dtype=int)
            p = _general_prob(a, counts, norm)
            joints.append(p)
            cum += p
            if prefix_prob is not None and (
                prefix_prob - cum <= SWEEP_RESIDUAL_RTOL * prefix_prob
            ):
                break
        return np.array(joints)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Draw one photon-number outcome (length-``n_modes`` int array)."""
        for attempt in range(MAX_SAMPLE_RESTARTS):
            counts = self._try_sample(rng)
            if counts is not None:
                return counts
            logger.warning(
                "degenerate conditional (underflow); restarting sample "
                "(attempt %d)",
                attempt + 1,
            )
        raise SamplingError(
            f"conditional mass underflowed in {MAX_SAMPLE_RESTARTS} attempts"
        )

    def _try_sample(self, rng: np.random.Generator) -> np.ndarray | None:
        prefix: tuple[int, ...] = ()
        prefix_prob = 1.0
        out = np.zeros(self.n_modes, dtype=int)
        for k in range(self.n_modes):
            joints = self.conditional_joints(prefix, prefix_prob)
            total = joints.sum()
            if not (total > DEGENERATE_PROB):
                return None
            cdf = np.cumsum(joints)
            u = rng.random() * total
            n = int(np.searchsorted(cdf, u, side="right"))
            if n >= joints.shape[0]:
                n = joints.shape[0] - 1
            out[k] = n
            prefix = prefix + (n,)
            prefix_prob = float(joints[n])
        return out


def gbs_exact_sample(
    sigma: ComplexCovariance, policy: TruncationPolicy, rng: np.random.Generator
) -> np.ndarray:
    """One exact chain-rule sample.  For loops, build one
    :class:`ChainRuleEngine` and call its ``sample`` repeatedly — the
    engine's conditional cache is what makes large runs cheap."""
    return ChainRuleEngine(sigma, policy).sample(rng)


class BlockApproxSampler:
    """Samples the block-diagonal approximate state, block by block.

    Each sublattice's reduced state sees a single squeezed source, so
    its hafnian matrices have rank <= 2 and every conditional is
    polynomial-time.  Blocks are independent: one chain-rule engine per
    block, outcomes concatenated onto the full mode set.
    """

    def __init__(
        self,
        circuit: Circuit,
        lattice: LatticeSpec,
        squeezing: float,
        policy: TruncationPolicy,
        blocks: BlockApproxCovariance | None = None,
    ):
        if blocks is None:
            blocks = block_approx_covariance(circuit, lattice, squeezing)
        self.lattice = lattice
        self.policy = policy
        self.engines = [
            ChainRuleEngine(quad_to_complex(block), policy)
            for block in blocks.blocks
        ]

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        out = np.zeros(self.lattice.n_modes, dtype=int)
        for modes, engine in zip(self.lattice.sublattices, self.engines):
            out[np.asarray(modes, dtype=int)] = engine.sample(rng)
        return out


def approx_sublattice_sample(
    circuit: Circuit,
    lattice: LatticeSpec,
    squeezing: float,
    policy: TruncationPolicy,
    rng: np.random.Generator,
) -> np.ndarray:
    """One sample from the sublattice-block approximation.  For loops,
    build one :class:`BlockApproxSampler` and reuse it."""
    return BlockApproxSampler(circuit, lattice, squeezing, policy).sample(rng)


def distinguishable_fock_sample(
    unitary: np.ndarray, lattice: LatticeSpec, rng: np.random.Generator
) -> np.ndarray:
    """Track each source photon independently through ``|U|^2``.

    Photon i starts at source ``s_i`` and lands on mode k with
    probability ``|U_{k, s_i}|^2``; the returned count vector bins the
    landing modes.  Binning independent draws realizes exactly the
    permutation-symmetrized single-configuration weights (each outcome's
    orderings accumulate on the same bin), so no permanent is needed.
    """
    unitary = np.asarray(unitary)
    m = unitary.shape[0]
    counts = np.zeros(m, dtype=int)
    for src in lattice.sources:
        weights = np.abs(unitary[:, src]) ** 2
        cdf = np.cumsum(weights)
        u = rng.random() * cdf[-1]
        k = int(np.searchsorted(cdf, u, side="right"))
        counts[min(k, m - 1)] += 1
    return counts


def threshold_coarse_grain(counts) -> np.ndarray:
    """Photon-number outcome -> threshold-detector clicks (count >= 1)."""
    return np.asarray(counts, dtype=int) >= 1
