"""Enumeration oracles, distribution utilities, and bound evaluators.

The enumeration oracles compute *exact* probabilities for every outcome
inside a photon budget, so that samplers and analytic bounds can be
checked against ground truth:

* :func:`enumerate_gbs_distribution` — photon-number distribution of a
  Gaussian state.  Pure squeezed-input states use the thin symmetric
  factor of the M x M pure-state block (one linear form per photon);
  mixed states use the full 2M x 2M hafnian matrix (two forms per
  photon); both run a shared dynamic program that groups all outcome
  prefixes of equal photon total into one stacked coefficient array so
  every transition is a vectorized gather.  States with more than
  ``LOW_RANK_COLUMN_CAP`` effective squeezed modes fall back to the
  reference hafnian at brute-force scale.
* :func:`enumerate_fock_distribution` — exact single-photon-input
  distribution via permanents (interference included).
* :func:`enumerate_distinguishable_distribution` — the same outcomes
  with photons treated as distinguishable (permanent of ``|U|^2``).

Distributions are stored as explicit outcome tables (count rows +
probabilities).  Truncated tables carry mass below one; the
``tvd_upper_bound`` helper turns a table comparison into a rigorous
upper bound on the true total-variation distance by charging each
table's missing tail in full.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _moments
from .errors import SizeCapError
from .gaussian import (
    a_matrix,
    block_approx_covariance,
    fidelity,
    frobenius_diff,
    infidelity_bound,
    quad_to_complex,
    state_covariance,
    tvd_bound,
    x_norm_bound,
    SMALL_X_THRESHOLD,
)
from .kernels import LOW_RANK_COLUMN_CAP, permanent, takagi_factor
from .lattice import Circuit, LatticeSpec, accumulate_unitary, brickwork_pairs
from .samplers import TruncationPolicy, _general_prob, _logdet_q

__all__ = [
    "Distribution",
    "tvd",
    "tvd_upper_bound",
    "empirical_distribution",
    "coarse_grain_distribution",
    "product_distribution",
    "enumerate_gbs_distribution",
    "enumerate_fock_distribution",
    "enumerate_distinguishable_distribution",
    "LeakageReport",
    "leakage_bound",
    "leakage_rate",
    "WalkProfile",
    "random_walk_profile",
    "FockErrorReport",
    "fock_error_bound",
    "theorem_bound_report",
    "write_csv",
    "write_json",
]

logger = logging.getLogger(__name__)

FOCK_ORACLE_MAX_SOURCES = 6
FOCK_ORACLE_MAX_MODES = 12
GBS_BRUTE_MAX_MODES = 6
GBS_BRUTE_MAX_TOTAL = 8
# Peak stacked-coefficient elements the enumeration DP may allocate.
DP_MAX_ELEMENTS = 3e8


@dataclass(frozen=True)
class Distribution:
    """Explicit outcome table: one count row per outcome, plus weights.

    ``kind`` separates photon-number tables (``"pnr"``) from
    threshold-click tables (``"clicks"``); distances across kinds are
    refused.  ``mass`` below one means the table was truncated.
    """

    counts: np.ndarray
    probs: np.ndarray
    kind: str = "pnr"

    def __post_init__(self):
        counts = np.atleast_2d(np.asarray(self.counts))
        probs = np.asarray(self.probs, dtype=float)
        if counts.shape[0] != probs.shape[0]:
            raise ValueError(
                f"{counts.shape[0]} outcomes but {probs.shape[0]} probabilities"
            )
        if probs.size and probs.min() < -1e-12:
            raise ValueError(f"negative probability {probs.min()}")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "probs", np.maximum(probs, 0.0))

    @property
    def n_modes(self) -> int:
        return self.counts.shape[1]

    @property
    def mass(self) -> float:
        return float(self.probs.sum())

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return {
            tuple(int(c) for c in row): float(p)
            for row, p in zip(self.counts, self.probs)
        }


def _outcome_keys(counts: np.ndarray, base: int) -> np.ndarray:
    powers = base ** np.arange(counts.shape[1], dtype=np.int64)
    return counts.astype(np.int64) @ powers


def tvd(d1: Distribution, d2: Distribution) -> float:
    """Total-variation distance between two outcome tables.

    Outcomes absent from one table count as probability zero there; for
    truncated tables this is a lower bound on the true distance (see
    :func:`tvd_upper_bound`).
    """
    if d1.kind != d2.kind:
        raise ValueError(f"cannot compare kinds {d1.kind!r} and {d2.kind!r}")
    if d1.n_modes != d2.n_modes:
        raise ValueError("outcome tables cover different mode counts")
    m = d1.n_modes
    top = max(2, int(d1.counts.max(initial=0)), int(d2.counts.max(initial=0)))
    base = top + 1
    if m * math.log2(base) <= 62:
        k1 = _outcome_keys(d1.counts, base)
        k2 = _outcome_keys(d2.counts, base)
        union = np.unique(np.concatenate([k1, k2]))
        p1 = np.zeros(union.shape[0])
        p2 = np.zeros(union.shape[0])
        p1[np.searchsorted(union, k1)] = d1.probs
        p2[np.searchsorted(union, k2)] = d2.probs
        return float(0.5 * np.abs(p1 - p2).sum())
    t1, t2 = d1.as_dict(), d2.as_dict()
    total = 0.0
    for key in set(t1) | set(t2):
        total += abs(t1.get(key, 0.0) - t2.get(key, 0.0))
    return 0.5 * total


def tvd_upper_bound(d1: Distribution, d2: Distribution) -> float:
    """Rigorous upper bound on the full-support distance.

    Both tables hold exact point probabilities, so the distance over
    outcomes outside a table is at most that table's missing mass; each
    tail is charged in full.
    """
    slop = 0.5 * max(0.0, 1.0 - d1.mass) + 0.5 * max(0.0, 1.0 - d2.mass)
    return tvd(d1, d2) + slop


def empirical_distribution(samples, kind: str = "pnr") -> Distribution:
    """Normalized frequency table of an outcome batch."""
    samples = np.atleast_2d(np.asarray(samples))
    if samples.shape[0] == 0:
        raise ValueError("no samples")
    rows, freq = np.unique(samples.astype(np.int64), axis=0, return_counts=True)
    return Distribution(rows, freq / samples.shape[0], kind=kind)


def coarse_grain_distribution(dist: Distribution) -> Distribution:
    """Photon-number table -> threshold-click table (count >= 1)."""
    if dist.kind != "pnr":
        raise ValueError("can only coarse-grain a photon-number table")
    clicks = (dist.counts >= 1).astype(np.int8)
    rows, inverse = np.unique(clicks, axis=0, return_inverse=True)
    probs = np.bincount(inverse.ravel(), weights=dist.probs, minlength=rows.shape[0])
    return Distribution(rows, probs, kind="clicks")


def product_distribution(
    dists, mode_lists, n_modes: int, budget: int | None = None
) -> Distribution:
    """Joint table of independent mode-disjoint distributions.

    ``mode_lists[i]`` names the global mode indices that ``dists[i]``
    covers; unnamed modes are reported as zero counts.  With ``budget``
    set, combined outcomes above the total are dropped (their mass
    leaves the table, lowering ``mass`` accordingly).
    """
    acc_counts = np.zeros((1, 0), dtype=np.int16)
    acc_probs = np.ones(1)
    for dist in dists:
        if dist.kind != "pnr":
            raise ValueError("product tables are for photon-number outcomes")
        n1, n2 = acc_counts.shape[0], dist.counts.shape[0]
        i = np.repeat(np.arange(n1), n2)
        j = np.tile(np.arange(n2), n1)
        if budget is not None:
            keep = acc_counts.sum(axis=1)[i] + dist.counts.sum(axis=1)[j] <= budget
            i, j = i[keep], j[keep]
        acc_counts = np.hstack(
            [acc_counts[i], dist.counts[j].astype(np.int16)]
        )
        acc_probs = acc_probs[i] * dist.probs[j]
    columns = np.concatenate([np.asarray(m, dtype=int) for m in mode_lists])
    if columns.shape[0] != acc_counts.shape[1]:
        raise ValueError("mode lists do not match the block tables")
    full = np.zeros((acc_counts.shape[0], n_modes), dtype=np.int16)
    full[:, columns] = acc_counts
    return Distribution(full, acc_probs)


_FACT = np.array([math.factorial(i) for i in range(171)], dtype=float)


def _dp_guard(n_modes: int, budget: int, forms_per_photon: int, n_vars: int) -> None:
    peak = 0
    for t in range(budget + 1):
        rows = math.comb(t + n_modes - 2, n_modes - 2) if n_modes >= 2 else 1
        size = math.comb(forms_per_photon * t + n_vars - 1, n_vars - 1)
        peak += rows * size
    if peak > DP_MAX_ELEMENTS:
        raise SizeCapError(
            f"enumeration would stack ~{peak:.2e} coefficients "
            f"(cap {DP_MAX_ELEMENTS:.0e}); reduce the photon budget or "
            "enumerate independent blocks separately"
        )


def _dp_enumerate(
    mode_forms: list[list[np.ndarray]],
    n_vars: int,
    budget: int,
    mode_cap: int,
    value: str,
    norm: float,
) -> Distribution:
    """Shared enumeration engine over products of per-photon linear forms.

    ``mode_forms[j]`` lists the forms contributed by each photon in mode
    j (one for the pure path, two — row and conjugate row — for the
    general path).  Levels are keyed by total photons placed; each level
    stacks every prefix's coefficient vector so a transition is one
    batched gather per form.  The final mode is folded through adjoint
    weight vectors instead of being expanded, which avoids materializing
    the (much larger) last level.
    """
    m = len(mode_forms)
    ppp = len(mode_forms[0])
    tabs = _moments.tables(n_vars)
    levels: dict[int, tuple[np.ndarray, np.ndarray]] = {
        0: (np.ones((1, 1), dtype=complex), np.zeros((1, 0), dtype=np.int16))
    }
    for j in range(m - 1):
        forms = mode_forms[j]
        next_c: dict[int, list[np.ndarray]] = {}
        next_p: dict[int, list[np.ndarray]] = {}
        for t, (cblock, pblock) in levels.items():
            cur = cblock
            degree = ppp * t
            for c in range(0, min(mode_cap, budget - t) + 1):
                if c > 0:
                    for f in forms:
                        cur = tabs.multiply_linear(cur, degree, f)
                        degree += 1
                col = np.full((pblock.shape[0], 1), c, dtype=np.int16)
                next_c.setdefault(t + c, []).append(cur)
                next_p.setdefault(t + c, []).append(np.hstack([pblock, col]))
        levels = {
            t: (np.vstack(next_c[t]), np.vstack(next_p[t])) for t in next_c
        }
    out_counts = []
    out_probs = []
    last_forms = mode_forms[m - 1]
    for t, (cblock, pblock) in sorted(levels.items()):
        prefix_fact = _FACT[pblock].prod(axis=1) if pblock.shape[1] else np.ones(
            pblock.shape[0]
        )
        for c in range(0, min(mode_cap, budget - t) + 1):
            top = ppp * (t + c)
            w = tabs.weights(top).astype(complex)
            degree = top
            for _ in range(c):
                for f in last_forms:
                    w = tabs.multiply_linear_adjoint(w, degree, f)
                    degree -= 1
            vals = cblock @ w
            if value == "abs2":
                raw = np.abs(vals) ** 2
            else:
                raw = np.maximum(vals.real, 0.0)
            col = np.full((pblock.shape[0], 1), c, dtype=np.int16)
            out_counts.append(np.hstack([pblock, col]))
            out_probs.append(raw * norm / (prefix_fact * _FACT[c]))
    dist = Distribution(np.vstack(out_counts), np.concatenate(out_probs))
    logger.debug(
        "enumerated %d outcomes over %d modes (budget %d), mass %.6g",
        dist.counts.shape[0],
        m,
        budget,
        dist.mass,
    )
    return dist


def enumerate_gbs_distribution(sigma, policy) -> Distribution:
    """Exact photon-number table of a Gaussian state within the budget.

    Path selection: a block-structured hafnian matrix (zero mode/
    conjugate off-blocks — the pure-state signature) enumerates through
    the M x M block with one form per photon and squared-magnitude
    hafnians; otherwise the full matrix is factored (two forms per
    photon).  Factor ranks above ``LOW_RANK_COLUMN_CAP`` fall back to
    the reference hafnian, capped at ``GBS_BRUTE_MAX_MODES`` modes and
    ``GBS_BRUTE_MAX_TOTAL`` photons.
    """
    m = sigma.n_modes
    budget = int(policy.n_total_max)
    mode_cap = int(policy.n_mode_max)
    am = a_matrix(sigma)
    a = am.matrix
    norm = math.exp(-0.5 * _logdet_q(sigma.matrix))
    scale = np.abs(a).max()
    if scale == 0.0:
        return Distribution(np.zeros((1, m), dtype=np.int16), np.array([norm]))
    off = max(np.abs(a[:m, m:]).max(), np.abs(a[m:, :m]).max())
    if off <= 1e-10 * max(1.0, scale):
        factor = takagi_factor(a[:m, :m])
        if factor.shape[1] == 0:
            # rounding noise above exact zero but below the factor tolerance
            return Distribution(np.zeros((1, m), dtype=np.int16), np.array([norm]))
        if factor.shape[1] <= LOW_RANK_COLUMN_CAP:
            _dp_guard(m, budget, 1, factor.shape[1])
            return _dp_enumerate(
                [[factor[j]] for j in range(m)],
                factor.shape[1],
                budget,
                mode_cap,
                "abs2",
                norm,
            )
    factor = takagi_factor(a)
    if factor.shape[1] == 0:
        return Distribution(np.zeros((1, m), dtype=np.int16), np.array([norm]))
    if factor.shape[1] <= LOW_RANK_COLUMN_CAP:
        _dp_guard(m, budget, 2, factor.shape[1])
        return _dp_enumerate(
            [[factor[j], factor[m + j]] for j in range(m)],
            factor.shape[1],
            budget,
            mode_cap,
            "real",
            norm,
        )
    if m > GBS_BRUTE_MAX_MODES or budget > GBS_BRUTE_MAX_TOTAL:
        raise SizeCapError(
            f"state rank {factor.shape[1]} needs the reference hafnian, "
            f"which is capped at {GBS_BRUTE_MAX_MODES} modes / "
            f"{GBS_BRUTE_MAX_TOTAL} photons (got {m} modes, budget {budget})"
        )
    rows = []
    probs = []
    for total in range(budget + 1):
        for comp in _moments._compositions(total, m):
            if comp.max(initial=0) > mode_cap:
                continue
            rows.append(comp)
            probs.append(_general_prob(a, comp, norm))
    return Distribution(np.array(rows, dtype=np.int16), np.array(probs))


def enumerate_fock_distribution(unitary: np.ndarray, lattice: LatticeSpec) -> Distribution:
    """Exact N-photon output distribution (full interference).

    Every outcome with total N gets ``|Per(U_sub)|^2 / prod n_j!`` where
    ``U_sub`` repeats output row j ``n_j`` times against the source
    columns.  Mass sums to one.
    """
    n = lattice.n_sources
    m = lattice.n_modes
    if n > FOCK_ORACLE_MAX_SOURCES or m > FOCK_ORACLE_MAX_MODES:
        raise SizeCapError(
            f"single-photon oracle capped at {FOCK_ORACLE_MAX_SOURCES} photons / "
            f"{FOCK_ORACLE_MAX_MODES} modes (got {n}, {m})"
        )
    unitary = np.asarray(unitary)
    cols = np.asarray(lattice.sources, dtype=int)
    comps = _moments._compositions(n, m)
    probs = np.empty(comps.shape[0])
    arange = np.arange(m)
    for idx, comp in enumerate(comps):
        rows = np.repeat(arange, comp)
        per = permanent(unitary[np.ix_(rows, cols)])
        probs[idx] = abs(per) ** 2 / _FACT[comp].prod()
    return Distribution(comps.astype(np.int16), probs)


def enumerate_distinguishable_distribution(
    unitary: np.ndarray, lattice: LatticeSpec
) -> Distribution:
    """Outcome table with photons treated as distinguishable particles.

    Identical support to :func:`enumerate_fock_distribution` but the
    weight is the permanent of ``|U|^2`` — no interference terms.  This
    is the distribution :func:`~blsampler.samplers.distinguishable_fock_sample`
    draws from.
    """
    n = lattice.n_sources
    m = lattice.n_modes
    if n > FOCK_ORACLE_MAX_SOURCES or m > FOCK_ORACLE_MAX_MODES:
        raise SizeCapError(
            f"single-photon oracle capped at {FOCK_ORACLE_MAX_SOURCES} photons / "
            f"{FOCK_ORACLE_MAX_MODES} modes (got {n}, {m})"
        )
    weights = np.abs(np.asarray(unitary)) ** 2
    cols = np.asarray(lattice.sources, dtype=int)
    comps = _moments._compositions(n, m)
    probs = np.empty(comps.shape[0])
    arange = np.arange(m)
    for idx, comp in enumerate(comps):
        rows = np.repeat(arange, comp)
        per = permanent(weights[np.ix_(rows, cols)])
        probs[idx] = max(per.real, 0.0) / _FACT[comp].prod()
    return Distribution(comps.astype(np.int16), probs)


@dataclass(frozen=True)
class LeakageReport:
    """Per-source leaked amplitude fraction plus the diffusive bound."""

    per_source_eta: tuple[float, ...]
    eta_max: float
    bound: float | None
    dim: int
    edge: int
    n_sources: int
    depth: int | None


def leakage_bound(dim: int, edge: int, depth: int) -> float:
    """Diffusive tail bound ``2 d exp(-L^2 d / (8 D))`` (zero at D=0)."""
    if depth == 0:
        return 0.0
    return 2.0 * dim * math.exp(-(edge**2) * dim / (8.0 * depth))


def leakage_rate(
    unitary: np.ndarray, lattice: LatticeSpec, depth: int | None = None
) -> LeakageReport:
    """Measured per-source leakage: column weight outside the home block."""
    unitary = np.asarray(unitary)
    etas = []
    for modes, src in zip(lattice.sublattices, lattice.sources):
        outside = np.ones(lattice.n_modes, dtype=bool)
        outside[np.asarray(modes, dtype=int)] = False
        etas.append(float((np.abs(unitary[outside, src]) ** 2).sum()))
    bound = None if depth is None else leakage_bound(lattice.dim, lattice.edge, depth)
    return LeakageReport(
        per_source_eta=tuple(etas),
        eta_max=max(etas),
        bound=bound,
        dim=lattice.dim,
        edge=lattice.edge,
        n_sources=lattice.n_sources,
        depth=depth,
    )


@dataclass(frozen=True)
class WalkProfile:
    """Source-column weight profile, measured and predicted, per depth.

    Arrays are shaped ``(depth + 1, n_modes)``; row t is the profile
    after t layers.  ``theory`` iterates the exact one-gate averaging
    map (each gate replaces both sites' mean weights by their average),
    which is the lattice random walk the gate statistics induce.
    """

    empirical: np.ndarray
    stderr: np.ndarray
    theory: np.ndarray
    source: int


def random_walk_profile(
    dim: int,
    n_modes: int,
    depth: int,
    n_trials: int,
    rng: np.random.Generator,
    source: int | None = None,
) -> WalkProfile:
    """Monte-Carlo mean of ``|U_{j,s}|^2`` against the averaging-map law."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if dim == 1:
        grid_shape: tuple[int, ...] = (n_modes,)
    else:
        edge = round(n_modes ** (1.0 / dim))
        if edge**dim != n_modes:
            raise ValueError(
                f"{n_modes} modes do not form a {dim}-dimensional cube"
            )
        grid_shape = (edge,) * dim
    if source is None:
        center = tuple(g // 2 for g in grid_shape)
        source = int(np.ravel_multi_index(center, grid_shape))
    amps = np.zeros((n_trials, n_modes), dtype=complex)
    amps[:, source] = 1.0
    empirical = np.zeros((depth + 1, n_modes))
    stderr = np.zeros((depth + 1, n_modes))
    theory = np.zeros((depth + 1, n_modes))
    empirical[0, source] = 1.0
    theory[0, source] = 1.0
    profile = theory[0].copy()
    for layer in range(depth):
        pairs = brickwork_pairs(grid_shape, layer)
        if pairs.shape[0]:
            i, j = pairs[:, 0], pairs[:, 1]
            theta = rng.uniform(0.0, 2.0 * math.pi, (n_trials, pairs.shape[0]))
            phi = rng.uniform(0.0, 2.0 * math.pi, (n_trials, pairs.shape[0]))
            c, s = np.cos(theta), np.sin(theta)
            e = np.exp(1j * phi)
            ai, aj = amps[:, i], amps[:, j]
            amps[:, i] = c * ai + e * s * aj
            amps[:, j] = -np.conj(e) * s * ai + c * aj
            avg = 0.5 * (profile[i] + profile[j])
            profile[i] = avg
            profile[j] = avg
        w = np.abs(amps) ** 2
        empirical[layer + 1] = w.mean(axis=0)
        stderr[layer + 1] = w.std(axis=0, ddof=1) / math.sqrt(n_trials)
        theory[layer + 1] = profile
    return WalkProfile(
        empirical=empirical, stderr=stderr, theory=theory, source=source
    )


@dataclass(frozen=True)
class FockErrorReport:
    """Overlap-sum bound on the exact/distinguishable sampling distance."""

    c_values: tuple[float, ...]
    c_max: float
    exact_sum_bound: float
    eta_max: float | None
    surrogate_c: float | None
    surrogate_bound: float | None


def _closed_form_bound(c: float, n: int) -> float:
    return ((c + 1.0) ** n - n * c - 1.0) / 2.0


def fock_error_bound(
    unitary: np.ndarray, lattice: LatticeSpec, depth: int | None = None
) -> FockErrorReport:
    """Distance bound between exact and distinguishable Fock sampling.

    ``C_i = sum_j |U_{j,s_i}| (sum_{k != i} |U_{j,s_k}|)`` measures how
    much source i's amplitude overlaps the other sources'; the closed
    form ``((c+1)^N - N c - 1)/2`` with ``c = max_i C_i`` bounds the
    total-variation distance.  The surrogate replaces the measured
    overlap with its leakage-rate bound ``2 sqrt(eta k N^(gamma+1))``.
    """
    unitary = np.asarray(unitary)
    cols = np.abs(unitary[:, np.asarray(lattice.sources, dtype=int)])
    row_sums = cols.sum(axis=1)
    c_values = tuple(
        float((cols[:, i] * (row_sums - cols[:, i])).sum())
        for i in range(cols.shape[1])
    )
    n = lattice.n_sources
    c_max = max(c_values)
    leak = leakage_rate(unitary, lattice, depth)
    surrogate_c = 2.0 * math.sqrt(
        leak.eta_max * lattice.k_scale * n ** (lattice.gamma_scale + 1.0)
    )
    return FockErrorReport(
        c_values=c_values,
        c_max=c_max,
        exact_sum_bound=_closed_form_bound(c_max, n),
        eta_max=leak.eta_max,
        surrogate_c=surrogate_c,
        surrogate_bound=_closed_form_bound(surrogate_c, n),
    )


def theorem_bound_report(
    circuit: Circuit,
    lattice: LatticeSpec,
    squeezing: float,
    policy=None,
    enumerate_modes_cap: int = 8,
    enumerate_budget_cap: int = 16,
) -> dict:
    """Full approximation-error chain on one concrete instance.

    Measures the leakage, evaluates each analytic link (covariance-
    difference bound from leakage, infidelity bound, distance bound) on
    the measured quantities, and — when a policy is given and the
    instance is small enough — enumerates both distributions to report
    the true table distance alongside the bounds.  Enumeration budgets
    are clamped to ``enumerate_budget_cap``; the mass left outside the
    clamped tables is charged to ``tvd_upper``, so the reported upper
    bound stays rigorous.
    """
    unitary = accumulate_unitary(circuit)
    leak = leakage_rate(unitary, lattice, circuit.depth)
    v_out = state_covariance(circuit, lattice, squeezing)
    blocks = block_approx_covariance(circuit, lattice, squeezing)
    v_a = blocks.assemble()
    x_measured = frobenius_diff(v_out, v_a)
    n = lattice.n_sources
    report = {
        "dim": lattice.dim,
        "edge": lattice.edge,
        "n_sources": n,
        "n_modes": lattice.n_modes,
        "depth": circuit.depth,
        "squeezing": squeezing,
        "eta_per_source": list(leak.per_source_eta),
        "eta_max": leak.eta_max,
        "leakage_bound": leak.bound,
        "x_norm_bound": x_norm_bound(leak.eta_max, n, squeezing),
        "x_measured": x_measured,
        "small_x_valid": bool(x_measured <= SMALL_X_THRESHOLD),
        "infidelity_measured": 1.0 - fidelity(v_out, v_a),
        "infidelity_bound": infidelity_bound(x_measured, n, squeezing),
        "tvd_bound": tvd_bound(x_measured, n, squeezing),
    }
    if policy is not None and lattice.n_modes <= enumerate_modes_cap:
        budget = min(int(policy.n_total_max), enumerate_budget_cap)
        clamped = TruncationPolicy(
            epsilon=policy.epsilon,
            n_total_max=budget,
            n_mode_max=min(int(policy.n_mode_max), budget),
        )
        exact = enumerate_gbs_distribution(quad_to_complex(v_out), clamped)
        block_dists = [
            enumerate_gbs_distribution(quad_to_complex(block), clamped)
            for block in blocks.blocks
        ]
        approx = product_distribution(
            block_dists,
            lattice.sublattices,
            lattice.n_modes,
            budget=budget,
        )
        report["exact_mass"] = exact.mass
        report["approx_mass"] = approx.mass
        report["tvd_table"] = tvd(exact, approx)
        report["tvd_upper"] = tvd_upper_bound(exact, approx)
    return report


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj)!r}")


def write_json(path, payload) -> None:
    """Write a report as pretty JSON (numpy types converted)."""
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def write_csv(path, fieldnames, rows, config: dict | None = None) -> None:
    """Write rows as CSV, preceded by a ``# config:`` comment line."""
    with open(path, "w", newline="") as fh:
        if config is not None:
            fh.write(
                "# config: "
                + json.dumps(config, sort_keys=True, default=_json_default)
                + "\n"
            )
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
