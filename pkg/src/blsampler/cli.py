"""Command-line front end: configure, sample, diagnose, emit artifacts.

Modes
-----
``sample-exact``      chain-rule sampling of the full Gaussian state
``sample-approx``     per-sublattice sampling of the block approximation
``sample-fock``       distinguishable-particle single-photon sampling
``diagnose-leakage``  per-circuit leakage rates vs the diffusive bound (CSV)
``diagnose-walk``     mean column-weight profile vs the averaging map (CSV)
``diagnose-bounds``   full approximation-error chain per instance (JSON)
``kernels-selftest``  oracle-equivalence suite for the matrix kernels

Sampling artifacts are JSON lines: the first line carries the full
normalized config, each following line one sample
``{"sample_id", "counts"|"clicks", "sampler", "seed", "stream"}``.
Rerunning a sampling mode with the same config and seed reproduces the
file byte for byte: sample i draws from its own ``default_rng([seed, i])``
substream, so the output is independent of worker count and ordering.

Exit codes: 0 success, 2 invalid config, 3 oracle/kernel scale exceeded,
4 numerical conditioning or sampling failure.  stderr receives JSON
error objects only (enabling ``BLS_LOG`` adds human-readable log lines).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .diagnostics import (
    leakage_rate,
    random_walk_profile,
    theorem_bound_report,
    write_csv,
    write_json,
)
from .errors import (
    ConditioningError,
    ConfigurationError,
    SamplingError,
    SizeCapError,
)
from .gaussian import quad_to_complex, state_covariance
from .kernels import run_selftest
from .lattice import accumulate_unitary, build_lattice, sample_random_circuit
from .samplers import (
    BlockApproxSampler,
    ChainRuleEngine,
    distinguishable_fock_sample,
    threshold_coarse_grain,
    truncation_threshold,
)

__all__ = ["main", "validate", "run"]

logger = logging.getLogger(__name__)

SAMPLING_MODES = ("sample-exact", "sample-approx", "sample-fock")
DIAGNOSE_MODES = ("diagnose-leakage", "diagnose-walk", "diagnose-bounds")
ALL_MODES = SAMPLING_MODES + DIAGNOSE_MODES + ("kernels-selftest",)

# --samples means: samples per run, circuits, trials, or instances.
_DEFAULT_SAMPLES = {
    "sample-exact": 100,
    "sample-approx": 100,
    "sample-fock": 100,
    "diagnose-leakage": 100,
    "diagnose-walk": 1000,
    "diagnose-bounds": 1,
}

EXIT_INVALID_CONFIG = 2
EXIT_SIZE_CAP = 3
EXIT_NUMERICAL = 4


class _Parser(argparse.ArgumentParser):
    """Argument parser whose failures keep stderr machine-readable."""

    def error(self, message):
        _emit_error("invalid-config", message)
        raise SystemExit(EXIT_INVALID_CONFIG)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="bls",
        description="Sample photon-number outcomes of random linear-optical "
        "circuits and check the approximation bounds that justify the fast "
        "samplers.",
    )
    parser.add_argument("legacy", nargs="*", help=argparse.SUPPRESS)
    parser.add_argument("--mode", choices=ALL_MODES, help="what to run")
    parser.add_argument("--dim", type=int, help="lattice dimension d >= 1")
    parser.add_argument("--sources", type=int, help="number of sources N >= 1")
    parser.add_argument(
        "--sublattice-edge",
        type=int,
        dest="edge",
        help="modes per sublattice edge L >= 1 (M = N * L^d)",
    )
    parser.add_argument("--depth", type=int, help="brickwork rounds D >= 0")
    parser.add_argument("--squeezing", type=float, help="squeezing r >= 0")
    parser.add_argument(
        "--source-type",
        choices=("squeezed", "fock"),
        dest="source_type",
        help="input state per source (sample-fock implies fock)",
    )
    parser.add_argument(
        "--detector",
        choices=("pnr", "threshold"),
        help="photon-number-resolving or threshold clicks (default pnr)",
    )
    parser.add_argument(
        "--epsilon", type=float, help="truncation tail target (default 1e-6)"
    )
    parser.add_argument(
        "--samples",
        type=int,
        help="samples / circuits / trials / instances depending on mode",
    )
    parser.add_argument("--seed", type=int, help="base RNG seed")
    parser.add_argument(
        "--threads", type=int, help="worker threads for sampling (default 1)"
    )
    parser.add_argument("--out", help="artifact path")
    return parser


def validate(args) -> tuple[dict, list[str]]:
    """Normalize a parsed command line; collect every violation."""
    problems: list[str] = []
    mode = args.mode
    legacy = list(args.legacy or [])
    if legacy == ["kernels", "selftest"]:
        if mode is None:
            mode = "kernels-selftest"
        elif mode != "kernels-selftest":
            problems.append("positional 'kernels selftest' contradicts --mode")
    elif legacy:
        problems.append(f"unrecognized arguments: {' '.join(legacy)}")
    if mode is None:
        problems.append("--mode is required")
        return {}, problems

    config: dict = {"mode": mode}
    if mode == "kernels-selftest":
        config["out"] = args.out
        for name, label in [
            ("dim", "--dim"),
            ("sources", "--sources"),
            ("edge", "--sublattice-edge"),
            ("depth", "--depth"),
            ("squeezing", "--squeezing"),
            ("samples", "--samples"),
            ("seed", "--seed"),
        ]:
            if getattr(args, name) is not None:
                problems.append(f"{label} has no effect in kernels-selftest")
        return config, problems

    source_type = args.source_type
    if mode == "sample-fock":
        if source_type == "squeezed":
            problems.append("sample-fock requires --source-type fock")
        source_type = "fock"
    elif source_type is None:
        source_type = "squeezed"

    squeezing = args.squeezing
    if source_type == "fock":
        if squeezing is not None:
            problems.append("squeezing incompatible with fock sources")
        squeezing = None
    elif mode in ("sample-exact", "sample-approx", "diagnose-bounds"):
        if squeezing is None:
            problems.append(f"--squeezing is required for {mode}")
        elif squeezing < 0:
            problems.append("--squeezing must be >= 0")
    elif squeezing is not None and squeezing < 0:
        problems.append("--squeezing must be >= 0")

    detector = args.detector or "pnr"
    if detector == "threshold" and source_type != "squeezed":
        problems.append("threshold detection requires squeezed sources")

    for name, label, least in [
        ("dim", "--dim", 1),
        ("sources", "--sources", 1),
        ("edge", "--sublattice-edge", 1),
        ("depth", "--depth", 0),
    ]:
        value = getattr(args, name)
        if value is None:
            if not (mode == "diagnose-walk" and name == "sources"):
                problems.append(f"{label} is required for {mode}")
        elif value < least:
            problems.append(f"{label} must be >= {least}")

    epsilon = args.epsilon if args.epsilon is not None else 1e-6
    if not 0.0 < epsilon < 1.0:
        problems.append("--epsilon must lie in (0, 1)")

    n_samples = args.samples if args.samples is not None else _DEFAULT_SAMPLES[mode]
    if n_samples < 1:
        problems.append("--samples must be >= 1")

    seed = args.seed
    if seed is None:
        if mode in SAMPLING_MODES:
            problems.append("--seed is required for sampling modes")
        else:
            seed = 0
    elif seed < 0:
        problems.append("--seed must be >= 0")

    threads = args.threads if args.threads is not None else 1
    if threads < 1:
        problems.append("--threads must be >= 1")

    if args.out is None:
        problems.append("--out is required")

    config.update(
        dim=args.dim,
        n_sources=args.sources,
        edge=args.edge,
        depth=args.depth,
        squeezing=squeezing,
        source_type=source_type,
        detector=detector,
        epsilon=epsilon,
        n_samples=n_samples,
        seed=seed,
        threads=threads,
        out=args.out,
    )
    if problems:
        return config, problems

    if mode == "diagnose-walk" and args.sources is None:
        config["n_sources"] = 1
    try:
        lattice = build_lattice(config["dim"], config["n_sources"], config["edge"])
    except ConfigurationError as exc:
        problems.extend(exc.problems)
        return config, problems
    except ValueError as exc:
        problems.append(str(exc))
        return config, problems
    config.update(
        n_modes=lattice.n_modes,
        k_scale=lattice.k_scale,
        gamma_scale=lattice.gamma_scale,
    )
    if source_type == "squeezed" and squeezing is not None:
        policy = truncation_threshold(config["n_sources"], squeezing, epsilon)
        config.update(
            n_total_max=policy.n_total_max, n_mode_max=policy.n_mode_max
        )
    return config, problems


def _json_line(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _embedded(config: dict, **extra) -> dict:
    # The artifact describes the experiment, not the run's plumbing: the
    # output path and worker count cannot influence content (samples are
    # seeded per stream and written in order), so the same experiment
    # produces the same bytes wherever and however it executes.
    out = {k: v for k, v in config.items() if k not in ("out", "threads")}
    out.update(extra)
    return out


def _run_sampling(config: dict) -> str:
    lattice = build_lattice(config["dim"], config["n_sources"], config["edge"])
    circuit = sample_random_circuit(
        lattice, config["depth"], np.random.default_rng([config["seed"]])
    )
    mode = config["mode"]
    if mode == "sample-exact":
        policy = truncation_threshold(
            config["n_sources"], config["squeezing"], config["epsilon"]
        )
        engine = ChainRuleEngine(
            quad_to_complex(state_covariance(circuit, lattice, config["squeezing"])),
            policy,
        )
        draw = engine.sample
        sampler_name = "exact"
    elif mode == "sample-approx":
        policy = truncation_threshold(
            config["n_sources"], config["squeezing"], config["epsilon"]
        )
        block_sampler = BlockApproxSampler(
            circuit, lattice, config["squeezing"], policy
        )
        draw = block_sampler.sample
        sampler_name = "approx"
    else:
        unitary = accumulate_unitary(circuit)
        draw = lambda rng: distinguishable_fock_sample(unitary, lattice, rng)
        sampler_name = "distinguishable"

    seed = config["seed"]
    threshold = config["detector"] == "threshold"

    def one(i: int) -> str:
        counts = draw(np.random.default_rng([seed, i]))
        record = {"sample_id": i, "sampler": sampler_name, "seed": seed, "stream": i}
        if threshold:
            record["clicks"] = [bool(c) for c in threshold_coarse_grain(counts)]
        else:
            record["counts"] = [int(c) for c in counts]
        return _json_line(record)

    n = config["n_samples"]
    with open(config["out"], "w") as fh:
        fh.write(_json_line({"config": _embedded(config)}))
        if config["threads"] > 1:
            with ThreadPoolExecutor(max_workers=config["threads"]) as pool:
                for line in pool.map(one, range(n)):
                    fh.write(line)
        else:
            for i in range(n):
                fh.write(one(i))
    return f"wrote {n} samples to {config['out']}"


def _run_leakage(config: dict) -> str:
    lattice = build_lattice(config["dim"], config["n_sources"], config["edge"])
    rng = np.random.default_rng([config["seed"]])
    eta_cols = [f"eta_{i}" for i in range(lattice.n_sources)]
    rows = []
    for index in range(config["n_samples"]):
        circuit = sample_random_circuit(lattice, config["depth"], rng)
        report = leakage_rate(accumulate_unitary(circuit), lattice, config["depth"])
        row = {"circuit": index, "eta_max": report.eta_max, "bound": report.bound}
        row.update(zip(eta_cols, report.per_source_eta))
        rows.append(row)
    write_csv(
        config["out"],
        ["circuit", "eta_max", "bound", *eta_cols],
        rows,
        config=_embedded(config),
    )
    return f"measured {len(rows)} circuits -> {config['out']}"


def _run_walk(config: dict) -> str:
    profile = random_walk_profile(
        config["dim"],
        config["n_modes"],
        config["depth"],
        config["n_samples"],
        np.random.default_rng([config["seed"]]),
    )
    rows = []
    for t in range(profile.empirical.shape[0]):
        for j in range(profile.empirical.shape[1]):
            rows.append(
                {
                    "depth": t,
                    "mode": j,
                    "empirical": profile.empirical[t, j],
                    "stderr": profile.stderr[t, j],
                    "theory": profile.theory[t, j],
                }
            )
    write_csv(
        config["out"],
        ["depth", "mode", "empirical", "stderr", "theory"],
        rows,
        config=_embedded(config, walk_source=profile.source),
    )
    return f"profiled {config['n_samples']} trials -> {config['out']}"


def _run_bounds(config: dict) -> str:
    lattice = build_lattice(config["dim"], config["n_sources"], config["edge"])
    rng = np.random.default_rng([config["seed"]])
    policy = truncation_threshold(
        config["n_sources"], config["squeezing"], config["epsilon"]
    )
    reports = []
    for index in range(config["n_samples"]):
        circuit = sample_random_circuit(lattice, config["depth"], rng)
        report = theorem_bound_report(
            circuit, lattice, config["squeezing"], policy=policy
        )
        reports.append({"instance": index, **report})
    write_json(config["out"], {"config": _embedded(config), "reports": reports})
    return f"evaluated {len(reports)} instances -> {config['out']}"


def _run_selftest(config: dict) -> tuple[str, int]:
    report = run_selftest()
    if config.get("out"):
        write_json(config["out"], report)
    n_checks = len(report["checks"])
    n_ok = sum(1 for c in report["checks"] if c["passed"])
    status = "PASS" if report["passed"] else "FAIL"
    return f"{status} {n_ok}/{n_checks} kernel checks", (
        0 if report["passed"] else EXIT_NUMERICAL
    )


def run(config: dict) -> int:
    """Execute a validated config; print the one-line summary."""
    start = time.perf_counter()
    code = 0
    if config["mode"] in SAMPLING_MODES:
        summary = _run_sampling(config)
    elif config["mode"] == "diagnose-leakage":
        summary = _run_leakage(config)
    elif config["mode"] == "diagnose-walk":
        summary = _run_walk(config)
    elif config["mode"] == "diagnose-bounds":
        summary = _run_bounds(config)
    else:
        summary, code = _run_selftest(config)
    elapsed = time.perf_counter() - start
    print(f"{config['mode']}: {summary} in {elapsed:.2f}s")
    return code


def _emit_error(kind: str, message: str, **extra) -> None:
    payload = {"error": kind, "message": message}
    payload.update(extra)
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def main(argv=None) -> int:
    level = os.environ.get("BLS_LOG")
    if level:
        logging.basicConfig(
            stream=sys.stderr,
            level=getattr(logging, level.upper(), logging.WARNING),
            format="%(levelname)s %(name)s: %(message)s",
        )
    args = _build_parser().parse_args(argv)
    config, problems = validate(args)
    if problems:
        _emit_error("invalid-config", "configuration rejected", problems=problems)
        return EXIT_INVALID_CONFIG
    try:
        return run(config)
    except ConfigurationError as exc:
        _emit_error("invalid-config", str(exc), problems=exc.problems)
        return EXIT_INVALID_CONFIG
    except SizeCapError as exc:
        _emit_error("size-cap", str(exc))
        return EXIT_SIZE_CAP
    except (ConditioningError, SamplingError) as exc:
        _emit_error("numerical", str(exc))
        return EXIT_NUMERICAL
    except ValueError as exc:
        _emit_error("invalid-config", str(exc))
        return EXIT_INVALID_CONFIG


if __name__ == "__main__":
    sys.exit(main())
